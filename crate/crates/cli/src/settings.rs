//! `key = value` config files. Values from a file sit under explicit flags.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, Result};

/// Keys understood outside the bench settings.
pub const COMMAND_KEYS: [&str; 4] = ["policy", "codec", "batch_rows", "strategy"];

pub const SEED_ENV: &str = "COLF_SEED";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Lines are `key = value`; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let k = k.trim().replace('-', "_");
            if !COMMAND_KEYS.contains(&k.as_str()) && !colf_bench::config::KEYS.contains(&k.as_str()) {
                return Err(CliError::usage(format!("config line {}: unknown key `{k}`", i + 1)));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
                Settings::parse(&text)
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Bench settings in file order of keys.
    pub fn bench_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| colf_bench::config::KEYS.contains(&k.as_str()) && k.as_str() != "seed")
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `flag`, else `env`, else the file, else the default.
    pub fn seed(&self, flag: Option<u64>, env: Option<&str>) -> Result<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        let parse = |src: &str, v: &str| {
            v.trim().parse::<u64>().map_err(|_| CliError::usage(format!("{src} must be a non-negative integer, got `{v}`")))
        };
        if let Some(v) = env {
            return parse(SEED_ENV, v);
        }
        match self.get("seed") {
            Some(v) => parse("config seed", v),
            None => Ok(colf_bench::DEFAULT_SEED),
        }
    }

    /// `flag`, else the parsed file value, else `None`.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::usage(format!("config `{key}`: {e}"))))
            .transpose()
    }
}
