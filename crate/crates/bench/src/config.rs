use std::collections::BTreeMap;

use crate::error::{BenchError, Result};
use crate::gen::{DEMOGRAPHICS_ROWS, SALES_ROWS};
use crate::timing::RunPlan;

pub const DEFAULT_SEED: u64 = 42;

/// Scale and repetition knobs shared by all suites.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub plan: RunPlan,
    pub sales_rows: usize,
    pub demographics_rows: usize,
    /// Rows per column in the compression micro cases.
    pub column_rows: usize,
    /// Rows per table in the per-type compression cases.
    pub compression_rows: usize,
    /// Rows in the selectivity sweep; split into 16 batches.
    pub selectivity_rows: usize,
    pub vector_count: usize,
    pub vector_dim: u32,
    pub vector_queries: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: DEFAULT_SEED,
            plan: RunPlan::default(),
            sales_rows: SALES_ROWS,
            demographics_rows: DEMOGRAPHICS_ROWS,
            column_rows: 65_536,
            compression_rows: 100_000,
            selectivity_rows: 16 * 65_536,
            vector_count: 1000,
            vector_dim: 128,
            vector_queries: 100,
        }
    }
}

/// Keys accepted by [`BenchConfig::set`].
pub const KEYS: [&str; 12] = [
    "seed",
    "warmup",
    "runs",
    "sales_rows",
    "demographics_rows",
    "column_rows",
    "compression_rows",
    "selectivity_rows",
    "vector_count",
    "vector_dim",
    "vector_queries",
    "quick",
];

impl BenchConfig {
    /// Default scale with one measured run and no warm-up.
    pub fn quick() -> Self {
        BenchConfig { plan: RunPlan { warmup: 0, runs: 1 }, ..Default::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || value.trim().parse::<u64>().map_err(|_| BenchError::config(format!("`{key}` needs a non-negative integer, got `{value}`")));
        match key {
            "seed" => self.seed = num()?,
            "warmup" => self.plan.warmup = num()? as usize,
            "runs" => self.plan.runs = num()? as usize,
            "sales_rows" => self.sales_rows = num()? as usize,
            "demographics_rows" => self.demographics_rows = num()? as usize,
            "column_rows" => self.column_rows = num()? as usize,
            "compression_rows" => self.compression_rows = num()? as usize,
            "selectivity_rows" => self.selectivity_rows = num()? as usize,
            "vector_count" => self.vector_count = num()? as usize,
            "vector_dim" => self.vector_dim = num()? as u32,
            "vector_queries" => self.vector_queries = num()? as usize,
            "quick" => {
                if matches!(value.trim(), "true" | "1" | "yes") {
                    self.plan = RunPlan { warmup: 0, runs: 1 };
                }
            }
            _ => return Err(BenchError::config(format!("unknown bench setting `{key}` (expected one of {})", KEYS.join(", ")))),
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.plan.runs == 0 {
            return Err(BenchError::config("runs must be at least 1"));
        }
        if self.vector_dim == 0 || self.vector_count == 0 {
            return Err(BenchError::config("vector suites need a positive count and dimension"));
        }
        if self.selectivity_rows < 16 {
            return Err(BenchError::config("selectivity_rows must allow 16 batches"));
        }
        Ok(())
    }

    /// Settings as strings, for report headers.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("warmup", self.plan.warmup.to_string());
        put("runs", self.plan.runs.to_string());
        put("sales_rows", self.sales_rows.to_string());
        put("demographics_rows", self.demographics_rows.to_string());
        put("column_rows", self.column_rows.to_string());
        put("compression_rows", self.compression_rows.to_string());
        put("selectivity_rows", self.selectivity_rows.to_string());
        put("vector_count", self.vector_count.to_string());
        put("vector_dim", self.vector_dim.to_string());
        put("vector_queries", self.vector_queries.to_string());
        m
    }
}
