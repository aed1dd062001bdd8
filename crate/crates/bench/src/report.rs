//! Machine-readable suite reports.
//!
//! The JSON layout is described by `report.schema.json` (see
//! [`REPORT_JSON_SCHEMA`]) and versioned by [`REPORT_SCHEMA_VERSION`].
//! Fields serialize in declaration order and maps are ordered, so two runs
//! with the same seed differ only in `timings` and in metrics whose names
//! end in `_seconds` or `_wall`.

use std::collections::BTreeMap;

use colf::DecodeCounts;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const REPORT_JSON_SCHEMA: &str = include_str!("../report.schema.json");

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sizes {
    /// Canonical CSV rendering of the data.
    pub raw: u64,
    /// Encoded bytes before block compression.
    pub encoded: u64,
    /// Bytes stored after block compression.
    pub compressed: u64,
}

/// Wall-clock seconds. Absent fields do not apply to the case.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseTimings {
    pub load: Option<f64>,
    pub compute: Option<f64>,
    pub total: Option<f64>,
    /// Every measured run of `total`, in order.
    pub runs: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub config: BTreeMap<String, String>,
    pub sizes: Option<Sizes>,
    pub decode: Option<DecodeCounts>,
    pub timings: CaseTimings,
    /// Hex SHA-256 of the result's canonical CSV, for cases that produce rows.
    pub checksum: Option<String>,
    /// Suite-specific numbers.
    pub metrics: BTreeMap<String, f64>,
}

impl Case {
    pub fn new(name: impl Into<String>) -> Self {
        Case { name: name.into(), ..Default::default() }
    }

    pub fn config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.into(), value);
        self
    }
}

/// A correctness assertion evaluated by the suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub metadata: BTreeMap<String, String>,
    pub cases: Vec<Case>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn new(suite: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("timing".into(), "median of measured runs after warm-up; wall clock".into());
        metadata.insert("cache".into(), "warm only; cold-cache runs need manual page-cache eviction".into());
        metadata.insert("format_version".into(), colf::container::footer::FORMAT_VERSION.to_string());
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            suite: suite.into(),
            seed,
            config,
            metadata,
            cases: Vec::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        self.passed &= passed;
        passed
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn case(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }

    /// The report with every timing zeroed, for rerun comparisons.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.cases {
            c.timings = CaseTimings::default();
            c.metrics.retain(|k, _| !is_timing_metric(k));
        }
        r
    }
}

pub fn is_timing_metric(name: &str) -> bool {
    name.ends_with("_seconds") || name.ends_with("_wall")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(crate::error::BenchError::config(format!("unknown report format `{s}` (expected json or csv)"))),
        }
    }
}

const CSV_COLUMNS: [&str; 21] = [
    "suite",
    "case",
    "config",
    "raw_bytes",
    "encoded_bytes",
    "compressed_bytes",
    "values_decoded",
    "keys_decoded",
    "pages_read",
    "pages_skipped",
    "chunks_opened",
    "chunks_skipped",
    "batches_skipped",
    "bytes_read",
    "columns_touched",
    "load_seconds",
    "compute_seconds",
    "total_seconds",
    "runs",
    "checksum",
    "metrics",
];

fn join<K: std::fmt::Display, V: std::fmt::Display>(m: &BTreeMap<K, V>) -> String {
    m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Serializes `r`. CSV holds one row per case under a fixed header; checks
/// are JSON-only.
pub fn emit_report(r: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("reports always serialize");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("writing to a Vec cannot fail");
            for c in &r.cases {
                let s = c.sizes.as_ref();
                let d = c.decode.as_ref();
                let row = [
                    r.suite.clone(),
                    c.name.clone(),
                    join(&c.config),
                    opt(s.map(|s| s.raw)),
                    opt(s.map(|s| s.encoded)),
                    opt(s.map(|s| s.compressed)),
                    opt(d.map(|d| d.values_decoded)),
                    opt(d.map(|d| d.keys_decoded)),
                    opt(d.map(|d| d.pages_read)),
                    opt(d.map(|d| d.pages_skipped)),
                    opt(d.map(|d| d.chunks_opened)),
                    opt(d.map(|d| d.chunks_skipped)),
                    opt(d.map(|d| d.batches_skipped)),
                    opt(d.map(|d| d.bytes_read)),
                    d.map(|d| d.columns_touched.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")).unwrap_or_default(),
                    opt(c.timings.load),
                    opt(c.timings.compute),
                    opt(c.timings.total),
                    c.timings.runs.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
                    c.checksum.clone().unwrap_or_default(),
                    join(&c.metrics),
                ];
                w.write_record(&row).expect("writing to a Vec cannot fail");
            }
            w.into_inner().expect("flushing a Vec cannot fail")
        }
    }
}

/// Parses and structurally validates a JSON report: every required field
/// present with the right type, no unknown fields, matching schema version.
pub fn parse_report(json: &[u8]) -> Result<Report> {
    let r: Report = serde_json::from_slice(json)?;
    if r.schema_version != REPORT_SCHEMA_VERSION {
        return Err(crate::error::BenchError::config(format!(
            "report schema version {} is not {REPORT_SCHEMA_VERSION}",
            r.schema_version
        )));
    }
    Ok(r)
}
