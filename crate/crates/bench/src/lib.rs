//! Workloads and benchmark suites for COLF: deterministic table
//! generators shaped like retail sales and customer demographics, CSV
//! ingestion, a row-scan reference executor, and suites that report sizes,
//! decode counters and timings as JSON or CSV.

pub mod config;
pub mod csvio;
pub mod differential;
pub mod error;
pub mod gen;
pub mod reference;
pub mod report;
pub mod suites;
pub mod timing;
pub mod workload;

pub use config::{BenchConfig, DEFAULT_SEED};
pub use csvio::{checksum, ingest_csv, ingest_csv_path, render_csv, write_csv};
pub use error::{BenchError, Result};
pub use gen::{gen_selection, gen_table, ColumnSpec, Generator, TableSpec};
pub use reference::reference_query;
pub use report::{emit_report, parse_report, Report, ReportFormat};
pub use suites::Suite;
