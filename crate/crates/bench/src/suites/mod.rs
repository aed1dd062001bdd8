//! Benchmark suites. Each validates its results against an oracle before
//! reporting timings, and records the outcome as checks in the report.

pub mod compression;
pub mod selectivity;
pub mod subexpr;
pub mod vectors;

use std::str::FromStr;

use colf::container::FileFooter;
use colf::{write_table, ColfFile, PlainColumns, WriteOptions};

use crate::config::BenchConfig;
use crate::error::{BenchError, Result};
use crate::report::{Report, Sizes};

pub use compression::suite_compression;
pub use selectivity::suite_selectivity;
pub use subexpr::suite_subexpressions;
pub use vectors::suite_vectors;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Compression,
    Selectivity,
    Subexpr,
    Vectors,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Compression, Suite::Selectivity, Suite::Subexpr, Suite::Vectors];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Compression => "compression",
            Suite::Selectivity => "selectivity",
            Suite::Subexpr => "subexpr",
            Suite::Vectors => "vectors",
        }
    }

    pub fn run(self, config: &BenchConfig) -> Result<Report> {
        config.validate()?;
        match self {
            Suite::Compression => suite_compression(config),
            Suite::Selectivity => suite_selectivity(config),
            Suite::Subexpr => suite_subexpressions(config),
            Suite::Vectors => suite_vectors(config),
        }
    }
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            BenchError::config(format!("unknown suite `{s}` (expected compression, selectivity, subexpr or vectors)"))
        })
    }
}

pub(crate) fn write_file(table: &PlainColumns, opts: &WriteOptions) -> Result<ColfFile<Vec<u8>>> {
    let mut bytes = Vec::new();
    write_table(&table.schema, &table.columns, opts, &mut bytes)?;
    Ok(ColfFile::open(bytes)?)
}

/// Encoded and stored bytes of `columns` across all batches.
pub(crate) fn column_sizes(footer: &FileFooter, columns: &[usize], raw: u64) -> Sizes {
    let mut s = Sizes { raw, ..Default::default() };
    for b in &footer.batches {
        for &j in columns {
            s.encoded += b.chunks[j].uncompressed_bytes;
            s.compressed += b.chunks[j].stored_bytes();
        }
    }
    s
}
