//! Per-chunk encoding selection modelled on the defaults of common formats.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::stats::ColumnStats;
use crate::types::ColumnType;

use super::EncodingKind;

/// Dictionary encoding is abandoned above this distinct/non-null ratio.
pub const DICT_FALLBACK_RATIO: f64 = 0.8;

/// Dictionary encoding is abandoned when the dictionary page would exceed this.
pub const DICT_PAGE_LIMIT_BYTES: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Dictionary for every type, falling back to plain.
    ParquetLike,
    /// RLE integers, dictionary-RLE strings, plain floats.
    OrcLike,
    /// Plain everywhere; optionally dictionary strings.
    ArrowLike { dict_strings: bool },
}

impl Policy {
    pub const NAMES: [&'static str; 4] = ["parquet-like", "orc-like", "arrow-like", "arrow-like-dict"];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::ParquetLike => "parquet-like",
            Policy::OrcLike => "orc-like",
            Policy::ArrowLike { dict_strings: false } => "arrow-like",
            Policy::ArrowLike { dict_strings: true } => "arrow-like-dict",
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "parquet-like" => Policy::ParquetLike,
            "orc-like" => Policy::OrcLike,
            "arrow-like" => Policy::ArrowLike { dict_strings: false },
            "arrow-like-dict" => Policy::ArrowLike { dict_strings: true },
            other => {
                return Err(Error::Config(format!(
                    "unknown policy `{other}` (expected one of {})",
                    Policy::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn dictionary_worthwhile(s: &ColumnStats) -> bool {
    s.distinct_ratio() <= DICT_FALLBACK_RATIO && s.distinct_bytes + 5 <= DICT_PAGE_LIMIT_BYTES
}

/// Picks the encoding for one chunk. Dictionaries are order-preserving.
pub fn choose_encoding(ty: ColumnType, stats: &ColumnStats, policy: Policy) -> EncodingKind {
    let dict = EncodingKind::Dict { order_preserving: true };
    match policy {
        Policy::ParquetLike => {
            if dictionary_worthwhile(stats) {
                dict
            } else {
                EncodingKind::Plain
            }
        }
        Policy::OrcLike => match ty {
            ColumnType::Int32 | ColumnType::Int64 | ColumnType::Bool => EncodingKind::Rle,
            ColumnType::Utf8 if dictionary_worthwhile(stats) => {
                EncodingKind::DictRle { order_preserving: true }
            }
            _ => EncodingKind::Plain,
        },
        Policy::ArrowLike { dict_strings } => match ty {
            ColumnType::Utf8 if dict_strings => dict,
            _ => EncodingKind::Plain,
        },
    }
}

/// Looks up a policy by name and chooses an encoding.
pub fn choose_encoding_named(ty: ColumnType, stats: &ColumnStats, policy: &str) -> Result<EncodingKind> {
    Ok(choose_encoding(ty, stats, policy.parse()?))
}
