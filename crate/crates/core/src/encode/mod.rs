//! Lightweight encodings over column chunks.
//!
//! A chunk is split into pages of at most [`PAGE_VALUES`] values. Every page
//! is self-contained, so a single row can be decoded from one page. Null
//! slots keep a placeholder in the payload; the presence bitmap is
//! authoritative.

pub mod bitpack;
pub mod dict;
pub mod page;
pub mod policy;

use std::fmt;

use serde::Serialize;

use crate::bitvec::BitVector;
use crate::column::{Column, ColumnData};
use crate::error::{Error, Result};
use crate::stats::{compute_stats, ColumnStats};
use crate::types::{ColumnType, Value};

pub use bitpack::bits_needed;
pub use dict::{build_dictionary, dict_translate, Dictionary, KeyPredicate, KeyTranslation};
pub use page::PageReader;
pub use policy::{choose_encoding, Policy};

/// Values per data page.
pub const PAGE_VALUES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingKind {
    Plain,
    /// Raw non-negative integers (or bools) packed at `width` bits.
    BitPack { width: u8 },
    Dict { order_preserving: bool },
    /// (run length u32, value at native width) pairs.
    Rle,
    /// Runs over dictionary keys.
    DictRle { order_preserving: bool },
    /// Offsets from the chunk minimum, bit-packed.
    DeltaFor { reference: i64, width: u8 },
    /// Floats multiplied by 10^scale, stored as per-page frame-of-reference integers.
    ScaledInt { scale: u8 },
}

impl EncodingKind {
    pub fn is_dictionary(&self) -> bool {
        matches!(self, EncodingKind::Dict { .. } | EncodingKind::DictRle { .. })
    }

    pub fn order_preserving(&self) -> bool {
        matches!(
            self,
            EncodingKind::Dict { order_preserving: true } | EncodingKind::DictRle { order_preserving: true }
        )
    }

    /// Minimal bit-pack width for the chunk, `None` if it holds negatives.
    pub fn bitpack_for(stats: &ColumnStats) -> Option<EncodingKind> {
        let max = match &stats.max {
            Some(Value::Int32(v)) => *v as i64,
            Some(Value::Int64(v)) => *v,
            Some(Value::Bool(_)) => 1,
            None => 0,
            _ => return None,
        };
        let min = match &stats.min {
            Some(Value::Int32(v)) => *v as i64,
            Some(Value::Int64(v)) => *v,
            _ => 0,
        };
        (min >= 0).then(|| EncodingKind::BitPack { width: bits_needed(max as u64).max(1) })
    }

    /// Frame of reference anchored at the chunk minimum.
    pub fn delta_for(stats: &ColumnStats) -> Option<EncodingKind> {
        let (min, max) = match (&stats.min, &stats.max) {
            (Some(Value::Int32(a)), Some(Value::Int32(b))) => (*a as i64, *b as i64),
            (Some(Value::Int64(a)), Some(Value::Int64(b))) => (*a, *b),
            (None, None) => (0, 0),
            _ => return None,
        };
        let span = (max as i128 - min as i128) as u64;
        Some(EncodingKind::DeltaFor { reference: min, width: bits_needed(span) })
    }

    /// Whether the encoding can represent columns of type `ty`.
    pub fn supports(&self, ty: ColumnType) -> bool {
        match self {
            EncodingKind::Plain | EncodingKind::Dict { .. } | EncodingKind::DictRle { .. } => true,
            EncodingKind::BitPack { .. } | EncodingKind::Rle => {
                ty.is_integer() || ty == ColumnType::Bool
            }
            EncodingKind::DeltaFor { .. } => ty.is_integer(),
            EncodingKind::ScaledInt { .. } => {
                matches!(ty, ColumnType::Float64 | ColumnType::FixedVector(_))
            }
        }
    }

    pub(crate) fn validate(&self, ty: ColumnType) -> Result<()> {
        if !self.supports(ty) {
            return Err(Error::InvalidEncoding(format!("{self} cannot encode {ty} columns")));
        }
        match *self {
            EncodingKind::BitPack { width } if width == 0 || width > 64 => {
                Err(Error::InvalidEncoding(format!("bit-pack width {width} outside 1..=64")))
            }
            EncodingKind::DeltaFor { width, .. } if width > 64 => {
                Err(Error::InvalidEncoding(format!("frame-of-reference width {width} above 64")))
            }
            EncodingKind::ScaledInt { scale } if scale > 9 => {
                Err(Error::InvalidEncoding(format!("scale {scale} above 9")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingKind::Plain => f.write_str("plain"),
            EncodingKind::BitPack { width } => write!(f, "bitpack({width})"),
            EncodingKind::Dict { order_preserving: true } => f.write_str("dict(sorted)"),
            EncodingKind::Dict { order_preserving: false } => f.write_str("dict"),
            EncodingKind::Rle => f.write_str("rle"),
            EncodingKind::DictRle { order_preserving: true } => f.write_str("dict-rle(sorted)"),
            EncodingKind::DictRle { order_preserving: false } => f.write_str("dict-rle"),
            EncodingKind::DeltaFor { reference, width } => write!(f, "for({reference},{width})"),
            EncodingKind::ScaledInt { scale } => write!(f, "scaled-int({scale})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedPage {
    pub value_count: usize,
    pub bytes: Vec<u8>,
}

/// One column's encoded values for one row batch.
#[derive(Clone, Debug)]
pub struct EncodedChunk {
    pub column_type: ColumnType,
    pub kind: EncodingKind,
    /// `None` when the chunk has no nulls.
    pub presence: Option<BitVector>,
    pub dictionary: Option<Dictionary>,
    pub pages: Vec<EncodedPage>,
    pub value_count: usize,
    pub stats: ColumnStats,
}

impl EncodedChunk {
    /// Total bytes of data pages (dictionary and presence excluded).
    pub fn data_bytes(&self) -> usize {
        self.pages.iter().map(|p| p.bytes.len()).sum()
    }

    pub fn dictionary_bytes(&self) -> usize {
        self.dictionary.as_ref().map_or(0, |d| d.to_page().len())
    }

    pub fn presence_bytes(&self) -> usize {
        self.presence.as_ref().map_or(0, |p| p.len().div_ceil(8))
    }

    /// Bytes across data, dictionary and presence pages.
    pub fn encoded_bytes(&self) -> usize {
        self.data_bytes() + self.dictionary_bytes() + self.presence_bytes()
    }

    pub fn page_reader(&self, page: usize) -> Result<PageReader<'_>> {
        let p = self.pages.get(page).ok_or(Error::Index { index: page, len: self.pages.len() })?;
        PageReader::new(self.column_type, self.kind, self.dictionary.as_ref(), &p.bytes, p.value_count)
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.presence.as_ref().is_none_or(|p| p.get(i))
    }
}

/// Splits `0..n` into page ranges.
pub fn page_ranges(n: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    (0..n.div_ceil(PAGE_VALUES)).map(move |p| p * PAGE_VALUES..((p + 1) * PAGE_VALUES).min(n))
}

/// Encodes a decoded column as one chunk.
pub fn encode_column(col: &Column, kind: EncodingKind) -> Result<EncodedChunk> {
    encode_column_with_stats(col, kind, compute_stats(col))
}

/// As [`encode_column`], reusing stats already computed over `col`.
pub fn encode_column_with_stats(col: &Column, kind: EncodingKind, stats: ColumnStats) -> Result<EncodedChunk> {
    let ty = col.column_type();
    kind.validate(ty)?;
    let n = col.len();
    let presence = (stats.null_count > 0).then(|| col.validity.clone());

    let mut pages = Vec::with_capacity(n.div_ceil(PAGE_VALUES));
    let mut dictionary = None;
    if kind.is_dictionary() {
        let (dict, keys) = build_dictionary(col, kind.order_preserving())?;
        let width = dict.key_width();
        for r in page_ranges(n) {
            let mut bytes = Vec::new();
            page::encode_key_page(matches!(kind, EncodingKind::DictRle { .. }), &keys[r.clone()], width, &mut bytes);
            pages.push(EncodedPage { value_count: r.len(), bytes });
        }
        dictionary = Some(dict);
    } else {
        for r in page_ranges(n) {
            let mut bytes = Vec::new();
            page::encode_page(kind, &col.data, &col.validity, r.start, r.end, &mut bytes)?;
            pages.push(EncodedPage { value_count: r.len(), bytes });
        }
    }
    Ok(EncodedChunk { column_type: ty, kind, presence, dictionary, pages, value_count: n, stats })
}

/// Encodes a value sequence of one type. All-null sequences are treated as
/// `Int64` unless `kind` implies otherwise; use [`encode_column`] to pin a type.
pub fn encode_chunk(values: &[Value], kind: EncodingKind) -> Result<EncodedChunk> {
    let ty = match values.iter().find_map(Value::column_type) {
        Some(t) => t,
        None if matches!(kind, EncodingKind::ScaledInt { .. }) => ColumnType::Float64,
        None => ColumnType::Int64,
    };
    encode_column(&Column::from_values(ty, values)?, kind)
}

/// Decodes a whole chunk.
pub fn decode_column(c: &EncodedChunk) -> Result<Column> {
    let mut data = ColumnData::with_capacity(c.column_type, c.value_count);
    let mut total = 0;
    for p in 0..c.pages.len() {
        let page = c.page_reader(p)?.decode_all()?;
        total += page.len();
        data.extend_from(&page);
    }
    if total != c.value_count {
        return Err(Error::corrupt_chunk(format!("pages hold {total} values, chunk declares {}", c.value_count)));
    }
    let validity = match &c.presence {
        Some(p) if p.len() == c.value_count => p.clone(),
        Some(p) => {
            return Err(Error::corrupt_chunk(format!("presence covers {} rows, chunk has {}", p.len(), c.value_count)))
        }
        None => BitVector::ones(c.value_count),
    };
    Column::new(data, validity)
}

pub fn decode_chunk(c: &EncodedChunk) -> Result<Vec<Value>> {
    Ok(decode_column(c)?.to_values())
}

/// Decodes the value at row `i`, touching at most one page.
pub fn decode_at(c: &EncodedChunk, i: usize) -> Result<Value> {
    if i >= c.value_count {
        return Err(Error::Index { index: i, len: c.value_count });
    }
    if !c.is_valid(i) {
        return Ok(Value::Null);
    }
    let reader = c.page_reader(i / PAGE_VALUES)?;
    let mut out = ColumnData::with_capacity(c.column_type, 1);
    reader.push_at(i % PAGE_VALUES, &mut out)?;
    Ok(out.value(0))
}

/// Rounds every element to `scale` decimal digits so that the result is
/// accepted by `ScaledInt { scale }`. Negative zero becomes zero.
pub fn quantize(v: f64, scale: u8) -> f64 {
    let p = page::pow10(scale);
    (v * p).round() / p + 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|x| Value::Int64(*x)).collect()
    }

    #[test]
    fn rle_runs_layout() {
        let c = encode_chunk(&ints(&[1, 1, 1, 2, 2]), EncodingKind::Rle).unwrap();
        let mut want = Vec::new();
        for (len, v) in [(3u32, 1i64), (2, 2)] {
            want.extend_from_slice(&len.to_le_bytes());
            want.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(c.pages[0].bytes, want);
        assert_eq!(decode_chunk(&c).unwrap(), ints(&[1, 1, 1, 2, 2]));
    }

    #[test]
    fn dict_layout() {
        let v: Vec<Value> = ["a", "b", "a"].iter().map(|s| Value::str(*s)).collect();
        let c = encode_chunk(&v, EncodingKind::Dict { order_preserving: false }).unwrap();
        let d = c.dictionary.as_ref().unwrap();
        assert_eq!((d.value(0), d.value(1)), (Value::str("a"), Value::str("b")));
        assert_eq!(c.page_reader(0).unwrap().keys().unwrap(), vec![0, 1, 0]);
    }

    #[test]
    fn delta_for_layout() {
        let stats = crate::stats::compute_stats_values(&ints(&[100, 101, 103])).unwrap();
        let kind = EncodingKind::delta_for(&stats).unwrap();
        // width oracle: bits(103 - 100) = bits(3) = 2
        assert_eq!(kind, EncodingKind::DeltaFor { reference: 100, width: 2 });
        let c = encode_chunk(&ints(&[100, 101, 103]), kind).unwrap();
        let mut offsets = Vec::new();
        bitpack::unpack(&c.pages[0].bytes, 2, 3, &mut offsets);
        assert_eq!(offsets, vec![0, 1, 3]);
    }

    #[test]
    fn bitpack_payload_decodes() {
        let c = EncodedChunk {
            column_type: ColumnType::Int64,
            kind: EncodingKind::BitPack { width: 3 },
            presence: None,
            dictionary: None,
            pages: vec![EncodedPage { value_count: 8, bytes: vec![0b1000_1000, 0b1100_0110, 0b1111_1010] }],
            value_count: 8,
            stats: crate::stats::compute_stats_values(&ints(&[0])).unwrap(),
        };
        assert_eq!(decode_chunk(&c).unwrap(), ints(&[0, 1, 2, 3, 4, 5, 6, 7]));
    }

    #[test]
    fn decode_at_examples() {
        let c = encode_chunk(&ints(&[10, 20, 30]), EncodingKind::Plain).unwrap();
        assert_eq!(decode_at(&c, 1).unwrap(), Value::Int64(20));
        assert!(matches!(decode_at(&c, 3), Err(Error::Index { .. })));
        let c = encode_chunk(&[Value::Int64(1), Value::Null, Value::Int64(3)], EncodingKind::Plain).unwrap();
        assert_eq!(decode_at(&c, 1).unwrap(), Value::Null);
    }

    #[test]
    fn truncated_payload_is_corrupt() {
        let mut c = encode_chunk(&ints(&[1, 2, 3, 4]), EncodingKind::Plain).unwrap();
        c.pages[0].bytes.truncate(10);
        assert!(matches!(decode_chunk(&c), Err(Error::CorruptChunk(_))));
        let mut c = encode_chunk(&ints(&[1, 1, 2]), EncodingKind::Rle).unwrap();
        c.pages[0].bytes.pop();
        assert!(matches!(decode_chunk(&c), Err(Error::CorruptChunk(_))));
    }

    #[test]
    fn invalid_kinds_rejected() {
        assert!(matches!(
            encode_chunk(&[Value::str("x")], EncodingKind::Rle),
            Err(Error::InvalidEncoding(_))
        ));
        assert!(matches!(
            encode_chunk(&ints(&[-1]), EncodingKind::BitPack { width: 8 }),
            Err(Error::InvalidEncoding(_))
        ));
        assert!(matches!(
            encode_chunk(&ints(&[300]), EncodingKind::BitPack { width: 8 }),
            Err(Error::InvalidEncoding(_))
        ));
    }

    #[test]
    fn scaled_int_precision() {
        let ok = [Value::float(1.25), Value::float(-3.5), Value::float(0.1)];
        let c = encode_chunk(&ok, EncodingKind::ScaledInt { scale: 2 }).unwrap();
        assert_eq!(decode_chunk(&c).unwrap(), ok.to_vec());
        for bad in [1.0 / 3.0, f64::NAN, f64::INFINITY, 1e300, -0.0] {
            assert!(
                matches!(encode_chunk(&[Value::float(bad)], EncodingKind::ScaledInt { scale: 2 }), Err(Error::Precision(_))),
                "{bad} accepted"
            );
        }
        let q = quantize(0.123456789, 4);
        assert!((q - 0.123456789).abs() <= 5e-5);
        assert!(encode_chunk(&[Value::float(q)], EncodingKind::ScaledInt { scale: 4 }).is_ok());
    }

    #[test]
    fn rle_size_law() {
        // r runs inside one page cost r * (4 + 8) bytes regardless of run lengths
        for run_len in [1usize, 7, 50] {
            let vals: Vec<Value> = (0..40).flat_map(|r| std::iter::repeat(Value::Int64(r)).take(run_len)).collect();
            let c = encode_chunk(&vals, EncodingKind::Rle).unwrap();
            let per_page: usize = c.pages.iter().map(|p| p.bytes.len()).sum();
            let runs_per_page: usize = page_ranges(vals.len())
                .map(|r| {
                    let s = crate::stats::compute_stats_values(&vals[r]).unwrap();
                    s.run_count as usize
                })
                .sum();
            assert_eq!(per_page, runs_per_page * 12);
            if vals.len() <= PAGE_VALUES {
                assert_eq!(per_page, 40 * 12);
            }
        }
    }
}
