//! Data page byte layouts for each encoding, and a reader that decodes
//! either a whole page or individual positions of it.

use crate::bitvec::BitVector;
use crate::column::ColumnData;
use crate::error::{Error, Result};
use crate::types::{canonical_f64, ColumnType};

use super::bitpack::{self, bits_needed};
use super::dict::Dictionary;
use super::EncodingKind;

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn le_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

/// Integer view of element `i` for integer and bool columns.
#[inline]
pub(crate) fn int_at(data: &ColumnData, i: usize) -> i64 {
    match data {
        ColumnData::Int32(v) => v[i] as i64,
        ColumnData::Int64(v) => v[i],
        ColumnData::Bool(v) => v[i] as i64,
        other => panic!("int_at on {}", other.column_type()),
    }
}

#[inline]
fn push_int(out: &mut ColumnData, v: i64) {
    match out {
        ColumnData::Int32(o) => o.push(v as i32),
        ColumnData::Int64(o) => o.push(v),
        ColumnData::Bool(o) => o.push(v != 0),
        other => panic!("push_int on {}", other.column_type()),
    }
}

pub(crate) fn pow10(scale: u8) -> f64 {
    10f64.powi(scale as i32)
}

/// Scaled integer for `v`, or a precision error if `v` is not exactly
/// representable at `scale` decimal digits.
pub(crate) fn scale_value(v: f64, scale: u8) -> Result<i64> {
    let p = pow10(scale);
    let q = (v * p).round();
    if !q.is_finite() || q.abs() > 9.0e15 {
        return Err(Error::Precision(format!("{v} overflows at scale {scale}")));
    }
    let q = q as i64;
    if (q as f64 / p).to_bits() != v.to_bits() {
        return Err(Error::Precision(format!("{v} is not representable at scale {scale}")));
    }
    Ok(q)
}

pub(crate) fn encode_plain(data: &ColumnData, start: usize, end: usize, out: &mut Vec<u8>) {
    match data {
        ColumnData::Int32(v) => v[start..end].iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Int64(v) => v[start..end].iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Float64(v) => v[start..end]
            .iter()
            .for_each(|x| out.extend_from_slice(&canonical_f64(*x).to_bits().to_le_bytes())),
        ColumnData::Bool(v) => out.extend(v[start..end].iter().map(|b| *b as u8)),
        ColumnData::Utf8(v) => {
            let mut off = 0u32;
            out.extend_from_slice(&off.to_le_bytes());
            for s in &v[start..end] {
                off += s.len() as u32;
                out.extend_from_slice(&off.to_le_bytes());
            }
            for s in &v[start..end] {
                out.extend_from_slice(s.as_bytes());
            }
        }
        ColumnData::Vector { dim, values } => {
            // list-style element offsets, then the flattened elements
            for i in 0..=(end - start) {
                out.extend_from_slice(&((i * dim) as u32).to_le_bytes());
            }
            for x in &values[start * dim..end * dim] {
                out.extend_from_slice(&canonical_f64(*x).to_bits().to_le_bytes());
            }
        }
    }
}

pub(crate) fn decode_plain(ty: ColumnType, bytes: &[u8], count: usize) -> Result<ColumnData> {
    PageReader::plain(ty, bytes, count)?.decode_all()
}

/// Encodes rows `start..end` of `data` as one page of a non-dictionary `kind`.
/// Frame-of-reference pages store null slots as offset 0.
pub(crate) fn encode_page(
    kind: EncodingKind,
    data: &ColumnData,
    validity: &BitVector,
    start: usize,
    end: usize,
    out: &mut Vec<u8>,
) -> Result<()> {
    match kind {
        EncodingKind::Plain => encode_plain(data, start, end, out),
        EncodingKind::BitPack { width } => {
            let mut vals = Vec::with_capacity(end - start);
            for i in start..end {
                let v = int_at(data, i);
                if v < 0 || bits_needed(v as u64) > width {
                    return Err(Error::InvalidEncoding(format!("{v} does not fit bit-pack width {width}")));
                }
                vals.push(v as u64);
            }
            bitpack::pack(vals, width, out);
        }
        EncodingKind::DeltaFor { reference, width } => {
            let mut vals = Vec::with_capacity(end - start);
            for i in start..end {
                if !validity.get(i) {
                    vals.push(0);
                    continue;
                }
                let off = int_at(data, i) as i128 - reference as i128;
                if off < 0 || bits_needed(off as u64) > width || off > u64::MAX as i128 {
                    return Err(Error::InvalidEncoding(format!(
                        "value {} outside frame [{reference}, +2^{width})",
                        int_at(data, i)
                    )));
                }
                vals.push(off as u64);
            }
            bitpack::pack(vals, width, out);
        }
        EncodingKind::Rle => {
            let width = data.column_type().fixed_width().unwrap();
            let mut i = start;
            while i < end {
                let v = int_at(data, i);
                let mut j = i + 1;
                while j < end && int_at(data, j) == v {
                    j += 1;
                }
                out.extend_from_slice(&((j - i) as u32).to_le_bytes());
                out.extend_from_slice(&v.to_le_bytes()[..width]);
                i = j;
            }
        }
        EncodingKind::Dict { .. } | EncodingKind::DictRle { .. } => {
            unreachable!("dictionary pages are encoded through encode_key_page")
        }
        EncodingKind::ScaledInt { scale } => {
            let elems: &[f64] = match data {
                ColumnData::Float64(v) => &v[start..end],
                ColumnData::Vector { dim, values } => &values[start * dim..end * dim],
                _ => unreachable!("validated by encode_chunk"),
            };
            let q = elems.iter().map(|v| scale_value(*v, scale)).collect::<Result<Vec<_>>>()?;
            let base = q.iter().copied().min().unwrap_or(0);
            let width = bits_needed(q.iter().map(|x| (*x - base) as u64).max().unwrap_or(0));
            out.extend_from_slice(&base.to_le_bytes());
            out.push(width);
            bitpack::pack(q.iter().map(|x| (*x - base) as u64), width, out);
        }
    }
    Ok(())
}

/// Page of dictionary keys: bit-packed at `width`, or (run, key) pairs.
pub(crate) fn encode_key_page(rle: bool, keys: &[u32], width: u8, out: &mut Vec<u8>) {
    if rle {
        let mut i = 0;
        while i < keys.len() {
            let mut j = i + 1;
            while j < keys.len() && keys[j] == keys[i] {
                j += 1;
            }
            out.extend_from_slice(&((j - i) as u32).to_le_bytes());
            out.extend_from_slice(&keys[i].to_le_bytes());
            i = j;
        }
    } else {
        bitpack::pack(keys.iter().map(|k| *k as u64), width, out);
    }
}

#[derive(Debug)]
enum Repr<'a> {
    Fixed { bytes: &'a [u8] },
    Utf8 { offsets: &'a [u8], data: &'a [u8] },
    Vector { dim: usize, values: &'a [u8] },
    Packed { bytes: &'a [u8], width: u8, base: i64 },
    Runs { ends: Vec<u32>, values: Vec<i64> },
    DictKeys { bytes: &'a [u8], width: u8, dict: &'a Dictionary },
    DictRuns { ends: Vec<u32>, keys: Vec<u32>, dict: &'a Dictionary },
    Scaled { bytes: &'a [u8], width: u8, base: i64, factor: f64, dim: usize },
}

/// Validated view over one decompressed data page.
#[derive(Debug)]
pub struct PageReader<'a> {
    ty: ColumnType,
    count: usize,
    repr: Repr<'a>,
}

fn need(bytes: &[u8], n: usize, what: &str) -> Result<()> {
    if bytes.len() < n {
        Err(Error::corrupt_chunk(format!("{what}: need {n} bytes, have {}", bytes.len())))
    } else {
        Ok(())
    }
}

fn parse_runs(bytes: &[u8], value_width: usize, count: usize) -> Result<(Vec<u32>, Vec<u64>)> {
    let step = 4 + value_width;
    if bytes.len() % step != 0 {
        return Err(Error::corrupt_chunk("run page length is not a whole number of runs"));
    }
    let mut ends = Vec::with_capacity(bytes.len() / step);
    let mut vals = Vec::with_capacity(bytes.len() / step);
    let mut total = 0u64;
    for run in bytes.chunks_exact(step) {
        let len = le_u32(run, 0);
        if len == 0 {
            return Err(Error::corrupt_chunk("zero-length run"));
        }
        total += len as u64;
        ends.push(total.min(u32::MAX as u64) as u32);
        let mut buf = [0u8; 8];
        buf[..value_width].copy_from_slice(&run[4..]);
        vals.push(u64::from_le_bytes(buf));
    }
    if total != count as u64 {
        return Err(Error::corrupt_chunk(format!("runs cover {total} values, page holds {count}")));
    }
    Ok((ends, vals))
}

fn bad_key(k: usize, dict: &Dictionary) -> Error {
    Error::corrupt_chunk(format!("key {k} outside dictionary of {}", dict.len()))
}

/// All-null chunks have an empty dictionary; their rows carry key 0.
#[inline]
fn push_key(out: &mut ColumnData, dict: &Dictionary, k: usize) -> Result<()> {
    if k < dict.len() {
        out.push_from(&dict.entries, k);
    } else if k == 0 {
        out.push_placeholder();
    } else {
        return Err(bad_key(k, dict));
    }
    Ok(())
}

fn sign_extend(v: u64, width: usize) -> i64 {
    let shift = 64 - 8 * width as u32;
    ((v << shift) as i64) >> shift
}

impl<'a> PageReader<'a> {
    fn plain(ty: ColumnType, bytes: &'a [u8], count: usize) -> Result<Self> {
        let repr = match ty {
            ColumnType::Int32 | ColumnType::Int64 | ColumnType::Float64 | ColumnType::Bool => {
                let w = ty.fixed_width().unwrap();
                need(bytes, w * count, "plain page")?;
                Repr::Fixed { bytes: &bytes[..w * count] }
            }
            ColumnType::Utf8 => {
                need(bytes, 4 * (count + 1), "string offsets")?;
                let (offsets, data) = bytes.split_at(4 * (count + 1));
                let mut prev = 0;
                for i in 0..=count {
                    let o = le_u32(offsets, 4 * i);
                    if o < prev || o as usize > data.len() {
                        return Err(Error::corrupt_chunk("string offsets out of bounds"));
                    }
                    prev = o;
                }
                if count > 0 && le_u32(offsets, 0) != 0 {
                    return Err(Error::corrupt_chunk("string offsets must start at zero"));
                }
                for i in 0..count {
                    let (a, b) = (le_u32(offsets, 4 * i) as usize, le_u32(offsets, 4 * i + 4) as usize);
                    std::str::from_utf8(&data[a..b])
                        .map_err(|_| Error::corrupt_chunk("string is not valid UTF-8"))?;
                }
                Repr::Utf8 { offsets, data }
            }
            ColumnType::FixedVector(d) => {
                let dim = d as usize;
                need(bytes, 4 * (count + 1) + 8 * dim * count, "vector page")?;
                let (offsets, values) = bytes.split_at(4 * (count + 1));
                for i in 0..=count {
                    if le_u32(offsets, 4 * i) as usize != i * dim {
                        return Err(Error::corrupt_chunk("vector offsets disagree with dimension"));
                    }
                }
                Repr::Vector { dim, values: &values[..8 * dim * count] }
            }
        };
        Ok(PageReader { ty, count, repr })
    }

    pub fn new(
        ty: ColumnType,
        kind: EncodingKind,
        dict: Option<&'a Dictionary>,
        bytes: &'a [u8],
        count: usize,
    ) -> Result<Self> {
        let dict_or_err = || dict.ok_or_else(|| Error::corrupt_chunk("dictionary page missing"));
        let repr = match kind {
            EncodingKind::Plain => return Self::plain(ty, bytes, count),
            EncodingKind::BitPack { width } => {
                need(bytes, bitpack::packed_len(count, width), "bit-packed page")?;
                Repr::Packed { bytes, width, base: 0 }
            }
            EncodingKind::DeltaFor { reference, width } => {
                need(bytes, bitpack::packed_len(count, width), "frame-of-reference page")?;
                Repr::Packed { bytes, width, base: reference }
            }
            EncodingKind::Rle => {
                let w = ty.fixed_width().unwrap();
                let (ends, raw) = parse_runs(bytes, w, count)?;
                let values = raw.into_iter().map(|v| sign_extend(v, w)).collect();
                Repr::Runs { ends, values }
            }
            EncodingKind::Dict { .. } => {
                let dict = dict_or_err()?;
                let width = dict.key_width();
                need(bytes, bitpack::packed_len(count, width), "key page")?;
                Repr::DictKeys { bytes, width, dict }
            }
            EncodingKind::DictRle { .. } => {
                let dict = dict_or_err()?;
                let (ends, raw) = parse_runs(bytes, 4, count)?;
                Repr::DictRuns { ends, keys: raw.into_iter().map(|k| k as u32).collect(), dict }
            }
            EncodingKind::ScaledInt { scale } => {
                need(bytes, 9, "scaled page header")?;
                let base = le_u64(bytes, 0) as i64;
                let width = bytes[8];
                if width > 64 {
                    return Err(Error::corrupt_chunk("scaled page width above 64"));
                }
                let dim = match ty {
                    ColumnType::FixedVector(d) => d as usize,
                    _ => 1,
                };
                need(&bytes[9..], bitpack::packed_len(count * dim, width), "scaled page")?;
                Repr::Scaled { bytes: &bytes[9..], width, base, factor: pow10(scale), dim }
            }
        };
        if let Repr::DictRuns { keys, dict, .. } = &repr {
            if let Some(k) = keys.iter().find(|k| **k as usize >= dict.len().max(1)) {
                return Err(Error::corrupt_chunk(format!("key {k} outside dictionary of {}", dict.len())));
            }
        }
        Ok(PageReader { ty, count, repr })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn run_index(ends: &[u32], i: usize) -> usize {
        ends.partition_point(|&e| e as usize <= i)
    }

    /// Appends the value at position `i` to `out`.
    #[inline]
    pub fn push_at(&self, i: usize, out: &mut ColumnData) -> Result<()> {
        match &self.repr {
            Repr::Fixed { bytes } => match out {
                ColumnData::Int32(o) => o.push(i32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap())),
                ColumnData::Int64(o) => o.push(le_u64(bytes, 8 * i) as i64),
                ColumnData::Float64(o) => o.push(f64::from_bits(le_u64(bytes, 8 * i))),
                ColumnData::Bool(o) => o.push(bytes[i] != 0),
                _ => unreachable!(),
            },
            Repr::Utf8 { offsets, data } => {
                let (a, b) = (le_u32(offsets, 4 * i) as usize, le_u32(offsets, 4 * i + 4) as usize);
                if let ColumnData::Utf8(o) = out {
                    // validated at construction
                    o.push(String::from_utf8(data[a..b].to_vec()).unwrap());
                }
            }
            Repr::Vector { dim, values } => {
                if let ColumnData::Vector { values: o, .. } = out {
                    for e in 0..*dim {
                        o.push(f64::from_bits(le_u64(values, 8 * (i * dim + e))));
                    }
                }
            }
            Repr::Packed { bytes, width, base } => {
                let off = bitpack::unpack_at(bytes, *width, i);
                push_int(out, (*base as i128 + off as i128) as i64);
            }
            Repr::Runs { ends, values } => push_int(out, values[Self::run_index(ends, i)]),
            Repr::DictKeys { bytes, width, dict } => {
                push_key(out, dict, bitpack::unpack_at(bytes, *width, i) as usize)?
            }
            Repr::DictRuns { ends, keys, dict } => push_key(out, dict, keys[Self::run_index(ends, i)] as usize)?,
            Repr::Scaled { bytes, width, base, factor, dim } => {
                let elem = |e: usize| (*base + bitpack::unpack_at(bytes, *width, e) as i64) as f64 / factor;
                match out {
                    ColumnData::Float64(o) => o.push(elem(i)),
                    ColumnData::Vector { values: o, .. } => {
                        for e in 0..*dim {
                            o.push(elem(i * dim + e));
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ok(())
    }

    /// Decodes every value of the page.
    pub fn decode_all(&self) -> Result<ColumnData> {
        let mut out = ColumnData::with_capacity(self.ty, self.count);
        match &self.repr {
            Repr::Fixed { bytes } => match &mut out {
                ColumnData::Int32(o) => o.extend(bytes.chunks_exact(4).map(|c| i32::from_le_bytes(c.try_into().unwrap()))),
                ColumnData::Int64(o) => o.extend(bytes.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().unwrap()))),
                ColumnData::Float64(o) => o.extend(bytes.chunks_exact(8).map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().unwrap())))),
                ColumnData::Bool(o) => o.extend(bytes.iter().map(|b| *b != 0)),
                _ => unreachable!(),
            },
            Repr::Packed { bytes, width, base } => {
                let mut raw = Vec::new();
                bitpack::unpack(bytes, *width, self.count, &mut raw);
                for off in raw {
                    push_int(&mut out, (*base as i128 + off as i128) as i64);
                }
            }
            Repr::Runs { ends, values } => {
                let mut start = 0;
                for (end, v) in ends.iter().zip(values) {
                    for _ in start..*end {
                        push_int(&mut out, *v);
                    }
                    start = *end;
                }
            }
            Repr::DictKeys { .. } | Repr::DictRuns { .. } => {
                let keys = self.keys().unwrap();
                let dict = self.dictionary().unwrap();
                for k in keys {
                    push_key(&mut out, dict, k as usize)?;
                }
            }
            Repr::Scaled { bytes, width, base, factor, dim } => {
                let mut raw = Vec::new();
                bitpack::unpack(bytes, *width, self.count * dim, &mut raw);
                let elems = raw.into_iter().map(|off| (*base + off as i64) as f64 / factor);
                match &mut out {
                    ColumnData::Float64(o) => o.extend(elems),
                    ColumnData::Vector { values, .. } => values.extend(elems),
                    _ => unreachable!(),
                }
            }
            Repr::Utf8 { .. } | Repr::Vector { .. } => {
                for i in 0..self.count {
                    self.push_at(i, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// Decodes only the given ascending positions.
    pub fn decode_positions(&self, positions: impl IntoIterator<Item = usize>) -> Result<ColumnData> {
        let positions = positions.into_iter();
        let mut out = ColumnData::with_capacity(self.ty, positions.size_hint().0);
        match &self.repr {
            Repr::Runs { ends, values } => {
                let mut run = 0;
                for i in positions {
                    while ends[run] as usize <= i {
                        run += 1;
                    }
                    push_int(&mut out, values[run]);
                }
            }
            Repr::DictRuns { ends, keys, dict } => {
                let mut run = 0;
                for i in positions {
                    while ends[run] as usize <= i {
                        run += 1;
                    }
                    push_key(&mut out, dict, keys[run] as usize)?;
                }
            }
            _ => {
                for i in positions {
                    self.push_at(i, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    pub fn dictionary(&self) -> Option<&'a Dictionary> {
        match &self.repr {
            Repr::DictKeys { dict, .. } | Repr::DictRuns { dict, .. } => Some(dict),
            _ => None,
        }
    }

    /// Dictionary keys of every row, for dictionary-encoded pages.
    pub fn keys(&self) -> Option<Vec<u32>> {
        match &self.repr {
            Repr::DictKeys { bytes, width, .. } => {
                let mut raw = Vec::new();
                bitpack::unpack(bytes, *width, self.count, &mut raw);
                Some(raw.into_iter().map(|k| k as u32).collect())
            }
            Repr::DictRuns { ends, keys, .. } => {
                let mut out = Vec::with_capacity(self.count);
                let mut start = 0;
                for (end, k) in ends.iter().zip(keys) {
                    out.extend(std::iter::repeat(*k).take((*end - start) as usize));
                    start = *end;
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Raw bit-packed key payload and width, for `Dict` pages.
    pub fn packed_keys(&self) -> Option<(&'a [u8], u8)> {
        match &self.repr {
            Repr::DictKeys { bytes, width, .. } => Some((bytes, *width)),
            _ => None,
        }
    }

    /// (cumulative run ends, run keys) for `DictRle` pages.
    pub fn key_runs(&self) -> Option<(&[u32], &[u32])> {
        match &self.repr {
            Repr::DictRuns { ends, keys, .. } => Some((ends, keys)),
            _ => None,
        }
    }
}
