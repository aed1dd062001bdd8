//! Chunk dictionaries and predicate translation into the key domain.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::Hash;

use crate::column::{Column, ColumnData};
use crate::error::{Error, Result};
use crate::predicate::{Comparison, Predicate};
use crate::types::{ColumnType, Value};

use super::bitpack::bits_needed;
use super::page;

/// Distinct values of a chunk. Key `k` decodes to `entries[k]`.
#[derive(Clone, Debug)]
pub struct Dictionary {
    pub entries: ColumnData,
    /// Entries strictly ascending, so key order equals value order.
    pub sorted: bool,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Bit width of packed keys: bits(len - 1).
    pub fn key_width(&self) -> u8 {
        bits_needed(self.len().saturating_sub(1) as u64)
    }

    pub fn value(&self, key: u32) -> Value {
        self.entries.value(key as usize)
    }

    /// Key of `v`, if present.
    pub fn lookup(&self, v: &Value) -> Option<u32> {
        if self.sorted {
            self.search(v).ok().map(|k| k as u32)
        } else {
            (0..self.len())
                .find(|&i| self.entries.cmp_value(i, v).is_ok_and(Ordering::is_eq))
                .map(|i| i as u32)
        }
    }

    /// Binary search over sorted entries.
    fn search(&self, v: &Value) -> std::result::Result<usize, usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.entries.cmp_value(mid, v).unwrap_or(Ordering::Less) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Ok(mid),
            }
        }
        Err(lo)
    }

    /// First key whose entry is `>= v` (or `> v` when `strict`).
    fn partition(&self, v: &Value, strict: bool) -> u32 {
        match self.search(v) {
            Ok(k) if strict => k as u32 + 1,
            Ok(k) => k as u32,
            Err(k) => k as u32,
        }
    }

    pub(crate) fn to_page(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.push(self.sorted as u8);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        page::encode_plain(&self.entries, 0, self.len(), &mut out);
        out
    }

    pub(crate) fn from_page(ty: ColumnType, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 5 {
            return Err(Error::corrupt_chunk("dictionary page too short"));
        }
        let sorted = bytes[0] != 0;
        let count = u32::from_le_bytes(bytes[1..5].try_into().unwrap()) as usize;
        let entries = page::decode_plain(ty, &bytes[5..], count)?;
        Ok(Dictionary { entries, sorted })
    }
}

fn build_typed<K: Hash + Eq>(
    col: &Column,
    key_of: impl Fn(usize) -> K,
) -> (Vec<usize>, Vec<u32>) {
    let mut index: HashMap<K, u32> = HashMap::new();
    let mut firsts = Vec::new();
    let mut keys = Vec::with_capacity(col.len());
    for i in 0..col.len() {
        if !col.is_valid(i) {
            keys.push(0);
            continue;
        }
        let next = firsts.len() as u32;
        let k = *index.entry(key_of(i)).or_insert_with(|| {
            firsts.push(i);
            next
        });
        keys.push(k);
    }
    (firsts, keys)
}

/// Dictionary plus one key per row (null rows get key 0).
pub fn build_dictionary(col: &Column, order_preserving: bool) -> Result<(Dictionary, Vec<u32>)> {
    let (firsts, mut keys) = match &col.data {
        ColumnData::Int32(v) => build_typed(col, |i| v[i]),
        ColumnData::Int64(v) => build_typed(col, |i| v[i]),
        ColumnData::Float64(v) => build_typed(col, |i| v[i].to_bits()),
        ColumnData::Utf8(v) => build_typed(col, |i| v[i].as_str()),
        ColumnData::Bool(v) => build_typed(col, |i| v[i]),
        ColumnData::Vector { dim, values } => build_typed(col, |i| {
            values[i * dim..(i + 1) * dim].iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        }),
    };
    if firsts.len() as u64 > u32::MAX as u64 + 1 {
        return Err(Error::Cardinality(firsts.len() as u64));
    }
    let mut order: Vec<usize> = (0..firsts.len()).collect();
    if order_preserving {
        order.sort_by(|&a, &b| col.data.cmp_at(firsts[a], firsts[b]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        for (i, k) in keys.iter_mut().enumerate() {
            if col.is_valid(i) {
                *k = remap[*k as usize];
            }
        }
    }
    let entries = col.data.gather(order.iter().map(|&o| firsts[o]));
    Ok((Dictionary { entries, sorted: order_preserving }, keys))
}

/// A comparison over dictionary keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyPredicate {
    Eq(u32),
    Gt(u32),
    Lt(u32),
    Ge(u32),
    Le(u32),
    Between(u32, u32),
}

impl KeyPredicate {
    #[inline]
    pub fn matches(&self, k: u32) -> bool {
        match *self {
            KeyPredicate::Eq(x) => k == x,
            KeyPredicate::Gt(x) => k > x,
            KeyPredicate::Lt(x) => k < x,
            KeyPredicate::Ge(x) => k >= x,
            KeyPredicate::Le(x) => k <= x,
            KeyPredicate::Between(lo, hi) => lo <= k && k <= hi,
        }
    }

    /// Equivalent inclusive range, `None` when nothing matches.
    pub fn inclusive_range(&self) -> Option<(u32, u32)> {
        match *self {
            KeyPredicate::Eq(x) => Some((x, x)),
            KeyPredicate::Gt(x) => x.checked_add(1).map(|lo| (lo, u32::MAX)),
            KeyPredicate::Lt(x) => x.checked_sub(1).map(|hi| (0, hi)),
            KeyPredicate::Ge(x) => Some((x, u32::MAX)),
            KeyPredicate::Le(x) => Some((0, x)),
            KeyPredicate::Between(lo, hi) => (lo <= hi).then_some((lo, hi)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyTranslation {
    Keys(KeyPredicate),
    /// No dictionary entry satisfies the predicate.
    NoMatch,
    /// Range predicates need an order-preserving dictionary.
    Unsupported,
}

/// Rewrites a value predicate as a key predicate over `dict`.
pub fn dict_translate(dict: &Dictionary, p: &Predicate) -> KeyTranslation {
    use KeyTranslation::*;
    if let Comparison::Eq(v) = &p.cmp {
        return match dict.lookup(v) {
            Some(k) => Keys(KeyPredicate::Eq(k)),
            None => NoMatch,
        };
    }
    if !dict.sorted {
        return Unsupported;
    }
    let n = dict.len() as u32;
    match &p.cmp {
        Comparison::Gt(v) | Comparison::Ge(v) => {
            let k = dict.partition(v, matches!(p.cmp, Comparison::Gt(_)));
            if k >= n {
                NoMatch
            } else {
                Keys(KeyPredicate::Ge(k))
            }
        }
        Comparison::Lt(v) | Comparison::Le(v) => {
            let k = dict.partition(v, matches!(p.cmp, Comparison::Le(_)));
            if k == 0 {
                NoMatch
            } else {
                Keys(KeyPredicate::Lt(k))
            }
        }
        Comparison::Between(lo, hi) => {
            let a = dict.partition(lo, false);
            let b = dict.partition(hi, true);
            if a >= b {
                NoMatch
            } else {
                Keys(KeyPredicate::Between(a, b - 1))
            }
        }
        Comparison::Eq(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::predicate_eval_scalar;

    fn strs(v: &[&str]) -> Column {
        Column::from_values(ColumnType::Utf8, &v.iter().map(|s| Value::str(*s)).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn build_unsorted_and_sorted() {
        let (d, keys) = build_dictionary(&strs(&["a", "b", "a"]), false).unwrap();
        assert_eq!(d.entries.value(0), Value::str("a"));
        assert_eq!(keys, vec![0, 1, 0]);

        let (d, keys) = build_dictionary(&strs(&["c", "a", "b", "a"]), true).unwrap();
        assert!(d.sorted);
        assert_eq!((0..3).map(|k| d.value(k)).collect::<Vec<_>>(), vec![Value::str("a"), Value::str("b"), Value::str("c")]);
        assert_eq!(keys, vec![2, 0, 1, 0]);
        assert_eq!(d.key_width(), 2);
    }

    #[test]
    fn translate_examples() {
        let (abc, _) = build_dictionary(&strs(&["a", "b", "c"]), true).unwrap();
        assert_eq!(dict_translate(&abc, &Predicate::eq("c", Value::str("b"))), KeyTranslation::Keys(KeyPredicate::Eq(1)));
        let (ac, _) = build_dictionary(&strs(&["a", "c"]), true).unwrap();
        assert_eq!(dict_translate(&ac, &Predicate::gt("c", Value::str("b"))), KeyTranslation::Keys(KeyPredicate::Ge(1)));
        assert_eq!(dict_translate(&ac, &Predicate::eq("c", Value::str("b"))), KeyTranslation::NoMatch);
        assert_eq!(dict_translate(&ac, &Predicate::gt("c", Value::str("c"))), KeyTranslation::NoMatch);
        assert_eq!(dict_translate(&ac, &Predicate::lt("c", Value::str("a"))), KeyTranslation::NoMatch);
        let (unsorted, _) = build_dictionary(&strs(&["c", "a"]), false).unwrap();
        assert_eq!(dict_translate(&unsorted, &Predicate::gt("c", Value::str("b"))), KeyTranslation::Unsupported);
        assert_eq!(dict_translate(&unsorted, &Predicate::eq("c", Value::str("a"))), KeyTranslation::Keys(KeyPredicate::Eq(1)));
    }

    // Binary-search boundaries against a linear-scan oracle over every
    // predicate shape on a small sorted dictionary.
    #[test]
    fn translate_matches_linear_oracle() {
        let vals: Vec<i64> = vec![-5, -1, 0, 3, 4, 10];
        let col = Column::from_values(ColumnType::Int64, &vals.iter().map(|v| Value::Int64(*v)).collect::<Vec<_>>()).unwrap();
        let (d, _) = build_dictionary(&col, true).unwrap();
        for x in -7..13 {
            let mut preds = vec![
                Predicate::eq("c", Value::Int64(x)),
                Predicate::gt("c", Value::Int64(x)),
                Predicate::lt("c", Value::Int64(x)),
                Predicate::ge("c", Value::Int64(x)),
                Predicate::le("c", Value::Int64(x)),
            ];
            for y in x..13 {
                preds.push(Predicate::between("c", Value::Int64(x), Value::Int64(y)).unwrap());
            }
            for p in preds {
                let t = dict_translate(&d, &p);
                for k in 0..d.len() as u32 {
                    let want = predicate_eval_scalar(&p, &d.value(k)).unwrap();
                    let got = match t {
                        KeyTranslation::Keys(kp) => kp.matches(k),
                        KeyTranslation::NoMatch => false,
                        KeyTranslation::Unsupported => panic!("sorted dictionary"),
                    };
                    assert_eq!(got, want, "{p} key {k}");
                }
            }
        }
    }

    #[test]
    fn page_round_trip() {
        let (d, _) = build_dictionary(&strs(&["x", "", "yy"]), true).unwrap();
        let back = Dictionary::from_page(ColumnType::Utf8, &d.to_page()).unwrap();
        assert!(back.sorted);
        assert_eq!(back.len(), 3);
        assert_eq!(back.value(2), Value::str("yy"));
        assert!(Dictionary::from_page(ColumnType::Utf8, &[1, 9]).is_err());
    }

    #[test]
    fn inclusive_ranges() {
        assert_eq!(KeyPredicate::Lt(0).inclusive_range(), None);
        assert_eq!(KeyPredicate::Gt(u32::MAX).inclusive_range(), None);
        assert_eq!(KeyPredicate::Le(3).inclusive_range(), Some((0, 3)));
    }
}
