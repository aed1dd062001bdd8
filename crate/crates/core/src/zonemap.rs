//! Min/max/null-count zone maps and sound pruning decisions.

use std::cmp::Ordering;

use serde::Serialize;

use crate::column::Column;
use crate::error::{Error, Result};
use crate::predicate::{Comparison, Predicate};
use crate::types::Value;

/// String bounds longer than this are cut to a prefix.
pub const STRING_BOUND_BYTES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoneMap {
    /// Absent when every value is null, and for vector columns.
    pub min: Option<Value>,
    pub max: Option<Value>,
    pub null_count: u64,
    pub row_count: u64,
    /// `min` is a prefix of the true minimum (still a valid lower bound).
    pub min_truncated: bool,
    /// `max` is a prefix of the true maximum; every value's 16-byte prefix is `<= max`.
    pub max_truncated: bool,
}

fn truncate_str(s: &str) -> Option<String> {
    if s.len() <= STRING_BOUND_BYTES {
        return None;
    }
    let mut end = STRING_BOUND_BYTES;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    Some(s[..end].to_string())
}

impl ZoneMap {
    fn from_bounds(min: Option<Value>, max: Option<Value>, null_count: u64, row_count: u64) -> Self {
        let mut zm = ZoneMap { min, max, null_count, row_count, min_truncated: false, max_truncated: false };
        if let Some(Value::Utf8(s)) = &zm.min {
            if let Some(t) = truncate_str(s) {
                zm.min = Some(Value::Utf8(t));
                zm.min_truncated = true;
            }
        }
        if let Some(Value::Utf8(s)) = &zm.max {
            if let Some(t) = truncate_str(s) {
                zm.max = Some(Value::Utf8(t));
                zm.max_truncated = true;
            }
        }
        zm
    }

    /// Zone map over rows `start..end` of a decoded column.
    pub fn from_column(col: &Column, start: usize, end: usize) -> Self {
        let mut min: Option<usize> = None;
        let mut max: Option<usize> = None;
        let mut nulls = 0u64;
        let comparable = col.column_type().is_comparable();
        for i in start..end {
            if !col.is_valid(i) {
                nulls += 1;
                continue;
            }
            if !comparable {
                continue;
            }
            match min {
                Some(m) if col.data.cmp_at(i, m) != Ordering::Less => {}
                _ => min = Some(i),
            }
            match max {
                Some(m) if col.data.cmp_at(i, m) != Ordering::Greater => {}
                _ => max = Some(i),
            }
        }
        ZoneMap::from_bounds(
            min.map(|i| col.data.value(i)),
            max.map(|i| col.data.value(i)),
            nulls,
            (end - start) as u64,
        )
    }

    pub fn all_null(&self) -> bool {
        self.null_count == self.row_count
    }

    /// `false` only if no row in the zone can satisfy `p`.
    pub fn may_match(&self, p: &Predicate) -> bool {
        if self.all_null() {
            return false;
        }
        let (Some(min), Some(max)) = (&self.min, &self.max) else {
            return true;
        };
        // Some value could be above (strict) or at-or-above `x`.
        let above = |x: &Value, strict: bool| -> bool {
            if self.max_truncated {
                if let (Value::Utf8(m), Value::Utf8(s)) = (max, x) {
                    return s.as_bytes().starts_with(m.as_bytes()) || m.as_bytes() > s.as_bytes();
                }
            }
            match max.total_cmp(x) {
                Ok(Ordering::Greater) => true,
                Ok(Ordering::Equal) => !strict,
                Ok(Ordering::Less) => false,
                Err(_) => true,
            }
        };
        // Some value could be below (strict) or at-or-below `x`.
        let below = |x: &Value, strict: bool| -> bool {
            match min.total_cmp(x) {
                Ok(Ordering::Less) => true,
                Ok(Ordering::Equal) => !strict && !self.min_truncated,
                Ok(Ordering::Greater) => false,
                Err(_) => true,
            }
        };
        match &p.cmp {
            Comparison::Eq(x) => above(x, false) && below(x, false),
            Comparison::Gt(x) => above(x, true),
            Comparison::Ge(x) => above(x, false),
            Comparison::Lt(x) => below(x, true),
            Comparison::Le(x) => below(x, false),
            Comparison::Between(lo, hi) => above(lo, false) && below(hi, false),
        }
    }
}

/// Builds a zone map over a homogeneous, non-empty value sequence.
pub fn zone_map_build(values: &[Value]) -> Result<ZoneMap> {
    if values.is_empty() {
        return Err(Error::EmptyChunk);
    }
    let ty = values.iter().find_map(Value::column_type);
    match ty {
        None => Ok(ZoneMap::from_bounds(None, None, values.len() as u64, values.len() as u64)),
        Some(ty) => {
            let col = Column::from_values(ty, values)?;
            Ok(ZoneMap::from_column(&col, 0, col.len()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::predicate_eval_scalar;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|x| Value::Int64(*x)).collect()
    }

    #[test]
    fn build_examples() {
        let z = zone_map_build(&ints(&[5, 1, 9])).unwrap();
        assert_eq!((z.min, z.max, z.null_count, z.row_count), (Some(Value::Int64(1)), Some(Value::Int64(9)), 0, 3));
        let z = zone_map_build(&[Value::Null, Value::Null]).unwrap();
        assert_eq!((z.min, z.max, z.null_count, z.row_count), (None, None, 2, 2));
        assert!(matches!(zone_map_build(&[]), Err(Error::EmptyChunk)));
    }

    #[test]
    fn long_strings_are_truncated_soundly() {
        let s = "alphabet-soup-1234567"; // 21 bytes
        let z = zone_map_build(&[Value::str(s)]).unwrap();
        assert!(z.min_truncated && z.max_truncated);
        let (Some(Value::Utf8(min)), Some(Value::Utf8(max))) = (&z.min, &z.max) else { panic!() };
        assert_eq!(min.len(), 16);
        // prefix-compare oracle: min <= value, value's prefix <= max
        assert!(min.as_str() <= s);
        assert!(&s[..16] <= max.as_str());
        assert!(z.may_match(&Predicate::eq("c", Value::str(s))));
        assert!(z.may_match(&Predicate::le("c", Value::str(s))));
        assert!(z.may_match(&Predicate::ge("c", Value::str(s))));
        assert!(!z.may_match(&Predicate::lt("c", Value::str(min.clone()))));
        assert!(!z.may_match(&Predicate::gt("c", Value::str("alphabet-soup-2"))));
    }

    #[test]
    fn truncation_respects_char_boundaries() {
        let s = "aaaaaaaaaaaaaaa\u{e9}bbb"; // the 2-byte char straddles byte 16
        let z = zone_map_build(&[Value::str(s)]).unwrap();
        assert_eq!(z.min, Some(Value::str("aaaaaaaaaaaaaaa")));
    }

    #[test]
    fn may_match_examples() {
        let z = zone_map_build(&ints(&[5, 10])).unwrap();
        assert!(!z.may_match(&Predicate::gt("c", Value::Int64(12))));
        assert!(z.may_match(&Predicate::eq("c", Value::Int64(7))));
        assert!(!z.may_match(&Predicate::gt("c", Value::Int64(10))));
        assert!(z.may_match(&Predicate::ge("c", Value::Int64(10))));
        assert!(!z.may_match(&Predicate::lt("c", Value::Int64(5))));
        let nulls = zone_map_build(&[Value::Null]).unwrap();
        assert!(!nulls.may_match(&Predicate::ge("c", Value::Int64(i64::MIN))));
    }

    #[test]
    fn sound_on_string_grid() {
        let words = ["", "a", "abcdefghijklmnopq", "abcdefghijklmnopz", "abcdefghijklmnop", "b", "zzzzzzzzzzzzzzzzzzzz"];
        for i in 0..words.len() {
            for j in i..words.len() {
                let zone: Vec<Value> = words[i..=j].iter().map(|w| Value::str(*w)).collect();
                let z = zone_map_build(&zone).unwrap();
                for x in words.iter().chain(["abcdefghijklmnopa", "c"].iter()) {
                    for p in [
                        Predicate::eq("c", Value::str(*x)),
                        Predicate::gt("c", Value::str(*x)),
                        Predicate::ge("c", Value::str(*x)),
                        Predicate::lt("c", Value::str(*x)),
                        Predicate::le("c", Value::str(*x)),
                    ] {
                        let any = zone.iter().any(|v| predicate_eval_scalar(&p, v).unwrap());
                        if !z.may_match(&p) {
                            assert!(!any, "unsound prune of {p} over {zone:?}");
                        }
                    }
                }
            }
        }
    }
}
