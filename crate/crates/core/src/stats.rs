use std::collections::HashSet;

use serde::Serialize;

use crate::column::{Column, ColumnData};
use crate::error::{Error, Result};
use crate::types::{ColumnType, Value};

/// Exact statistics over one chunk. Distinct counts exclude nulls.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnStats {
    pub distinct_count: u64,
    pub row_count: u64,
    pub null_count: u64,
    /// Longest run of equal consecutive slots (a run of nulls counts).
    pub max_run_length: u64,
    pub run_count: u64,
    pub min: Option<Value>,
    pub max: Option<Value>,
    /// Bytes the distinct values would take in a plain dictionary page.
    pub distinct_bytes: u64,
}

impl ColumnStats {
    pub fn non_null_count(&self) -> u64 {
        self.row_count - self.null_count
    }

    /// distinct / non-null, zero for all-null chunks.
    pub fn distinct_ratio(&self) -> f64 {
        if self.non_null_count() == 0 {
            0.0
        } else {
            self.distinct_count as f64 / self.non_null_count() as f64
        }
    }
}

fn distinct<T: std::hash::Hash + Eq>(
    col: &Column,
    key: impl Fn(usize) -> T,
    size: impl Fn(usize) -> u64,
) -> (u64, u64) {
    let mut seen = HashSet::new();
    let mut bytes = 0;
    for i in 0..col.len() {
        if col.is_valid(i) && seen.insert(key(i)) {
            bytes += size(i);
        }
    }
    (seen.len() as u64, bytes)
}

/// Stats over a decoded column. An empty column yields zero counts.
pub fn compute_stats(col: &Column) -> ColumnStats {
    let n = col.len();
    let (distinct_count, distinct_bytes) = match &col.data {
        ColumnData::Int32(v) => distinct(col, |i| v[i], |_| 4),
        ColumnData::Int64(v) => distinct(col, |i| v[i], |_| 8),
        ColumnData::Float64(v) => distinct(col, |i| v[i].to_bits(), |_| 8),
        ColumnData::Utf8(v) => distinct(col, |i| v[i].as_str(), |i| 4 + v[i].len() as u64),
        ColumnData::Bool(v) => distinct(col, |i| v[i], |_| 1),
        ColumnData::Vector { dim, values } => distinct(
            col,
            |i| values[i * dim..(i + 1) * dim].iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            |_| 4 + 8 * *dim as u64,
        ),
    };

    let same = |i: usize, j: usize| match (col.is_valid(i), col.is_valid(j)) {
        (false, false) => true,
        (true, true) => col.data.eq_at(i, j),
        _ => false,
    };
    let (mut max_run, mut runs, mut cur) = (0u64, 0u64, 0u64);
    for i in 0..n {
        if i > 0 && same(i - 1, i) {
            cur += 1;
        } else {
            runs += 1;
            cur = 1;
        }
        max_run = max_run.max(cur);
    }

    let (mut min, mut max) = (None::<usize>, None::<usize>);
    if col.column_type().is_comparable() {
        for i in (0..n).filter(|&i| col.is_valid(i)) {
            if min.is_none_or(|m| col.data.cmp_at(i, m).is_lt()) {
                min = Some(i);
            }
            if max.is_none_or(|m| col.data.cmp_at(i, m).is_gt()) {
                max = Some(i);
            }
        }
    }

    ColumnStats {
        distinct_count,
        row_count: n as u64,
        null_count: col.null_count() as u64,
        max_run_length: max_run,
        run_count: runs,
        min: min.map(|i| col.data.value(i)),
        max: max.map(|i| col.data.value(i)),
        distinct_bytes,
    }
}

/// Stats over a homogeneous, non-empty value sequence.
pub fn compute_stats_values(values: &[Value]) -> Result<ColumnStats> {
    if values.is_empty() {
        return Err(Error::EmptyChunk);
    }
    let ty = values.iter().find_map(Value::column_type).unwrap_or(ColumnType::Int64);
    Ok(compute_stats(&Column::from_values(ty, values)?))
}
