//! Leaf subexpressions: a projection over a conjunction of predicates.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bitvec::BitVector;
use crate::container::{ByteSource, ColfFile};
use crate::error::{Error, Result};
use crate::memrep::{load_plain, open_lazy, DecodeCounts, DecodeStats, PlainColumns};
use crate::predicate::{Comparison, Predicate};
use crate::types::{ColumnType, Schema, Value};

use super::filter::{filter, filter_plain, FilterOutput, Strategy};
use super::mask::{apply_mask, MaskMode};

#[derive(Clone, Debug, PartialEq)]
pub struct SubexpressionQuery {
    pub projection: Vec<String>,
    pub predicates: Vec<Predicate>,
}

impl SubexpressionQuery {
    pub fn new(projection: &[&str], predicates: Vec<Predicate>) -> Self {
        SubexpressionQuery { projection: projection.iter().map(|s| s.to_string()).collect(), predicates }
    }

    /// Projected columns followed by predicate-only columns, without duplicates.
    pub fn columns(&self) -> Vec<String> {
        let mut out = self.projection.clone();
        for p in &self.predicates {
            if !out.contains(&p.column) {
                out.push(p.column.clone());
            }
        }
        out
    }
}

/// Load/compute split. Pipelined strategies report only `total`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Timings {
    #[serde(with = "secs_opt")]
    pub load: Option<Duration>,
    #[serde(with = "secs_opt")]
    pub compute: Option<Duration>,
    #[serde(with = "secs")]
    pub total: Duration,
}

mod secs {
    pub fn serialize<S: serde::Serializer>(d: &std::time::Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }
}

mod secs_opt {
    pub fn serialize<S: serde::Serializer>(d: &Option<std::time::Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryOutput {
    pub table: PlainColumns,
    /// Counters for the whole query.
    pub counts: DecodeCounts,
    /// Counters after the filter phase only.
    pub filter_counts: DecodeCounts,
    pub filter: Option<FilterOutput>,
    pub timings: Timings,
}

/// Mask mode a strategy uses to produce its result rows.
pub fn mask_mode_for(strat: Strategy) -> MaskMode {
    match strat {
        Strategy::PlainFull | Strategy::PlainDictDirect => MaskMode::Bulk,
        Strategy::ChunkSkip => MaskMode::ChunkSkip,
        Strategy::LazyStream | Strategy::LazyIm | Strategy::LazyImDirect | Strategy::LazyImDirectVec => {
            MaskMode::RecordSkip
        }
    }
}

pub fn eval_subexpression<S: ByteSource>(
    q: &SubexpressionQuery,
    file: &ColfFile<S>,
    strat: Strategy,
) -> Result<QueryOutput> {
    let stats = DecodeStats::new();
    let start = Instant::now();

    if strat == Strategy::PlainFull {
        let loaded = load_plain(file, &q.columns(), &stats)?;
        let load = start.elapsed();
        let t = Instant::now();
        let bits = filter_plain(&loaded, &q.predicates)?;
        let filter_counts = stats.snapshot();
        let table = loaded.project(&q.projection)?.select(&bits)?;
        let compute = t.elapsed();
        let filter = FilterOutput { bits, skips: vec![], fallbacks: vec![], order: (0..q.predicates.len()).collect(), load_time: load };
        return Ok(QueryOutput {
            table,
            counts: stats.snapshot(),
            filter_counts,
            filter: Some(filter),
            timings: Timings { load: Some(load), compute: Some(compute), total: start.elapsed() },
        });
    }

    let lazy = open_lazy(file, &q.projection)?;
    let open_time = start.elapsed();
    let (bits, out) = if q.predicates.is_empty() {
        (BitVector::ones(lazy.row_count()), None)
    } else {
        let f = filter(file, &q.predicates, strat, &stats)?;
        (f.bits.clone(), Some(f))
    };
    let filter_counts = stats.snapshot();
    let mode = mask_mode_for(strat);
    let t = Instant::now();
    let table = apply_mask(&lazy, &bits, mode, &stats)?;
    let mask_time = t.elapsed();
    let total = start.elapsed();
    let filter_load = out.as_ref().map_or(Duration::ZERO, |f| f.load_time);
    let timings = match strat {
        Strategy::LazyStream => Timings { load: None, compute: None, total },
        // bulk mask decodes the projection up front, so it counts as loading
        Strategy::PlainDictDirect => Timings {
            load: Some(filter_load + mask_time),
            compute: Some(total.saturating_sub(filter_load + mask_time)),
            total,
        },
        _ => Timings { load: Some(open_time), compute: Some(total - open_time), total },
    };
    Ok(QueryOutput { table, counts: stats.snapshot(), filter_counts, filter: out, timings })
}

fn split_terms(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in s.chars() {
        match c {
            '\'' => {
                quoted = !quoted;
                cur.push(c);
            }
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    if quoted {
        return Err(Error::Config("unterminated string literal in filter".into()));
    }
    out.push(cur);
    Ok(out.into_iter().map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
}

/// Parses a literal for a column of type `ty`. Strings are single-quoted,
/// with `''` standing for one quote.
pub fn parse_literal(text: &str, ty: ColumnType) -> Result<Value> {
    let text = text.trim();
    let bad = || Error::Config(format!("`{text}` is not a valid {ty} literal"));
    Ok(match ty {
        ColumnType::Int32 => Value::Int32(text.parse().map_err(|_| bad())?),
        ColumnType::Int64 => Value::Int64(text.parse().map_err(|_| bad())?),
        ColumnType::Float64 => Value::float(text.parse().map_err(|_| bad())?),
        ColumnType::Bool => match text.to_ascii_lowercase().as_str() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(bad()),
        },
        ColumnType::Utf8 => {
            let inner = text.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')).filter(|_| text.len() >= 2).ok_or_else(bad)?;
            Value::str(inner.replace("''", "'"))
        }
        ColumnType::FixedVector(_) => return Err(Error::Type("vector columns cannot be filtered".into())),
    })
}

fn parse_term(term: &str, schema: &Schema) -> Result<Predicate> {
    let name_end = term.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.')).unwrap_or(term.len());
    let column = &term[..name_end];
    if column.is_empty() {
        return Err(Error::Config(format!("filter term `{term}` does not start with a column name")));
    }
    let ty = schema.field(schema.index_of(column)?).ty;
    let rest = term[name_end..].trim_start();
    let lower = rest.to_ascii_lowercase();
    if lower.starts_with("between ") {
        let body = &rest[8..];
        let and = body.to_ascii_lowercase().find(" and ").ok_or_else(|| {
            Error::Config(format!("`{term}`: expected `BETWEEN low AND high`"))
        })?;
        let lo = parse_literal(&body[..and], ty)?;
        let hi = parse_literal(&body[and + 5..], ty)?;
        return Predicate::between(column, lo, hi).map_err(|e| Error::Config(e.to_string()));
    }
    let (op, lit) = [">=", "<=", "==", "=", ">", "<"]
        .iter()
        .find_map(|op| rest.strip_prefix(op).map(|l| (*op, l)))
        .ok_or_else(|| Error::Config(format!("`{term}`: expected one of = > < >= <= BETWEEN")))?;
    let v = parse_literal(lit, ty)?;
    let cmp = match op {
        "=" | "==" => Comparison::Eq(v),
        ">" => Comparison::Gt(v),
        "<" => Comparison::Lt(v),
        ">=" => Comparison::Ge(v),
        "<=" => Comparison::Le(v),
        _ => unreachable!(),
    };
    Predicate::new(column, cmp).map_err(|e| Error::Config(e.to_string()))
}

/// Parses `col OP literal[, col OP literal ...]` (AND semantics).
pub fn parse_where(s: &str, schema: &Schema) -> Result<Vec<Predicate>> {
    split_terms(s)?.iter().map(|t| parse_term(t, schema)).collect()
}
