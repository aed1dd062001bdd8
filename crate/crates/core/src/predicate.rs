//! Comparison predicates and their evaluation over scalars and decoded columns.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Bound;

use crate::bitvec::BitVector;
use crate::column::{Column, ColumnData};
use crate::error::{Error, Result};
use crate::types::{f64_order_key, ColumnType, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq(Value),
    Gt(Value),
    Lt(Value),
    Ge(Value),
    Le(Value),
    /// Inclusive on both ends.
    Between(Value, Value),
}

impl Comparison {
    pub fn op_name(&self) -> &'static str {
        match self {
            Comparison::Eq(_) => "=",
            Comparison::Gt(_) => ">",
            Comparison::Lt(_) => "<",
            Comparison::Ge(_) => ">=",
            Comparison::Le(_) => "<=",
            Comparison::Between(..) => "between",
        }
    }

    pub fn operands(&self) -> Vec<&Value> {
        match self {
            Comparison::Eq(v)
            | Comparison::Gt(v)
            | Comparison::Lt(v)
            | Comparison::Ge(v)
            | Comparison::Le(v) => vec![v],
            Comparison::Between(lo, hi) => vec![lo, hi],
        }
    }

    /// The comparison as a (lower, upper) pair of bounds over the total order.
    pub fn bounds(&self) -> (Bound<&Value>, Bound<&Value>) {
        use Bound::*;
        match self {
            Comparison::Eq(v) => (Included(v), Included(v)),
            Comparison::Gt(v) => (Excluded(v), Unbounded),
            Comparison::Ge(v) => (Included(v), Unbounded),
            Comparison::Lt(v) => (Unbounded, Excluded(v)),
            Comparison::Le(v) => (Unbounded, Included(v)),
            Comparison::Between(lo, hi) => (Included(lo), Included(hi)),
        }
    }
}

/// `column OP operand`. Conjunctions are plain slices of predicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub column: String,
    pub cmp: Comparison,
}

impl Predicate {
    pub fn new(column: impl Into<String>, cmp: Comparison) -> Result<Self> {
        let cmp = match cmp {
            Comparison::Eq(v) => Comparison::Eq(v.canonical()),
            Comparison::Gt(v) => Comparison::Gt(v.canonical()),
            Comparison::Lt(v) => Comparison::Lt(v.canonical()),
            Comparison::Ge(v) => Comparison::Ge(v.canonical()),
            Comparison::Le(v) => Comparison::Le(v.canonical()),
            Comparison::Between(lo, hi) => Comparison::Between(lo.canonical(), hi.canonical()),
        };
        for v in cmp.operands() {
            if v.is_null() {
                return Err(Error::Type("predicate operand cannot be null".into()));
            }
            if matches!(v, Value::Vector(_)) {
                return Err(Error::Type("predicates on vector values are not supported".into()));
            }
        }
        if let Comparison::Between(lo, hi) = &cmp {
            if lo.total_cmp(hi)? == Ordering::Greater {
                return Err(Error::Type(format!("between bounds out of order: {lo} > {hi}")));
            }
        }
        Ok(Predicate { column: column.into(), cmp })
    }

    pub fn eq(column: impl Into<String>, v: Value) -> Self {
        Self::new(column, Comparison::Eq(v)).expect("valid eq predicate")
    }

    pub fn gt(column: impl Into<String>, v: Value) -> Self {
        Self::new(column, Comparison::Gt(v)).expect("valid gt predicate")
    }

    pub fn lt(column: impl Into<String>, v: Value) -> Self {
        Self::new(column, Comparison::Lt(v)).expect("valid lt predicate")
    }

    pub fn ge(column: impl Into<String>, v: Value) -> Self {
        Self::new(column, Comparison::Ge(v)).expect("valid ge predicate")
    }

    pub fn le(column: impl Into<String>, v: Value) -> Self {
        Self::new(column, Comparison::Le(v)).expect("valid le predicate")
    }

    pub fn between(column: impl Into<String>, lo: Value, hi: Value) -> Result<Self> {
        Self::new(column, Comparison::Between(lo, hi))
    }

    /// Operand type must equal the column type.
    pub fn check_type(&self, ty: ColumnType) -> Result<()> {
        if !ty.is_comparable() {
            return Err(Error::Type(format!(
                "column `{}` of type {ty} cannot be filtered",
                self.column
            )));
        }
        for v in self.cmp.operands() {
            if v.column_type() != Some(ty) {
                return Err(Error::Type(format!(
                    "operand {v} ({}) does not match column `{}` of type {ty}",
                    v.type_label(),
                    self.column
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |v: &Value| match v {
            Value::Utf8(s) => format!("'{s}'"),
            other => other.to_string(),
        };
        match &self.cmp {
            Comparison::Between(lo, hi) => {
                write!(f, "{} between {} and {}", self.column, lit(lo), lit(hi))
            }
            c => write!(f, "{} {} {}", self.column, c.op_name(), lit(c.operands()[0])),
        }
    }
}

/// Evaluates `p` against a single non-null value.
pub fn predicate_eval_scalar(p: &Predicate, v: &Value) -> Result<bool> {
    if v.is_null() {
        return Err(Error::NullValue);
    }
    let cmp = |x: &Value| v.total_cmp(x);
    Ok(match &p.cmp {
        Comparison::Eq(x) => cmp(x)? == Ordering::Equal,
        Comparison::Gt(x) => cmp(x)? == Ordering::Greater,
        Comparison::Lt(x) => cmp(x)? == Ordering::Less,
        Comparison::Ge(x) => cmp(x)? != Ordering::Less,
        Comparison::Le(x) => cmp(x)? != Ordering::Greater,
        Comparison::Between(lo, hi) => {
            cmp(lo)? != Ordering::Less && cmp(hi)? != Ordering::Greater
        }
    })
}

/// Typed form of a comparison for evaluating whole decoded columns.
#[derive(Clone, Debug)]
pub(crate) enum RangeMatcher {
    /// Inclusive integer range; also used for bools (0/1) and float order keys.
    Int { lo: i64, hi: i64, float_keys: bool },
    Str { lo: Bound<String>, hi: Bound<String> },
    Empty,
}

fn int_bounds(lo: Bound<i64>, hi: Bound<i64>) -> Option<(i64, i64)> {
    let lo = match lo {
        Bound::Included(x) => x,
        Bound::Excluded(x) => x.checked_add(1)?,
        Bound::Unbounded => i64::MIN,
    };
    let hi = match hi {
        Bound::Included(x) => x,
        Bound::Excluded(x) => x.checked_sub(1)?,
        Bound::Unbounded => i64::MAX,
    };
    (lo <= hi).then_some((lo, hi))
}

impl RangeMatcher {
    pub(crate) fn new(cmp: &Comparison, ty: ColumnType) -> Result<Self> {
        let (lo, hi) = cmp.bounds();
        let as_int = |v: &Value| -> Result<i64> {
            Ok(match v {
                Value::Int32(x) => *x as i64,
                Value::Int64(x) => *x,
                Value::Bool(x) => *x as i64,
                Value::Float64(x) => f64_order_key(*x),
                other => {
                    return Err(Error::Type(format!("operand {other} does not match {ty}")))
                }
            })
        };
        let map = |b: Bound<&Value>| -> Result<Bound<i64>> {
            Ok(match b {
                Bound::Included(v) => Bound::Included(as_int(v)?),
                Bound::Excluded(v) => Bound::Excluded(as_int(v)?),
                Bound::Unbounded => Bound::Unbounded,
            })
        };
        match ty {
            ColumnType::Int32 | ColumnType::Int64 | ColumnType::Bool | ColumnType::Float64 => {
                Ok(match int_bounds(map(lo)?, map(hi)?) {
                    Some((lo, hi)) => {
                        RangeMatcher::Int { lo, hi, float_keys: ty == ColumnType::Float64 }
                    }
                    None => RangeMatcher::Empty,
                })
            }
            ColumnType::Utf8 => {
                let s = |b: Bound<&Value>| -> Result<Bound<String>> {
                    Ok(match b {
                        Bound::Included(Value::Utf8(s)) => Bound::Included(s.clone()),
                        Bound::Excluded(Value::Utf8(s)) => Bound::Excluded(s.clone()),
                        Bound::Unbounded => Bound::Unbounded,
                        _ => return Err(Error::Type(format!("operand does not match {ty}"))),
                    })
                };
                Ok(RangeMatcher::Str { lo: s(lo)?, hi: s(hi)? })
            }
            ColumnType::FixedVector(_) => {
                Err(Error::Type("predicates on vector columns are not supported".into()))
            }
        }
    }

    #[inline]
    fn int(&self, x: i64) -> bool {
        match self {
            RangeMatcher::Int { lo, hi, .. } => *lo <= x && x <= *hi,
            _ => false,
        }
    }

    fn str(&self, s: &str) -> bool {
        match self {
            RangeMatcher::Str { lo, hi } => {
                let s = s.as_bytes();
                let lo_ok = match lo {
                    Bound::Included(b) => s >= b.as_bytes(),
                    Bound::Excluded(b) => s > b.as_bytes(),
                    Bound::Unbounded => true,
                };
                lo_ok
                    && match hi {
                        Bound::Included(b) => s <= b.as_bytes(),
                        Bound::Excluded(b) => s < b.as_bytes(),
                        Bound::Unbounded => true,
                    }
            }
            _ => false,
        }
    }

    /// Match bits for every row of `data`, ignoring validity.
    pub(crate) fn eval_data(&self, data: &ColumnData) -> BitVector {
        let n = data.len();
        if matches!(self, RangeMatcher::Empty) {
            return BitVector::zeros(n);
        }
        let mut words = vec![0u64; n.div_ceil(64)];
        macro_rules! fill {
            ($iter:expr) => {
                for (i, hit) in $iter.enumerate() {
                    words[i / 64] |= (hit as u64) << (i % 64);
                }
            };
        }
        match data {
            ColumnData::Int32(v) => fill!(v.iter().map(|x| self.int(*x as i64))),
            ColumnData::Int64(v) => fill!(v.iter().map(|x| self.int(*x))),
            ColumnData::Bool(v) => fill!(v.iter().map(|x| self.int(*x as i64))),
            ColumnData::Float64(v) => {
                debug_assert!(matches!(self, RangeMatcher::Int { float_keys: true, .. }));
                fill!(v.iter().map(|x| self.int(f64_order_key(*x))))
            }
            ColumnData::Utf8(v) => fill!(v.iter().map(|s| self.str(s))),
            ColumnData::Vector { .. } => {}
        }
        BitVector::from_words(n, words)
    }

    /// Match bits with null rows cleared.
    pub(crate) fn eval_column(&self, col: &Column) -> BitVector {
        let mut bits = self.eval_data(&col.data);
        bits.and(&col.validity);
        bits
    }
}

/// Rows of `col` satisfying `p`; nulls never match.
pub fn eval_column(p: &Predicate, col: &Column) -> Result<BitVector> {
    p.check_type(col.column_type())?;
    Ok(RangeMatcher::new(&p.cmp, col.column_type())?.eval_column(col))
}
