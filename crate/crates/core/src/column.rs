//! Decoded, typed column storage with a validity bitmap.

use std::cmp::Ordering;

use crate::bitvec::BitVector;
use crate::error::{Error, Result};
use crate::types::{canonical_f64, f64_total_cmp, ColumnType, Value};

/// Contiguous values of one type. Null slots hold a placeholder
/// (zero, empty string, `false`, zero vector).
#[derive(Clone, Debug)]
pub enum ColumnData {
    Int32(Vec<i32>),
    Int64(Vec<i64>),
    Float64(Vec<f64>),
    Utf8(Vec<String>),
    Bool(Vec<bool>),
    Vector { dim: usize, values: Vec<f64> },
}

impl ColumnData {
    pub fn with_capacity(ty: ColumnType, n: usize) -> Self {
        match ty {
            ColumnType::Int32 => ColumnData::Int32(Vec::with_capacity(n)),
            ColumnType::Int64 => ColumnData::Int64(Vec::with_capacity(n)),
            ColumnType::Float64 => ColumnData::Float64(Vec::with_capacity(n)),
            ColumnType::Utf8 => ColumnData::Utf8(Vec::with_capacity(n)),
            ColumnType::Bool => ColumnData::Bool(Vec::with_capacity(n)),
            ColumnType::FixedVector(d) => ColumnData::Vector {
                dim: d as usize,
                values: Vec::with_capacity(n * d as usize),
            },
        }
    }

    pub fn column_type(&self) -> ColumnType {
        match self {
            ColumnData::Int32(_) => ColumnType::Int32,
            ColumnData::Int64(_) => ColumnType::Int64,
            ColumnData::Float64(_) => ColumnType::Float64,
            ColumnData::Utf8(_) => ColumnType::Utf8,
            ColumnData::Bool(_) => ColumnType::Bool,
            ColumnData::Vector { dim, .. } => ColumnType::FixedVector(*dim as u32),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Int32(v) => v.len(),
            ColumnData::Int64(v) => v.len(),
            ColumnData::Float64(v) => v.len(),
            ColumnData::Utf8(v) => v.len(),
            ColumnData::Bool(v) => v.len(),
            ColumnData::Vector { dim, values } => values.len() / dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> Value {
        match self {
            ColumnData::Int32(v) => Value::Int32(v[i]),
            ColumnData::Int64(v) => Value::Int64(v[i]),
            ColumnData::Float64(v) => Value::Float64(v[i]),
            ColumnData::Utf8(v) => Value::Utf8(v[i].clone()),
            ColumnData::Bool(v) => Value::Bool(v[i]),
            ColumnData::Vector { dim, values } => Value::Vector(values[i * dim..(i + 1) * dim].to_vec()),
        }
    }

    pub fn push_placeholder(&mut self) {
        match self {
            ColumnData::Int32(v) => v.push(0),
            ColumnData::Int64(v) => v.push(0),
            ColumnData::Float64(v) => v.push(0.0),
            ColumnData::Utf8(v) => v.push(String::new()),
            ColumnData::Bool(v) => v.push(false),
            ColumnData::Vector { dim, values } => values.extend(std::iter::repeat(0.0).take(*dim)),
        }
    }

    /// Appends a non-null value; floats are canonicalized.
    pub fn push_value(&mut self, value: &Value) -> Result<()> {
        match (self, value) {
            (ColumnData::Int32(v), Value::Int32(x)) => v.push(*x),
            (ColumnData::Int64(v), Value::Int64(x)) => v.push(*x),
            (ColumnData::Float64(v), Value::Float64(x)) => v.push(canonical_f64(*x)),
            (ColumnData::Utf8(v), Value::Utf8(x)) => v.push(x.clone()),
            (ColumnData::Bool(v), Value::Bool(x)) => v.push(*x),
            (ColumnData::Vector { dim, values }, Value::Vector(x)) if x.len() == *dim => {
                values.extend(x.iter().map(|f| canonical_f64(*f)))
            }
            (data, value) => {
                return Err(Error::Type(format!(
                    "value of type {} does not fit column of type {}",
                    value.type_label(),
                    data.column_type()
                )))
            }
        }
        Ok(())
    }

    /// Appends element `i` of `other`, which must have the same type.
    #[inline]
    pub fn push_from(&mut self, other: &ColumnData, i: usize) {
        match (self, other) {
            (ColumnData::Int32(a), ColumnData::Int32(b)) => a.push(b[i]),
            (ColumnData::Int64(a), ColumnData::Int64(b)) => a.push(b[i]),
            (ColumnData::Float64(a), ColumnData::Float64(b)) => a.push(b[i]),
            (ColumnData::Utf8(a), ColumnData::Utf8(b)) => a.push(b[i].clone()),
            (ColumnData::Bool(a), ColumnData::Bool(b)) => a.push(b[i]),
            (ColumnData::Vector { values: a, .. }, ColumnData::Vector { dim, values: b }) => {
                a.extend_from_slice(&b[i * dim..(i + 1) * dim])
            }
            (a, b) => panic!("push_from type mismatch: {} vs {}", a.column_type(), b.column_type()),
        }
    }

    pub fn extend_from(&mut self, other: &ColumnData) {
        match (self, other) {
            (ColumnData::Int32(a), ColumnData::Int32(b)) => a.extend_from_slice(b),
            (ColumnData::Int64(a), ColumnData::Int64(b)) => a.extend_from_slice(b),
            (ColumnData::Float64(a), ColumnData::Float64(b)) => a.extend_from_slice(b),
            (ColumnData::Utf8(a), ColumnData::Utf8(b)) => a.extend_from_slice(b),
            (ColumnData::Bool(a), ColumnData::Bool(b)) => a.extend_from_slice(b),
            (ColumnData::Vector { values: a, .. }, ColumnData::Vector { values: b, .. }) => {
                a.extend_from_slice(b)
            }
            (a, b) => panic!("extend_from type mismatch: {} vs {}", a.column_type(), b.column_type()),
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> ColumnData {
        match self {
            ColumnData::Int32(v) => ColumnData::Int32(v[start..end].to_vec()),
            ColumnData::Int64(v) => ColumnData::Int64(v[start..end].to_vec()),
            ColumnData::Float64(v) => ColumnData::Float64(v[start..end].to_vec()),
            ColumnData::Utf8(v) => ColumnData::Utf8(v[start..end].to_vec()),
            ColumnData::Bool(v) => ColumnData::Bool(v[start..end].to_vec()),
            ColumnData::Vector { dim, values } => ColumnData::Vector {
                dim: *dim,
                values: values[start * dim..end * dim].to_vec(),
            },
        }
    }

    pub fn gather(&self, indices: impl IntoIterator<Item = usize>) -> ColumnData {
        let indices = indices.into_iter();
        let mut out = ColumnData::with_capacity(self.column_type(), indices.size_hint().0);
        for i in indices {
            out.push_from(self, i);
        }
        out
    }

    /// Compares element `i` with a non-null value of the same type.
    pub fn cmp_value(&self, i: usize, v: &Value) -> Result<Ordering> {
        Ok(match (self, v) {
            (ColumnData::Int32(a), Value::Int32(b)) => a[i].cmp(b),
            (ColumnData::Int64(a), Value::Int64(b)) => a[i].cmp(b),
            (ColumnData::Float64(a), Value::Float64(b)) => f64_total_cmp(a[i], *b),
            (ColumnData::Utf8(a), Value::Utf8(b)) => a[i].as_bytes().cmp(b.as_bytes()),
            (ColumnData::Bool(a), Value::Bool(b)) => a[i].cmp(b),
            _ => return self.value(i).total_cmp(v),
        })
    }

    /// Compares elements `i` and `j` under the total order.
    pub fn cmp_at(&self, i: usize, j: usize) -> Ordering {
        match self {
            ColumnData::Int32(a) => a[i].cmp(&a[j]),
            ColumnData::Int64(a) => a[i].cmp(&a[j]),
            ColumnData::Float64(a) => f64_total_cmp(a[i], a[j]),
            ColumnData::Utf8(a) => a[i].as_bytes().cmp(a[j].as_bytes()),
            ColumnData::Bool(a) => a[i].cmp(&a[j]),
            ColumnData::Vector { dim, values } => {
                let (x, y) = (&values[i * dim..(i + 1) * dim], &values[j * dim..(j + 1) * dim]);
                x.iter()
                    .zip(y)
                    .map(|(p, q)| f64_total_cmp(*p, *q))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }
        }
    }

    /// Bitwise equality of elements `i` and `j`.
    pub fn eq_at(&self, i: usize, j: usize) -> bool {
        match self {
            ColumnData::Float64(a) => a[i].to_bits() == a[j].to_bits(),
            ColumnData::Vector { dim, values } => values[i * dim..(i + 1) * dim]
                .iter()
                .zip(&values[j * dim..(j + 1) * dim])
                .all(|(p, q)| p.to_bits() == q.to_bits()),
            _ => self.cmp_at(i, j).is_eq(),
        }
    }
}

/// A typed column plus validity bitmap (1 = present).
#[derive(Clone, Debug)]
pub struct Column {
    pub data: ColumnData,
    pub validity: BitVector,
}

impl Column {
    pub fn new(data: ColumnData, validity: BitVector) -> Result<Self> {
        if data.len() != validity.len() {
            return Err(Error::Shape { expected: data.len(), actual: validity.len() });
        }
        Ok(Column { data, validity })
    }

    pub fn all_valid(data: ColumnData) -> Self {
        let validity = BitVector::ones(data.len());
        Column { data, validity }
    }

    pub fn empty(ty: ColumnType) -> Self {
        Column { data: ColumnData::with_capacity(ty, 0), validity: BitVector::zeros(0) }
    }

    pub fn with_capacity(ty: ColumnType, n: usize) -> Self {
        Column { data: ColumnData::with_capacity(ty, n), validity: BitVector::zeros(0) }
    }

    /// Builds a column from values; `Null` becomes a placeholder slot.
    pub fn from_values(ty: ColumnType, values: &[Value]) -> Result<Self> {
        let mut col = Column::with_capacity(ty, values.len());
        for v in values {
            col.push(v)?;
        }
        Ok(col)
    }

    pub fn column_type(&self) -> ColumnType {
        self.data.column_type()
    }

    pub fn len(&self) -> usize {
        self.validity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn null_count(&self) -> usize {
        self.len() - self.validity.count_ones()
    }

    #[inline]
    pub fn is_valid(&self, i: usize) -> bool {
        self.validity.get(i)
    }

    pub fn value(&self, i: usize) -> Value {
        if self.validity.get(i) {
            self.data.value(i)
        } else {
            Value::Null
        }
    }

    pub fn to_values(&self) -> Vec<Value> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn push(&mut self, v: &Value) -> Result<()> {
        if v.is_null() {
            self.push_null();
        } else {
            self.data.push_value(v)?;
            self.validity.push(true);
        }
        Ok(())
    }

    pub fn push_null(&mut self) {
        self.data.push_placeholder();
        self.validity.push(false);
    }

    pub fn push_from(&mut self, other: &Column, i: usize) {
        self.data.push_from(&other.data, i);
        self.validity.push(other.validity.get(i));
    }

    pub fn extend_from(&mut self, other: &Column) {
        self.data.extend_from(&other.data);
        self.validity.extend(&other.validity);
    }

    pub fn slice(&self, start: usize, end: usize) -> Column {
        Column { data: self.data.slice(start, end), validity: self.validity.slice(start..end) }
    }

    /// Rows whose bit is set in `selection`, in order.
    pub fn select(&self, selection: &BitVector) -> Result<Column> {
        if selection.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), actual: selection.len() });
        }
        let mut out = Column::with_capacity(self.column_type(), selection.count_ones());
        for i in selection.iter_ones() {
            out.push_from(self, i);
        }
        Ok(out)
    }

    /// Value equality, ignoring placeholder contents under null slots.
    pub fn same_values(&self, other: &Column) -> bool {
        self.len() == other.len()
            && self.column_type() == other.column_type()
            && (0..self.len()).all(|i| self.value(i) == other.value(i))
    }
}
