//! Logical types, scalar values and table schemas.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bit pattern every NaN is folded into before it is stored or compared.
pub const CANONICAL_NAN_BITS: u64 = 0x7ff8_0000_0000_0000;

#[inline]
pub fn canonical_f64(v: f64) -> f64 {
    if v.is_nan() {
        f64::from_bits(CANONICAL_NAN_BITS)
    } else {
        v
    }
}

/// Maps a float onto an `i64` whose natural order is the IEEE total order.
/// NaN is canonicalized first, so it sorts above `+inf`.
#[inline]
pub fn f64_order_key(v: f64) -> i64 {
    let bits = canonical_f64(v).to_bits() as i64;
    bits ^ ((((bits >> 63) as u64) >> 1) as i64)
}

#[inline]
pub fn f64_total_cmp(a: f64, b: f64) -> Ordering {
    f64_order_key(a).cmp(&f64_order_key(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Int32,
    Int64,
    Float64,
    Utf8,
    Bool,
    FixedVector(u32),
}

impl ColumnType {
    pub fn is_integer(self) -> bool {
        matches!(self, ColumnType::Int32 | ColumnType::Int64)
    }

    /// Whether values of this type admit a total order (and thus predicates and zone maps).
    pub fn is_comparable(self) -> bool {
        !matches!(self, ColumnType::FixedVector(_))
    }

    /// Width in bytes of a single value stored at native fixed width.
    pub fn fixed_width(self) -> Option<usize> {
        match self {
            ColumnType::Int32 => Some(4),
            ColumnType::Int64 | ColumnType::Float64 => Some(8),
            ColumnType::Bool => Some(1),
            ColumnType::FixedVector(dim) => Some(dim as usize * 8),
            ColumnType::Utf8 => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            ColumnType::Int32 => "int32".into(),
            ColumnType::Int64 => "int64".into(),
            ColumnType::Float64 => "float64".into(),
            ColumnType::Utf8 => "utf8".into(),
            ColumnType::Bool => "bool".into(),
            ColumnType::FixedVector(d) => format!("vector[{d}]"),
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            ColumnType::FixedVector(0) => {
                Err(Error::Schema("fixed vector dimension must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A single cell. Equality and hashing are bitwise on floats.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Value {
    Null,
    Int32(i32),
    Int64(i64),
    Float64(f64),
    Utf8(String),
    Bool(bool),
    Vector(Vec<f64>),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Float constructor that canonicalizes NaN.
    pub fn float(v: f64) -> Self {
        Value::Float64(canonical_f64(v))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Utf8(s.into())
    }

    /// Type of a non-null value. `Null` has no type.
    pub fn column_type(&self) -> Option<ColumnType> {
        Some(match self {
            Value::Null => return None,
            Value::Int32(_) => ColumnType::Int32,
            Value::Int64(_) => ColumnType::Int64,
            Value::Float64(_) => ColumnType::Float64,
            Value::Utf8(_) => ColumnType::Utf8,
            Value::Bool(_) => ColumnType::Bool,
            Value::Vector(v) => ColumnType::FixedVector(v.len() as u32),
        })
    }

    pub fn conforms_to(&self, ty: ColumnType) -> bool {
        match self {
            Value::Null => true,
            v => v.column_type() == Some(ty),
        }
    }

    /// Copy with every float NaN folded into the canonical pattern.
    pub fn canonical(&self) -> Value {
        match self {
            Value::Float64(v) => Value::Float64(canonical_f64(*v)),
            Value::Vector(v) => Value::Vector(v.iter().map(|x| canonical_f64(*x)).collect()),
            other => other.clone(),
        }
    }

    /// Total order between two non-null values of the same type.
    ///
    /// Integers compare numerically, strings by bytes, booleans `false < true`,
    /// floats by IEEE total order with the canonical NaN greatest. Vectors
    /// compare lexicographically element-wise.
    pub fn total_cmp(&self, other: &Value) -> Result<Ordering> {
        Ok(match (self, other) {
            (Value::Int32(a), Value::Int32(b)) => a.cmp(b),
            (Value::Int64(a), Value::Int64(b)) => a.cmp(b),
            (Value::Float64(a), Value::Float64(b)) => f64_total_cmp(*a, *b),
            (Value::Utf8(a), Value::Utf8(b)) => a.as_bytes().cmp(b.as_bytes()),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Vector(a), Value::Vector(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| f64_total_cmp(*x, *y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal),
            (Value::Null, _) | (_, Value::Null) => return Err(Error::NullValue),
            (a, b) => {
                return Err(Error::Type(format!(
                    "cannot compare {} with {}",
                    a.type_label(),
                    b.type_label()
                )))
            }
        })
    }

    pub(crate) fn type_label(&self) -> String {
        match self.column_type() {
            Some(t) => t.name(),
            None => "null".into(),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Int32(a), Value::Int32(b)) => a == b,
            (Value::Int64(a), Value::Int64(b)) => a == b,
            (Value::Float64(a), Value::Float64(b)) => a.to_bits() == b.to_bits(),
            (Value::Utf8(a), Value::Utf8(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Vector(a), Value::Vector(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Null => {}
            Value::Int32(v) => v.hash(state),
            Value::Int64(v) => v.hash(state),
            Value::Float64(v) => v.to_bits().hash(state),
            Value::Utf8(v) => v.hash(state),
            Value::Bool(v) => v.hash(state),
            Value::Vector(v) => v.iter().for_each(|x| x.to_bits().hash(state)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int32(v) => write!(f, "{v}"),
            Value::Int64(v) => write!(f, "{v}"),
            Value::Float64(v) => write!(f, "{v}"),
            Value::Utf8(v) => f.write_str(v),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Vector(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
    #[serde(default = "default_nullable")]
    pub nullable: bool,
}

fn default_nullable() -> bool {
    true
}

impl Field {
    pub fn new(name: impl Into<String>, ty: ColumnType, nullable: bool) -> Self {
        Field { name: name.into(), ty, nullable }
    }
}

/// Ordered, uniquely named columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Field>", into = "Vec<Field>")]
pub struct Schema {
    fields: Vec<Field>,
}

impl Schema {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Schema("schema needs at least one column".into()));
        }
        let mut seen = HashSet::new();
        for f in &fields {
            f.ty.validate()?;
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name `{}`", f.name)));
            }
        }
        Ok(Schema { fields })
    }

    /// Projected schemas may be empty; this constructor skips the non-empty check.
    pub fn projected(fields: Vec<Field>) -> Self {
        Schema { fields }
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.fields
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::Name(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.name.as_str())
    }
}

impl TryFrom<Vec<Field>> for Schema {
    type Error = Error;

    fn try_from(fields: Vec<Field>) -> Result<Self> {
        Schema::new(fields)
    }
}

impl From<Schema> for Vec<Field> {
    fn from(s: Schema) -> Self {
        s.fields
    }
}
