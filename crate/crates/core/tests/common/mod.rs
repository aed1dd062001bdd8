#![allow(dead_code)]

use colf::bitvec::BitVector;
use colf::{predicate_eval_scalar, Column, ColumnType, Comparison, Field, Predicate, Schema, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub const SCALAR_TYPES: [ColumnType; 5] =
    [ColumnType::Int32, ColumnType::Int64, ColumnType::Float64, ColumnType::Utf8, ColumnType::Bool];

#[derive(Clone, Copy, Debug)]
pub enum Shape {
    Uniform,
    LowCard,
    Runs,
    Sorted,
    Constant,
}

const SHAPES: [Shape; 5] = [Shape::Uniform, Shape::LowCard, Shape::Runs, Shape::Sorted, Shape::Constant];

fn word(rng: &mut TestRng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    const CHARS: [char; 12] = ['a', 'b', 'c', 'd', 'e', 'X', 'Y', 'Z', '_', '0', '9', 'é'];
    (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

fn base_value(rng: &mut TestRng, ty: ColumnType, wide: bool) -> Value {
    match ty {
        ColumnType::Int32 => Value::Int32(if wide { rng.gen() } else { rng.gen_range(-50..200) }),
        ColumnType::Int64 => Value::Int64(if wide { rng.gen() } else { rng.gen_range(-1000..5000) }),
        ColumnType::Float64 => Value::float(match rng.gen_range(0..20) {
            0 => f64::NAN,
            1 => -0.0,
            2 => f64::INFINITY,
            _ if wide => f64::from_bits(rng.gen()),
            _ => rng.gen_range(-100.0..100.0f64),
        }),
        // long strings exercise zone-map truncation
        ColumnType::Utf8 => Value::str(word(rng, if wide { 24 } else { 6 })),
        ColumnType::Bool => Value::Bool(rng.gen()),
        ColumnType::FixedVector(d) => Value::Vector((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()),
    }
}

/// A column of `n` values with a randomly chosen distribution shape.
pub fn random_values(rng: &mut TestRng, ty: ColumnType, n: usize, null_rate: f64) -> Vec<Value> {
    let shape = *SHAPES.choose(rng).unwrap();
    random_values_shaped(rng, ty, n, null_rate, shape)
}

pub fn random_values_shaped(rng: &mut TestRng, ty: ColumnType, n: usize, null_rate: f64, shape: Shape) -> Vec<Value> {
    let wide = rng.gen_bool(0.2);
    let pool: Vec<Value> = (0..rng.gen_range(1..12)).map(|_| base_value(rng, ty, wide)).collect();
    let mut out: Vec<Value> = match shape {
        Shape::Uniform => (0..n).map(|_| base_value(rng, ty, wide)).collect(),
        Shape::LowCard => (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect(),
        Shape::Runs => {
            let mut v = Vec::with_capacity(n);
            while v.len() < n {
                let x = pool.choose(rng).unwrap().clone();
                let len = rng.gen_range(1..300).min(n - v.len());
                v.extend(std::iter::repeat(x).take(len));
            }
            v
        }
        Shape::Sorted => {
            let mut v: Vec<Value> = (0..n).map(|_| base_value(rng, ty, wide)).collect();
            if ty.is_comparable() {
                v.sort_by(|a, b| a.total_cmp(b).unwrap());
            }
            v
        }
        Shape::Constant => vec![pool[0].clone(); n],
    };
    for v in out.iter_mut() {
        if rng.gen_bool(null_rate) {
            *v = Value::Null;
        }
    }
    out
}

pub struct Table {
    pub schema: Schema,
    pub columns: Vec<Column>,
    pub rows: usize,
}

impl Table {
    pub fn row(&self, i: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c.value(i)).collect()
    }
}

/// A random table whose columns are all filterable types, with column
/// names `c0..cN`.
pub fn random_table(rng: &mut TestRng, rows: usize, max_cols: usize) -> Table {
    let ncols = rng.gen_range(1..=max_cols);
    let mut fields = Vec::new();
    let mut columns = Vec::new();
    for j in 0..ncols {
        let ty = *SCALAR_TYPES.choose(rng).unwrap();
        let null_rate = *[0.0, 0.0, 0.05, 0.5, 1.0].choose(rng).unwrap();
        let vals = random_values(rng, ty, rows, null_rate);
        fields.push(Field::new(format!("c{j}"), ty, null_rate > 0.0));
        columns.push(Column::from_values(ty, &vals).unwrap());
    }
    Table { schema: Schema::new(fields).unwrap(), columns, rows }
}

/// A random predicate on column `name`, with operands usually drawn from
/// the column so that matches are likely.
pub fn random_predicate(rng: &mut TestRng, name: &str, col: &Column) -> Predicate {
    let ty = col.column_type();
    let operand = |rng: &mut TestRng| {
        let present: Vec<usize> = (0..col.len()).filter(|&i| col.is_valid(i)).collect();
        if !present.is_empty() && rng.gen_bool(0.8) {
            col.value(*present.choose(rng).unwrap())
        } else {
            let wide = rng.gen_bool(0.3);
            base_value(rng, ty, wide)
        }
    };
    let a = operand(rng);
    let cmp = match rng.gen_range(0..6) {
        0 => Comparison::Eq(a),
        1 => Comparison::Gt(a),
        2 => Comparison::Lt(a),
        3 => Comparison::Ge(a),
        4 => Comparison::Le(a),
        _ => {
            let b = operand(rng);
            if a.total_cmp(&b).unwrap().is_le() {
                Comparison::Between(a, b)
            } else {
                Comparison::Between(b, a)
            }
        }
    };
    Predicate::new(name, cmp).unwrap()
}

/// Row-at-a-time reference filter: nulls never match.
pub fn naive_filter(t: &Table, preds: &[Predicate]) -> BitVector {
    let idx: Vec<usize> = preds.iter().map(|p| t.schema.index_of(&p.column).unwrap()).collect();
    let bits: Vec<bool> = (0..t.rows)
        .map(|i| {
            preds.iter().zip(&idx).all(|(p, &j)| {
                let v = t.columns[j].value(i);
                !v.is_null() && predicate_eval_scalar(p, &v).unwrap()
            })
        })
        .collect();
    BitVector::from_bools(&bits)
}

pub fn random_bits(rng: &mut TestRng, n: usize, p: f64) -> BitVector {
    BitVector::from_bools(&(0..n).map(|_| rng.gen_bool(p)).collect::<Vec<_>>())
}
