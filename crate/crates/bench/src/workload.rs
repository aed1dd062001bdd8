//! Randomized tables and queries for differential testing. Unlike the
//! benchmark generators these aim at edge cases: NaN and signed zeros,
//! extreme integers, long multi-byte strings, heavy nulls, runs and sorted
//! data.

use colf::{Column, ColumnType, Comparison, Field, PlainColumns, Predicate, Schema, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SCALAR_TYPES: [ColumnType; 5] =
    [ColumnType::Int32, ColumnType::Int64, ColumnType::Float64, ColumnType::Utf8, ColumnType::Bool];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Uniform,
    LowCard,
    Runs,
    Sorted,
    Constant,
}

pub const SHAPES: [Shape; 5] = [Shape::Uniform, Shape::LowCard, Shape::Runs, Shape::Sorted, Shape::Constant];

fn word(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    const CHARS: [char; 12] = ['a', 'b', 'c', 'd', 'e', 'X', 'Y', 'Z', '_', '0', '9', 'é'];
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

pub fn random_scalar(rng: &mut ChaCha8Rng, ty: ColumnType, wide: bool) -> Value {
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
        ColumnType::Utf8 => Value::str(word(rng, if wide { 24 } else { 6 })),
        ColumnType::Bool => Value::Bool(rng.gen()),
        ColumnType::FixedVector(d) => Value::Vector((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()),
    }
}

pub fn random_values(rng: &mut ChaCha8Rng, ty: ColumnType, n: usize, null_rate: f64, shape: Shape) -> Vec<Value> {
    let wide = rng.gen_bool(0.2);
    let pool: Vec<Value> = (0..rng.gen_range(1..12)).map(|_| random_scalar(rng, ty, wide)).collect();
    let mut out: Vec<Value> = match shape {
        Shape::Uniform => (0..n).map(|_| random_scalar(rng, ty, wide)).collect(),
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
            let mut v: Vec<Value> = (0..n).map(|_| random_scalar(rng, ty, wide)).collect();
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

/// A table of 1 to `max_cols` filterable columns named `c0..cN`.
pub fn random_table(rng: &mut ChaCha8Rng, rows: usize, max_cols: usize) -> PlainColumns {
    let ncols = rng.gen_range(1..=max_cols.max(1));
    let mut fields = Vec::new();
    let mut columns = Vec::new();
    for j in 0..ncols {
        let ty = *SCALAR_TYPES.choose(rng).unwrap();
        let null_rate = *[0.0, 0.0, 0.05, 0.5, 1.0].choose(rng).unwrap();
        let shape = *SHAPES.choose(rng).unwrap();
        let vals = random_values(rng, ty, rows, null_rate, shape);
        fields.push(Field::new(format!("c{j}"), ty, null_rate > 0.0));
        columns.push(Column::from_values(ty, &vals).expect("values match their type"));
    }
    PlainColumns::new(Schema::new(fields).expect("names are unique"), columns, rows).expect("columns share a length")
}

/// A predicate on `col`, usually with operands drawn from the column so
/// that matches are likely.
pub fn random_predicate(rng: &mut ChaCha8Rng, name: &str, col: &Column) -> Predicate {
    let ty = col.column_type();
    let present: Vec<usize> = (0..col.len()).filter(|&i| col.is_valid(i)).collect();
    let operand = |rng: &mut ChaCha8Rng| {
        if !present.is_empty() && rng.gen_bool(0.8) {
            col.value(*present.choose(rng).unwrap())
        } else {
            let wide = rng.gen_bool(0.3);
            random_scalar(rng, ty, wide)
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
    Predicate::new(name, cmp).expect("operands match the column type")
}
