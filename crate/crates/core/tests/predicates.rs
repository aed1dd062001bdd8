mod common;

use std::cmp::Ordering;
use std::sync::Arc;

use colf::zonemap::STRING_BOUND_BYTES;
use colf::{
    filter, predicate_eval_scalar, write_table, zone_map_build, ColfFile, Column, ColumnType, Comparison, DecodeStats,
    Error, Field, Predicate, Schema, Strategy, Value, WriteOptions,
};
use common::*;
use rand::Rng;

/// Independent ordering: integers numerically, strings by bytes, floats by
/// IEEE total order with every NaN treated as the positive quiet NaN.
fn reference_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Int32(x), Value::Int32(y)) => x.cmp(y),
        (Value::Int64(x), Value::Int64(y)) => x.cmp(y),
        (Value::Utf8(x), Value::Utf8(y)) => x.as_bytes().cmp(y.as_bytes()),
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Float64(x), Value::Float64(y)) => {
            let c = |v: f64| if v.is_nan() { f64::NAN.abs() } else { v };
            c(*x).total_cmp(&c(*y))
        }
        _ => panic!("mixed types"),
    }
}

fn reference_eval(cmp: &Comparison, v: &Value) -> bool {
    match cmp {
        Comparison::Eq(x) => reference_cmp(v, x) == Ordering::Equal,
        Comparison::Gt(x) => reference_cmp(v, x) == Ordering::Greater,
        Comparison::Lt(x) => reference_cmp(v, x) == Ordering::Less,
        Comparison::Ge(x) => reference_cmp(v, x) != Ordering::Less,
        Comparison::Le(x) => reference_cmp(v, x) != Ordering::Greater,
        Comparison::Between(lo, hi) => reference_cmp(v, lo) != Ordering::Less && reference_cmp(v, hi) != Ordering::Greater,
    }
}

fn grid(ty: ColumnType) -> Vec<Value> {
    match ty {
        ColumnType::Int32 => [i32::MIN, -2, -1, 0, 1, 2, i32::MAX].map(Value::Int32).to_vec(),
        ColumnType::Int64 => [i64::MIN, -2, -1, 0, 1, 2, i64::MAX].map(Value::Int64).to_vec(),
        ColumnType::Float64 => [f64::NEG_INFINITY, -1.5, -0.0, 0.0, 1e-300, 2.0, f64::INFINITY, f64::NAN, -f64::NAN]
            .map(Value::float)
            .to_vec(),
        ColumnType::Utf8 => ["", "A", "Secondary", "College", "a", "ab", "b", "é"].map(Value::str).to_vec(),
        ColumnType::Bool => vec![Value::Bool(false), Value::Bool(true)],
        ColumnType::FixedVector(_) => unreachable!(),
    }
}

#[test]
fn scalar_eval_matches_reference_on_grids() {
    for ty in SCALAR_TYPES {
        let g = grid(ty);
        for a in &g {
            let mut cmps =
                vec![Comparison::Eq(a.clone()), Comparison::Gt(a.clone()), Comparison::Lt(a.clone()), Comparison::Ge(a.clone()), Comparison::Le(a.clone())];
            for b in &g {
                if reference_cmp(a, b) != Ordering::Greater {
                    cmps.push(Comparison::Between(a.clone(), b.clone()));
                }
            }
            for cmp in cmps {
                let p = Predicate::new("c", cmp.clone()).unwrap();
                for v in &g {
                    assert_eq!(predicate_eval_scalar(&p, v).unwrap(), reference_eval(&cmp, v), "{p} on {v:?}");
                }
            }
        }
    }
}

#[test]
fn scalar_eval_examples_and_errors() {
    assert!(predicate_eval_scalar(&Predicate::gt("c", Value::Int64(5)), &Value::Int64(7)).unwrap());
    assert!(predicate_eval_scalar(&Predicate::eq("c", Value::str("Secondary")), &Value::str("Secondary")).unwrap());
    let between = Predicate::between("c", Value::Int64(2), Value::Int64(4)).unwrap();
    assert!(!predicate_eval_scalar(&between, &Value::Int64(1)).unwrap());
    assert!(matches!(predicate_eval_scalar(&between, &Value::str("x")), Err(Error::Type(_))));
    assert!(matches!(predicate_eval_scalar(&between, &Value::Null), Err(Error::NullValue)));
    assert!(Predicate::between("c", Value::Int64(4), Value::Int64(2)).is_err());
    assert!(Predicate::new("c", Comparison::Between(Value::Int64(1), Value::str("z"))).is_err());
}

#[test]
fn zone_map_pruning_is_sound() {
    let mut r = rng(99);
    let mut pruned = 0;
    for _ in 0..1000 {
        let ty = SCALAR_TYPES[r.gen_range(0..SCALAR_TYPES.len())];
        let n = r.gen_range(1..200);
        let vals = random_values(&mut r, ty, n, 0.1);
        let z = zone_map_build(&vals).unwrap();
        let col = Column::from_values(ty, &vals).unwrap();
        let p = if r.gen_bool(0.5) {
            random_predicate(&mut r, "c", &col)
        } else {
            // operands from an unrelated column hit outside the zone more often
            let other = Column::from_values(ty, &random_values(&mut r, ty, 20, 0.0)).unwrap();
            random_predicate(&mut r, "c", &other)
        };
        if !z.may_match(&p) {
            pruned += 1;
            let hits = vals.iter().filter(|v| !v.is_null() && predicate_eval_scalar(&p, v).unwrap()).count();
            assert_eq!(hits, 0, "{p} pruned a zone with matches: {z:?}");
        }
        // invariant: every non-null value lies within [min, max]
        if let (Some(min), Some(max)) = (&z.min, &z.max) {
            for v in vals.iter().filter(|v| !v.is_null()) {
                assert_ne!(v.total_cmp(min).unwrap(), Ordering::Less);
                if let (Value::Utf8(s), Value::Utf8(m)) = (v, max) {
                    let cut = (0..=STRING_BOUND_BYTES.min(s.len())).rev().find(|&i| s.is_char_boundary(i)).unwrap();
                    assert!(&s[..cut] <= m.as_str());
                } else {
                    assert_ne!(v.total_cmp(max).unwrap(), Ordering::Greater);
                }
            }
        } else {
            assert!(vals.iter().all(Value::is_null));
        }
    }
    assert!(pruned > 100, "only {pruned} zones pruned");
}

#[test]
fn zone_map_examples() {
    let z = zone_map_build(&[5, 10].map(Value::Int64)).unwrap();
    assert!(!z.may_match(&Predicate::gt("c", Value::Int64(12))));
    assert!(z.may_match(&Predicate::eq("c", Value::Int64(7))));
    let all_null = zone_map_build(&[Value::Null, Value::Null]).unwrap();
    assert!(!all_null.may_match(&Predicate::eq("c", Value::Int64(7))));
}

#[test]
fn concurrent_filters_count_the_same() {
    let mut r = rng(31);
    let t = random_table(&mut r, 40_000, 4);
    let mut bytes = Vec::new();
    write_table(&t.schema, &t.columns, &WriteOptions::default().with_batch_rows(5000), &mut bytes).unwrap();
    let file = Arc::new(ColfFile::open(bytes).unwrap());
    let preds: Vec<Predicate> = (0..t.columns.len())
        .map(|j| random_predicate(&mut r, &format!("c{j}"), &t.columns[j]))
        .collect();
    let serial = DecodeStats::new();
    for p in &preds {
        filter(&file, std::slice::from_ref(p), Strategy::LazyIm, &serial).unwrap();
    }
    let shared = Arc::new(DecodeStats::new());
    std::thread::scope(|s| {
        for p in &preds {
            let (file, shared) = (file.clone(), shared.clone());
            s.spawn(move || filter(&file, std::slice::from_ref(p), Strategy::LazyIm, &shared).unwrap());
        }
    });
    assert_eq!(serial.snapshot(), shared.snapshot());
}

#[test]
fn schema_rules() {
    assert!(Schema::new(vec![]).is_err());
    let dup = vec![Field::new("a", ColumnType::Int32, false), Field::new("a", ColumnType::Utf8, false)];
    assert!(matches!(Schema::new(dup), Err(Error::Schema(_))));
    assert!(Schema::new(vec![Field::new("v", ColumnType::FixedVector(0), false)]).is_err());
}
