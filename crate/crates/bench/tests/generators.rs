use colf::ColumnType;
use colf_bench::gen::{demographics_spec, sales_spec, EDUCATION};
use colf_bench::{checksum, gen_selection, gen_table, BenchError, ColumnSpec, Generator, TableSpec};
use proptest::prelude::*;

fn mixed(rows: usize, seed: u64, null_rate: f64) -> TableSpec {
    TableSpec {
        columns: vec![
            ColumnSpec::new("u", ColumnType::Int64, Generator::Uniform { min: -5, max: 5 }).with_nulls(null_rate),
            ColumnSpec::new("z", ColumnType::Int32, Generator::Zipf { cardinality: 100, skew: 1.1, first: 7 }),
            ColumnSpec::new("d", ColumnType::Float64, Generator::Decimal { min: 0, max: 999, scale: 2 }),
            ColumnSpec::new("s", ColumnType::Utf8, Generator::StringPool { cardinality: 9, len: 4 }).with_nulls(null_rate),
            ColumnSpec::new("v", ColumnType::FixedVector(3), Generator::Vector { dim: 3 }),
        ],
        rows,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn same_spec_same_table(rows in 0usize..3000, seed: u64, null_rate in 0.0f64..=1.0) {
        let spec = mixed(rows, seed, null_rate);
        let a = gen_table(&spec).unwrap();
        let b = gen_table(&spec).unwrap();
        prop_assert_eq!(a.row_count, rows);
        prop_assert_eq!(checksum(&a), checksum(&b));
    }

    #[test]
    fn columns_do_not_depend_on_neighbours(rows in 1usize..2000, seed: u64) {
        // column j's stream is fixed by (seed, j), so appending a column changes nothing before it
        let spec = mixed(rows, seed, 0.1);
        let mut longer = spec.clone();
        longer.columns.push(ColumnSpec::new("extra", ColumnType::Int64, Generator::Sequential { start: 0, repeat: 3 }));
        let a = gen_table(&spec).unwrap();
        let b = gen_table(&longer).unwrap().project(&["u", "z", "d", "s", "v"]).unwrap();
        prop_assert!(a.same_values(&b));
    }

    #[test]
    fn selection_has_exact_popcount(n in 0usize..20_000, s in 0.0f64..=1.0, seed: u64) {
        let bv = gen_selection(n, s, seed).unwrap();
        prop_assert_eq!(bv.len(), n);
        prop_assert_eq!(bv.count_ones(), (s * n as f64).round() as usize);
        prop_assert_eq!(bv, gen_selection(n, s, seed).unwrap());
    }

    #[test]
    fn uniform_stays_in_range(min in -1000i64..1000, span in 0i64..50, seed: u64) {
        let spec = TableSpec {
            columns: vec![ColumnSpec::new("x", ColumnType::Int64, Generator::Uniform { min, max: min + span })],
            rows: 500,
            seed,
        };
        let t = gen_table(&spec).unwrap();
        for row in t.rows() {
            let colf::Value::Int64(v) = row[0] else { panic!("non-null int64 expected") };
            prop_assert!((min..=min + span).contains(&v));
        }
    }
}

#[test]
fn different_seeds_differ() {
    let a = gen_table(&mixed(1000, 1, 0.0)).unwrap();
    let b = gen_table(&mixed(1000, 2, 0.0)).unwrap();
    assert_ne!(checksum(&a), checksum(&b));
}

#[test]
fn benchmark_tables_have_expected_shape() {
    let sales = gen_table(&sales_spec(5000, 3)).unwrap();
    assert_eq!(sales.schema.len(), 34);
    assert_eq!(sales.row_count, 5000);
    let demo = gen_table(&demographics_spec(5000, 3)).unwrap();
    assert_eq!(demo.schema.len(), 9);
    let edu = demo.column("cd_education_status").unwrap();
    for i in 0..demo.row_count {
        if let colf::Value::Utf8(s) = edu.value(i) {
            assert!(EDUCATION.contains(&s.as_str()), "{s}");
        }
    }
}

#[test]
fn bad_specs_are_config_errors() {
    let bad = [
        ColumnSpec::new("x", ColumnType::Utf8, Generator::Uniform { min: 0, max: 1 }),
        ColumnSpec::new("x", ColumnType::Int64, Generator::Uniform { min: 2, max: 1 }),
        ColumnSpec::new("x", ColumnType::Int64, Generator::Zipf { cardinality: 10, skew: 1.0, first: 10 }),
        ColumnSpec::new("x", ColumnType::Utf8, Generator::StringPool { cardinality: 100, len: 1 }),
        ColumnSpec::new("x", ColumnType::FixedVector(4), Generator::Vector { dim: 3 }),
        ColumnSpec::new("x", ColumnType::Utf8, Generator::Categorical { values: vec!["a".into()], weights: vec![0.0] }),
    ];
    for c in bad {
        let spec = TableSpec { columns: vec![c.clone()], rows: 10, seed: 0 };
        assert!(matches!(gen_table(&spec), Err(BenchError::Config(_))), "{c:?}");
    }
    assert!(matches!(gen_selection(10, 1.5, 0), Err(BenchError::Config(_))));
}

#[test]
fn spec_round_trips_through_json() {
    let spec = mixed(10, 9, 0.25);
    let json = serde_json::to_string(&spec).unwrap();
    let back: TableSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(back, spec);
}
