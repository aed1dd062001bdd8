mod common;

use colf::bitvec::BitVector;
use colf::encode::bitpack::pack;
use colf::encode::KeyPredicate;
use colf::exec::{filter_packed_scalar, prefilter_order, project, project_lazy, SkipReason};
use colf::{
    apply_mask, eval_subexpression, filter, filter_packed, load_plain, materialize, open_lazy, predicate_eval_scalar,
    write_table, CodecKind, ColfFile, Column, ColumnType, DecodeStats, EncodingKind, Error, Field, MaskMode, Policy,
    Predicate, Schema, Strategy, SubexpressionQuery, Value, WriteOptions,
};
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn file_of(t: &Table, opts: &WriteOptions) -> ColfFile<Vec<u8>> {
    let mut out = Vec::new();
    write_table(&t.schema, &t.columns, opts, &mut out).unwrap();
    ColfFile::open(out).unwrap()
}

fn random_opts(r: &mut TestRng) -> WriteOptions {
    let policy = *[
        Policy::ParquetLike,
        Policy::OrcLike,
        Policy::ArrowLike { dict_strings: true },
        Policy::ArrowLike { dict_strings: false },
    ]
    .choose(r)
    .unwrap();
    let codec = *CodecKind::ALL.choose(r).unwrap();
    WriteOptions::new(policy, codec).with_batch_rows(*[300usize, 2000, 5000].choose(r).unwrap())
}

/// Brute-force check that every skipped zone holds no match.
fn assert_skips_sound(t: &Table, preds: &[Predicate], out: &colf::exec::FilterOutput, oracle: &BitVector) {
    for s in &out.skips {
        let rows = s.rows.start as usize..s.rows.end as usize;
        match s.reason {
            SkipReason::ZoneMap | SkipReason::DictNoMatch => {
                let p = &preds[s.predicate];
                let col = &t.columns[s.column];
                for i in rows {
                    let v = col.value(i);
                    assert!(v.is_null() || !predicate_eval_scalar(p, &v).unwrap(), "{:?} skipped a match at row {i} for {p}", s);
                }
            }
            SkipReason::ShortCircuit => assert_eq!(oracle.count_ones_in(rows), 0, "{s:?}"),
        }
    }
}

#[test]
fn strategies_agree_with_row_scan() {
    let mut r = rng(2024);
    for case in 0..220 {
        let rows = r.gen_range(0..12_000);
        let t = random_table(&mut r, rows, 5);
        let opts = random_opts(&mut r);
        let file = file_of(&t, &opts);
        let npred = r.gen_range(0..=3);
        let preds: Vec<Predicate> = (0..npred)
            .map(|_| {
                let j = r.gen_range(0..t.columns.len());
                random_predicate(&mut r, &format!("c{j}"), &t.columns[j])
            })
            .collect();
        let oracle = naive_filter(&t, &preds);
        let projection: Vec<String> = t.schema.names().filter(|_| r.gen_bool(0.6)).map(String::from).collect();
        let q = SubexpressionQuery { projection: projection.clone(), predicates: preds.clone() };
        let expected_rows: Vec<Vec<Value>> = oracle
            .iter_ones()
            .map(|i| projection.iter().map(|n| t.columns[t.schema.index_of(n).unwrap()].value(i)).collect())
            .collect();

        for strat in Strategy::ALL {
            let out = filter(&file, &preds, strat, &DecodeStats::new()).unwrap();
            assert_eq!(out.bits, oracle, "case {case} {strat} {preds:?}");
            assert_skips_sound(&t, &preds, &out, &oracle);

            let res = eval_subexpression(&q, &file, strat).unwrap();
            assert_eq!(res.table.row_count, oracle.count_ones(), "case {case} {strat}");
            let got: Vec<Vec<Value>> = res.table.rows().collect();
            assert_eq!(got, expected_rows, "case {case} {strat}");
        }
    }
}

#[test]
fn zone_map_skips_chunks_that_cannot_match() {
    // ids 0..40_000 in batches of 10_000; Gt 35_000 only touches the last batch
    let vals: Vec<Value> = (0..40_000).map(Value::Int64).collect();
    let t = Table {
        schema: Schema::new(vec![Field::new("id", ColumnType::Int64, false)]).unwrap(),
        columns: vec![Column::from_values(ColumnType::Int64, &vals).unwrap()],
        rows: vals.len(),
    };
    let file = file_of(&t, &WriteOptions::default().with_batch_rows(10_000));
    let p = vec![Predicate::gt("id", Value::Int64(35_000))];
    let stats = DecodeStats::new();
    let out = filter(&file, &p, Strategy::LazyIm, &stats).unwrap();
    let c = stats.snapshot();
    assert_eq!(out.bits.count_ones(), 4999);
    assert_eq!(c.chunks_opened, 1);
    assert_eq!(c.chunks_skipped, 3);
    assert_eq!(c.batches_skipped, 3);
    // the first page of the last batch (30_000..34_096) is pruned too
    assert_eq!(c.values_decoded, 10_000 - 4096);
    assert_eq!(out.skips.iter().filter(|s| s.reason == SkipReason::ZoneMap).count(), 3 + 1);

    let stats = DecodeStats::new();
    filter(&file, &[Predicate::gt("id", Value::Int64(1 << 40))], Strategy::ChunkSkip, &stats).unwrap();
    assert_eq!(stats.snapshot().values_decoded, 0);
    let stats = DecodeStats::new();
    filter(&file, &p, Strategy::LazyStream, &stats).unwrap();
    assert_eq!(stats.snapshot().values_decoded, 40_000);
}

fn strings_table(rows: usize, card: usize, seed: u64) -> Table {
    let mut r = rng(seed);
    let pool: Vec<String> = (0..card).map(|i| format!("value-{i:03}")).collect();
    let vals: Vec<Value> = (0..rows).map(|_| Value::str(pool.choose(&mut r).unwrap().clone())).collect();
    Table {
        schema: Schema::new(vec![Field::new("s", ColumnType::Utf8, false)]).unwrap(),
        columns: vec![Column::from_values(ColumnType::Utf8, &vals).unwrap()],
        rows,
    }
}

#[test]
fn direct_filter_decodes_no_values() {
    let t = strings_table(50_000, 20, 1);
    let file = file_of(&t, &WriteOptions::new(Policy::ParquetLike, CodecKind::Lz4Like).with_batch_rows(20_000));
    let p = vec![Predicate::eq("s", Value::str("value-007"))];
    for strat in [Strategy::LazyImDirect, Strategy::LazyImDirectVec, Strategy::PlainDictDirect] {
        let stats = DecodeStats::new();
        let out = filter(&file, &p, strat, &stats).unwrap();
        assert_eq!(stats.snapshot().values_decoded, 0, "{strat}");
        assert!(stats.snapshot().keys_decoded > 0);
        assert!(out.fallbacks.is_empty());
        assert_eq!(out.bits, naive_filter(&t, &p));

        let q = SubexpressionQuery::new(&["s"], p.clone());
        let res = eval_subexpression(&q, &file, strat).unwrap();
        let mat = res.counts.since(&res.filter_counts);
        if strat != Strategy::PlainDictDirect {
            assert_eq!(mat.values_decoded, out.bits.count_ones() as u64, "{strat}");
        }
    }
    let stats = DecodeStats::new();
    filter(&file, &p, Strategy::PlainFull, &stats).unwrap();
    assert_eq!(stats.snapshot().values_decoded, 50_000);

    // absent operand: nothing decoded, nothing matched
    let stats = DecodeStats::new();
    let out = filter(&file, &[Predicate::eq("s", Value::str("value-zzz"))], Strategy::LazyImDirect, &stats).unwrap();
    assert_eq!(out.bits.count_ones(), 0);
    assert_eq!(stats.snapshot().values_decoded, 0);
}

#[test]
fn unsorted_dictionary_ranges_fall_back() {
    let t = strings_table(5000, 10, 2);
    let opts = WriteOptions::new(Policy::ParquetLike, CodecKind::Store)
        .with_encoding("s", EncodingKind::Dict { order_preserving: false });
    let file = file_of(&t, &opts);
    let p = vec![Predicate::gt("s", Value::str("value-004"))];
    let out = filter(&file, &p, Strategy::LazyImDirect, &DecodeStats::new()).unwrap();
    assert!(out.fallback());
    assert_eq!(out.bits, naive_filter(&t, &p));
    // equality still runs on keys
    let stats = DecodeStats::new();
    let out = filter(&file, &[Predicate::eq("s", Value::str("value-004"))], Strategy::LazyImDirect, &stats).unwrap();
    assert!(!out.fallback());
    assert_eq!(stats.snapshot().values_decoded, 0);

    // non-dictionary chunk
    let plain = file_of(&t, &WriteOptions::new(Policy::ArrowLike { dict_strings: false }, CodecKind::Store));
    let out = filter(&plain, &p, Strategy::LazyImDirectVec, &DecodeStats::new()).unwrap();
    assert!(out.fallback());
    assert_eq!(out.bits, naive_filter(&t, &p));
}

#[test]
fn predicates_run_most_selective_first() {
    let vals: Vec<Value> = (0..20_000).map(Value::Int64).collect();
    let col = Column::from_values(ColumnType::Int64, &vals).unwrap();
    let t = Table {
        schema: Schema::new(vec![Field::new("a", ColumnType::Int64, false), Field::new("b", ColumnType::Int64, false)])
            .unwrap(),
        columns: vec![col.clone(), col],
        rows: 20_000,
    };
    let file = file_of(&t, &WriteOptions::default().with_batch_rows(5000));
    let preds = vec![
        Predicate::ge("a", Value::Int64(0)),
        Predicate::lt("b", Value::Int64(100)),
        Predicate::le("a", Value::Int64(19_999)),
    ];
    assert_eq!(prefilter_order(&file, &preds).unwrap(), vec![1, 0, 2]);
    let out = filter(&file, &preds, Strategy::LazyIm, &DecodeStats::new()).unwrap();
    assert_eq!(out.order, vec![1, 0, 2]);
    assert_eq!(out.bits.count_ones(), 100);
    assert!(out.skips.iter().any(|s| s.reason == SkipReason::ShortCircuit));
}

#[test]
fn mask_modes_agree_and_obey_decode_order() {
    let mut r = rng(8);
    for case in 0..40 {
        let rows = r.gen_range(1..30_000);
        let t = random_table(&mut r, rows, 4);
        let file = file_of(&t, &random_opts(&mut r));
        let names: Vec<&str> = t.schema.names().collect();
        let lazy = open_lazy(&file, &names).unwrap();
        let s = *[0.0, 0.0005, 0.01, 0.3, 1.0].choose(&mut r).unwrap();
        let bv = random_bits(&mut r, t.rows, s);
        let mut decoded = Vec::new();
        let mut tables = Vec::new();
        for mode in [MaskMode::RecordSkip, MaskMode::ChunkSkip, MaskMode::Bulk] {
            let stats = DecodeStats::new();
            tables.push(apply_mask(&lazy, &bv, mode, &stats).unwrap());
            decoded.push(stats.snapshot().values_decoded);
        }
        assert!(tables[0].same_values(&tables[1]) && tables[1].same_values(&tables[2]), "case {case}");
        assert!(decoded[0] <= decoded[1] && decoded[1] <= decoded[2], "case {case}: {decoded:?}");
        assert_eq!(decoded[0], (bv.count_ones() * names.len()) as u64);
        assert_eq!(decoded[2], (t.rows * names.len()) as u64);
        assert!(matches!(apply_mask(&lazy, &BitVector::ones(t.rows + 1), MaskMode::Bulk, &DecodeStats::new()), Err(Error::Shape { .. })));
    }
}

#[test]
fn chunk_skip_degrades_with_scattered_bits() {
    let t = random_table(&mut rng(4), 16 * 4096, 1);
    let file = file_of(&t, &WriteOptions::default().with_batch_rows(4096));
    assert_eq!(file.footer().batches.len(), 16);
    let lazy = open_lazy(&file, &["c0"]).unwrap();
    let bv = random_bits(&mut rng(5), t.rows, 0.001);
    let stats = DecodeStats::new();
    apply_mask(&lazy, &bv, MaskMode::ChunkSkip, &stats).unwrap();
    let c = stats.snapshot();
    assert_eq!(c.chunks_opened, 16);
    assert_eq!(c.values_decoded, t.rows as u64);

    let mut first = BitVector::zeros(t.rows);
    first.set_range(10..20);
    let stats = DecodeStats::new();
    apply_mask(&lazy, &first, MaskMode::ChunkSkip, &stats).unwrap();
    assert_eq!(stats.snapshot().batches_skipped, 15);
    assert_eq!(stats.snapshot().chunks_opened, 1);
}

#[test]
fn representations_are_equivalent() {
    let mut r = rng(12);
    for _ in 0..20 {
        let rows = r.gen_range(0..20_000);
        let t = random_table(&mut r, rows, 5);
        let file = file_of(&t, &random_opts(&mut r));
        let names: Vec<&str> = t.schema.names().collect();
        let stats = DecodeStats::new();
        let plain = load_plain(&file, &names, &stats).unwrap();
        let lazy = open_lazy(&file, &names).unwrap();
        let lazy_stats = DecodeStats::new();
        assert!(plain.same_values(&project_lazy(&lazy, &lazy_stats).unwrap()));
        assert!(plain.same_values(&project(&file, &names, &DecodeStats::new()).unwrap()));
        assert_eq!(stats.snapshot().values_decoded, lazy_stats.snapshot().values_decoded);
    }
}

#[test]
fn lazy_access_is_page_bounded() {
    let mut r = rng(13);
    let vals = random_values_shaped(&mut r, ColumnType::Utf8, 30_000, 0.1, Shape::LowCard);
    let t = Table {
        schema: Schema::new(vec![Field::new("s", ColumnType::Utf8, true), Field::new("n", ColumnType::Int32, true)]).unwrap(),
        columns: vec![
            Column::from_values(ColumnType::Utf8, &vals).unwrap(),
            Column::from_values(ColumnType::Int32, &random_values(&mut r, ColumnType::Int32, 30_000, 0.1)).unwrap(),
        ],
        rows: 30_000,
    };
    let file = file_of(&t, &WriteOptions::default());
    let stats = DecodeStats::new();
    {
        let lazy = open_lazy(&file, &["s"]).unwrap();
        assert_eq!(lazy.row_count(), 30_000);
    }
    assert_eq!(stats.snapshot().pages_read, 0);
    let lazy = open_lazy(&file, &["s", "n"]).unwrap();
    for i in [0usize, 4095, 4096, 29_999] {
        let stats = DecodeStats::new();
        assert_eq!(lazy.value(i, 0, &stats).unwrap(), t.columns[0].value(i));
        assert!(stats.snapshot().pages_read <= 3);
        assert!(stats.snapshot().values_decoded <= 1);
    }
    assert!(matches!(open_lazy(&file, &["nope"]), Err(Error::Name(_))));
    assert!(matches!(load_plain(&file, &["nope"], &DecodeStats::new()), Err(Error::Name(_))));

    let stats = DecodeStats::new();
    let none = materialize(&lazy, &BitVector::zeros(30_000), &stats).unwrap();
    assert_eq!(none.row_count, 0);
    assert_eq!(stats.snapshot().values_decoded, 0);

    let empty = load_plain(&file, &[] as &[&str], &DecodeStats::new()).unwrap();
    assert_eq!((empty.columns.len(), empty.row_count), (0, 30_000));

    let stats = DecodeStats::new();
    load_plain(&file, &["n"], &stats).unwrap();
    assert_eq!(stats.snapshot().values_decoded, 30_000);
    assert_eq!(stats.snapshot().columns_touched, vec![1]);
}

#[test]
fn projection_touches_only_query_columns() {
    let mut r = rng(14);
    let t = random_table(&mut r, 9000, 8);
    let file = file_of(&t, &WriteOptions::default().with_batch_rows(3000));
    let ncols = t.columns.len();
    let proj: Vec<String> = (0..ncols).step_by(2).map(|j| format!("c{j}")).collect();
    let j = ncols - 1;
    let preds = vec![random_predicate(&mut r, &format!("c{j}"), &t.columns[j])];
    let q = SubexpressionQuery { projection: proj, predicates: preds };
    let mut allowed: Vec<usize> = (0..ncols).step_by(2).collect();
    allowed.push(j);
    for strat in Strategy::ALL {
        let res = eval_subexpression(&q, &file, strat).unwrap();
        assert!(res.counts.columns_touched.iter().all(|c| allowed.contains(c)), "{strat}: {:?}", res.counts.columns_touched);
        assert!(res.timings.total >= res.timings.compute.unwrap_or_default());
        assert_eq!(res.timings.load.is_none(), strat == Strategy::LazyStream);
    }
    let no_preds = SubexpressionQuery { projection: q.projection.clone(), predicates: vec![] };
    let res = eval_subexpression(&no_preds, &file, Strategy::LazyIm).unwrap();
    assert!(res.table.same_values(&project(&file, &q.projection, &DecodeStats::new()).unwrap()));
}

#[test]
fn unknown_columns_and_strategies_are_errors() {
    let t = random_table(&mut rng(1), 100, 2);
    let file = file_of(&t, &WriteOptions::default());
    for strat in Strategy::ALL {
        assert!(matches!(filter(&file, &[Predicate::eq("zz", Value::Int32(1))], strat, &DecodeStats::new()), Err(Error::Name(_))));
    }
    assert!(matches!("fastest".parse::<Strategy>(), Err(Error::Config(_))));
    for s in Strategy::ALL {
        assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
    }
}

#[test]
fn kernel_exhaustive_small_widths() {
    // every 16-bit pattern, read as 16/w keys of width w
    for width in 1u8..=4 {
        let count = 16 / width as usize;
        let max = (1u32 << width) - 1;
        for pattern in 0u32..1 << 16 {
            let payload = (pattern as u16).to_le_bytes();
            for k in 0..=max {
                for kp in [
                    KeyPredicate::Eq(k),
                    KeyPredicate::Gt(k),
                    KeyPredicate::Lt(k),
                    KeyPredicate::Ge(k),
                    KeyPredicate::Le(k),
                    KeyPredicate::Between(k / 2, k),
                ] {
                    assert_eq!(
                        filter_packed(&payload, width, count, kp).unwrap(),
                        filter_packed_scalar(&payload, width, count, kp).unwrap()
                    );
                }
            }
        }
    }
    // multi-block pages with a ragged tail
    let mut r = rng(15);
    for width in 1u8..=32 {
        let keys: Vec<u64> = (0..1000).map(|_| r.gen_range(0..1u64 << width)).collect();
        let mut p = Vec::new();
        pack(keys.iter().copied(), width, &mut p);
        let k = keys[r.gen_range(0..keys.len())] as u32;
        let kp = KeyPredicate::Le(k);
        let got = filter_packed(&p, width, 1000, kp).unwrap();
        let want: Vec<bool> = keys.iter().map(|x| *x as u32 <= k).collect();
        assert_eq!(got, BitVector::from_bools(&want), "width {width}");
    }
}
