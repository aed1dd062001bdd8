//! Encoded and compressed sizes against the raw CSV rendering.

use std::collections::BTreeMap;

use rayon::prelude::*;

use colf::{CodecKind, ColumnType, EncodingKind, PlainColumns, Policy, WriteOptions};

use super::{column_sizes, write_file};
use crate::config::BenchConfig;
use crate::csvio::{csv_size, render_csv};
use crate::error::Result;
use crate::gen::{demographics_spec, gen_table, ColumnSpec, Generator, TableSpec};
use crate::report::{Case, Report};

/// Dictionary strings must be at most this fraction of plain strings.
pub const DICT_MAX_FRACTION: f64 = 0.25;
/// Run-length integers must be at most this fraction of plain integers.
pub const RLE_MAX_FRACTION: f64 = 0.01;
/// A real codec may shrink uniform random floats by at most this much.
pub const FLOAT_MAX_SHRINK: f64 = 0.10;
/// Plain random floats against their CSV text: about one half.
pub const FLOAT_CSV_RATIO: (f64, f64) = (0.35, 0.65);

const POLICIES: [Policy; 4] =
    [Policy::ParquetLike, Policy::OrcLike, Policy::ArrowLike { dict_strings: false }, Policy::ArrowLike { dict_strings: true }];

fn single(name: &str, ty: ColumnType, g: Generator, rows: usize, seed: u64) -> Result<PlainColumns> {
    gen_table(&TableSpec { columns: vec![ColumnSpec::new(name, ty, g)], rows, seed })
}

/// Stored bytes of the only column of `t` under `opts`.
fn stored(t: &PlainColumns, opts: &WriteOptions) -> Result<(u64, u64, Vec<String>)> {
    let file = write_file(t, opts)?;
    let s = column_sizes(file.footer(), &[0], 0);
    let kinds = file.footer().batches.iter().map(|b| b.chunks[0].kind.to_string()).collect();
    Ok((s.encoded, s.compressed, kinds))
}

fn micro_case(name: &str, raw: u64, pairs: &[(&str, u64)]) -> Case {
    let mut c = Case::new(name);
    c.sizes = None;
    for (k, v) in pairs {
        c.metrics.insert(format!("{k}_bytes"), *v as f64);
    }
    c.metrics.insert("raw_bytes".into(), raw as f64);
    c
}

fn micro_cases(config: &BenchConfig, r: &mut Report) -> Result<()> {
    let n = config.column_rows;
    let store = |p| WriteOptions::new(p, CodecKind::Store);

    // low-cardinality strings
    let t = single("s", ColumnType::Utf8, Generator::StringPool { cardinality: 16, len: 8 }, n, config.seed)?;
    let raw = csv_size(&t);
    let (_, dict, kinds) = stored(&t, &store(Policy::ParquetLike))?;
    let (_, plain, _) = stored(&t, &store(Policy::ParquetLike).with_encoding("s", EncodingKind::Plain))?;
    let frac = dict as f64 / plain as f64;
    r.cases.push(
        micro_case("strings-16-distinct", raw, &[("dict", dict), ("plain", plain)])
            .config("policy", "parquet-like")
            .config("codec", "store")
            .config("encoding", kinds.first().cloned().unwrap_or_default())
            .metric("dict_over_plain", frac),
    );
    r.check(
        "dictionary strings at most 25% of plain",
        kinds.iter().all(|k| k.starts_with("dict")) && frac <= DICT_MAX_FRACTION,
        format!("dict {dict} B, plain {plain} B, fraction {frac:.4}, chosen {kinds:?}"),
    );

    // long runs
    let values = (0..64).map(|i| (i * 7919) % 1000).collect();
    let t = single("r", ColumnType::Int64, Generator::Runs { values, run_len: 1000 }, n, config.seed)?;
    let raw = csv_size(&t);
    let (_, rle, _) = stored(&t, &store(Policy::OrcLike).with_encoding("r", EncodingKind::Rle))?;
    let (_, plain, _) = stored(&t, &store(Policy::OrcLike).with_encoding("r", EncodingKind::Plain))?;
    let frac = rle as f64 / plain as f64;
    r.cases.push(
        micro_case("ints-run-length-1000", raw, &[("rle", rle), ("plain", plain)])
            .config("codec", "store")
            .metric("rle_over_plain", frac),
    );
    r.check("run-length integers at most 1% of plain", frac <= RLE_MAX_FRACTION, format!("rle {rle} B, plain {plain} B, fraction {frac:.5}"));

    // uniform random floats
    let t = single("f", ColumnType::Float64, Generator::UniformFloat { min: 0.0, max: 1.0 }, n, config.seed)?;
    let raw = csv_size(&t);
    let arrow = Policy::ArrowLike { dict_strings: false };
    let (_, base, kinds) = stored(&t, &WriteOptions::new(arrow, CodecKind::Store))?;
    let mut case = micro_case("floats-uniform-random", raw, &[("store", base)])
        .config("policy", "arrow-like")
        .config("encoding", kinds.first().cloned().unwrap_or_default())
        .metric("store_over_csv", base as f64 / raw as f64);
    for codec in [CodecKind::Lz4Like, CodecKind::DeflateLike] {
        let (_, bytes, _) = stored(&t, &WriteOptions::new(arrow, codec))?;
        let kept = bytes as f64 / base as f64;
        case.metrics.insert(format!("{}_bytes", codec.name()), bytes as f64);
        case.metrics.insert(format!("{}_over_store", codec.name()), kept);
        r.check(
            format!("{} shrinks random floats by at most 10%", codec.name()),
            kept >= 1.0 - FLOAT_MAX_SHRINK,
            format!("{bytes} B vs {base} B stored, kept {kept:.4}"),
        );
    }
    let ratio = base as f64 / raw as f64;
    r.check(
        "plain random floats are about half their CSV text",
        (FLOAT_CSV_RATIO.0..=FLOAT_CSV_RATIO.1).contains(&ratio),
        format!("{base} B vs {raw} B of CSV, ratio {ratio:.3}"),
    );
    r.cases.push(case);
    Ok(())
}

/// Per column type, summed over the columns of that type.
fn per_type_cases(config: &BenchConfig, r: &mut Report) -> Result<()> {
    let sales = gen_table(&crate::gen::sales_spec(config.compression_rows, config.seed))?;
    let demo = gen_table(&demographics_spec(config.compression_rows, config.seed))?;
    for (label, t) in [("sales", &sales), ("demographics", &demo)] {
        let mut by_type: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (j, f) in t.schema.fields().iter().enumerate() {
            by_type.entry(f.ty.to_string()).or_default().push(j);
        }
        let raw: BTreeMap<&String, u64> = by_type
            .iter()
            .map(|(ty, cols)| {
                let names: Vec<&str> = cols.iter().map(|&j| t.schema.field(j).name.as_str()).collect();
                // header excluded so per-type totals add up to the table body
                let p = t.project(&names).expect("names come from the schema");
                let header = names.join(",").len() as u64 + 1;
                (ty, render_csv(&p).len() as u64 - header)
            })
            .collect();
        // sizes only, so the writes can run in parallel
        let combos: Vec<(Policy, CodecKind)> =
            POLICIES.iter().flat_map(|&p| CodecKind::ALL.iter().map(move |&c| (p, c))).collect();
        let cases = combos
            .par_iter()
            .map(|&(policy, codec)| {
                let file = write_file(t, &WriteOptions::new(policy, codec))?;
                Ok(by_type
                    .iter()
                    .map(|(ty, cols)| {
                        let sizes = column_sizes(file.footer(), cols, raw[ty]);
                        let mut c = Case::new(format!("{label}/{ty}/{policy}/{}", codec.name()))
                            .config("table", label)
                            .config("type", ty)
                            .config("policy", policy)
                            .config("codec", codec.name())
                            .config("columns", cols.len())
                            .metric("encoded_over_raw", sizes.encoded as f64 / sizes.raw as f64)
                            .metric("compressed_over_raw", sizes.compressed as f64 / sizes.raw as f64);
                        c.sizes = Some(sizes);
                        c
                    })
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        r.cases.extend(cases.into_iter().flatten());
    }
    Ok(())
}

pub fn suite_compression(config: &BenchConfig) -> Result<Report> {
    let mut r = Report::new("compression", config.seed, config.to_map());
    micro_cases(config, &mut r)?;
    per_type_cases(config, &mut r)?;
    Ok(r)
}
