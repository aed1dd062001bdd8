//! Embedding layouts: one column per dimension against a single nested
//! vector column, plain and scaled-integer.

use colf::encode::quantize;
use colf::{load_plain, CodecKind, Column, ColumnType, DecodeStats, EncodingKind, Field, PlainColumns, Policy, Schema, Value, WriteOptions};

use super::{column_sizes, write_file};
use crate::config::BenchConfig;
use crate::csvio::{checksum, csv_size};
use crate::error::Result;
use crate::gen::{gen_table, ColumnSpec, Generator, TableSpec};
use crate::report::{Case, CaseTimings, Report};
use crate::timing::{measure, median};

pub const SCALES: [u8; 6] = [1, 2, 3, 4, 5, 6];
/// Scale at which nearest-neighbour agreement is asserted.
pub const CHECK_SCALE: u8 = 4;
pub const MIN_AGREEMENT: f64 = 0.95;
/// Largest element error at [`CHECK_SCALE`].
pub const MAX_ELEMENT_ERROR: f64 = 5e-5;

fn vectors(n: usize, dim: u32, seed: u64) -> Result<Vec<Vec<f64>>> {
    let t = gen_table(&TableSpec { columns: vec![ColumnSpec::new("v", ColumnType::FixedVector(dim), Generator::Vector { dim })], rows: n, seed })?;
    Ok(t.columns[0].to_values().into_iter().map(|v| if let Value::Vector(x) = v { x } else { unreachable!("generated vectors are never null") }).collect())
}

fn nearest(data: &[Vec<f64>], q: &[f64]) -> usize {
    let dist = |v: &Vec<f64>| v.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    (0..data.len()).min_by(|&a, &b| dist(&data[a]).total_cmp(&dist(&data[b])).then(a.cmp(&b))).unwrap_or(0)
}

fn nested_table(data: &[Vec<f64>], dim: u32) -> Result<PlainColumns> {
    let ty = ColumnType::FixedVector(dim);
    let vals: Vec<Value> = data.iter().map(|v| Value::Vector(v.clone())).collect();
    Ok(PlainColumns::new(Schema::new(vec![Field::new("embedding", ty, false)])?, vec![Column::from_values(ty, &vals)?], data.len())?)
}

fn columnar_table(data: &[Vec<f64>], dim: u32) -> Result<PlainColumns> {
    let fields = (0..dim).map(|d| Field::new(format!("e{d}"), ColumnType::Float64, false)).collect();
    let columns = (0..dim as usize)
        .map(|d| Column::from_values(ColumnType::Float64, &data.iter().map(|v| Value::float(v[d])).collect::<Vec<_>>()))
        .collect::<colf::Result<Vec<_>>>()?;
    Ok(PlainColumns::new(Schema::new(fields)?, columns, data.len())?)
}

fn rows_of(t: &PlainColumns) -> Vec<Vec<f64>> {
    if t.columns.len() == 1 {
        if let ColumnType::FixedVector(_) = t.columns[0].column_type() {
            return t.columns[0].to_values().into_iter().map(|v| if let Value::Vector(x) = v { x } else { Vec::new() }).collect();
        }
    }
    (0..t.row_count)
        .map(|i| t.columns.iter().map(|c| if let Value::Float64(x) = c.value(i) { x } else { f64::NAN }).collect())
        .collect()
}

/// Writes `t`, reads it back, and reports sizes, load time and the decoded rows.
fn layout_case(config: &BenchConfig, name: &str, t: &PlainColumns, opts: &WriteOptions) -> Result<(Case, Vec<Vec<f64>>)> {
    let file = write_file(t, opts)?;
    let all: Vec<usize> = (0..t.schema.len()).collect();
    let sizes = column_sizes(file.footer(), &all, csv_size(t));
    let names: Vec<&str> = t.schema.names().collect();
    let stats = DecodeStats::new();
    let (loaded, runs) = measure(config.plan, || Ok(load_plain(&file, &names, &stats)?))?;
    let mut c = Case::new(name).config("codec", "store").config("vectors", t.row_count).config("dim", config.vector_dim);
    c.sizes = Some(sizes);
    c.checksum = Some(checksum(&loaded));
    c.timings = CaseTimings { load: median(&runs), compute: None, total: median(&runs), runs };
    Ok((c, rows_of(&loaded)))
}

pub fn suite_vectors(config: &BenchConfig) -> Result<Report> {
    let mut r = Report::new("vectors", config.seed, config.to_map());
    let dim = config.vector_dim;
    let data = vectors(config.vector_count, dim, config.seed)?;
    let queries = vectors(config.vector_queries, dim, config.seed.wrapping_add(1))?;
    let truth: Vec<usize> = queries.iter().map(|q| nearest(&data, q)).collect();
    let plain = WriteOptions::new(Policy::ArrowLike { dict_strings: false }, CodecKind::Store);

    let (columnar, back) = layout_case(config, "columnar/plain", &columnar_table(&data, dim)?, &plain)?;
    r.check("columnar plain round trip is exact", back == data, "decoded floats compared bitwise");
    let (nested, back) = layout_case(config, "nested/plain", &nested_table(&data, dim)?, &plain)?;
    r.check("nested plain round trip is exact", back == data, "decoded floats compared bitwise");
    let (cs, ns) = (columnar.sizes.as_ref().unwrap().compressed, nested.sizes.as_ref().unwrap().compressed);
    r.check("nested plain is at least columnar plain", ns >= cs, format!("nested {ns} B, columnar {cs} B"));
    r.cases.push(columnar.metric("agreement_1nn", 1.0));
    r.cases.push(nested.metric("agreement_1nn", 1.0));

    for scale in SCALES {
        let quantized: Vec<Vec<f64>> = data.iter().map(|v| v.iter().map(|x| quantize(*x, scale)).collect()).collect();
        let opts = plain.clone().with_encoding("embedding", EncodingKind::ScaledInt { scale });
        let (case, back) = layout_case(config, &format!("nested/scaled-int-{scale}"), &nested_table(&quantized, dim)?, &opts)?;
        let max_err = data.iter().zip(&back).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max);
        let agree = queries.iter().zip(&truth).filter(|(q, t)| nearest(&back, q) == **t).count() as f64 / queries.len().max(1) as f64;
        let bound = 0.5 * 10f64.powi(-(scale as i32));
        r.check(
            format!("scaled-int({scale}) element error within half a unit"),
            max_err <= bound * (1.0 + 1e-9),
            format!("max error {max_err:.6e}, bound {bound:.1e}"),
        );
        if scale == CHECK_SCALE {
            r.check(format!("scaled-int({scale}) element error at most 5e-5"), max_err <= MAX_ELEMENT_ERROR, format!("{max_err:.6e}"));
            r.check(
                format!("scaled-int({scale}) 1-NN agreement at least 95%"),
                agree >= MIN_AGREEMENT,
                format!("{agree:.3} over {} queries", queries.len()),
            );
        }
        let size = case.sizes.as_ref().unwrap().compressed as f64;
        r.cases.push(
            case.config("scale", scale)
                .metric("max_element_error", max_err)
                .metric("agreement_1nn", agree)
                .metric("size_over_nested_plain", size / ns as f64),
        );
    }
    Ok(r)
}
