//! Query leaves Q1 to Q5 under every strategy and two codecs.

use colf::{
    eval_subexpression, CodecKind, ColfFile, PlainColumns, Policy, Predicate, Strategy, SubexpressionQuery, Value,
    WriteOptions,
};

use super::{column_sizes, write_file};
use crate::config::BenchConfig;
use crate::csvio::{checksum, csv_size, ingest_csv, render_csv};
use crate::error::Result;
use crate::gen::{demographics_spec, gen_table, sales_spec, EDUCATION_SHARE, SHIP_DATE_CUT, WHOLESALE_CUT};
use crate::reference::{reference_matches, reference_query};
use crate::report::{Case, CaseTimings, Report};
use crate::timing::{measure, median};

/// Allowed gap between realized and target selectivity.
pub const SELECTIVITY_TOLERANCE: f64 = 0.005;
pub const CODECS: [CodecKind; 2] = [CodecKind::Store, CodecKind::Lz4Like];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Sales,
    Demographics,
}

pub struct NamedQuery {
    pub name: &'static str,
    pub table: TableKind,
    pub query: SubexpressionQuery,
}

pub fn queries() -> Vec<NamedQuery> {
    let i = Value::Int64;
    let s = Value::str;
    let f = Value::float;
    vec![
        NamedQuery {
            name: "Q1",
            table: TableKind::Sales,
            query: SubexpressionQuery::new(
                &["cs_ship_date_sk", "cs_bill_customer_sk"],
                vec![Predicate::eq("cs_sold_time_sk", i(12_032)), Predicate::eq("cs_sold_date_sk", i(2_452_653))],
            ),
        },
        NamedQuery {
            name: "Q2",
            table: TableKind::Demographics,
            query: SubexpressionQuery::new(
                &["cd_demo_sk", "cd_dep_college_count"],
                vec![Predicate::eq("cd_gender", s("F")), Predicate::eq("cd_education_status", s("Secondary"))],
            ),
        },
        NamedQuery {
            name: "Q3",
            table: TableKind::Demographics,
            query: SubexpressionQuery::new(
                &["cd_demo_sk"],
                vec![
                    Predicate::eq("cd_gender", s("M")),
                    Predicate::eq("cd_marital_status", s("D")),
                    Predicate::eq("cd_education_status", s("College")),
                ],
            ),
        },
        NamedQuery {
            name: "Q4",
            table: TableKind::Sales,
            query: SubexpressionQuery::new(
                &["cs_ext_sales_price", "cs_sold_date_sk", "cs_item_sk"],
                vec![Predicate::gt("cs_wholesale_cost", f(80.0)), Predicate::lt("cs_ext_tax", f(500.0))],
            ),
        },
        NamedQuery {
            name: "Q5",
            table: TableKind::Sales,
            query: SubexpressionQuery::new(
                &[
                    "cs_ext_sales_price",
                    "cs_sold_date_sk",
                    "cs_item_sk",
                    "cs_net_paid_inc_tax",
                    "cs_net_paid_inc_ship_tax",
                    "cs_net_profit",
                ],
                vec![Predicate::gt("cs_wholesale_cost", f(80.0))],
            ),
        },
    ]
}

/// Single-predicate selectivity targets the generators are built to hit.
pub fn selectivity_targets() -> Vec<(TableKind, Predicate, f64)> {
    vec![
        (TableKind::Sales, Predicate::gt("cs_ship_date_sk", Value::Int64(SHIP_DATE_CUT)), 0.65),
        (TableKind::Sales, Predicate::gt("cs_wholesale_cost", Value::float(WHOLESALE_CUT)), 0.30),
        (TableKind::Demographics, Predicate::eq("cd_education_status", Value::str("Secondary")), EDUCATION_SHARE),
    ]
}

/// Probability that a Zipf(n, s) draw is rank 1.
fn zipf_first_share(n: u64, s: f64) -> f64 {
    1.0 / (1..=n).map(|k| (k as f64).powf(-s)).sum::<f64>()
}

/// Reference result computed from a CSV dump of the query's columns, so the
/// oracle shares no decoding path with the files under test.
fn reference_checksum(t: &PlainColumns, q: &SubexpressionQuery) -> Result<(String, usize)> {
    let cols = t.project(&q.columns())?;
    let reloaded = ingest_csv(render_csv(&cols).as_slice(), &cols.schema)?;
    let out = reference_query(&reloaded, q)?;
    Ok((checksum(&out), out.row_count))
}

fn fraction(t: &PlainColumns, p: &Predicate) -> Result<f64> {
    let hits = reference_matches(t, std::slice::from_ref(p))?.into_iter().filter(|b| *b).count();
    Ok(hits as f64 / t.row_count.max(1) as f64)
}

pub fn suite_subexpressions(config: &BenchConfig) -> Result<Report> {
    let mut r = Report::new("subexpr", config.seed, config.to_map());
    let sales = gen_table(&sales_spec(config.sales_rows, config.seed))?;
    let demo = gen_table(&demographics_spec(config.demographics_rows, config.seed))?;
    let table = |k: TableKind| if k == TableKind::Sales { &sales } else { &demo };

    for (k, p, target) in selectivity_targets() {
        let got = fraction(table(k), &p)?;
        r.check(
            format!("selectivity of {p} within 0.5% of {target}"),
            (got - target).abs() <= SELECTIVITY_TOLERANCE,
            format!("realized {got:.5}"),
        );
    }

    let qs = queries();
    let mut expected = Vec::new();
    for q in &qs {
        expected.push(reference_checksum(table(q.table), &q.query)?);
    }

    // Q1 count against the generators' joint probability
    let q1_rows = expected[0].1 as f64;
    let p = zipf_first_share(86_400, 1.2) / (2_452_654 - 2_450_815 + 1) as f64;
    let mean = p * config.sales_rows as f64;
    let sd = (mean * (1.0 - p)).sqrt();
    r.check(
        "Q1 row count matches the generator target",
        (q1_rows - mean).abs() <= 5.0 * sd.max(1.0),
        format!("{q1_rows} rows, expected {mean:.1} +- {sd:.1}"),
    );

    for codec in CODECS {
        let opts = WriteOptions::new(Policy::ParquetLike, codec);
        let files = [(TableKind::Sales, write_file(&sales, &opts)?), (TableKind::Demographics, write_file(&demo, &opts)?)];
        let file_for = |k: TableKind| -> &ColfFile<Vec<u8>> { &files.iter().find(|(t, _)| *t == k).unwrap().1 };
        for (q, (want, want_rows)) in qs.iter().zip(&expected) {
            let file = file_for(q.table);
            let t = table(q.table);
            let cols: Vec<usize> = q.query.columns().iter().map(|c| t.schema.index_of(c)).collect::<colf::Result<_>>()?;
            let sizes = column_sizes(file.footer(), &cols, csv_size(&t.project(&q.query.columns())?));
            let mut decoded = Vec::new();
            for strat in Strategy::ALL {
                let (out, runs) = measure(config.plan, || Ok(eval_subexpression(&q.query, file, strat)?))?;
                let sum = checksum(&out.table);
                let ok = &sum == want;
                r.check(
                    format!("{} {strat} {} matches reference", q.name, codec.name()),
                    ok,
                    format!("{} rows, reference {want_rows}", out.table.row_count),
                );
                decoded.push((strat, out.counts.values_decoded));
                let mut c = Case::new(format!("{}/{strat}/{}", q.name, codec.name()))
                    .config("query", q.name)
                    .config("strategy", strat)
                    .config("codec", codec.name())
                    .config("policy", "parquet-like")
                    .metric("rows", out.table.row_count as f64)
                    .metric("filter_values_decoded", out.filter_counts.values_decoded as f64)
                    .metric("fallbacks", out.filter.as_ref().map_or(0, |f| f.fallbacks.len()) as f64);
                c.sizes = Some(sizes.clone());
                c.decode = Some(out.counts.clone());
                c.checksum = Some(sum);
                c.timings = CaseTimings {
                    load: out.timings.load.map(|d| d.as_secs_f64()),
                    compute: out.timings.compute.map(|d| d.as_secs_f64()),
                    total: median(&runs),
                    runs,
                };
                r.cases.push(c);
            }
            if matches!(q.name, "Q2" | "Q3") {
                let get = |s: Strategy| decoded.iter().find(|(x, _)| *x == s).map(|(_, v)| *v).unwrap_or(0);
                let (direct, full) = (get(Strategy::LazyImDirect), get(Strategy::PlainFull));
                r.check(
                    format!("{} {}: lazy-im-direct decodes fewer values than plain-full", q.name, codec.name()),
                    direct < full,
                    format!("{direct} vs {full}"),
                );
            }
        }
    }
    Ok(r)
}
