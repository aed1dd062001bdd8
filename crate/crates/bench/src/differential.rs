//! Randomized cross-check of every strategy against the row-scan oracle,
//! with brute-force verification of every skip the filters report.

use colf::exec::{FilterOutput, SkipReason};
use colf::{
    eval_subexpression, filter, write_table, BitVector, CodecKind, ColfFile, DecodeStats, PlainColumns, Policy,
    Predicate, Strategy, SubexpressionQuery, WriteOptions,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::reference::{reference_matches, reference_query};
use crate::workload::{random_predicate, random_table};

#[derive(Clone, Debug, Default, Serialize)]
pub struct DifferentialSummary {
    pub cases: usize,
    /// Strategy runs compared against the oracle.
    pub comparisons: usize,
    pub skips_checked: u64,
    /// Strategy results that differ from the oracle.
    pub mismatches: Vec<String>,
    /// Skips that covered a matching row.
    pub violations: Vec<String>,
}

impl DifferentialSummary {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.violations.is_empty()
    }

    fn merge(mut self, other: DifferentialSummary) -> Self {
        self.cases += other.cases;
        self.comparisons += other.comparisons;
        self.skips_checked += other.skips_checked;
        self.mismatches.extend(other.mismatches);
        self.violations.extend(other.violations);
        self
    }
}

/// One randomized case: a table, its writer options and a query.
pub struct DiffCase {
    pub table: PlainColumns,
    pub options: WriteOptions,
    pub query: SubexpressionQuery,
}

pub fn random_case(seed: u64, max_rows: usize) -> DiffCase {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let rows = r.gen_range(0..=max_rows);
    let table = random_table(&mut r, rows, 5);
    let policy = *[
        Policy::ParquetLike,
        Policy::OrcLike,
        Policy::ArrowLike { dict_strings: true },
        Policy::ArrowLike { dict_strings: false },
    ]
    .choose(&mut r)
    .unwrap();
    let codec = *CodecKind::ALL.choose(&mut r).unwrap();
    let options = WriteOptions::new(policy, codec).with_batch_rows(*[300usize, 2000, 5000].choose(&mut r).unwrap());
    let npred = r.gen_range(0..=3);
    let predicates: Vec<Predicate> = (0..npred)
        .map(|_| {
            let j = r.gen_range(0..table.columns.len());
            random_predicate(&mut r, &format!("c{j}"), &table.columns[j])
        })
        .collect();
    let projection: Vec<String> = table.schema.names().filter(|_| r.gen_bool(0.6)).map(String::from).collect();
    DiffCase { table, options, query: SubexpressionQuery { projection, predicates } }
}

fn check_skips(t: &PlainColumns, preds: &[Predicate], out: &FilterOutput, oracle: &BitVector, tag: &str, s: &mut DifferentialSummary) {
    for skip in &out.skips {
        s.skips_checked += 1;
        let rows = skip.rows.start as usize..skip.rows.end as usize;
        let sound = match skip.reason {
            SkipReason::ZoneMap | SkipReason::DictNoMatch => {
                let p = &preds[skip.predicate];
                let col = &t.columns[skip.column];
                rows.clone().all(|i| {
                    let v = col.value(i);
                    v.is_null() || !colf::predicate_eval_scalar(p, &v).unwrap_or(true)
                })
            }
            SkipReason::ShortCircuit => oracle.count_ones_in(rows.clone()) == 0,
        };
        if !sound {
            s.violations.push(format!("{tag}: {skip:?} covers a matching row"));
        }
    }
}

pub fn run_case(seed: u64, max_rows: usize) -> Result<DifferentialSummary> {
    let case = random_case(seed, max_rows);
    let t = &case.table;
    let mut bytes = Vec::new();
    write_table(&t.schema, &t.columns, &case.options, &mut bytes)?;
    let file = ColfFile::open(bytes)?;
    let preds = &case.query.predicates;
    let oracle = BitVector::from_bools(&reference_matches(t, preds)?);
    let expected = reference_query(t, &case.query)?;

    let mut s = DifferentialSummary { cases: 1, ..Default::default() };
    for strat in Strategy::ALL {
        let tag = format!("seed {seed} {strat}");
        s.comparisons += 1;
        let out = filter(&file, preds, strat, &DecodeStats::new())?;
        if out.bits != oracle {
            s.mismatches.push(format!("{tag}: filter bits differ for {preds:?}"));
        }
        check_skips(t, preds, &out, &oracle, &tag, &mut s);
        let res = eval_subexpression(&case.query, &file, strat)?;
        if !res.table.same_values(&expected) {
            s.mismatches.push(format!("{tag}: result table differs"));
        }
    }
    Ok(s)
}

/// Runs `cases` randomized cases seeded `seed, seed + 1, ...` in parallel.
pub fn run_differential(cases: usize, seed: u64, max_rows: usize) -> Result<DifferentialSummary> {
    (0..cases as u64)
        .into_par_iter()
        .map(|i| run_case(seed.wrapping_add(i), max_rows))
        .try_reduce(DifferentialSummary::default, |a, b| Ok(a.merge(b)))
}
