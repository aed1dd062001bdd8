//! Applying random selection vectors under each mask mode.

use colf::{apply_mask, open_lazy, CodecKind, ColumnType, DecodeStats, MaskMode, Policy, WriteOptions};

use super::write_file;
use crate::config::BenchConfig;
use crate::csvio::checksum;
use crate::error::Result;
use crate::gen::{gen_selection, gen_table, ColumnSpec, Generator, TableSpec};
use crate::report::{Case, CaseTimings, Report};
use crate::timing::{measure, median};

pub const LEVELS: [f64; 8] = [0.0001, 0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 1.0];
pub const BATCHES: usize = 16;

pub fn suite_selectivity(config: &BenchConfig) -> Result<Report> {
    let mut r = Report::new("selectivity", config.seed, config.to_map());
    let n = config.selectivity_rows;
    let batch_rows = n.div_ceil(BATCHES);
    let spec = TableSpec {
        columns: vec![
            ColumnSpec::new("k", ColumnType::Int64, Generator::Uniform { min: 0, max: 1_000_000 }),
            ColumnSpec::new("s", ColumnType::Utf8, Generator::StringPool { cardinality: 64, len: 8 }),
        ],
        rows: n,
        seed: config.seed,
    };
    let table = gen_table(&spec)?;
    let file = write_file(&table, &WriteOptions::new(Policy::ParquetLike, CodecKind::Store).with_batch_rows(batch_rows))?;
    let batches = file.footer().batches.len();
    let ncols = table.columns.len() as u64;
    let lazy = open_lazy(&file, &["k", "s"])?;

    let mut record_prev: Option<u64> = None;
    let mut record_increasing = true;
    let mut bulk_values = Vec::new();
    let mut record_exact = true;
    let mut chunk_all = true;
    let mut agree = true;
    for (li, &s) in LEVELS.iter().enumerate() {
        let bv = gen_selection(n, s, config.seed.wrapping_add(li as u64))?;
        let expected = checksum(&table.select(&bv)?);
        let pop = bv.count_ones() as u64;
        let mut times = Vec::new();
        for mode in MaskMode::ALL {
            let stats = DecodeStats::new();
            let (out, runs) = measure(config.plan, || {
                let before = stats.snapshot();
                let t = apply_mask(&lazy, &bv, mode, &stats)?;
                Ok((t, stats.snapshot().since(&before)))
            })?;
            let (result, counts) = out;
            let sum = checksum(&result);
            agree &= sum == expected;
            match mode {
                MaskMode::RecordSkip => {
                    record_exact &= counts.values_decoded == pop * ncols;
                    if let Some(p) = record_prev {
                        record_increasing &= counts.values_decoded > p;
                    }
                    record_prev = Some(counts.values_decoded);
                }
                MaskMode::Bulk => bulk_values.push(counts.values_decoded),
                MaskMode::ChunkSkip => {
                    if s >= 0.001 {
                        chunk_all &= counts.chunks_opened == batches as u64 * ncols;
                    }
                }
            }
            let t = median(&runs).unwrap_or(0.0);
            times.push((mode, t));
            let mut c = Case::new(format!("s={s}/{}", mode.name()))
                .config("selectivity", s)
                .config("mode", mode.name())
                .config("rows", n)
                .config("batches", batches)
                .metric("popcount", pop as f64)
                .metric("realized_selectivity", bv.selectivity());
            c.decode = Some(counts);
            c.checksum = Some(sum);
            c.timings = CaseTimings { load: None, compute: Some(t), total: Some(t), runs };
            r.cases.push(c);
        }
        // crossover table: rank of each mode by median time at this level
        times.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (rank, (mode, _)) in times.iter().enumerate() {
            let name = format!("s={s}/{}", mode.name());
            if let Some(c) = r.cases.iter_mut().find(|c| c.name == name) {
                c.metrics.insert("rank_wall".into(), rank as f64 + 1.0);
            }
        }
    }
    r.check("all modes return the selected rows", agree, "result checksums equal the direct selection");
    r.check("record-skip decodes exactly the selected values", record_exact, format!("values_decoded == popcount x {ncols} columns"));
    r.check("record-skip decodes more as selectivity grows", record_increasing, "strictly increasing over levels");
    let constant = bulk_values.windows(2).all(|w| w[0] == w[1]) && bulk_values.first() == Some(&(n as u64 * ncols));
    r.check("bulk decodes a constant amount", constant, format!("{bulk_values:?}"));
    r.check(
        "chunk-skip opens every chunk from s = 0.001",
        chunk_all && batches == BATCHES,
        format!("{batches} batches x {ncols} columns"),
    );
    Ok(r)
}
