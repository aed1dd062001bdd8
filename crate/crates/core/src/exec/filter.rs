//! Conjunctive filters under each execution strategy. All strategies
//! return the same bits; they differ in what they read and decode.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bitvec::BitVector;
use crate::column::Column;
use crate::container::{ByteSource, ColfFile};
use crate::encode::{dict_translate, KeyPredicate, KeyTranslation, PageReader};
use crate::error::{Error, Result};
use crate::memrep::{load_column, ChunkHandle, DecodeStats, PlainColumns};
use crate::predicate::{Predicate, RangeMatcher};

use super::kernel::filter_packed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Load and decode every predicate column, then evaluate.
    PlainFull,
    /// Load predicate columns keeping dictionary chunks as keys; evaluate on keys.
    PlainDictDirect,
    /// Stream pages of every chunk, decoding all of them.
    LazyStream,
    /// Decode on demand, pruning with batch, chunk and page zone maps.
    LazyIm,
    /// `LazyIm`, evaluating dictionary chunks on their keys.
    LazyImDirect,
    /// `LazyImDirect` using the block kernel over packed keys.
    LazyImDirectVec,
    /// Decode whole chunks, skipping chunks whose zone map cannot match.
    ChunkSkip,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::PlainFull,
        Strategy::PlainDictDirect,
        Strategy::LazyStream,
        Strategy::LazyIm,
        Strategy::LazyImDirect,
        Strategy::LazyImDirectVec,
        Strategy::ChunkSkip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::PlainFull => "plain-full",
            Strategy::PlainDictDirect => "plain-dict-direct",
            Strategy::LazyStream => "lazy-stream",
            Strategy::LazyIm => "lazy-im",
            Strategy::LazyImDirect => "lazy-im-direct",
            Strategy::LazyImDirectVec => "lazy-im-direct-vec",
            Strategy::ChunkSkip => "chunk-skip",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|s| s.name()).collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::Config(format!("unknown strategy `{s}` (expected one of {})", Self::names().join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// The zone map proves no value can match.
    ZoneMap,
    /// The predicate operand is absent from the chunk dictionary.
    DictNoMatch,
    /// Every row was already rejected by an earlier predicate.
    ShortCircuit,
}

/// Work skipped while evaluating one predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkipRecord {
    pub batch: usize,
    /// Schema index.
    pub column: usize,
    /// Index into the caller's predicate list.
    pub predicate: usize,
    /// `None` for a whole chunk.
    pub page: Option<usize>,
    /// Absolute table rows covered.
    pub rows: Range<u64>,
    pub reason: SkipReason,
}

/// A chunk evaluated by a slower path than the strategy asked for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fallback {
    pub batch: usize,
    pub column: usize,
    pub predicate: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct FilterOutput {
    pub bits: BitVector,
    pub skips: Vec<SkipRecord>,
    pub fallbacks: Vec<Fallback>,
    /// Predicate indices in evaluation order.
    pub order: Vec<usize>,
    /// Time spent loading columns before evaluation, for strategies with a
    /// separate load phase; zero otherwise.
    pub load_time: Duration,
}

impl FilterOutput {
    pub fn fallback(&self) -> bool {
        !self.fallbacks.is_empty()
    }
}

struct Bound<'p> {
    index: usize,
    pred: &'p Predicate,
    column: usize,
    matcher: RangeMatcher,
}

fn bind<'p, S: ByteSource>(file: &ColfFile<S>, preds: &'p [Predicate]) -> Result<Vec<Bound<'p>>> {
    let schema = &file.footer().schema;
    preds
        .iter()
        .enumerate()
        .map(|(index, pred)| {
            let column = schema.index_of(&pred.column)?;
            let ty = schema.field(column).ty;
            pred.check_type(ty)?;
            Ok(Bound { index, pred, column, matcher: RangeMatcher::new(&pred.cmp, ty)? })
        })
        .collect()
}

/// Predicates ordered by how many pages their zone maps admit (fewest
/// first), ties kept in input order. Uses footer metadata only.
pub fn prefilter_order<S: ByteSource>(file: &ColfFile<S>, preds: &[Predicate]) -> Result<Vec<usize>> {
    let bound = bind(file, preds)?;
    let mut counts: Vec<(u64, usize)> = bound
        .iter()
        .map(|b| {
            let n = file
                .footer()
                .batches
                .iter()
                .flat_map(|batch| &batch.chunks[b.column].pages)
                .filter(|p| p.zone_map.may_match(b.pred))
                .count() as u64;
            (n, b.index)
        })
        .collect();
    counts.sort_by_key(|&(n, _)| n);
    Ok(counts.into_iter().map(|(_, i)| i).collect())
}

struct Run<'a, S> {
    file: &'a ColfFile<S>,
    stats: &'a DecodeStats,
    starts: Vec<u64>,
    bits: BitVector,
    skips: Vec<SkipRecord>,
    fallbacks: Vec<Fallback>,
    load_time: Duration,
}

impl<'a, S: ByteSource> Run<'a, S> {
    fn batch_rows(&self, b: usize) -> Range<usize> {
        self.starts[b] as usize..self.starts[b + 1] as usize
    }

    fn skip(&mut self, b: usize, p: &Bound<'_>, page: Option<usize>, rows: Range<usize>, reason: SkipReason) {
        if reason != SkipReason::ShortCircuit {
            self.bits.clear_range(rows.clone());
        }
        self.skips.push(SkipRecord {
            batch: b,
            column: p.column,
            predicate: p.index,
            page,
            rows: rows.start as u64..rows.end as u64,
            reason,
        });
    }

    fn fallback(&mut self, b: usize, p: &Bound<'_>, reason: impl Into<String>) {
        self.fallbacks.push(Fallback { batch: b, column: p.column, predicate: p.index, reason: reason.into() });
    }

    /// ANDs `hits` (rows of chunk `h` starting at chunk row `at`) with validity into the result.
    fn and_page(&mut self, h: &mut ChunkHandle<'_, S>, at: usize, mut hits: BitVector) -> Result<()> {
        hits.and(&h.validity(at..at + hits.len())?);
        let base = self.starts[h.batch] as usize;
        self.bits.and_at(base + at, &hits);
        Ok(())
    }

    /// Decode-and-compare for page `p`.
    fn eval_page_values(&mut self, h: &mut ChunkHandle<'_, S>, p: usize, pred: &Bound<'_>) -> Result<()> {
        let data = h.decode_page(p)?;
        let hits = pred.matcher.eval_data(&data);
        self.and_page(h, h.page_rows(p).start, hits)
    }

    /// Key-domain evaluation for page `p` of a dictionary chunk.
    fn eval_page_keys(&mut self, h: &mut ChunkHandle<'_, S>, p: usize, kp: KeyPredicate, vectorized: bool) -> Result<()> {
        let stats = self.stats;
        let hits = h.with_page(p, |r: &PageReader<'_>| {
            let n = r.len();
            if let Some((ends, keys)) = r.key_runs() {
                stats.add_keys(keys.len() as u64);
                let mut out = BitVector::zeros(n);
                let mut start = 0;
                for (end, k) in ends.iter().zip(keys) {
                    if kp.matches(*k) {
                        out.set_range(start..*end as usize);
                    }
                    start = *end as usize;
                }
                return Ok(out);
            }
            let (payload, width) = r.packed_keys().expect("dictionary page");
            stats.add_keys(n as u64);
            if vectorized {
                filter_packed(payload, width, n, kp)
            } else {
                let keys = r.keys().unwrap();
                Ok(BitVector::from_bools(&keys.iter().map(|k| kp.matches(*k)).collect::<Vec<_>>()))
            }
        })?;
        self.and_page(h, h.page_rows(p).start, hits)
    }

    /// Lazy evaluation of one predicate over batch `b`, with zone-map,
    /// short-circuit and (when `direct` is set) dictionary-domain skipping.
    fn eval_lazy(&mut self, b: usize, pred: &Bound<'_>, direct: Option<bool>) -> Result<()> {
        let rows = self.batch_rows(b);
        let mut h = ChunkHandle::new(self.file, b, pred.column, self.stats)?;
        if !self.bits.any_in(rows.clone()) {
            self.skip(b, pred, None, rows, SkipReason::ShortCircuit);
            return Ok(());
        }
        if !h.meta.zone_map.may_match(pred.pred) {
            self.skip(b, pred, None, rows, SkipReason::ZoneMap);
            return Ok(());
        }
        let mut keys = None;
        if let Some(vectorized) = direct {
            if h.meta.kind.is_dictionary() {
                let dict = h.dictionary()?.expect("dictionary chunk");
                match dict_translate(dict, pred.pred) {
                    KeyTranslation::Keys(kp) => keys = Some((kp, vectorized)),
                    KeyTranslation::NoMatch => {
                        self.skip(b, pred, None, rows, SkipReason::DictNoMatch);
                        return Ok(());
                    }
                    KeyTranslation::Unsupported => {
                        self.fallback(b, pred, "range predicate on a dictionary that is not order-preserving")
                    }
                }
            } else {
                self.fallback(b, pred, format!("chunk is {}, not dictionary-encoded", h.meta.kind));
            }
        }
        let base = rows.start;
        for p in 0..h.page_count() {
            let pr = h.page_rows(p);
            let abs = base + pr.start..base + pr.end;
            if !self.bits.any_in(abs.clone()) {
                self.stats.add_pages_skipped(1);
                self.skip(b, pred, Some(p), abs, SkipReason::ShortCircuit);
            } else if !h.meta.pages[p].zone_map.may_match(pred.pred) {
                self.stats.add_pages_skipped(1);
                self.skip(b, pred, Some(p), abs, SkipReason::ZoneMap);
            } else if let Some((kp, vectorized)) = keys {
                self.eval_page_keys(&mut h, p, kp, vectorized)?;
            } else {
                self.eval_page_values(&mut h, p, pred)?;
            }
        }
        Ok(())
    }

    fn eval_chunk_skip(&mut self, b: usize, pred: &Bound<'_>) -> Result<()> {
        let rows = self.batch_rows(b);
        let mut h = ChunkHandle::new(self.file, b, pred.column, self.stats)?;
        if !self.bits.any_in(rows.clone()) {
            self.skip(b, pred, None, rows, SkipReason::ShortCircuit);
        } else if !h.meta.zone_map.may_match(pred.pred) {
            self.skip(b, pred, None, rows, SkipReason::ZoneMap);
        } else {
            let col = h.decode_all()?;
            let hits = pred.matcher.eval_column(&col);
            self.bits.and_at(rows.start, &hits);
        }
        Ok(())
    }

    fn eval_stream(&mut self, b: usize, pred: &Bound<'_>) -> Result<()> {
        let base = self.starts[b] as usize;
        let mut at = base;
        for page in self.file.scan_pages(b, pred.column, self.stats)? {
            let (_, col) = page?;
            let hits = pred.matcher.eval_column(&col);
            self.bits.and_at(at, &hits);
            at += col.len();
        }
        Ok(())
    }

    /// Dictionary chunks stay as keys; other chunks are decoded.
    fn eval_plain_dict(&mut self, b: usize, pred: &Bound<'_>) -> Result<()> {
        let rows = self.batch_rows(b);
        let t = Instant::now();
        let chunk = self.file.read_chunk(b, pred.column, self.stats)?;
        self.load_time += t.elapsed();
        let translation = match &chunk.dictionary {
            Some(d) => dict_translate(d, pred.pred),
            None => {
                self.fallback(b, pred, format!("chunk is {}, not dictionary-encoded", chunk.kind));
                KeyTranslation::Unsupported
            }
        };
        let hits = match translation {
            KeyTranslation::NoMatch => {
                self.skip(b, pred, None, rows, SkipReason::DictNoMatch);
                return Ok(());
            }
            KeyTranslation::Keys(kp) => {
                let mut hits = BitVector::zeros(0);
                for p in 0..chunk.pages.len() {
                    let keys = chunk.page_reader(p)?.keys().unwrap();
                    self.stats.add_keys(keys.len() as u64);
                    hits.extend(&BitVector::from_bools(&keys.iter().map(|k| kp.matches(*k)).collect::<Vec<_>>()));
                }
                if let Some(v) = &chunk.presence {
                    hits.and(v);
                }
                hits
            }
            KeyTranslation::Unsupported => {
                if chunk.dictionary.is_some() {
                    self.fallback(b, pred, "range predicate on a dictionary that is not order-preserving");
                }
                let col = crate::encode::decode_column(&chunk)?;
                self.stats.add_values(col.len() as u64);
                pred.matcher.eval_column(&col)
            }
        };
        self.bits.and_at(rows.start, &hits);
        Ok(())
    }
}

/// Evaluates the conjunction `preds` over `file` under `strat`.
pub fn filter<S: ByteSource>(
    file: &ColfFile<S>,
    preds: &[Predicate],
    strat: Strategy,
    stats: &DecodeStats,
) -> Result<FilterOutput> {
    let bound = bind(file, preds)?;
    let order = prefilter_order(file, preds)?;
    let n = file.row_count() as usize;
    let mut run = Run {
        file,
        stats,
        starts: file.footer().batch_starts(),
        bits: BitVector::ones(n),
        skips: Vec::new(),
        fallbacks: Vec::new(),
        load_time: Duration::ZERO,
    };
    let nbatches = file.footer().batches.len();

    if strat == Strategy::PlainFull {
        let mut loaded: Vec<Option<Column>> = vec![None; file.footer().schema.len()];
        for &i in &order {
            let p = &bound[i];
            if loaded[p.column].is_none() {
                let t = Instant::now();
                loaded[p.column] = Some(load_column(file, p.column, stats)?);
                run.load_time += t.elapsed();
            }
            run.bits.and(&p.matcher.eval_column(loaded[p.column].as_ref().unwrap()));
        }
    } else {
        for b in 0..nbatches {
            let opened_before = stats.snapshot().chunks_opened;
            for &i in &order {
                let p = &bound[i];
                match strat {
                    Strategy::PlainFull => unreachable!(),
                    Strategy::PlainDictDirect => run.eval_plain_dict(b, p)?,
                    Strategy::LazyStream => run.eval_stream(b, p)?,
                    Strategy::LazyIm => run.eval_lazy(b, p, None)?,
                    Strategy::LazyImDirect => run.eval_lazy(b, p, Some(false))?,
                    Strategy::LazyImDirectVec => run.eval_lazy(b, p, Some(true))?,
                    Strategy::ChunkSkip => run.eval_chunk_skip(b, p)?,
                }
            }
            if !bound.is_empty() && stats.snapshot().chunks_opened == opened_before {
                stats.add_batches_skipped(1);
            }
        }
    }
    Ok(FilterOutput { bits: run.bits, skips: run.skips, fallbacks: run.fallbacks, order, load_time: run.load_time })
}

/// Evaluates `preds` over already decoded columns.
pub fn filter_plain(table: &PlainColumns, preds: &[Predicate]) -> Result<BitVector> {
    let mut bits = BitVector::ones(table.row_count);
    for p in preds {
        bits.and(&crate::predicate::eval_column(p, table.column(&p.column)?)?);
    }
    Ok(bits)
}
