//! In-memory representations: fully decoded columns and lazily decoded
//! encoded columns, plus the decode counters both report into.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::bitvec::BitVector;
use crate::column::{Column, ColumnData};
use crate::container::{ByteSource, ChunkMeta, ColfFile};
use crate::encode::{Dictionary, PageReader};
use crate::error::{Error, Result};
use crate::types::{ColumnType, Schema, Value};

/// Monotone decode counters. Shared by reference; updates are atomic so
/// concurrent readers produce the same totals in any interleaving.
#[derive(Debug, Default)]
pub struct DecodeStats {
    values_decoded: AtomicU64,
    keys_decoded: AtomicU64,
    pages_read: AtomicU64,
    pages_skipped: AtomicU64,
    chunks_opened: AtomicU64,
    chunks_skipped: AtomicU64,
    batches_skipped: AtomicU64,
    bytes_read: AtomicU64,
    columns: Mutex<BTreeSet<usize>>,
}

/// A point-in-time copy of [`DecodeStats`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeCounts {
    pub values_decoded: u64,
    /// Dictionary keys unpacked without decoding the values they stand for.
    pub keys_decoded: u64,
    /// Pages of any kind (dictionary, presence, data) fetched from the source.
    pub pages_read: u64,
    pub pages_skipped: u64,
    pub chunks_opened: u64,
    pub chunks_skipped: u64,
    pub batches_skipped: u64,
    /// Framed page bytes fetched; footer reads are not counted.
    pub bytes_read: u64,
    /// Schema indices of columns with at least one page read.
    pub columns_touched: Vec<usize>,
}

impl DecodeCounts {
    /// Counter increase from `earlier` to `self`.
    pub fn since(&self, earlier: &DecodeCounts) -> DecodeCounts {
        DecodeCounts {
            values_decoded: self.values_decoded - earlier.values_decoded,
            keys_decoded: self.keys_decoded - earlier.keys_decoded,
            pages_read: self.pages_read - earlier.pages_read,
            pages_skipped: self.pages_skipped - earlier.pages_skipped,
            chunks_opened: self.chunks_opened - earlier.chunks_opened,
            chunks_skipped: self.chunks_skipped - earlier.chunks_skipped,
            batches_skipped: self.batches_skipped - earlier.batches_skipped,
            bytes_read: self.bytes_read - earlier.bytes_read,
            columns_touched: self.columns_touched.iter().filter(|c| !earlier.columns_touched.contains(c)).copied().collect(),
        }
    }
}

macro_rules! counter {
    ($name:ident, $field:ident) => {
        pub fn $name(&self, n: u64) {
            self.$field.fetch_add(n, Ordering::Relaxed);
        }
    };
}

impl DecodeStats {
    pub fn new() -> Self {
        Self::default()
    }

    counter!(add_values, values_decoded);
    counter!(add_keys, keys_decoded);
    counter!(add_pages_skipped, pages_skipped);
    counter!(add_chunks_skipped, chunks_skipped);
    counter!(add_batches_skipped, batches_skipped);

    pub fn chunk_opened(&self) {
        self.chunks_opened.fetch_add(1, Ordering::Relaxed);
    }

    pub fn page_read(&self, column: usize, bytes: u64) {
        self.pages_read.fetch_add(1, Ordering::Relaxed);
        self.bytes_read.fetch_add(bytes, Ordering::Relaxed);
        self.columns.lock().unwrap().insert(column);
    }

    pub fn snapshot(&self) -> DecodeCounts {
        let l = |a: &AtomicU64| a.load(Ordering::Relaxed);
        DecodeCounts {
            values_decoded: l(&self.values_decoded),
            keys_decoded: l(&self.keys_decoded),
            pages_read: l(&self.pages_read),
            pages_skipped: l(&self.pages_skipped),
            chunks_opened: l(&self.chunks_opened),
            chunks_skipped: l(&self.chunks_skipped),
            batches_skipped: l(&self.batches_skipped),
            bytes_read: l(&self.bytes_read),
            columns_touched: self.columns.lock().unwrap().iter().copied().collect(),
        }
    }
}

/// Fully decoded columns, batches concatenated in order.
#[derive(Clone, Debug)]
pub struct PlainColumns {
    pub schema: Schema,
    pub columns: Vec<Column>,
    pub row_count: usize,
}

impl PlainColumns {
    pub fn new(schema: Schema, columns: Vec<Column>, row_count: usize) -> Result<Self> {
        if schema.len() != columns.len() {
            return Err(Error::Shape { expected: schema.len(), actual: columns.len() });
        }
        for (f, c) in schema.fields().iter().zip(&columns) {
            if c.len() != row_count {
                return Err(Error::Shape { expected: row_count, actual: c.len() });
            }
            if c.column_type() != f.ty {
                return Err(Error::Type(format!("column `{}` is {} but holds {}", f.name, f.ty, c.column_type())));
            }
        }
        Ok(PlainColumns { schema, columns, row_count })
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.schema.index_of(name)?])
    }

    pub fn row(&self, i: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c.value(i)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        (0..self.row_count).map(|i| self.row(i))
    }

    /// Rows whose bit is set, in order.
    pub fn select(&self, bv: &BitVector) -> Result<PlainColumns> {
        if bv.len() != self.row_count {
            return Err(Error::Shape { expected: self.row_count, actual: bv.len() });
        }
        let columns = self.columns.iter().map(|c| c.select(bv)).collect::<Result<Vec<_>>>()?;
        Ok(PlainColumns { schema: self.schema.clone(), columns, row_count: bv.count_ones() })
    }

    /// Columns `names`, in the given order.
    pub fn project(&self, names: &[impl AsRef<str>]) -> Result<PlainColumns> {
        let idx = names.iter().map(|n| self.schema.index_of(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(PlainColumns {
            schema: Schema::projected(idx.iter().map(|&i| self.schema.field(i).clone()).collect()),
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            row_count: self.row_count,
        })
    }

    /// Same names, types and bitwise-equal values.
    pub fn same_values(&self, other: &PlainColumns) -> bool {
        self.schema == other.schema
            && self.row_count == other.row_count
            && self.columns.iter().zip(&other.columns).all(|(a, b)| a.same_values(b))
    }
}

pub(crate) fn resolve_projection(schema: &Schema, projection: &[impl AsRef<str>]) -> Result<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(projection.len());
    for name in projection {
        let i = schema.index_of(name.as_ref())?;
        if !seen.insert(i) {
            return Err(Error::Name(format!("column `{}` projected twice", name.as_ref())));
        }
        out.push(i);
    }
    Ok(out)
}

fn projected_schema(schema: &Schema, idx: &[usize]) -> Schema {
    Schema::projected(idx.iter().map(|&i| schema.field(i).clone()).collect())
}

/// One column's chunks fully decoded and concatenated.
pub(crate) fn load_column<S: ByteSource>(file: &ColfFile<S>, column: usize, stats: &DecodeStats) -> Result<Column> {
    let ty = file.footer().schema.field(column).ty;
    let mut out = Column::with_capacity(ty, file.row_count() as usize);
    for b in 0..file.footer().batches.len() {
        let chunk = file.read_chunk(b, column, stats)?;
        let col = crate::encode::decode_column(&chunk)?;
        stats.add_values(col.len() as u64);
        out.extend_from(&col);
    }
    Ok(out)
}

/// Reads and decodes every page of the projected columns.
pub fn load_plain<S: ByteSource>(file: &ColfFile<S>, projection: &[impl AsRef<str>], stats: &DecodeStats) -> Result<PlainColumns> {
    let schema = &file.footer().schema;
    let idx = resolve_projection(schema, projection)?;
    let columns = idx.iter().map(|&j| load_column(file, j, stats)).collect::<Result<Vec<_>>>()?;
    PlainColumns::new(projected_schema(schema, &idx), columns, file.row_count() as usize)
}

/// Decode-on-demand access to one chunk. Dictionary and presence pages are
/// fetched at most once per handle; decoded values are never cached.
/// A handle dropped without reading anything counts as a skipped chunk.
pub(crate) struct ChunkHandle<'a, S> {
    file: &'a ColfFile<S>,
    stats: &'a DecodeStats,
    pub batch: usize,
    pub column: usize,
    pub meta: &'a ChunkMeta,
    pub ty: ColumnType,
    page_starts: Vec<usize>,
    dict: Option<Option<Dictionary>>,
    presence: Option<Option<BitVector>>,
    opened: bool,
}

impl<'a, S: ByteSource> ChunkHandle<'a, S> {
    pub fn new(file: &'a ColfFile<S>, batch: usize, column: usize, stats: &'a DecodeStats) -> Result<Self> {
        let meta = file.footer().chunk(batch, column)?;
        let mut page_starts = Vec::with_capacity(meta.pages.len() + 1);
        let mut acc = 0;
        page_starts.push(0);
        for p in &meta.pages {
            acc += p.value_count as usize;
            page_starts.push(acc);
        }
        Ok(ChunkHandle {
            file,
            stats,
            batch,
            column,
            meta,
            ty: file.footer().schema.field(column).ty,
            page_starts,
            dict: None,
            presence: None,
            opened: false,
        })
    }

    pub fn rows(&self) -> usize {
        *self.page_starts.last().unwrap()
    }

    pub fn page_count(&self) -> usize {
        self.meta.pages.len()
    }

    /// Rows of page `p`, relative to the chunk.
    pub fn page_rows(&self, p: usize) -> Range<usize> {
        self.page_starts[p]..self.page_starts[p + 1]
    }

    fn open(&mut self) {
        if !self.opened {
            self.opened = true;
            self.stats.chunk_opened();
        }
    }

    pub fn dictionary(&mut self) -> Result<Option<&Dictionary>> {
        if self.dict.is_none() {
            self.open();
            self.dict = Some(self.file.read_dictionary(self.batch, self.column, self.stats)?);
        }
        Ok(self.dict.as_ref().unwrap().as_ref())
    }

    pub fn presence(&mut self) -> Result<Option<&BitVector>> {
        if self.presence.is_none() {
            if self.meta.presence.is_none() {
                self.presence = Some(None);
            } else {
                self.open();
                self.presence = Some(self.file.read_presence(self.batch, self.column, self.stats)?);
            }
        }
        Ok(self.presence.as_ref().unwrap().as_ref())
    }

    /// Validity of chunk rows `range`.
    pub fn validity(&mut self, range: Range<usize>) -> Result<BitVector> {
        Ok(match self.presence()? {
            Some(p) => p.slice(range),
            None => BitVector::ones(range.len()),
        })
    }

    /// Decompressed bytes of data page `p`.
    pub fn page_bytes(&mut self, p: usize) -> Result<Vec<u8>> {
        self.open();
        self.file.read_data_page(self.batch, self.column, p, self.stats)
    }

    /// Runs `f` over a reader of page `p`.
    pub fn with_page<T>(&mut self, p: usize, f: impl FnOnce(&PageReader<'_>) -> Result<T>) -> Result<T> {
        if self.meta.kind.is_dictionary() {
            self.dictionary()?;
        }
        let bytes = self.page_bytes(p)?;
        let n = self.meta.pages[p].value_count as usize;
        let dict = self.dict.as_ref().and_then(|d| d.as_ref());
        let reader = PageReader::new(self.ty, self.meta.kind, dict, &bytes, n)?;
        f(&reader)
    }

    /// Decodes all of page `p` (values only; validity is separate).
    pub fn decode_page(&mut self, p: usize) -> Result<ColumnData> {
        let data = self.with_page(p, |r| r.decode_all())?;
        self.stats.add_values(data.len() as u64);
        Ok(data)
    }

    /// Decodes the chunk-relative rows `positions`, all inside page `p`.
    pub fn decode_positions(&mut self, p: usize, positions: &[usize]) -> Result<ColumnData> {
        let base = self.page_starts[p];
        let data = self.with_page(p, |r| r.decode_positions(positions.iter().map(|i| i - base)))?;
        self.stats.add_values(data.len() as u64);
        Ok(data)
    }

    /// Whole chunk as a column.
    pub fn decode_all(&mut self) -> Result<Column> {
        let mut data = ColumnData::with_capacity(self.ty, self.rows());
        for p in 0..self.page_count() {
            data.extend_from(&self.decode_page(p)?);
        }
        let validity = self.validity(0..self.rows())?;
        Column::new(data, validity)
    }
}

impl<S> Drop for ChunkHandle<'_, S> {
    fn drop(&mut self) {
        if !self.opened {
            self.stats.add_chunks_skipped(1);
        }
    }
}

/// Projected columns left encoded in the file; values are decoded only when asked for.
pub struct LazyColumns<'f, S> {
    file: &'f ColfFile<S>,
    columns: Vec<usize>,
    schema: Schema,
    batch_starts: Vec<u64>,
}

/// Opens projected columns without reading any page.
pub fn open_lazy<'f, S: ByteSource>(file: &'f ColfFile<S>, projection: &[impl AsRef<str>]) -> Result<LazyColumns<'f, S>> {
    let schema = &file.footer().schema;
    let columns = resolve_projection(schema, projection)?;
    Ok(LazyColumns {
        file,
        schema: projected_schema(schema, &columns),
        columns,
        batch_starts: file.footer().batch_starts(),
    })
}

impl<'f, S: ByteSource> LazyColumns<'f, S> {
    pub fn file(&self) -> &'f ColfFile<S> {
        self.file
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Schema indices of the projected columns.
    pub fn column_indices(&self) -> &[usize] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        *self.batch_starts.last().unwrap() as usize
    }

    pub fn batch_starts(&self) -> &[u64] {
        &self.batch_starts
    }

    fn locate(&self, row: usize) -> Result<(usize, usize)> {
        if row >= self.row_count() {
            return Err(Error::Index { index: row, len: self.row_count() });
        }
        let b = self.batch_starts.partition_point(|&s| s as usize <= row) - 1;
        Ok((b, row - self.batch_starts[b] as usize))
    }

    /// Value of projected column `c` at `row`. Reads at most the presence
    /// page, the dictionary page and one data page.
    pub fn value(&self, row: usize, c: usize, stats: &DecodeStats) -> Result<Value> {
        let column = *self.columns.get(c).ok_or(Error::Index { index: c, len: self.columns.len() })?;
        let (b, i) = self.locate(row)?;
        let mut h = ChunkHandle::new(self.file, b, column, stats)?;
        if let Some(p) = h.presence()? {
            if !p.get(i) {
                return Ok(Value::Null);
            }
        }
        let page = (0..h.page_count()).find(|&p| h.page_rows(p).contains(&i)).unwrap();
        Ok(h.decode_positions(page, &[i])?.value(0))
    }
}

/// Decodes exactly the rows selected by `bv` from every projected column.
/// Batches and pages without a selected row are not read.
pub fn materialize<S: ByteSource>(lazy: &LazyColumns<'_, S>, bv: &BitVector, stats: &DecodeStats) -> Result<PlainColumns> {
    let n = lazy.row_count();
    if bv.len() != n {
        return Err(Error::Shape { expected: n, actual: bv.len() });
    }
    let starts = &lazy.batch_starts;
    let empty_batches = (0..starts.len() - 1).filter(|&b| !bv.any_in(starts[b] as usize..starts[b + 1] as usize)).count();
    stats.add_batches_skipped(empty_batches as u64);

    let selected = bv.count_ones();
    let mut columns = Vec::with_capacity(lazy.columns.len());
    for &j in &lazy.columns {
        let ty = lazy.file.footer().schema.field(j).ty;
        let mut out = Column::with_capacity(ty, selected);
        let mut positions = Vec::new();
        for b in 0..starts.len() - 1 {
            let base = starts[b] as usize;
            let mut h = ChunkHandle::new(lazy.file, b, j, stats)?;
            if !bv.any_in(base..starts[b + 1] as usize) {
                continue;
            }
            for p in 0..h.page_count() {
                let rows = h.page_rows(p);
                positions.clear();
                positions.extend(bv.iter_ones_in(base + rows.start..base + rows.end).map(|r| r - base));
                if positions.is_empty() {
                    stats.add_pages_skipped(1);
                    continue;
                }
                let data = h.decode_positions(p, &positions)?;
                let validity = match h.presence()? {
                    Some(pr) => BitVector::from_bools(&positions.iter().map(|&i| pr.get(i)).collect::<Vec<_>>()),
                    None => BitVector::ones(positions.len()),
                };
                out.extend_from(&Column::new(data, validity)?);
            }
        }
        columns.push(out);
    }
    PlainColumns::new(lazy.schema.clone(), columns, selected)
}
