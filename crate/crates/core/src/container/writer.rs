use std::collections::BTreeMap;
use std::io::Write;

use crate::codec::{write_page, CodecKind};
use crate::column::Column;
use crate::encode::{choose_encoding, encode_column_with_stats, page_ranges, EncodingKind, Policy};
use crate::error::{Error, Result};
use crate::stats::compute_stats;
use crate::types::{Schema, Value};
use crate::zonemap::ZoneMap;

use super::footer::{ChunkMeta, DataPageMeta, FileFooter, PageRef, RowBatchMeta, FORMAT_VERSION, HEADER_LEN, MAGIC};

pub const DEFAULT_BATCH_ROWS: usize = 65_536;

#[derive(Clone, Debug)]
pub struct WriteOptions {
    pub batch_rows: usize,
    pub policy: Policy,
    pub codec: CodecKind,
    /// Per-column encoding that bypasses the policy. `BitPack` and
    /// `DeltaFor` parameters are recomputed for every chunk.
    pub encodings: BTreeMap<String, EncodingKind>,
    /// Per-column codec overriding `codec`.
    pub codecs: BTreeMap<String, CodecKind>,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            batch_rows: DEFAULT_BATCH_ROWS,
            policy: Policy::ParquetLike,
            codec: CodecKind::Store,
            encodings: BTreeMap::new(),
            codecs: BTreeMap::new(),
        }
    }
}

impl WriteOptions {
    pub fn new(policy: Policy, codec: CodecKind) -> Self {
        WriteOptions { policy, codec, ..Default::default() }
    }

    pub fn with_batch_rows(mut self, n: usize) -> Self {
        self.batch_rows = n;
        self
    }

    pub fn with_encoding(mut self, column: impl Into<String>, kind: EncodingKind) -> Self {
        self.encodings.insert(column.into(), kind);
        self
    }

    pub fn with_codec(mut self, column: impl Into<String>, codec: CodecKind) -> Self {
        self.codecs.insert(column.into(), codec);
        self
    }
}

/// Streams row batches to a sink. One writer per file.
pub struct TableWriter<W: Write> {
    sink: W,
    schema: Schema,
    opts: WriteOptions,
    encodings: Vec<Option<EncodingKind>>,
    codecs: Vec<CodecKind>,
    pending: Vec<Column>,
    offset: u64,
    batches: Vec<RowBatchMeta>,
    scratch: Vec<u8>,
}

impl<W: Write> TableWriter<W> {
    pub fn new(mut sink: W, schema: Schema, opts: WriteOptions) -> Result<Self> {
        if opts.batch_rows == 0 {
            return Err(Error::Config("batch_rows must be positive".into()));
        }
        let mut encodings = vec![None; schema.len()];
        for (name, kind) in &opts.encodings {
            let i = schema.index_of(name)?;
            kind.validate(schema.field(i).ty).or_else(|e| match kind {
                // width and reference are re-derived per chunk
                EncodingKind::BitPack { .. } | EncodingKind::DeltaFor { .. } if kind.supports(schema.field(i).ty) => Ok(()),
                _ => Err(e),
            })?;
            encodings[i] = Some(*kind);
        }
        let mut codecs = vec![opts.codec; schema.len()];
        for (name, codec) in &opts.codecs {
            codecs[schema.index_of(name)?] = *codec;
        }
        sink.write_all(MAGIC)?;
        sink.write_all(&FORMAT_VERSION.to_le_bytes())?;
        let pending = schema.fields().iter().map(|f| Column::with_capacity(f.ty, opts.batch_rows.min(1 << 16))).collect();
        Ok(TableWriter {
            sink,
            schema,
            opts,
            encodings,
            codecs,
            pending,
            offset: HEADER_LEN,
            batches: Vec::new(),
            scratch: Vec::new(),
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    fn pending_rows(&self) -> usize {
        self.pending.first().map_or(0, Column::len)
    }

    pub fn push_row(&mut self, row: &[Value]) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::Shape { expected: self.schema.len(), actual: row.len() });
        }
        for (f, v) in self.schema.fields().iter().zip(row) {
            if v.is_null() && !f.nullable {
                return Err(Error::Schema(format!("null in non-nullable column `{}`", f.name)));
            }
            if !v.is_null() && !v.conforms_to(f.ty) {
                return Err(Error::Type(format!("column `{}` is {} but got {}", f.name, f.ty, v.type_label())));
            }
        }
        for (col, v) in self.pending.iter_mut().zip(row) {
            col.push(v)?;
        }
        if self.pending_rows() == self.opts.batch_rows {
            self.flush()?;
        }
        Ok(())
    }

    /// Appends equal-length columns in schema order.
    pub fn push_columns(&mut self, cols: &[Column]) -> Result<()> {
        if cols.len() != self.schema.len() {
            return Err(Error::Shape { expected: self.schema.len(), actual: cols.len() });
        }
        let n = cols.first().map_or(0, Column::len);
        for (f, c) in self.schema.fields().iter().zip(cols) {
            if c.column_type() != f.ty {
                return Err(Error::Type(format!("column `{}` is {} but got {}", f.name, f.ty, c.column_type())));
            }
            if c.len() != n {
                return Err(Error::Shape { expected: n, actual: c.len() });
            }
            if !f.nullable && c.null_count() > 0 {
                return Err(Error::Schema(format!("null in non-nullable column `{}`", f.name)));
            }
        }
        let mut start = 0;
        while start < n {
            let take = (self.opts.batch_rows - self.pending_rows()).min(n - start);
            if take == n && self.pending_rows() == 0 {
                // whole input fits one batch
                self.pending = cols.to_vec();
            } else {
                for (p, c) in self.pending.iter_mut().zip(cols) {
                    p.extend_from(&c.slice(start, start + take));
                }
            }
            start += take;
            if self.pending_rows() == self.opts.batch_rows {
                self.flush()?;
            }
        }
        Ok(())
    }

    fn put_page(&mut self, payload: &[u8], codec: CodecKind, value_count: u16) -> Result<PageRef> {
        self.scratch.clear();
        write_page(payload, codec, value_count, &mut self.scratch);
        self.sink.write_all(&self.scratch)?;
        let r = PageRef { offset: self.offset, len: self.scratch.len() as u32 };
        self.offset += self.scratch.len() as u64;
        Ok(r)
    }

    fn flush(&mut self) -> Result<()> {
        let n = self.pending_rows();
        if n == 0 {
            return Ok(());
        }
        let cols = std::mem::replace(
            &mut self.pending,
            self.schema.fields().iter().map(|f| Column::with_capacity(f.ty, n)).collect(),
        );
        let mut chunks = Vec::with_capacity(cols.len());
        for (j, col) in cols.iter().enumerate() {
            chunks.push(self.write_chunk(j, col)?);
        }
        self.batches.push(RowBatchMeta { row_count: n as u64, chunks });
        Ok(())
    }

    fn write_chunk(&mut self, j: usize, col: &Column) -> Result<ChunkMeta> {
        let ty = col.column_type();
        let stats = compute_stats(col);
        let kind = match self.encodings[j] {
            Some(EncodingKind::BitPack { .. }) => EncodingKind::bitpack_for(&stats).ok_or_else(|| {
                Error::InvalidEncoding(format!("column `{}` holds negative values", self.schema.field(j).name))
            })?,
            Some(EncodingKind::DeltaFor { .. }) => EncodingKind::delta_for(&stats).expect("integer column"),
            Some(k) => k,
            None => choose_encoding(ty, &stats, self.opts.policy),
        };
        let enc = encode_column_with_stats(col, kind, stats)?;
        let codec = self.codecs[j];

        let mut uncompressed = 0u64;
        let dictionary = match &enc.dictionary {
            Some(d) => {
                let bytes = d.to_page();
                uncompressed += bytes.len() as u64;
                Some(self.put_page(&bytes, codec, 0)?)
            }
            None => None,
        };
        let presence = match &enc.presence {
            Some(p) => {
                let bytes = p.to_bytes();
                uncompressed += bytes.len() as u64;
                Some(self.put_page(&bytes, codec, 0)?)
            }
            None => None,
        };
        let mut pages = Vec::with_capacity(enc.pages.len());
        for (page, r) in enc.pages.iter().zip(page_ranges(col.len())) {
            uncompressed += page.bytes.len() as u64;
            let at = self.put_page(&page.bytes, codec, page.value_count as u16)?;
            pages.push(DataPageMeta {
                offset: at.offset,
                len: at.len,
                value_count: page.value_count as u32,
                zone_map: ZoneMap::from_column(col, r.start, r.end),
            });
        }
        let s = &enc.stats;
        Ok(ChunkMeta {
            kind,
            codec,
            zone_map: ZoneMap::from_column(col, 0, col.len()),
            null_count: s.null_count,
            distinct_count: s.distinct_count,
            max_run_length: s.max_run_length,
            run_count: s.run_count,
            distinct_bytes: s.distinct_bytes,
            uncompressed_bytes: uncompressed,
            dictionary,
            presence,
            pages,
        })
    }

    /// Flushes the last batch and writes the footer and trailer.
    pub fn finish(mut self) -> Result<FileFooter> {
        self.flush()?;
        let footer = FileFooter {
            version: FORMAT_VERSION,
            schema: self.schema,
            policy: self.opts.policy.name().to_string(),
            codec: self.opts.codec,
            batches: self.batches,
        };
        let bytes = footer.to_bytes();
        self.sink.write_all(&bytes)?;
        self.sink.write_all(&(bytes.len() as u32).to_le_bytes())?;
        self.sink.write_all(MAGIC)?;
        self.sink.flush()?;
        Ok(footer)
    }
}

/// Writes `columns` (schema order, equal lengths) as one COLF file.
pub fn write_table<W: Write>(schema: &Schema, columns: &[Column], opts: &WriteOptions, sink: W) -> Result<FileFooter> {
    let mut w = TableWriter::new(sink, schema.clone(), opts.clone())?;
    w.push_columns(columns)?;
    w.finish()
}

/// Writes rows to an in-memory file.
pub fn write_rows_to_vec(schema: &Schema, rows: &[Vec<Value>], opts: &WriteOptions) -> Result<(Vec<u8>, FileFooter)> {
    let mut out = Vec::new();
    let mut w = TableWriter::new(&mut out, schema.clone(), opts.clone())?;
    for r in rows {
        w.push_row(r)?;
    }
    let footer = w.finish()?;
    Ok((out, footer))
}
