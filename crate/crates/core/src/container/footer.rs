//! Footer metadata and its little-endian binary form (see FORMAT.md).

use serde::Serialize;

use crate::codec::CodecKind;
use crate::encode::EncodingKind;
use crate::error::{Error, Result};
use crate::stats::ColumnStats;
use crate::types::{ColumnType, Field, Schema, Value};
use crate::zonemap::ZoneMap;

pub const MAGIC: &[u8; 4] = b"COLF";
pub const FORMAT_VERSION: u16 = 1;
/// Magic plus version.
pub const HEADER_LEN: u64 = 6;
/// Footer length plus trailing magic.
pub const TRAILER_LEN: u64 = 8;

/// A framed page (header included) at an absolute file offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PageRef {
    pub offset: u64,
    pub len: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataPageMeta {
    pub offset: u64,
    pub len: u32,
    pub value_count: u32,
    pub zone_map: ZoneMap,
}

impl DataPageMeta {
    pub fn page_ref(&self) -> PageRef {
        PageRef { offset: self.offset, len: self.len }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChunkMeta {
    pub kind: EncodingKind,
    /// Codec requested for this chunk; individual pages may have fallen back to store.
    pub codec: CodecKind,
    pub zone_map: ZoneMap,
    pub null_count: u64,
    pub distinct_count: u64,
    pub max_run_length: u64,
    pub run_count: u64,
    pub distinct_bytes: u64,
    /// Encoded bytes before block compression, all pages.
    pub uncompressed_bytes: u64,
    pub dictionary: Option<PageRef>,
    /// Absent when the chunk has no nulls.
    pub presence: Option<PageRef>,
    pub pages: Vec<DataPageMeta>,
}

impl ChunkMeta {
    pub fn row_count(&self) -> u64 {
        self.zone_map.row_count
    }

    /// Bytes on disk across all pages, headers included.
    pub fn stored_bytes(&self) -> u64 {
        self.dictionary.map_or(0, |p| p.len as u64)
            + self.presence.map_or(0, |p| p.len as u64)
            + self.pages.iter().map(|p| p.len as u64).sum::<u64>()
    }

    /// Stats reconstructed from metadata. Bounds come from the zone map and may be truncated prefixes.
    pub fn stats(&self) -> ColumnStats {
        ColumnStats {
            distinct_count: self.distinct_count,
            row_count: self.row_count(),
            null_count: self.null_count,
            max_run_length: self.max_run_length,
            run_count: self.run_count,
            min: self.zone_map.min.clone(),
            max: self.zone_map.max.clone(),
            distinct_bytes: self.distinct_bytes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowBatchMeta {
    pub row_count: u64,
    pub chunks: Vec<ChunkMeta>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileFooter {
    pub version: u16,
    pub schema: Schema,
    pub policy: String,
    pub codec: CodecKind,
    pub batches: Vec<RowBatchMeta>,
}

impl FileFooter {
    pub fn row_count(&self) -> u64 {
        self.batches.iter().map(|b| b.row_count).sum()
    }

    /// First row of every batch, plus the total row count at the end.
    pub fn batch_starts(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.batches.len() + 1);
        let mut acc = 0;
        out.push(0);
        for b in &self.batches {
            acc += b.row_count;
            out.push(acc);
        }
        out
    }

    pub fn chunk(&self, batch: usize, column: usize) -> Result<&ChunkMeta> {
        let b = self.batches.get(batch).ok_or(Error::Index { index: batch, len: self.batches.len() })?;
        b.chunks.get(column).ok_or(Error::Index { index: column, len: b.chunks.len() })
    }

    /// All page bytes stored for `column` across batches.
    pub fn column_bytes(&self, column: usize) -> u64 {
        self.batches.iter().filter_map(|b| b.chunks.get(column)).map(ChunkMeta::stored_bytes).sum()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.u16(self.version);
        w.u32(self.schema.len() as u32);
        for f in self.schema.fields() {
            w.str(&f.name);
            w.column_type(f.ty);
            w.u8(f.nullable as u8);
        }
        w.str(&self.policy);
        w.u8(self.codec.id());
        w.u32(self.batches.len() as u32);
        for b in &self.batches {
            w.u64(b.row_count);
            for c in &b.chunks {
                w.chunk(c);
            }
        }
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { b: bytes, pos: 0 };
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::NotColf(format!("footer version {version}, expected {FORMAT_VERSION}")));
        }
        let ncols = r.count(7)?;
        let mut fields = Vec::with_capacity(ncols);
        for _ in 0..ncols {
            let name = r.str()?;
            let ty = r.column_type()?;
            let nullable = r.bool()?;
            fields.push(Field::new(name, ty, nullable));
        }
        let schema = Schema::new(fields).map_err(|e| Error::corrupt_file(format!("footer schema: {e}")))?;
        let policy = r.str()?;
        let codec = r.codec()?;
        let nbatches = r.count(8)?;
        let mut batches = Vec::with_capacity(nbatches);
        for _ in 0..nbatches {
            let row_count = r.u64()?;
            let chunks = schema.fields().iter().map(|f| r.chunk(f.ty)).collect::<Result<Vec<_>>>()?;
            batches.push(RowBatchMeta { row_count, chunks });
        }
        if r.pos != bytes.len() {
            return Err(Error::corrupt_file(format!("{} trailing footer bytes", bytes.len() - r.pos)));
        }
        let footer = FileFooter { version, schema, policy, codec, batches };
        footer.validate()?;
        Ok(footer)
    }

    /// Structural checks: page counts add up and pages do not overlap.
    pub fn validate(&self) -> Result<()> {
        let mut last_end = HEADER_LEN;
        for (bi, b) in self.batches.iter().enumerate() {
            for (ci, c) in b.chunks.iter().enumerate() {
                let here = || format!("batch {bi} column {ci}");
                if c.row_count() != b.row_count {
                    return Err(Error::corrupt_file(format!("{}: zone map covers {} rows, batch has {}", here(), c.row_count(), b.row_count)));
                }
                let total: u64 = c.pages.iter().map(|p| p.value_count as u64).sum();
                if total != b.row_count {
                    return Err(Error::corrupt_file(format!("{}: pages hold {total} values, batch has {}", here(), b.row_count)));
                }
                let refs = c.dictionary.iter().chain(c.presence.iter()).copied().chain(c.pages.iter().map(DataPageMeta::page_ref));
                for p in refs {
                    if p.offset < last_end {
                        return Err(Error::corrupt_file(format!("{}: page at {} overlaps previous page", here(), p.offset)));
                    }
                    last_end = p.offset + p.len as u64;
                }
            }
        }
        Ok(())
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }

    fn column_type(&mut self, ty: ColumnType) {
        let (tag, dim) = match ty {
            ColumnType::Int32 => (0, 0),
            ColumnType::Int64 => (1, 0),
            ColumnType::Float64 => (2, 0),
            ColumnType::Utf8 => (3, 0),
            ColumnType::Bool => (4, 0),
            ColumnType::FixedVector(d) => (5, d),
        };
        self.u8(tag);
        self.u32(dim);
    }

    fn encoding(&mut self, k: EncodingKind) {
        match k {
            EncodingKind::Plain => self.u8(0),
            EncodingKind::BitPack { width } => {
                self.u8(1);
                self.u8(width);
            }
            EncodingKind::Dict { order_preserving } => {
                self.u8(2);
                self.u8(order_preserving as u8);
            }
            EncodingKind::Rle => self.u8(3),
            EncodingKind::DictRle { order_preserving } => {
                self.u8(4);
                self.u8(order_preserving as u8);
            }
            EncodingKind::DeltaFor { reference, width } => {
                self.u8(5);
                self.i64(reference);
                self.u8(width);
            }
            EncodingKind::ScaledInt { scale } => {
                self.u8(6);
                self.u8(scale);
            }
        }
    }

    // Bounds are written without a type tag; the column type is known.
    fn bound(&mut self, v: &Option<Value>) {
        let Some(v) = v else {
            self.u8(0);
            return;
        };
        self.u8(1);
        match v {
            Value::Int32(x) => self.0.extend_from_slice(&x.to_le_bytes()),
            Value::Int64(x) => self.i64(*x),
            Value::Float64(x) => self.u64(x.to_bits()),
            Value::Utf8(s) => self.str(s),
            Value::Bool(b) => self.u8(*b as u8),
            Value::Null | Value::Vector(_) => unreachable!("zone maps never hold null or vector bounds"),
        }
    }

    fn zone_map(&mut self, z: &ZoneMap) {
        self.u64(z.row_count);
        self.u64(z.null_count);
        self.u8(z.min_truncated as u8 | (z.max_truncated as u8) << 1);
        self.bound(&z.min);
        self.bound(&z.max);
    }

    fn page_ref(&mut self, p: &Option<PageRef>) {
        match p {
            None => self.u8(0),
            Some(p) => {
                self.u8(1);
                self.u64(p.offset);
                self.u32(p.len);
            }
        }
    }

    fn chunk(&mut self, c: &ChunkMeta) {
        self.encoding(c.kind);
        self.u8(c.codec.id());
        self.zone_map(&c.zone_map);
        for v in [c.null_count, c.distinct_count, c.max_run_length, c.run_count, c.distinct_bytes, c.uncompressed_bytes] {
            self.u64(v);
        }
        self.page_ref(&c.dictionary);
        self.page_ref(&c.presence);
        self.u32(c.pages.len() as u32);
        for p in &c.pages {
            self.u64(p.offset);
            self.u32(p.len);
            self.u32(p.value_count);
            self.zone_map(&p.zone_map);
        }
    }
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.b.len()).ok_or_else(|| {
            Error::corrupt_file(format!("footer truncated: need {n} bytes at offset {}", self.pos))
        })?;
        let s = &self.b[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn arr<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::corrupt_file(format!("invalid boolean byte {v}"))),
        }
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.arr()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.arr()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.arr()?))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.arr()?))
    }
    /// A u32 element count, sanity-checked against the bytes left.
    fn count(&mut self, min_elem_bytes: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_elem_bytes) > self.b.len() - self.pos {
            return Err(Error::corrupt_file(format!("count {n} exceeds remaining footer bytes")));
        }
        Ok(n)
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::corrupt_file("footer string is not UTF-8"))
    }

    fn column_type(&mut self) -> Result<ColumnType> {
        let tag = self.u8()?;
        let dim = self.u32()?;
        let ty = match tag {
            0 => ColumnType::Int32,
            1 => ColumnType::Int64,
            2 => ColumnType::Float64,
            3 => ColumnType::Utf8,
            4 => ColumnType::Bool,
            5 => ColumnType::FixedVector(dim),
            t => return Err(Error::corrupt_file(format!("unknown column type tag {t}"))),
        };
        ty.validate().map_err(|e| Error::corrupt_file(e.to_string()))?;
        Ok(ty)
    }

    fn codec(&mut self) -> Result<CodecKind> {
        let id = self.u8()?;
        CodecKind::from_id(id).ok_or_else(|| Error::corrupt_file(format!("unknown codec id {id}")))
    }

    fn encoding(&mut self, ty: ColumnType) -> Result<EncodingKind> {
        let k = match self.u8()? {
            0 => EncodingKind::Plain,
            1 => EncodingKind::BitPack { width: self.u8()? },
            2 => EncodingKind::Dict { order_preserving: self.bool()? },
            3 => EncodingKind::Rle,
            4 => EncodingKind::DictRle { order_preserving: self.bool()? },
            5 => EncodingKind::DeltaFor { reference: self.i64()?, width: self.u8()? },
            6 => EncodingKind::ScaledInt { scale: self.u8()? },
            t => return Err(Error::corrupt_file(format!("unknown encoding tag {t}"))),
        };
        k.validate(ty).map_err(|e| Error::corrupt_file(e.to_string()))?;
        Ok(k)
    }

    fn bound(&mut self, ty: ColumnType) -> Result<Option<Value>> {
        if !self.bool()? {
            return Ok(None);
        }
        Ok(Some(match ty {
            ColumnType::Int32 => Value::Int32(i32::from_le_bytes(self.arr()?)),
            ColumnType::Int64 => Value::Int64(self.i64()?),
            ColumnType::Float64 => Value::Float64(f64::from_bits(self.u64()?)),
            ColumnType::Utf8 => Value::Utf8(self.str()?),
            ColumnType::Bool => Value::Bool(self.bool()?),
            ColumnType::FixedVector(_) => return Err(Error::corrupt_file("vector column with zone-map bounds")),
        }))
    }

    fn zone_map(&mut self, ty: ColumnType) -> Result<ZoneMap> {
        let row_count = self.u64()?;
        let null_count = self.u64()?;
        let flags = self.u8()?;
        if flags > 3 || null_count > row_count {
            return Err(Error::corrupt_file("malformed zone map"));
        }
        Ok(ZoneMap {
            row_count,
            null_count,
            min_truncated: flags & 1 != 0,
            max_truncated: flags & 2 != 0,
            min: self.bound(ty)?,
            max: self.bound(ty)?,
        })
    }

    fn page_ref(&mut self) -> Result<Option<PageRef>> {
        if !self.bool()? {
            return Ok(None);
        }
        Ok(Some(PageRef { offset: self.u64()?, len: self.u32()? }))
    }

    fn chunk(&mut self, ty: ColumnType) -> Result<ChunkMeta> {
        let kind = self.encoding(ty)?;
        let codec = self.codec()?;
        let zone_map = self.zone_map(ty)?;
        let [null_count, distinct_count, max_run_length, run_count, distinct_bytes, uncompressed_bytes] =
            [self.u64()?, self.u64()?, self.u64()?, self.u64()?, self.u64()?, self.u64()?];
        let dictionary = self.page_ref()?;
        let presence = self.page_ref()?;
        let npages = self.count(16)?;
        let mut pages = Vec::with_capacity(npages);
        for _ in 0..npages {
            pages.push(DataPageMeta {
                offset: self.u64()?,
                len: self.u32()?,
                value_count: self.u32()?,
                zone_map: self.zone_map(ty)?,
            });
        }
        Ok(ChunkMeta {
            kind,
            codec,
            zone_map,
            null_count,
            distinct_count,
            max_run_length,
            run_count,
            distinct_bytes,
            uncompressed_bytes,
            dictionary,
            presence,
            pages,
        })
    }
}
