use crate::bitvec::BitVector;
use crate::codec::read_page;
use crate::column::Column;
use crate::encode::{Dictionary, EncodedChunk, EncodedPage, PageReader};
use crate::error::{Error, Result};
use crate::memrep::DecodeStats;
use crate::types::ColumnType;

use super::footer::{ChunkMeta, DataPageMeta, FileFooter, PageRef, FORMAT_VERSION, HEADER_LEN, MAGIC, TRAILER_LEN};
use super::source::ByteSource;

/// Reads and validates the footer. Only header, trailer and footer bytes are touched.
pub fn read_footer<S: ByteSource + ?Sized>(src: &S) -> Result<FileFooter> {
    let len = src.len()?;
    if len < HEADER_LEN + TRAILER_LEN {
        return Err(Error::NotColf(format!("{len} bytes is too short for a COLF file")));
    }
    let head = src.read_vec(0, HEADER_LEN as usize)?;
    if &head[..4] != MAGIC {
        return Err(Error::NotColf("bad leading magic".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::NotColf(format!("unsupported version {version}")));
    }
    let tail = src.read_vec(len - TRAILER_LEN, TRAILER_LEN as usize)?;
    if &tail[4..] != MAGIC {
        return Err(Error::NotColf("bad trailing magic".into()));
    }
    let footer_len = u32::from_le_bytes(tail[..4].try_into().unwrap()) as u64;
    let body_end = len - TRAILER_LEN;
    if footer_len > body_end - HEADER_LEN {
        return Err(Error::corrupt_file(format!("footer length {footer_len} exceeds file size {len}")));
    }
    let footer_start = body_end - footer_len;
    let footer = FileFooter::from_bytes(&src.read_vec(footer_start, footer_len as usize)?)?;
    for b in &footer.batches {
        for c in &b.chunks {
            if let Some(last) = c.pages.last() {
                if last.offset + last.len as u64 > footer_start {
                    return Err(Error::corrupt_file("page extends into the footer"));
                }
            }
        }
    }
    Ok(footer)
}

fn read_ref<S: ByteSource + ?Sized>(src: &S, p: PageRef, column: usize, stats: &DecodeStats) -> Result<(u16, Vec<u8>)> {
    let framed = src.read_vec(p.offset, p.len as usize)?;
    stats.page_read(column, p.len as u64);
    let (h, payload) = read_page(&framed)?;
    Ok((h.value_count, payload))
}

/// A COLF file: a byte source plus its parsed footer.
pub struct ColfFile<S> {
    source: S,
    footer: FileFooter,
}

impl<S: ByteSource> ColfFile<S> {
    pub fn open(source: S) -> Result<Self> {
        let footer = read_footer(&source)?;
        Ok(ColfFile { source, footer })
    }

    pub fn footer(&self) -> &FileFooter {
        &self.footer
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn into_source(self) -> S {
        self.source
    }

    pub fn row_count(&self) -> u64 {
        self.footer.row_count()
    }

    fn check(&self, batch: usize, column: usize) -> Result<(&ChunkMeta, ColumnType)> {
        let meta = self.footer.chunk(batch, column)?;
        Ok((meta, self.footer.schema.field(column).ty))
    }

    pub fn read_dictionary(&self, batch: usize, column: usize, stats: &DecodeStats) -> Result<Option<Dictionary>> {
        let (meta, ty) = self.check(batch, column)?;
        let Some(r) = meta.dictionary else {
            if meta.kind.is_dictionary() {
                return Err(Error::corrupt_file("dictionary-encoded chunk without a dictionary page"));
            }
            return Ok(None);
        };
        let (_, bytes) = read_ref(&self.source, r, column, stats)?;
        Ok(Some(Dictionary::from_page(ty, &bytes)?))
    }

    pub fn read_presence(&self, batch: usize, column: usize, stats: &DecodeStats) -> Result<Option<BitVector>> {
        let (meta, _) = self.check(batch, column)?;
        let Some(r) = meta.presence else { return Ok(None) };
        let (_, bytes) = read_ref(&self.source, r, column, stats)?;
        let bv = BitVector::from_bytes(meta.row_count() as usize, &bytes)
            .ok_or_else(|| Error::corrupt_chunk("presence page has the wrong length"))?;
        if (bv.len() - bv.count_ones()) as u64 != meta.null_count {
            return Err(Error::corrupt_chunk("presence page disagrees with null count"));
        }
        Ok(Some(bv))
    }

    /// Decompressed payload of data page `page`.
    pub fn read_data_page(&self, batch: usize, column: usize, page: usize, stats: &DecodeStats) -> Result<Vec<u8>> {
        let (meta, _) = self.check(batch, column)?;
        let p = meta.pages.get(page).ok_or(Error::Index { index: page, len: meta.pages.len() })?;
        let (count, bytes) = read_ref(&self.source, p.page_ref(), column, stats)?;
        if count as u32 != p.value_count {
            return Err(Error::corrupt_chunk(format!("page header holds {count} values, footer says {}", p.value_count)));
        }
        Ok(bytes)
    }

    /// All pages of one chunk, decompressed but not decoded.
    pub fn read_chunk(&self, batch: usize, column: usize, stats: &DecodeStats) -> Result<EncodedChunk> {
        let (meta, ty) = self.check(batch, column)?;
        stats.chunk_opened();
        let dictionary = self.read_dictionary(batch, column, stats)?;
        let presence = self.read_presence(batch, column, stats)?;
        let mut pages = Vec::with_capacity(meta.pages.len());
        for (i, p) in meta.pages.iter().enumerate() {
            pages.push(EncodedPage { value_count: p.value_count as usize, bytes: self.read_data_page(batch, column, i, stats)? });
        }
        Ok(EncodedChunk {
            column_type: ty,
            kind: meta.kind,
            presence,
            dictionary,
            pages,
            value_count: meta.row_count() as usize,
            stats: meta.stats(),
        })
    }

    /// Streams decoded pages in order. Nothing is read until the first page is pulled.
    pub fn scan_pages<'a>(&'a self, batch: usize, column: usize, stats: &'a DecodeStats) -> Result<PageScan<'a, S>> {
        let (meta, ty) = self.check(batch, column)?;
        Ok(PageScan { file: self, meta, ty, batch, column, stats, next: 0, row: 0, opened: None })
    }
}

/// Iterator over `(page metadata, decoded values)` of one chunk.
pub struct PageScan<'a, S> {
    file: &'a ColfFile<S>,
    meta: &'a ChunkMeta,
    ty: ColumnType,
    batch: usize,
    column: usize,
    stats: &'a DecodeStats,
    next: usize,
    row: usize,
    opened: Option<(Option<Dictionary>, Option<BitVector>)>,
}

impl<'a, S: ByteSource> PageScan<'a, S> {
    fn pull(&mut self) -> Result<(&'a DataPageMeta, Column)> {
        if self.opened.is_none() {
            self.stats.chunk_opened();
            let dict = self.file.read_dictionary(self.batch, self.column, self.stats)?;
            let presence = self.file.read_presence(self.batch, self.column, self.stats)?;
            self.opened = Some((dict, presence));
        }
        let (dict, presence) = self.opened.as_ref().unwrap();
        let p = &self.meta.pages[self.next];
        let bytes = self.file.read_data_page(self.batch, self.column, self.next, self.stats)?;
        let n = p.value_count as usize;
        let data = PageReader::new(self.ty, self.meta.kind, dict.as_ref(), &bytes, n)?.decode_all()?;
        self.stats.add_values(n as u64);
        let validity = match presence {
            Some(bv) => bv.slice(self.row..self.row + n),
            None => BitVector::ones(n),
        };
        self.next += 1;
        self.row += n;
        Ok((p, Column::new(data, validity)?))
    }
}

impl<'a, S: ByteSource> Iterator for PageScan<'a, S> {
    type Item = Result<(&'a DataPageMeta, Column)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.meta.pages.len() {
            return None;
        }
        let out = self.pull();
        if out.is_err() {
            self.next = self.meta.pages.len();
        }
        Some(out)
    }
}
