//! Block compression applied to page payloads after encoding.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodecKind {
    Store,
    /// LZ4 block format.
    Lz4Like,
    /// Raw DEFLATE at the default level.
    DeflateLike,
}

impl CodecKind {
    pub const ALL: [CodecKind; 3] = [CodecKind::Store, CodecKind::Lz4Like, CodecKind::DeflateLike];

    pub fn id(self) -> u8 {
        match self {
            CodecKind::Store => 0,
            CodecKind::Lz4Like => 1,
            CodecKind::DeflateLike => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            CodecKind::Store => "store",
            CodecKind::Lz4Like => "lz4",
            CodecKind::DeflateLike => "deflate",
        }
    }
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "store" | "none" => Ok(CodecKind::Store),
            "lz4" | "lz4-like" => Ok(CodecKind::Lz4Like),
            "deflate" | "deflate-like" => Ok(CodecKind::DeflateLike),
            other => Err(Error::Config(format!("unknown codec `{other}` (expected store, lz4 or deflate)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBlock {
    /// Codec actually used; `Store` after a fallback.
    pub codec: CodecKind,
    pub raw_fallback: bool,
    pub uncompressed_len: u32,
    pub compressed_len: u32,
    pub payload: Vec<u8>,
}

pub fn compress(bytes: &[u8], requested: CodecKind) -> CompressedBlock {
    let raw = |fallback| CompressedBlock {
        codec: CodecKind::Store,
        raw_fallback: fallback,
        uncompressed_len: bytes.len() as u32,
        compressed_len: bytes.len() as u32,
        payload: bytes.to_vec(),
    };
    let out = match requested {
        CodecKind::Store => return raw(false),
        CodecKind::Lz4Like => lz4_flex::block::compress(bytes),
        CodecKind::DeflateLike => {
            let mut enc = DeflateEncoder::new(Vec::with_capacity(bytes.len() / 2), Compression::default());
            enc.write_all(bytes).expect("writing to a Vec cannot fail");
            enc.finish().expect("writing to a Vec cannot fail")
        }
    };
    if out.len() >= bytes.len() {
        return raw(true);
    }
    CompressedBlock {
        codec: requested,
        raw_fallback: false,
        uncompressed_len: bytes.len() as u32,
        compressed_len: out.len() as u32,
        payload: out,
    }
}

pub fn decompress(b: &CompressedBlock) -> Result<Vec<u8>> {
    decompress_raw(b.codec, &b.payload, b.uncompressed_len as usize)
}

pub(crate) fn decompress_raw(codec: CodecKind, payload: &[u8], uncompressed_len: usize) -> Result<Vec<u8>> {
    let out = match codec {
        CodecKind::Store => payload.to_vec(),
        CodecKind::Lz4Like => lz4_flex::block::decompress(payload, uncompressed_len)
            .map_err(|e| Error::CorruptBlock(format!("lz4: {e}")))?,
        CodecKind::DeflateLike => {
            let mut out = Vec::with_capacity(uncompressed_len);
            // read one byte past the declared length to detect overlong streams
            DeflateDecoder::new(payload)
                .take(uncompressed_len as u64 + 1)
                .read_to_end(&mut out)
                .map_err(|e| Error::CorruptBlock(format!("deflate: {e}")))?;
            out
        }
    };
    if out.len() != uncompressed_len {
        return Err(Error::CorruptBlock(format!(
            "{codec} block decoded to {} bytes, header declares {uncompressed_len}",
            out.len()
        )));
    }
    Ok(out)
}

/// On-disk page header: codec id with the fallback flag in bit 7,
/// uncompressed length u32, compressed length u32, value count u16.
pub const PAGE_HEADER_LEN: usize = 11;

const FALLBACK_BIT: u8 = 0x80;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PageHeader {
    pub codec: CodecKind,
    pub raw_fallback: bool,
    pub uncompressed_len: u32,
    pub compressed_len: u32,
    pub value_count: u16,
}

impl PageHeader {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.push(self.codec.id() | if self.raw_fallback { FALLBACK_BIT } else { 0 });
        out.extend_from_slice(&self.uncompressed_len.to_le_bytes());
        out.extend_from_slice(&self.compressed_len.to_le_bytes());
        out.extend_from_slice(&self.value_count.to_le_bytes());
    }

    pub fn parse(b: &[u8]) -> Result<Self> {
        if b.len() < PAGE_HEADER_LEN {
            return Err(Error::CorruptBlock(format!("page header needs {PAGE_HEADER_LEN} bytes, got {}", b.len())));
        }
        let codec = CodecKind::from_id(b[0] & !FALLBACK_BIT)
            .ok_or_else(|| Error::CorruptBlock(format!("unknown codec id {}", b[0] & !FALLBACK_BIT)))?;
        let raw_fallback = b[0] & FALLBACK_BIT != 0;
        if raw_fallback && codec != CodecKind::Store {
            return Err(Error::CorruptBlock("fallback page must be stored raw".into()));
        }
        Ok(PageHeader {
            codec,
            raw_fallback,
            uncompressed_len: u32::from_le_bytes(b[1..5].try_into().unwrap()),
            compressed_len: u32::from_le_bytes(b[5..9].try_into().unwrap()),
            value_count: u16::from_le_bytes(b[9..11].try_into().unwrap()),
        })
    }
}

/// Compresses `payload` and appends header plus compressed bytes to `out`.
/// Returns the block that was written.
pub fn write_page(payload: &[u8], codec: CodecKind, value_count: u16, out: &mut Vec<u8>) -> CompressedBlock {
    let block = compress(payload, codec);
    PageHeader {
        codec: block.codec,
        raw_fallback: block.raw_fallback,
        uncompressed_len: block.uncompressed_len,
        compressed_len: block.compressed_len,
        value_count,
    }
    .write(out);
    out.extend_from_slice(&block.payload);
    block
}

/// Parses one framed page, returning its header and decompressed payload.
pub fn read_page(framed: &[u8]) -> Result<(PageHeader, Vec<u8>)> {
    let h = PageHeader::parse(framed)?;
    let body = &framed[PAGE_HEADER_LEN..];
    if body.len() != h.compressed_len as usize {
        return Err(Error::CorruptBlock(format!(
            "page body holds {} bytes, header declares {}",
            body.len(),
            h.compressed_len
        )));
    }
    Ok((h, decompress_raw(h.codec, body, h.uncompressed_len as usize)?))
}
