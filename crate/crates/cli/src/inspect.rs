//! Footer summaries. Nothing here reads data, dictionary or presence pages.

use std::fmt::Write as _;

use colf::container::footer::ChunkMeta;
use colf::{read_footer, ByteSource, FileFooter, Value};
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct ColumnSummary {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub nullable: bool,
    /// Distinct chunk encodings, first use first.
    pub encodings: Vec<String>,
    pub codec: String,
    pub stored_bytes: u64,
    pub uncompressed_bytes: u64,
    pub null_count: u64,
    pub pages: usize,
    /// Over all chunk zone maps; string bounds may be truncated prefixes.
    pub min: Option<String>,
    pub max: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Inspection {
    pub file_bytes: u64,
    pub version: u16,
    pub policy: String,
    pub codec: String,
    pub rows: u64,
    pub batches: usize,
    pub columns: Vec<ColumnSummary>,
    pub footer: FileFooter,
}

fn bound(chunks: &[&ChunkMeta], pick_max: bool) -> Option<String> {
    let vals = chunks.iter().filter_map(|c| if pick_max { c.zone_map.max.as_ref() } else { c.zone_map.min.as_ref() });
    let best = vals.fold(None::<&Value>, |acc, v| match acc {
        None => Some(v),
        Some(a) => {
            let ord = v.total_cmp(a).unwrap_or(std::cmp::Ordering::Equal);
            Some(if (pick_max && ord.is_gt()) || (!pick_max && ord.is_lt()) { v } else { a })
        }
    });
    best.map(|v| v.to_string())
}

pub fn summarize(footer: FileFooter, file_bytes: u64) -> Inspection {
    let columns = footer
        .schema
        .fields()
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let chunks: Vec<&ChunkMeta> = footer.batches.iter().map(|b| &b.chunks[j]).collect();
            let mut encodings: Vec<String> = Vec::new();
            for c in &chunks {
                let k = c.kind.to_string();
                if !encodings.contains(&k) {
                    encodings.push(k);
                }
            }
            ColumnSummary {
                name: f.name.clone(),
                ty: f.ty.to_string(),
                nullable: f.nullable,
                encodings,
                codec: chunks.first().map_or(footer.codec, |c| c.codec).name().to_string(),
                stored_bytes: chunks.iter().map(|c| c.stored_bytes()).sum(),
                uncompressed_bytes: chunks.iter().map(|c| c.uncompressed_bytes).sum(),
                null_count: chunks.iter().map(|c| c.null_count).sum(),
                pages: chunks.iter().map(|c| c.pages.len()).sum(),
                min: bound(&chunks, false),
                max: bound(&chunks, true),
            }
        })
        .collect();
    Inspection {
        file_bytes,
        version: footer.version,
        policy: footer.policy.clone(),
        codec: footer.codec.name().to_string(),
        rows: footer.row_count(),
        batches: footer.batches.len(),
        columns,
        footer,
    }
}

/// Reads the footer of `src` and summarizes it.
pub fn inspect<S: ByteSource + ?Sized>(src: &S) -> Result<Inspection> {
    let footer = read_footer(src)?;
    Ok(summarize(footer, src.len()?))
}

fn range(min: &Option<String>, max: &Option<String>) -> String {
    match (min, max) {
        (Some(a), Some(b)) => format!("[{a}, {b}]"),
        _ => "-".into(),
    }
}

/// Per-column totals; with `chunks`, one line per chunk as well.
pub fn render_text(ins: &Inspection, chunks: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} rows in {} batch(es), {} bytes, format version {}, policy {}, codec {}",
        ins.rows, ins.batches, ins.file_bytes, ins.version, ins.policy, ins.codec
    );
    let _ = writeln!(s, "{:<28} {:<18} {:<24} {:>12} {:>12} {:>8}  range", "column", "type", "encodings", "stored", "raw", "nulls");
    for c in &ins.columns {
        let ty = if c.nullable { c.ty.clone() } else { format!("{} not null", c.ty) };
        let _ = writeln!(
            s,
            "{:<28} {:<18} {:<24} {:>12} {:>12} {:>8}  {}",
            c.name,
            ty,
            c.encodings.join(","),
            c.stored_bytes,
            c.uncompressed_bytes,
            c.null_count,
            range(&c.min, &c.max)
        );
    }
    if chunks {
        let names: Vec<&str> = ins.footer.schema.names().collect();
        for (b, batch) in ins.footer.batches.iter().enumerate() {
            let _ = writeln!(s, "batch {b}: {} rows", batch.row_count);
            for (name, c) in names.iter().zip(&batch.chunks) {
                let z = &c.zone_map;
                let _ = writeln!(
                    s,
                    "  {name}: {} {} stored {} B, raw {} B, {} pages, {} nulls, dict page {}, presence page {}, zone {}",
                    c.kind,
                    c.codec.name(),
                    c.stored_bytes(),
                    c.uncompressed_bytes,
                    c.pages.len(),
                    c.null_count,
                    if c.dictionary.is_some() { "yes" } else { "no" },
                    if c.presence.is_some() { "yes" } else { "no" },
                    range(&z.min.as_ref().map(|v| v.to_string()), &z.max.as_ref().map(|v| v.to_string())),
                );
            }
        }
    }
    s
}
