use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bitvec::BitVector;
use crate::column::Column;
use crate::container::{ByteSource, ColfFile};
use crate::error::{Error, Result};
use crate::memrep::{load_column, load_plain, materialize, ChunkHandle, DecodeStats, LazyColumns, PlainColumns};

/// How a selection vector is applied to projected columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskMode {
    /// Decode everything, then select.
    Bulk,
    /// Decode only selected rows.
    RecordSkip,
    /// Decode whole chunks that hold at least one selected row.
    ChunkSkip,
}

impl MaskMode {
    pub const ALL: [MaskMode; 3] = [MaskMode::Bulk, MaskMode::RecordSkip, MaskMode::ChunkSkip];

    pub fn name(self) -> &'static str {
        match self {
            MaskMode::Bulk => "bulk",
            MaskMode::RecordSkip => "record-skip",
            MaskMode::ChunkSkip => "chunk-skip",
        }
    }
}

impl fmt::Display for MaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MaskMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mask mode `{s}` (expected bulk, record-skip or chunk-skip)")))
    }
}

/// Rows of `lazy` selected by `bv`. Every mode yields the same rows.
pub fn apply_mask<S: ByteSource>(
    lazy: &LazyColumns<'_, S>,
    bv: &BitVector,
    mode: MaskMode,
    stats: &DecodeStats,
) -> Result<PlainColumns> {
    let n = lazy.row_count();
    if bv.len() != n {
        return Err(Error::Shape { expected: n, actual: bv.len() });
    }
    match mode {
        MaskMode::RecordSkip => materialize(lazy, bv, stats),
        MaskMode::Bulk => {
            let columns = lazy
                .column_indices()
                .iter()
                .map(|&j| load_column(lazy.file(), j, stats)?.select(bv))
                .collect::<Result<Vec<_>>>()?;
            PlainColumns::new(lazy.schema().clone(), columns, bv.count_ones())
        }
        MaskMode::ChunkSkip => {
            let starts = lazy.batch_starts();
            let footer = lazy.file().footer();
            let mut columns: Vec<Column> = lazy
                .column_indices()
                .iter()
                .map(|&j| Column::with_capacity(footer.schema.field(j).ty, bv.count_ones()))
                .collect();
            for b in 0..starts.len() - 1 {
                let rows = starts[b] as usize..starts[b + 1] as usize;
                let hit = bv.any_in(rows.clone());
                if !hit {
                    stats.add_batches_skipped(1);
                }
                let sel = bv.slice(rows);
                for (out, &j) in columns.iter_mut().zip(lazy.column_indices()) {
                    let mut h = ChunkHandle::new(lazy.file(), b, j, stats)?;
                    if hit {
                        out.extend_from(&h.decode_all()?.select(&sel)?);
                    }
                }
            }
            PlainColumns::new(lazy.schema().clone(), columns, bv.count_ones())
        }
    }
}

/// Projection over the decoded representation.
pub fn project<S: ByteSource>(file: &ColfFile<S>, columns: &[impl AsRef<str>], stats: &DecodeStats) -> Result<PlainColumns> {
    load_plain(file, columns, stats)
}

/// Projection over the lazy representation: every row, every projected column.
pub fn project_lazy<S: ByteSource>(lazy: &LazyColumns<'_, S>, stats: &DecodeStats) -> Result<PlainColumns> {
    materialize(lazy, &BitVector::ones(lazy.row_count()), stats)
}
