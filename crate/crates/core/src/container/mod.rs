//! The COLF file: `"COLF"`, version, framed pages grouped by row batch and
//! column, footer, footer length, `"COLF"`. Byte layouts are documented in
//! FORMAT.md at the repository root.

pub mod footer;
pub mod reader;
pub mod source;
pub mod writer;

pub use footer::{ChunkMeta, DataPageMeta, FileFooter, PageRef, RowBatchMeta, FORMAT_VERSION, MAGIC};
pub use reader::{read_footer, ColfFile, PageScan};
pub use source::{ByteSource, CountingSource};
pub use writer::{write_rows_to_vec, write_table, TableWriter, WriteOptions, DEFAULT_BATCH_ROWS};
