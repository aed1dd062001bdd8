//! COLF: a columnar storage kernel.
//!
//! Tables are split into row batches; each batch stores one encoded,
//! optionally block-compressed chunk per column, and a footer carries
//! zone maps at chunk and page level so readers can prune without
//! touching data pages.
//!
//! ```
//! use colf::{
//!     eval_subexpression, write_table, CodecKind, ColfFile, Column, ColumnType, Field, Policy, Predicate, Schema,
//!     Strategy, SubexpressionQuery, Value, WriteOptions,
//! };
//!
//! let schema = Schema::new(vec![Field::new("id", ColumnType::Int64, false), Field::new("city", ColumnType::Utf8, true)])?;
//! let ids = Column::from_values(ColumnType::Int64, &[Value::Int64(1), Value::Int64(2), Value::Int64(3)])?;
//! let cities = Column::from_values(ColumnType::Utf8, &[Value::str("Oslo"), Value::Null, Value::str("Rome")])?;
//! let mut bytes = Vec::new();
//! write_table(&schema, &[ids, cities], &WriteOptions::new(Policy::ParquetLike, CodecKind::Lz4Like), &mut bytes)?;
//!
//! let file = ColfFile::open(bytes)?;
//! let q = SubexpressionQuery::new(&["id"], vec![Predicate::eq("city", Value::str("Rome"))]);
//! let out = eval_subexpression(&q, &file, Strategy::LazyImDirect)?;
//! assert_eq!(out.table.row(0), vec![Value::Int64(3)]);
//! # Ok::<(), colf::Error>(())
//! ```

pub mod bitvec;
pub mod codec;
pub mod column;
pub mod container;
pub mod encode;
pub mod error;
pub mod exec;
pub mod memrep;
pub mod predicate;
pub mod stats;
pub mod types;
pub mod zonemap;

pub use bitvec::BitVector;
pub use codec::{compress, decompress, CodecKind, CompressedBlock};
pub use column::{Column, ColumnData};
pub use container::{read_footer, write_table, ByteSource, ColfFile, FileFooter, TableWriter, WriteOptions};
pub use encode::{choose_encoding, decode_at, decode_chunk, dict_translate, encode_chunk, EncodedChunk, EncodingKind, Policy};
pub use error::{Error, Result};
pub use exec::{apply_mask, eval_subexpression, filter, filter_packed, MaskMode, QueryOutput, Strategy, SubexpressionQuery};
pub use memrep::{load_plain, materialize, open_lazy, DecodeCounts, DecodeStats, LazyColumns, PlainColumns};
pub use predicate::{predicate_eval_scalar, Comparison, Predicate};
pub use stats::{compute_stats, ColumnStats};
pub use types::{ColumnType, Field, Schema, Value};
pub use zonemap::{zone_map_build, ZoneMap};
