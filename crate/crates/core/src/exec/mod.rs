//! Leaf operators: filter, mask application and projection.

pub mod filter;
pub mod kernel;
pub mod mask;
pub mod query;

pub use filter::{filter, filter_plain, prefilter_order, Fallback, FilterOutput, SkipReason, SkipRecord, Strategy};
pub use kernel::{filter_packed, filter_packed_scalar};
pub use mask::{apply_mask, project, project_lazy, MaskMode};
pub use query::{eval_subexpression, mask_mode_for, parse_literal, parse_where, QueryOutput, SubexpressionQuery, Timings};
