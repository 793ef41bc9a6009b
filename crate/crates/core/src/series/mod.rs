//! Truncated power series over exact rationals and the tree generating
//! functions built on them.

mod gf;
mod trunc;

pub use gf::{
    dc_counts, marked_gf, n_pattern_value, pattern_gf_check, s_pattern_value, tree_structure_gf,
    u_series, DcCounts,
};
pub use trunc::{SeriesOp, TruncSeries};
