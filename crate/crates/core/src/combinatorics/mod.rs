//! Counting quantities of the model, exact and in log-domain.

mod logreal;
mod numbers;
mod rat;
mod schedule;
mod threshold;

pub use logreal::LogReal;
pub use numbers::{
    a_term_exact, b_exact, bonferroni_failures_upto, catalan, count_classes, stirling2,
    verify_bonferroni, StirlingRows,
};
pub use rat::{rat, rat_exact, rat_f64, rat_for_k, rat_log, rational_to_f64, Cutoffs, Ratio};
pub use schedule::Schedule;
pub(crate) use threshold::ln_block_weights;
pub use threshold::{
    a_term, b_approx, b_log, ln_stirling2_approx, m_threshold, m_threshold_with,
    step_cmp_exact, threshold_root, unimodality_exact, unimodality_log, window_mass,
    Unimodality, WindowParams, DEFAULT_EXACT_CUTOFF,
};
