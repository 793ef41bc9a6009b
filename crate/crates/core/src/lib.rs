//! Exact combinatorics of random and/or Boolean trees whose variable budget
//! `k_n` grows with the tree size `n`.
//!
//! Trees are counted up to the equivalence that identifies consistent
//! renamings of variables and per-variable polarity flips. The crate covers
//! the whole pipeline around that model:
//!
//! * [`combinatorics`]: Catalan and Stirling numbers, class counts `T_n`,
//!   the labelling weight `B_{n,k}`, the threshold `M_n` and the ratio `rat_n`,
//!   both exact and in log-domain.
//! * [`series`]: truncated power series over exact rationals, the structure
//!   generating function and the pointed-leaf series used to bracket simple
//!   tautology counts.
//! * [`trees`]: structures, canonical class representatives, exhaustive
//!   enumeration, evaluation, function keys and the complexity atlas.
//! * [`patterns`]: pattern languages (N, P, S and their compositions),
//!   repetitions, restrictions, simple tautologies and expansions.
//! * [`sampler`]: exact uniform sampling of classes and seeded, worker-count
//!   independent Monte-Carlo estimation.
//! * [`cli`]: the `andor` command line front-end.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod patterns;
pub mod sampler;
pub mod series;
pub mod trees;

pub use error::{Error, Result};
