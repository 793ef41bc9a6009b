//! Pattern languages over and/or trees: decompositions into pattern leaves
//! and placeholders, repetition and restriction counts, simple constants,
//! simple-x shapes, exhaustive censuses and function-preserving expansions.

mod expand;
mod lang;
mod recognize;

pub use expand::{for_each_expansion, generate_expansions, ExpansionKind, ExpansionSpec, Side};
pub use lang::{Decomposition, Grammar, PatternLang, Production, Role};
pub use recognize::{
    census, census_csv, classify_simple_x, is_simple_contradiction, is_simple_tautology,
    repetition_distribution, repetitions, restrictions, st_count_exact, tautologies_without_repetition,
    SimpleX,
};
