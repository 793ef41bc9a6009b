//! The tree model: structures, canonical classes, enumeration, evaluation,
//! function keys and minimal sizes.

mod analysis;
mod atlas;
mod class;
mod enumerate;
mod function;
mod sat;
mod structure;

pub use analysis::{Analyzer, Verdict, DEFAULT_SAT_BUDGET};
pub use atlas::{
    build_atlas, build_atlas_with_budget, class_probability_exact,
    class_probability_exact_with_budget, key_census, AtlasEntry, ComplexityAtlas,
};
pub use class::{canonicalize_labels, eval_words, is_canonical_labels, Class, Literal};
pub use enumerate::{
    check_budget, enumerate_classes, for_each_class, labellings, par_census, partitions,
    DEFAULT_ENUM_BUDGET, MAX_ENUM_BUDGET,
};
pub use function::{
    class_key, function_key, function_key_with_cap, truth_table, truth_table_with_cap,
    FunctionKey, KeyCache, TruthTable, DEFAULT_TABLE_CAP, MAX_KEY_VARS,
};
pub use sat::{solve, Formula, SatOutcome};
pub use structure::{all_structures, enumerate_structures, Connective, Node, Structure};
