//! Uniform sampling of classes and Monte-Carlo estimation of event
//! probabilities.

mod draw;
mod estimate;
mod event;

pub use draw::{
    sample_class, sample_partition, sample_structure, ClassSampler, PartitionSampler, SamplerState,
    StructureSampler,
};
pub use estimate::{
    chi_square_critical, chi_square_uniform, dump_samples, estimate, estimates_csv, exact_probability,
    interval, sweep, Estimate, RunSettings, CHUNK, ESTIMATE_HEADER, Z_999,
};
pub use event::Event;
