//! Entropy, the zero-entropy trichotomy, and eventual-onto and mixing checks.

mod entropy;
mod leo;

pub use entropy::{
    entropy_estimate, entropy_trichotomy, separated_count, EntropyBands, EntropyEstimate,
    EntropyVerdict, SeparatedSet, Trichotomy,
};
pub use leo::{leo_check, mixing_check, LeoResult, MixingResult, Region};
