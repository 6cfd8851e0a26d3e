//! Dynamic rounding of fractional trajectories to integral solutions.

pub mod matching;
pub mod mst;
pub mod setcover;

pub use matching::{kappa, MaintainedMatching, Stabilizer, StabilizerStep};
pub use mst::{sampling_rate, DynamicTree, MstSampler, SamplerStep};
pub use setcover::{clock_rate, CoverState, CoverStep};
