//! Linear additive noise models `X = WᵀX + N`.
//!
//! Sample variances use denominator `n` throughout, so standardized data has
//! exactly unit variance under the same estimator that varsortability uses.

mod dataset;
mod laws;
mod model;

pub use dataset::Dataset;
pub use laws::{NoiseKind, NoiseLaw, NoiseSpec, SigmaLaw, WeightLaw};
pub use model::{sample_linear_scm, LinearScm, ScmExport, WeightedDag};
