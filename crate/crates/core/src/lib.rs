//! Estimation of the optimal dividend barrier of a spectrally negative Lévy
//! surplus process from a single discretely observed path.
//!
//! The observed increments are reshuffled into an ensemble of quasi-paths,
//! the discounted dividends of a barrier strategy are averaged over the
//! ensemble, and the barrier maximizing that average is the estimate. A
//! closed-form scale-function oracle gives the true optimum for Brownian motion
//! with drift minus compound Poisson exponential claims.

pub mod dividend;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod quasi;
pub mod rng;
pub mod stats;

pub use dividend::{
    barrier_outcome, running_presup, value_curve, BarrierParams, DividendOutcome, PathProfile,
    ValueCurve,
};
pub use error::{Error, Result};
pub use estimator::{
    contrast, ensemble_contrast, estimate_barrier, estimate_from_ensemble, refine_argmax, BarrierGrid,
    ContrastCurve, Estimate, EstimateOptions,
};
pub use model::{
    path_from_increments, simulate_increments, validate_params, IncrementSeries, ModelParams,
    RawParams, SamplingScheme, StepPath,
};
pub use oracle::{lundberg_roots, optimal_barrier, true_value, LundbergRoots, OracleResult};
pub use quasi::{build_quasi_path, sample_permutation, Permutation, PermutationSet, QuasiEnsemble};
