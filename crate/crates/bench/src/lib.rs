//! Criterion benchmarks for the estimator; see `benches/`.

use levybar::{path_from_increments, simulate_increments, IncrementSeries, ModelParams, SamplingScheme, StepPath};

/// Reference-model increments with step `h` over `T = 100`.
pub fn reference_increments(h: f64, seed: u64) -> IncrementSeries {
    let scheme = SamplingScheme::from_horizon(100.0, h).expect("integral step count");
    simulate_increments(&ModelParams::reference(), scheme, seed)
}

pub fn reference_path(h: f64, seed: u64) -> StepPath {
    path_from_increments(10.0, &reference_increments(h, seed))
}
