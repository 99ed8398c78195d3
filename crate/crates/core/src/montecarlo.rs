//! Direct simulation of the expected discounted dividends `E[h(theta)]` on a
//! fine grid, independent of the quasi-process machinery. Used to check the
//! closed-form oracle.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{IncrementSampler, ModelParams, SamplingScheme};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub theta: f64,
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// Discounted dividends of one simulated path for several barriers at once.
///
/// The path is generated step by step and abandoned once every barrier has
/// been ruined, so its cost is proportional to the longest survival time.
fn simulate_path(params: &ModelParams, r: f64, thetas: &[f64], scheme: SamplingScheme, seed: u64, index: u64) -> Vec<f64> {
    let rng = rng::stream(seed, rng::tag::CROSSCHECK, index);
    let mut sampler = IncrementSampler::new(params, scheme.h(), rng);
    let n = scheme.n();

    let mut values = vec![0.0; thetas.len()];
    let mut paid = vec![0.0; thetas.len()];
    let mut alive = vec![true; thetas.len()];
    let mut remaining = thetas.len();

    let mut x = params.u();
    let mut presup = x;
    for k in 1..=n {
        presup = presup.max(x);
        x += sampler.next_increment();
        let mut discount = None;
        for j in 0..thetas.len() {
            if !alive[j] {
                continue;
            }
            let level = (presup - thetas[j]).max(0.0);
            if x - level < 0.0 {
                alive[j] = false;
                remaining -= 1;
                continue;
            }
            if k < n && level > paid[j] {
                let d = *discount.get_or_insert_with(|| (-r * scheme.time(k)).exp());
                values[j] += d * (level - paid[j]);
            }
            paid[j] = level;
        }
        if remaining == 0 {
            break;
        }
    }
    values
}

/// Monte Carlo estimate of `E[h(theta)]` over `paths` independent paths of the
/// model sampled with step `h` up to `horizon`.
pub fn direct_dividend_values(
    params: &ModelParams,
    r: f64,
    thetas: &[f64],
    h: f64,
    horizon: f64,
    paths: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let scheme = SamplingScheme::from_horizon(horizon, h)?;
    let per_path: Vec<Vec<f64>> = (0..paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(params, r, thetas, scheme, seed, i))
        .collect();

    Ok(thetas
        .iter()
        .enumerate()
        .map(|(j, &theta)| {
            let m = paths as f64;
            let mean = per_path.iter().map(|v| v[j]).sum::<f64>() / m;
            let var = per_path.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (m - 1.0);
            McEstimate {
                theta,
                mean,
                std_error: (var / m).sqrt(),
                paths,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dividend::{barrier_outcome, BarrierParams};
    use crate::model::{path_from_increments, IncrementSeries};

    #[test]
    fn streaming_path_matches_the_dividend_module() {
        let params = ModelParams::reference();
        let scheme = SamplingScheme::new(0.01, 5000).unwrap();
        let thetas = [10.5, 12.0, 14.0];
        let streamed = simulate_path(&params, 0.2, &thetas, scheme, 3, 0);

        let rng = rng::stream(3, rng::tag::CROSSCHECK, 0);
        let deltas = IncrementSampler::new(&params, 0.01, rng).take(5000).collect();
        let path = path_from_increments(10.0, &IncrementSeries::new(scheme, deltas).unwrap());
        for (&theta, v) in thetas.iter().zip(streamed) {
            let direct = barrier_outcome(&path, BarrierParams::new(theta, 0.2).unwrap()).value;
            assert!((v - direct).abs() <= 1e-12 * (1.0 + direct), "{v} vs {direct}");
        }
    }
}
