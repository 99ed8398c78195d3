//! Maximum-contrast estimation of the dividend barrier.
//!
//! The contrast at barrier `theta` is the mean discounted dividend value over
//! an ensemble of quasi-paths; the estimate is its maximizer over a barrier
//! grid, ties going to the smallest barrier.
//!
//! Ensemble members are evaluated in parallel and their curves are summed by a
//! pairwise tree over member indices whose shape depends only on the ensemble
//! size, so results do not depend on the number of threads.

use rayon::join;

use crate::dividend::{check_grid, PathProfile};
use crate::error::{Error, Result};
use crate::model::{IncrementSeries, StepPath};
use crate::quasi::QuasiEnsemble;

/// Regular barrier grid `lo, lo + step, ..` up to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierGrid {
    lo: f64,
    hi: f64,
    step: f64,
}

pub const DEFAULT_GRID_STEP: f64 = 0.05;

impl BarrierGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidGrid(format!("need finite lo <= hi, got [{lo}, {hi}]")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Grid points `lo + j step`; the last one is `hi` when `hi - lo` is a
    /// multiple of `step` up to rounding.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|j| (self.lo + j as f64 * self.step).min(self.hi))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: usize,
}

impl ContrastCurve {
    /// Index of the largest value; the first one among ties.
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.values.iter().enumerate() {
            if v > self.values[best] || (v == self.values[best] && self.thetas[j] < self.thetas[best])
            {
                best = j;
            }
        }
        best
    }

    pub fn argmax(&self) -> f64 {
        self.thetas[self.argmax_index()]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.argmax_index()]
    }
}

/// Per-run metadata attached to an [`Estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub seed: u64,
    pub alpha: usize,
    pub h: f64,
    pub n: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub theta_hat: f64,
    /// Maximizer over the grid alone (equal to `theta_hat` unless refined).
    pub grid_theta: f64,
    /// Contrast at `theta_hat`.
    pub contrast_max: f64,
    pub curve: ContrastCurve,
    pub diagnostics: Diagnostics,
}

/// Sum of `f(i)` over `i in range`, reduced pairwise by index.
fn tree_sum<F>(lo: usize, hi: usize, f: &F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    if hi - lo == 1 {
        return f(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (mut left, right) = join(|| tree_sum(lo, mid, f), || tree_sum(mid, hi, f));
    for (a, b) in left.iter_mut().zip(right) {
        *a += b;
    }
    left
}

fn mean_over<F>(alpha: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    let mut sum = tree_sum(0, alpha, &f);
    for v in &mut sum {
        *v /= alpha as f64;
    }
    sum
}

fn profile_values(profile: &PathProfile, thetas: &[f64]) -> Vec<f64> {
    thetas.iter().map(|&t| profile.value(t)).collect()
}

/// Pointwise mean of the value curves of an explicit ensemble.
pub fn contrast(ensemble: &[StepPath], grid: &[f64], r: f64) -> Result<ContrastCurve> {
    let first = ensemble.first().ok_or(Error::EmptyEnsemble)?;
    if ensemble.iter().any(|p| p.scheme() != first.scheme()) {
        return Err(Error::SchemeMismatch);
    }
    check_grid(grid)?;
    check_rate(r)?;
    let values = mean_over(ensemble.len(), |i| {
        profile_values(&PathProfile::new(&ensemble[i], r), grid)
    });
    Ok(ContrastCurve {
        thetas: grid.to_vec(),
        values,
        alpha: ensemble.len(),
    })
}

/// Contrast of a quasi-path ensemble, regenerating one member at a time.
pub fn ensemble_contrast(ensemble: &QuasiEnsemble<'_>, grid: &[f64], r: f64) -> Result<ContrastCurve> {
    if ensemble.alpha() == 0 {
        return Err(Error::EmptyEnsemble);
    }
    check_grid(grid)?;
    check_rate(r)?;
    let values = mean_over(ensemble.alpha(), |i| {
        profile_values(&PathProfile::new(&ensemble.path(i), r), grid)
    });
    Ok(ContrastCurve {
        thetas: grid.to_vec(),
        values,
        alpha: ensemble.alpha(),
    })
}

fn check_rate(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { field: "r", value: r })
    }
}

/// Searches the barriers within one grid step of the grid argmax, including
/// every breakpoint of every ensemble member there, and returns the best
/// `(theta, contrast)`. Never worse than the grid argmax.
///
/// Each member's value is right-continuous and non-increasing between its
/// breakpoints, so the supremum over the window is attained at the window's
/// left end or at one of these breakpoints.
pub fn refine_argmax(
    curve: &ContrastCurve,
    members: usize,
    member_profile: impl Fn(usize) -> PathProfile + Sync,
) -> (f64, f64) {
    let j = curve.argmax_index();
    let mut best = (curve.thetas[j], curve.values[j]);
    if members == 0 {
        return best;
    }
    let lo = curve.thetas[j.saturating_sub(1)];
    let hi = curve.thetas[(j + 1).min(curve.thetas.len() - 1)];

    let mut candidates: Vec<f64> = (0..members)
        .flat_map(|i| member_profile(i).breakpoints(lo, hi))
        .collect();
    if candidates.is_empty() {
        return best;
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let values = mean_over(members, |i| profile_values(&member_profile(i), &candidates));
    for (&t, &v) in candidates.iter().zip(&values) {
        if v > best.1 || (v == best.1 && t < best.0) {
            best = (t, v);
        }
    }
    best
}

/// [`refine_argmax`] for an explicit ensemble.
pub fn refine_paths(curve: &ContrastCurve, ensemble: &[StepPath], r: f64) -> (f64, f64) {
    refine_argmax(curve, ensemble.len(), |i| PathProfile::new(&ensemble[i], r))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EstimateOptions {
    /// Refine the grid argmax over exact breakpoints.
    pub refine: bool,
}

/// Estimates the barrier from a quasi-path ensemble over `grid`.
pub fn estimate_from_ensemble(
    ensemble: &QuasiEnsemble<'_>,
    grid: &[f64],
    r: f64,
    options: EstimateOptions,
) -> Result<Estimate> {
    let u0 = ensemble.u0();
    if let Some(&first) = grid.first() {
        if first < u0 {
            return Err(Error::InvalidGrid(format!(
                "grid starts at {first}, below the initial surplus {u0}"
            )));
        }
    }
    let curve = ensemble_contrast(ensemble, grid, r)?;
    let grid_theta = curve.argmax();
    let (theta_hat, contrast_max) = if options.refine {
        refine_argmax(&curve, ensemble.alpha(), |i| {
            PathProfile::new(&ensemble.path(i), r)
        })
    } else {
        (grid_theta, curve.max_value())
    };

    let scheme = ensemble.increments().scheme();
    let warnings = [ensemble.warning(), scheme.hflt_warning()]
        .into_iter()
        .flatten()
        .collect();
    Ok(Estimate {
        theta_hat,
        grid_theta,
        contrast_max,
        curve,
        diagnostics: Diagnostics {
            seed: ensemble.seed(),
            alpha: ensemble.alpha(),
            h: scheme.h(),
            n: scheme.n(),
            warnings,
        },
    })
}

/// Samples `alpha` permutations of the observed increments from `seed`, and
/// returns the smallest maximizer of the contrast over `grid`.
pub fn estimate_barrier(
    inc: &IncrementSeries,
    u0: f64,
    alpha: usize,
    grid: &[f64],
    r: f64,
    seed: u64,
) -> Result<Estimate> {
    estimate_from_ensemble(
        &QuasiEnsemble::new(u0, inc, alpha, seed),
        grid,
        r,
        EstimateOptions::default(),
    )
}
