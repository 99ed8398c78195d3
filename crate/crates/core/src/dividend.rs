//! Barrier dividend strategy on a step path.
//!
//! For barrier `theta` the cumulative dividends at grid time `t_k` are
//! `xi_k = (M_k - theta) v 0`, where `M_k = max(X_{t_0}, .., X_{t_{k-1}})` is the
//! running supremum taken strictly before `t_k`, and `xi_0 = 0`. The controlled
//! surplus is `U_k = X_{t_k} - xi_k`; ruin happens at the first `k` with
//! `U_k < 0` (if none, the ruin index is `n`). The discounted dividend value is
//!
//! ```text
//! h(theta) = sum_{k=1}^{n} 1{ruin index > k} exp(-r t_k) (xi_k - xi_{k-1})
//! ```
//!
//! so a dividend paid at the ruin step, or at `t_n`, does not count.
//!
//! Because `M` is non-decreasing, `U_k < 0` holds exactly when
//! `theta < g_k`, with `g_k = M_k - X_{t_k}` (or `+inf` when `X_{t_k} < 0`).
//! The ruin index is therefore the first `k` at which the running maximum of
//! `g` exceeds `theta`, and `theta -> h(theta)` is piecewise affine with
//! non-positive slope, breaking only at the values of `M` (slope changes) and of
//! the running maximum of `g` (upward jumps, ruin postponed). [`PathProfile`]
//! precomputes both sequences so that each barrier costs `O(log n)`.

use crate::error::{Error, Result};
use crate::model::StepPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    theta: f64,
    r: f64,
}

impl BarrierParams {
    pub fn new(theta: f64, r: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidGrid(format!("barrier {theta} is not finite")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::NonPositive { field: "r", value: r });
        }
        Ok(Self { theta, r })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Ruin time and discounted dividends of one path under one barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DividendOutcome {
    /// Grid index `k*` in `1..=n` of the ruin time (`n` when not ruined).
    pub ruin_index: usize,
    /// Whether the controlled surplus went negative by `t_n`.
    pub ruined: bool,
    pub value: f64,
}

/// `M_k = max(values[0..k])` for `k = 1..=n`.
pub fn running_presup(path: &StepPath) -> Vec<f64> {
    let values = path.values();
    let mut out = Vec::with_capacity(path.n());
    let mut running = values[0];
    for &x in &values[..values.len() - 1] {
        running = running.max(x);
        out.push(running);
    }
    out
}

/// Cumulative dividends `xi_1..xi_n` for barrier `theta`.
pub fn dividend_levels(path: &StepPath, theta: f64) -> Vec<f64> {
    running_presup(path)
        .into_iter()
        .map(|m| (m - theta).max(0.0))
        .collect()
}

/// Evaluates the strategy literally, step by step.
pub fn barrier_outcome(path: &StepPath, bp: BarrierParams) -> DividendOutcome {
    let values = path.values();
    let scheme = path.scheme();
    let n = path.n();
    let mut presup = values[0];
    let mut prev_level = 0.0;
    let mut value = 0.0;
    for k in 1..=n {
        presup = presup.max(values[k - 1]);
        let level = (presup - bp.theta).max(0.0);
        if values[k] - level < 0.0 {
            return DividendOutcome {
                ruin_index: k,
                ruined: true,
                value,
            };
        }
        if k < n {
            value += (-bp.r * scheme.time(k)).exp() * (level - prev_level);
        }
        prev_level = level;
    }
    DividendOutcome {
        ruin_index: n,
        ruined: false,
        value,
    }
}

/// `sum_k exp(-r t_k) (Delta_k X v 0)`, an upper bound on the dividend value for
/// every barrier at or above the starting level.
pub fn dividend_bound(path: &StepPath, r: f64) -> f64 {
    let scheme = path.scheme();
    path.values()
        .windows(2)
        .enumerate()
        .map(|(i, w)| (-r * scheme.time(i + 1)).exp() * (w[1] - w[0]).max(0.0))
        .sum()
}

/// The affine piece of `theta -> h(theta)` around a barrier:
/// `h(theta + d) = value + slope * d` until the next breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub value: f64,
    pub slope: f64,
}

/// Precomputed per-path data for fast evaluation at many barriers.
#[derive(Debug, Clone)]
pub struct PathProfile {
    /// `M_1..M_n`, non-decreasing.
    presup: Vec<f64>,
    /// Running maximum of the ruin thresholds `g_1..g_n`, non-decreasing.
    ruin_level: Vec<f64>,
    /// `exp(-r t_k)`, `k = 1..=n`.
    discount: Vec<f64>,
    /// `gains[k] = sum_{j=2..=k} exp(-r t_j) (M_j - M_{j-1})`, `k = 0..=n`.
    gains: Vec<f64>,
}

impl PathProfile {
    pub fn new(path: &StepPath, r: f64) -> Self {
        let n = path.n();
        let scheme = path.scheme();
        let values = path.values();
        let presup = running_presup(path);

        let mut ruin_level = Vec::with_capacity(n);
        let mut running = f64::NEG_INFINITY;
        for k in 1..=n {
            let x = values[k];
            let g = if x < 0.0 { f64::INFINITY } else { presup[k - 1] - x };
            running = running.max(g);
            ruin_level.push(running);
        }

        let discount: Vec<f64> = (1..=n).map(|k| (-r * scheme.time(k)).exp()).collect();

        let mut gains = vec![0.0; n + 1];
        for k in 2..=n {
            gains[k] = gains[k - 1] + discount[k - 1] * (presup[k - 1] - presup[k - 2]);
        }

        Self {
            presup,
            ruin_level,
            discount,
            gains,
        }
    }

    pub fn n(&self) -> usize {
        self.presup.len()
    }

    /// `(first k with M_k > theta, ruin index, ruined)`; the first entry is
    /// `n + 1` when the barrier is never exceeded.
    fn indices(&self, theta: f64) -> (usize, usize, bool) {
        let n = self.n();
        let first_dividend = self.presup.partition_point(|&m| m <= theta) + 1;
        let safe = self.ruin_level.partition_point(|&g| g <= theta);
        if safe == n {
            (first_dividend, n, false)
        } else {
            (first_dividend, safe + 1, true)
        }
    }

    pub fn outcome(&self, theta: f64) -> DividendOutcome {
        let (first, ruin_index, ruined) = self.indices(theta);
        let value = if first < ruin_index {
            self.discount[first - 1] * (self.presup[first - 1] - theta)
                + (self.gains[ruin_index - 1] - self.gains[first])
        } else {
            0.0
        };
        DividendOutcome {
            ruin_index,
            ruined,
            value,
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.outcome(theta).value
    }

    pub fn segment(&self, theta: f64) -> Segment {
        let (first, ruin_index, _) = self.indices(theta);
        let slope = if first < ruin_index {
            -self.discount[first - 1]
        } else {
            0.0
        };
        Segment {
            value: self.value(theta),
            slope,
        }
    }

    /// Sorted distinct barriers in the open interval `(lo, hi)` at which the
    /// value can change slope or jump.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let inside = |x: &&f64| **x > lo && **x < hi;
        let mut out: Vec<f64> = self
            .presup
            .iter()
            .filter(inside)
            .chain(self.ruin_level.iter().filter(inside))
            .copied()
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Dividend value of one path over a barrier grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// Candidate discontinuities strictly inside the grid's range.
    pub breakpoints: Vec<f64>,
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite barriers".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("grid is not sorted".into()));
    }
    Ok(())
}

pub fn value_curve(path: &StepPath, grid: &[f64], r: f64) -> Result<ValueCurve> {
    check_grid(grid)?;
    BarrierParams::new(grid[0], r)?;
    let profile = PathProfile::new(path, r);
    Ok(ValueCurve {
        thetas: grid.to_vec(),
        values: grid.iter().map(|&t| profile.value(t)).collect(),
        breakpoints: profile.breakpoints(grid[0], grid[grid.len() - 1]),
    })
}
