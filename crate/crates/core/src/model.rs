//! Surplus model `X_t = u + c t + sigma W_t - S_t` with `S` a compound Poisson
//! process of exponential claims, observed on a regular grid.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

/// Unchecked parameter bundle, as read from a config file or the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub u: f64,
    pub c: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Validated surplus model parameters.
///
/// `u` initial surplus, `c` premium rate, `sigma` diffusion volatility,
/// `lambda` claim intensity and `mu` the rate of the exponential claim sizes
/// (mean claim `1 / mu`). Always satisfies the net profit condition
/// `c > lambda / mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    u: f64,
    c: f64,
    sigma: f64,
    lambda: f64,
    mu: f64,
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Negative { field, value })
    }
}

/// Checks a raw parameter set.
pub fn validate_params(raw: RawParams) -> Result<ModelParams> {
    non_negative("u", raw.u)?;
    positive("c", raw.c)?;
    positive("mu", raw.mu)?;
    if !(raw.sigma.is_finite() && raw.sigma >= 0.0) {
        return Err(Error::NegativeVolatility(raw.sigma));
    }
    non_negative("lambda", raw.lambda)?;
    let expected_claims = raw.lambda / raw.mu;
    if raw.c <= expected_claims {
        return Err(Error::NetProfitViolation {
            c: raw.c,
            expected_claims,
        });
    }
    Ok(ModelParams {
        u: raw.u,
        c: raw.c,
        sigma: raw.sigma,
        lambda: raw.lambda,
        mu: raw.mu,
    })
}

impl ModelParams {
    pub fn new(u: f64, c: f64, sigma: f64, lambda: f64, mu: f64) -> Result<Self> {
        validate_params(RawParams {
            u,
            c,
            sigma,
            lambda,
            mu,
        })
    }

    /// The data-generating process of the reference experiment:
    /// `u = 10, c = 15, sigma = 2, lambda = 5`, mean claim 2.
    pub fn reference() -> Self {
        Self::new(10.0, 15.0, 2.0, 5.0, 0.5).expect("reference parameters are valid")
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Same model started from a different initial surplus.
    pub fn with_u(self, u: f64) -> Result<Self> {
        Self::new(u, self.c, self.sigma, self.lambda, self.mu)
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            u: self.u,
            c: self.c,
            sigma: self.sigma,
            lambda: self.lambda,
            mu: self.mu,
        }
    }

    /// `E[S_1] = lambda / mu`.
    pub fn expected_claims(&self) -> f64 {
        self.lambda / self.mu
    }

    /// `E[X_1 - u] = c - lambda / mu`.
    pub fn drift(&self) -> f64 {
        self.c - self.expected_claims()
    }

    /// `E[X_{t+h} - X_t]`.
    pub fn increment_mean(&self, h: f64) -> f64 {
        self.drift() * h
    }

    /// `Var[X_{t+h} - X_t] = sigma^2 h + 2 lambda h / mu^2`.
    pub fn increment_variance(&self, h: f64) -> f64 {
        self.sigma * self.sigma * h + 2.0 * self.lambda * h / (self.mu * self.mu)
    }
}

/// Regular observation grid `t_k = k h`, `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingScheme {
    h: f64,
    n: usize,
}

/// Steps at or above this size are not "high frequency".
const HFLT_MAX_STEP: f64 = 1.0;
/// Horizons below this are not "long".
const HFLT_MIN_HORIZON: f64 = 10.0;

impl SamplingScheme {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        positive("h", h)?;
        if n == 0 {
            return Err(Error::NonPositive {
                field: "n",
                value: 0.0,
            });
        }
        Ok(Self { h, n })
    }

    /// Scheme with `n = T / h`, which must be an integer (up to 1e-9 relative).
    pub fn from_horizon(horizon: f64, h: f64) -> Result<Self> {
        positive("T", horizon)?;
        positive("h", h)?;
        let ratio = horizon / h;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Validation(format!(
                "T / h = {horizon} / {h} = {ratio} is not a positive integer"
            )));
        }
        Self::new(h, n as usize)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// Grid time `t_k`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    /// Describes how the scheme falls short of high-frequency, long-horizon
    /// sampling, if it does badly.
    pub fn hflt_warning(&self) -> Option<String> {
        let horizon = self.horizon();
        if self.h >= HFLT_MAX_STEP || horizon < HFLT_MIN_HORIZON {
            Some(format!(
                "sampling scheme h = {}, T = {} is far from the high-frequency long-horizon regime; \
                 estimates may be biased",
                self.h, horizon
            ))
        } else {
            None
        }
    }
}

/// The observed (or simulated) increments `X_{t_k} - X_{t_{k-1}}`, `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    scheme: SamplingScheme,
    deltas: Vec<f64>,
}

impl IncrementSeries {
    pub fn new(scheme: SamplingScheme, deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() != scheme.n() {
            return Err(Error::LengthMismatch {
                expected: scheme.n(),
                got: deltas.len(),
            });
        }
        Ok(Self { scheme, deltas })
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

/// Right-continuous step path on the grid: `values[k] = X_{t_k}`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    values: Vec<f64>,
    scheme: SamplingScheme,
}

impl StepPath {
    /// Path from its grid values. `values.len()` must be `scheme.n() + 1`.
    pub fn from_values(values: Vec<f64>, scheme: SamplingScheme) -> Result<Self> {
        if values.len() != scheme.n() + 1 {
            return Err(Error::LengthMismatch {
                expected: scheme.n() + 1,
                got: values.len(),
            });
        }
        Ok(Self { values, scheme })
    }

    /// Left-to-right cumulative sum of `deltas` started at `u0`.
    ///
    /// Callers guarantee `deltas.len() == scheme.n()`.
    pub(crate) fn accumulate<'a>(
        u0: f64,
        deltas: impl IntoIterator<Item = &'a f64>,
        scheme: SamplingScheme,
    ) -> Self {
        let mut values = Vec::with_capacity(scheme.n() + 1);
        values.push(u0);
        let mut level = u0;
        for d in deltas {
            level += d;
            values.push(level);
        }
        debug_assert_eq!(values.len(), scheme.n() + 1);
        Self { values, scheme }
    }

    pub fn u0(&self) -> f64 {
        self.values[0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.scheme.n()
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Consecutive differences of the grid values.
    pub fn increments(&self) -> IncrementSeries {
        let deltas = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        IncrementSeries {
            scheme: self.scheme,
            deltas,
        }
    }
}

/// Cumulative-sum reconstruction `values[k] = u0 + sum_{j <= k} deltas[j]`.
pub fn path_from_increments(u0: f64, inc: &IncrementSeries) -> StepPath {
    StepPath::accumulate(u0, inc.deltas(), inc.scheme())
}

/// Exact sampler of the grid increments of the surplus process.
///
/// Claim arrivals are generated from the Poisson clock itself (exponential
/// inter-arrival times), so the number of claims landing in each step is
/// exactly Poisson(`lambda h`) and no discretization bias is introduced.
pub struct IncrementSampler<R> {
    rng: R,
    h: f64,
    premium_step: f64,
    diffusion_step: f64,
    lambda: f64,
    mu: f64,
    step: u64,
    next_arrival: f64,
}

impl<R: Rng> IncrementSampler<R> {
    pub fn new(params: &ModelParams, h: f64, mut rng: R) -> Self {
        let next_arrival = if params.lambda > 0.0 {
            rng.sample::<f64, _>(Exp1) / params.lambda
        } else {
            f64::INFINITY
        };
        Self {
            rng,
            h,
            premium_step: params.c * h,
            diffusion_step: params.sigma * h.sqrt(),
            lambda: params.lambda,
            mu: params.mu,
            step: 0,
            next_arrival,
        }
    }

    /// Draws the next increment `X_{t_{k+1}} - X_{t_k}`.
    pub fn next_increment(&mut self) -> f64 {
        self.step += 1;
        let step_end = self.step as f64 * self.h;
        let mut delta = self.premium_step;
        if self.diffusion_step > 0.0 {
            let z: f64 = self.rng.sample(StandardNormal);
            delta += self.diffusion_step * z;
        }
        while self.next_arrival <= step_end {
            let claim: f64 = self.rng.sample(Exp1);
            delta -= claim / self.mu;
            let wait: f64 = self.rng.sample(Exp1);
            self.next_arrival += wait / self.lambda;
        }
        delta
    }
}

impl<R: Rng> Iterator for IncrementSampler<R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_increment())
    }
}

/// Simulates the `n` grid increments of one path. Deterministic in `seed`.
pub fn simulate_increments(
    params: &ModelParams,
    scheme: SamplingScheme,
    seed: u64,
) -> IncrementSeries {
    let rng = rng::stream(seed, rng::tag::INCREMENTS, 0);
    let deltas = IncrementSampler::new(params, scheme.h(), rng)
        .take(scheme.n())
        .collect();
    IncrementSeries { scheme, deltas }
}
