//! Closed-form value of barrier strategies for Brownian motion with drift
//! minus compound Poisson exponential claims.
//!
//! With Laplace exponent `psi(s) = c s + sigma^2 s^2 / 2 - lambda s / (mu + s)`,
//! the `r`-scale function is the three-exponential mixture
//! `W(x) = sum_j exp(s_j x) / psi'(s_j)` over the roots of `psi(s) = r`, the
//! value of the barrier strategy at level `b` from `u <= b` is
//! `V(u; b) = W(u) / W'(b)`, and the optimal barrier solves `W''(b) = 0`.

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Laplace exponent of `X_t - u`.
pub fn laplace_exponent(p: &ModelParams, s: f64) -> f64 {
    p.c() * s + 0.5 * p.sigma() * p.sigma() * s * s - p.lambda() * s / (p.mu() + s)
}

pub fn laplace_exponent_derivative(p: &ModelParams, s: f64) -> f64 {
    let d = p.mu() + s;
    p.c() + p.sigma() * p.sigma() * s - p.lambda() * p.mu() / (d * d)
}

/// Coefficients `[a3, a2, a1, a0]` of `(mu + s) (psi(s) - r)`.
fn cleared_cubic(p: &ModelParams, r: f64) -> [f64; 4] {
    let s2 = p.sigma() * p.sigma();
    [
        0.5 * s2,
        p.c() + 0.5 * s2 * p.mu(),
        p.c() * p.mu() - p.lambda() - r,
        -r * p.mu(),
    ]
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &a| acc * x + a)
}

/// Real roots of `a3 x^3 + a2 x^2 + a1 x + a0` when all three are real,
/// by the trigonometric form of Cardano's formula. Returns `None` when the
/// discriminant says there is a complex pair.
fn real_cubic_roots([a3, a2, a1, a0]: [f64; 4]) -> Option<[f64; 3]> {
    let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
    // x = t - b/3 gives t^3 + p t + q = 0
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    if p >= 0.0 {
        return None;
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = 3.0 * q / (p * m);
    if arg.abs() > 1.0 + 1e-12 {
        return None;
    }
    let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    Some([0.0, 1.0, 2.0].map(|k| shift + m * (phi - k * tau).cos()))
}

/// Roots `s_1 > 0 > s_2 > s_3` of `psi(s) = r` (cleared of the pole at `-mu`).
///
/// Without claims (`lambda = 0`) the cleared cubic gains the root `-mu`, which
/// does not solve `psi(s) = r`; it is kept for bookkeeping and carries zero
/// weight in the scale function.
#[derive(Debug, Clone, PartialEq)]
pub struct LundbergRoots {
    params: ModelParams,
    r: f64,
    roots: [f64; 3],
    weights: [f64; 3],
}

const RESIDUAL_TOL: f64 = 1e-10;

/// Newton on `psi(s) - r` until the step is at round-off level.
fn polish(p: &ModelParams, r: f64, mut s: f64) -> f64 {
    for _ in 0..50 {
        let f = laplace_exponent(p, s) - r;
        let df = laplace_exponent_derivative(p, s);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        s -= step;
        if step.abs() <= 1e-15 * s.abs().max(1e-300) {
            break;
        }
    }
    s
}

pub fn lundberg_roots(p: &ModelParams, r: f64) -> Result<LundbergRoots> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::NonPositive { field: "r", value: r });
    }
    if p.sigma() <= 0.0 {
        return Err(Error::NoDiffusion);
    }
    let coeffs = cleared_cubic(p, r);
    let mut roots = real_cubic_roots(coeffs)
        .ok_or_else(|| Error::DegenerateRoots("cleared cubic has a complex pair".into()))?;

    let spurious = |s: f64| p.lambda() == 0.0 && (s + p.mu()).abs() <= 1e-8 * p.mu();
    for s in roots.iter_mut() {
        *s = if spurious(*s) { -p.mu() } else { polish(p, r, *s) };
    }
    roots.sort_by(|a, b| b.total_cmp(a));

    let scale = roots.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    if roots.windows(2).any(|w| (w[0] - w[1]).abs() <= 1e-9 * scale) {
        return Err(Error::DegenerateRoots(format!("roots {roots:?} are not distinct")));
    }
    if roots.iter().filter(|&&s| s > 0.0).count() != 1 {
        return Err(Error::DegenerateRoots(format!(
            "expected exactly one positive root, got {roots:?}"
        )));
    }

    let weights = roots.map(|s| {
        if spurious(s) {
            0.0
        } else {
            1.0 / laplace_exponent_derivative(p, s)
        }
    });
    let out = LundbergRoots {
        params: *p,
        r,
        roots,
        weights,
    };
    for (s, res) in out.roots.into_iter().zip(out.residuals()) {
        if res > RESIDUAL_TOL {
            return Err(Error::DegenerateRoots(format!(
                "root {s} has relative residual {res:e}"
            )));
        }
    }
    Ok(out)
}

impl LundbergRoots {
    /// Roots in descending order.
    pub fn roots(&self) -> [f64; 3] {
        self.roots
    }

    /// Scale-function weights `1 / psi'(s_j)` (zero for the spurious root).
    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Relative residuals `|psi(s_j) - r|` scaled by the largest term of the
    /// equation; the spurious root is checked against the cleared cubic.
    pub fn residuals(&self) -> [f64; 3] {
        let p = &self.params;
        let coeffs = cleared_cubic(p, self.r);
        self.roots.map(|s| {
            if self.is_spurious(s) {
                let terms = [coeffs[0] * s.powi(3), coeffs[1] * s * s, coeffs[2] * s, coeffs[3]];
                let size = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
                horner(&coeffs, s).abs() / size
            } else {
                let terms = [
                    p.c() * s,
                    0.5 * p.sigma() * p.sigma() * s * s,
                    p.lambda() * s / (p.mu() + s),
                    self.r,
                ];
                let size = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
                (laplace_exponent(p, s) - self.r).abs() / size
            }
        })
    }

    fn is_spurious(&self, s: f64) -> bool {
        self.params.lambda() == 0.0 && s == -self.params.mu()
    }

    pub fn scale_function(&self) -> ScaleFunction {
        ScaleFunction {
            roots: self.roots,
            weights: self.weights,
        }
    }
}

/// `W^{(r)}` as a finite exponential mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFunction {
    roots: [f64; 3],
    weights: [f64; 3],
}

impl ScaleFunction {
    /// `W^{(order)}(x) = sum_j w_j s_j^order exp(s_j x)`.
    pub fn eval(&self, x: f64, order: u32) -> f64 {
        self.roots
            .iter()
            .zip(self.weights)
            .map(|(&s, w)| w * s.powi(order as i32) * (s * x).exp())
            .sum()
    }

    pub fn roots(&self) -> [f64; 3] {
        self.roots
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }
}

pub fn scale_eval(roots: &LundbergRoots, x: f64, order: u32) -> f64 {
    roots.scale_function().eval(x, order)
}

/// `V(u; b) = W(u) / W'(b)` for `0 <= u <= b`.
pub fn true_value(roots: &LundbergRoots, u: f64, b: f64) -> Result<f64> {
    if !(0.0..=b).contains(&u) {
        return Err(Error::DomainError { u, b });
    }
    let w = roots.scale_function();
    Ok(w.eval(u, 0) / w.eval(b, 1))
}

const SCAN_LO: f64 = 1e-6;
const SCAN_HI: f64 = 1e3;
const SCAN_POINTS: usize = 2000;

/// The barrier `b > 0` with `W''(b) = 0`, i.e. the minimizer of `W'`.
pub fn optimal_barrier(roots: &LundbergRoots) -> Result<f64> {
    let w = roots.scale_function();
    let f = |b: f64| w.eval(b, 2);
    let ratio = (SCAN_HI / SCAN_LO).powf(1.0 / (SCAN_POINTS - 1) as f64);

    let mut lo = SCAN_LO;
    let mut f_lo = f(lo);
    let mut bracket = None;
    for i in 1..SCAN_POINTS {
        let hi = SCAN_LO * ratio.powi(i as i32);
        let f_hi = f(hi);
        if f_lo.signum() != f_hi.signum() || f_hi == 0.0 {
            bracket = Some((lo, hi, f_lo));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut a, mut b, f_a) =
        bracket.ok_or(Error::BracketNotFound { lo: SCAN_LO, hi: SCAN_HI })?;

    while b - a > 1e-13 * b {
        let m = 0.5 * (a + b);
        let f_m = f(m);
        if f_m == 0.0 {
            return Ok(m);
        }
        if f_m.signum() == f_a.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let d = w.eval(x, 3);
        if d == 0.0 {
            break;
        }
        let next = x - f(x) / d;
        if !(a - (b - a)..=b + (b - a)).contains(&next) {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Everything the oracle knows for one model and discount rate.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub roots: LundbergRoots,
    pub b_star: f64,
}

impl OracleResult {
    pub fn new(p: &ModelParams, r: f64) -> Result<Self> {
        let roots = lundberg_roots(p, r)?;
        let b_star = optimal_barrier(&roots)?;
        Ok(Self { roots, b_star })
    }

    pub fn value_at(&self, u: f64, b: f64) -> Result<f64> {
        true_value(&self.roots, u, b)
    }

    pub fn scale_function(&self) -> ScaleFunction {
        self.roots.scale_function()
    }
}
