//! Weighted KL projections onto a single violated halfspace.
//!
//! A covering projection raises the named coordinates multiplicatively in
//! shifted space, `x̂_i = x̂_i^prev · exp(c_i y / w_i)` with
//! `x̂_i = x_i + eps / (4 d c_i)`, until the constraint is tight. A packing
//! projection shrinks them, `x_i = x_i^prev · exp(-p_i z / w_i)`, until the
//! left-hand side equals `1 + eps`. Coordinates outside the support never move.
//!
//! Both multipliers are found by a bracketed 1-D root find on a monotone
//! convex function (Newton steps, bisection whenever Newton leaves the bracket).

use crate::error::{Error, Result};
use crate::point::{ConstraintKind, FractionalPoint, HalfspaceConstraint};

/// Relative slack below which a constraint does not count as violated.
pub const VIOLATION_REL_TOL: f64 = 1e-12;
/// Iteration cap shared by bracketing and refinement.
pub const MAX_ROOT_ITERS: usize = 200;
const ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: FractionalPoint,
    /// `y` for a covering projection, `z` for a packing projection.
    pub multiplier: f64,
    pub iterations: usize,
    /// `<c, x> - 1` (covering) or `<p, x> - (1 + eps)` (packing).
    pub residual: f64,
}

/// Is `<c, x> >= 1` violated beyond floating-point dust?
pub fn covering_violated(c: &HalfspaceConstraint, x: &[f64]) -> bool {
    c.dot(x) < 1.0 - VIOLATION_REL_TOL
}

/// Is `<p, x> <= 1 + eps` violated beyond floating-point dust?
pub fn packing_violated(p: &HalfspaceConstraint, x: &[f64], eps: f64) -> bool {
    p.dot(x) > (1.0 + eps) * (1.0 + VIOLATION_REL_TOL)
}

/// Shift used by the covering projection for coordinate with coefficient `c_i`.
pub fn covering_shift(eps: f64, sparsity: usize, c_i: f64) -> f64 {
    eps / (4.0 * sparsity as f64 * c_i)
}

pub fn project_covering(
    x_prev: &FractionalPoint,
    c: &HalfspaceConstraint,
    eps: f64,
) -> Result<ProjectionResult> {
    if c.kind() != ConstraintKind::Covering {
        return Err(Error::WrongKind {
            expected: ConstraintKind::Covering,
        });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadParameter { name: "eps", value: eps });
    }
    c.check_dim(x_prev.dim())?;
    if c.sparsity() == 0 {
        return Err(Error::EmptyCovering);
    }
    let value = c.dot(x_prev.values());
    if !covering_violated(c, x_prev.values()) {
        return Err(Error::NotViolated {
            kind: ConstraintKind::Covering,
            value,
        });
    }

    let d = c.sparsity();
    let w = x_prev.weights();
    // (coefficient, shift, shifted previous value, rate)
    let terms: Vec<(f64, f64, f64, f64)> = c
        .coeffs()
        .iter()
        .map(|&(i, ci)| {
            let shift = covering_shift(eps, d, ci);
            (ci, shift, x_prev.get(i) + shift, ci / w[i])
        })
        .collect();

    // log <c, x̂(y)> - log(1 + sum c_i shift_i): increasing, convex, and
    // close to linear, so Newton converges in a handful of steps.
    let log_target = (1.0 + terms.iter().map(|t| t.0 * t.1).sum::<f64>()).ln();
    let logs: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(ci, _, hat, rate)| ((ci * hat).ln(), rate))
        .collect();
    let g = |y: f64| -> (f64, f64) {
        let (lse, slope) = log_sum_exp(&logs, y);
        (lse - log_target, slope)
    };

    let (y, iterations) = solve_increasing(g)?;

    let mut values = x_prev.values().to_vec();
    for (&(i, _), &(_, shift, hat, rate)) in c.coeffs().iter().zip(&terms) {
        let raised = hat * (rate * y).exp() - shift;
        values[i] = raised.max(x_prev.get(i));
    }
    let point = x_prev.with_values(values);
    let residual = c.dot(point.values()) - 1.0;
    Ok(ProjectionResult {
        point,
        multiplier: y,
        iterations,
        residual,
    })
}

/// Packing projection. `eps` may be zero here (exact packing); the online
/// algorithm itself always runs with `eps > 0`.
pub fn project_packing(
    x_prev: &FractionalPoint,
    p: &HalfspaceConstraint,
    eps: f64,
) -> Result<ProjectionResult> {
    if p.kind() != ConstraintKind::Packing {
        return Err(Error::WrongKind {
            expected: ConstraintKind::Packing,
        });
    }
    if !(eps >= 0.0 && eps <= 1.0) {
        return Err(Error::BadParameter { name: "eps", value: eps });
    }
    p.check_dim(x_prev.dim())?;
    let value = p.dot(x_prev.values());
    if !packing_violated(p, x_prev.values(), eps) {
        return Err(Error::NotViolated {
            kind: ConstraintKind::Packing,
            value,
        });
    }

    let target = 1.0 + eps;
    let w = x_prev.weights();
    // (coefficient, previous value, rate); zero coordinates stay at zero.
    let terms: Vec<(usize, f64, f64, f64)> = p
        .coeffs()
        .iter()
        .filter(|&&(i, _)| x_prev.get(i) > 0.0)
        .map(|&(i, pi)| (i, pi, x_prev.get(i), pi / w[i]))
        .collect();

    // log(1 + eps) - log <p, x(z)>, increasing in z.
    let log_target = target.ln();
    let logs: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(_, pi, prev, rate)| ((pi * prev).ln(), -rate))
        .collect();
    let h = |z: f64| -> (f64, f64) {
        let (lse, slope) = log_sum_exp(&logs, z);
        (log_target - lse, -slope)
    };

    let (z, iterations) = solve_increasing(h)?;

    let mut values = x_prev.values().to_vec();
    for &(i, _, prev, rate) in &terms {
        values[i] = (prev * (-rate * z).exp()).min(prev);
    }
    let point = x_prev.with_values(values);
    let residual = p.dot(point.values()) - target;
    Ok(ProjectionResult {
        point,
        multiplier: z,
        iterations,
        residual,
    })
}

/// `log sum_i exp(a_i + b_i t)` and its derivative in `t`, for `(a_i, b_i)` pairs.
fn log_sum_exp(terms: &[(f64, f64)], t: f64) -> (f64, f64) {
    let m = terms
        .iter()
        .map(|&(a, b)| a + b * t)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    let mut slope = 0.0;
    for &(a, b) in terms {
        let e = (a + b * t - m).exp();
        sum += e;
        slope += b * e;
    }
    (m + sum.ln(), slope / sum)
}

/// Root of an increasing function `f` with `f(0) < 0`, given `(value, slope)`.
fn solve_increasing(f: impl Fn(f64) -> (f64, f64)) -> Result<(f64, usize)> {
    let mut iterations = 0usize;
    let (f0, _) = f(0.0);
    if f0 >= 0.0 {
        return Ok((0.0, 0));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut f_hi = f(hi).0;
    while f_hi < 0.0 {
        iterations += 1;
        if iterations > MAX_ROOT_ITERS || !hi.is_finite() {
            return Err(Error::NonConvergence {
                iterations,
                residual: f_hi,
            });
        }
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi).0;
    }

    // Newton inside the bracket, bisecting whenever a step would leave it.
    let mut y = hi;
    let (mut val, mut slope) = f(y);
    loop {
        if val.abs() <= ROOT_TOL || hi - lo <= 4.0 * f64::EPSILON * hi.max(f64::MIN_POSITIVE) {
            return Ok((y, iterations));
        }
        iterations += 1;
        if iterations > MAX_ROOT_ITERS {
            return Err(Error::NonConvergence {
                iterations,
                residual: val,
            });
        }
        if val > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let newton = if slope > 0.0 && val.is_finite() {
            y - val / slope
        } else {
            f64::NAN
        };
        y = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        (val, slope) = f(y);
    }
}

/// Full weighted divergence of a covering step in shifted coordinates,
/// `sum_i w_i [x̂_i log(x̂_i / x̂_i^prev) - x̂_i + x̂_i^prev]` over the support.
pub fn covering_divergence(
    x_prev: &FractionalPoint,
    x: &FractionalPoint,
    c: &HalfspaceConstraint,
    eps: f64,
) -> f64 {
    let d = c.sparsity();
    let w = x_prev.weights();
    c.coeffs()
        .iter()
        .map(|&(i, ci)| {
            let shift = covering_shift(eps, d, ci);
            let a = x.get(i) + shift;
            let b = x_prev.get(i) + shift;
            w[i] * (a * (a / b).ln() - a + b)
        })
        .sum()
}

/// Full weighted divergence of a packing step over coordinates with a
/// positive previous value.
pub fn packing_divergence(
    x_prev: &FractionalPoint,
    x: &FractionalPoint,
    p: &HalfspaceConstraint,
) -> f64 {
    let w = x_prev.weights();
    p.coeffs()
        .iter()
        .filter(|&&(i, _)| x_prev.get(i) > 0.0)
        .map(|&(i, _)| {
            let a = x.get(i);
            let b = x_prev.get(i);
            let log_term = if a > 0.0 { a * (a / b).ln() } else { 0.0 };
            w[i] * (log_term - a + b)
        })
        .sum()
}
