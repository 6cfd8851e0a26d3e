//! Dual certificates for the offline recourse LP, built from the multipliers
//! of a finished run.
//!
//! Two duals are fitted. The warmup dual divides every multiplier by
//! `A = ln(1 + 4 d Δ / eps)` and reads `r̄` off the trajectory. The refined
//! dual first lowers some early covering multipliers (`refine_ytilde`) so that
//! every window sum stays below `w_i ln(1 + 40 d² / eps²)`, which removes the
//! dependence on the aspect ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::RecourseLedger;
use crate::point::{ConstraintKind, FractionalPoint, HalfspaceConstraint};

/// Absolute tolerance on every dual constraint.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedStep {
    pub constraint: HalfspaceConstraint,
    /// `y` for covering steps, `z` for packing steps. Zero for a constraint
    /// that arrived already satisfied.
    pub multiplier: f64,
}

/// Every constraint of a run, its multiplier, and the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierLog {
    weights: Vec<f64>,
    /// `points[t]` is `x^t`; `points[0]` is the start.
    points: Vec<Vec<f64>>,
    steps: Vec<LoggedStep>,
    c_max: Vec<f64>,
    c_min: Vec<f64>,
    d: usize,
}

impl MultiplierLog {
    pub fn new(start: &FractionalPoint) -> Self {
        let n = start.dim();
        Self {
            weights: start.weights().to_vec(),
            points: vec![start.values().to_vec()],
            steps: Vec::new(),
            c_max: vec![0.0; n],
            c_min: vec![f64::INFINITY; n],
            d: 0,
        }
    }

    /// Append one step together with the point it produced.
    pub fn append(&mut self, constraint: HalfspaceConstraint, multiplier: f64, after: &FractionalPoint) -> Result<()> {
        if !(multiplier >= 0.0 && multiplier.is_finite()) {
            return Err(Error::NegativeMultiplier(multiplier));
        }
        if after.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: after.dim(),
            });
        }
        constraint.check_dim(self.dim())?;
        if constraint.kind() == ConstraintKind::Covering {
            for &(i, c) in constraint.coeffs() {
                self.c_max[i] = self.c_max[i].max(c);
                self.c_min[i] = self.c_min[i].min(c);
            }
            self.d = self.d.max(constraint.sparsity());
        }
        self.points.push(after.values().to_vec());
        self.steps.push(LoggedStep { constraint, multiplier });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn steps(&self) -> &[LoggedStep] {
        &self.steps
    }

    /// Number of steps `T`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `x^t` for `t` in `0..=T`.
    pub fn point(&self, t: usize) -> &[f64] {
        &self.points[t]
    }

    /// Largest covering coefficient seen on coordinate `i`, or 0.
    pub fn c_max(&self, i: usize) -> f64 {
        self.c_max[i]
    }

    /// Smallest nonzero covering coefficient seen on coordinate `i`.
    pub fn c_min(&self, i: usize) -> Option<f64> {
        self.c_min[i].is_finite().then_some(self.c_min[i])
    }

    /// Largest covering sparsity, 0 before any covering step.
    pub fn sparsity(&self) -> usize {
        self.d
    }

    /// Aspect ratio `max_i c_i^max / c_i^min`; 1 before any covering step.
    pub fn aspect_ratio(&self) -> f64 {
        (0..self.dim())
            .filter_map(|i| self.c_min(i).map(|lo| self.c_max[i] / lo))
            .fold(1.0, f64::max)
    }

    pub fn covering_sum(&self) -> f64 {
        self.sum_of(ConstraintKind::Covering)
    }

    pub fn packing_sum(&self) -> f64 {
        self.sum_of(ConstraintKind::Packing)
    }

    fn sum_of(&self, kind: ConstraintKind) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.constraint.kind() == kind)
            .map(|s| s.multiplier)
            .sum()
    }

    /// Weighted upward movement of the logged trajectory.
    pub fn ledger(&self) -> RecourseLedger {
        let mut ledger = RecourseLedger::new();
        for pair in self.points.windows(2) {
            ledger.push(crate::ledger::movement(&pair[0], &pair[1], &self.weights));
        }
        ledger
    }

    /// `d` and `Δ` floored at 1 so the scaling constants stay positive.
    fn d_floor(&self) -> f64 {
        self.d.max(1) as f64
    }
}

/// A candidate solution `(ȳ, z̄, r̄)` of the dual recourse LP.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub scale: f64,
    /// `ȳ^t` on covering steps and `z̄^t` on packing steps, indexed by step.
    pub step_duals: Vec<f64>,
    /// `r[t][i]` is `r̄_i^{t+1}`; one extra zero row closes the recurrence.
    pub r: Vec<Vec<f64>>,
    /// The `ỹ` used, for a refined certificate.
    pub ytilde: Option<Vec<f64>>,
    pub objective: f64,
    /// Largest amount by which any dual constraint is exceeded (<= 0 when strict).
    pub max_violation: f64,
}

impl DualCertificate {
    pub fn is_feasible(&self) -> bool {
        self.max_violation <= FEASIBILITY_TOL
    }

    /// The certified lower bound on offline recourse.
    pub fn bound(&self) -> f64 {
        self.objective.max(0.0)
    }
}

pub fn warmup_scale(log: &MultiplierLog, eps: f64) -> f64 {
    (1.0 + 4.0 * log.d_floor() * log.aspect_ratio() / eps).ln()
}

pub fn refined_scale(log: &MultiplierLog, eps: f64) -> f64 {
    let d = log.d_floor();
    (1.0 + 40.0 * d * d / (eps * eps)).ln()
}

pub fn build_warmup_dual(log: &MultiplierLog, eps: f64) -> Result<DualCertificate> {
    check_eps(eps)?;
    let a = warmup_scale(log, eps);
    let d = log.d_floor();
    let n = log.dim();
    let step_duals: Vec<f64> = log.steps.iter().map(|s| s.multiplier / a).collect();
    let mut r: Vec<Vec<f64>> = (0..log.len())
        .map(|t| {
            (0..n)
                .map(|i| {
                    let x = log.points[t][i];
                    log.weights[i] * (1.0 - (1.0 + 4.0 * d * log.c_max[i] * x / eps).ln() / a)
                })
                .collect()
        })
        .collect();
    r.push(vec![0.0; n]);
    Ok(finish(log, a, step_duals, r, None))
}

/// Lower early covering multipliers so that window sums stay bounded.
///
/// Covering times are processed in order. At time `ℓ`, each coordinate `i`
/// of the constraint spends a budget `c_i^ℓ y^ℓ` on the latest earlier times
/// whose coefficient on `i` is at least `10 d^ℓ c_i^ℓ / eps`; every earlier
/// time is then lowered by the largest amount any coordinate charged it.
pub fn refine_ytilde(log: &MultiplierLog, eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    let t_len = log.len();
    let mut ytilde = vec![0.0f64; t_len];
    // Covering times that touched each coordinate, in order.
    let mut touched: Vec<Vec<usize>> = vec![Vec::new(); log.dim()];
    let mut decrease = vec![0.0f64; t_len];
    for (ell, step) in log.steps.iter().enumerate() {
        let c = &step.constraint;
        if c.kind() != ConstraintKind::Covering {
            continue;
        }
        let y = step.multiplier;
        let cutoff_factor = 10.0 * c.sparsity() as f64 / eps;
        let mut charged: Vec<usize> = Vec::new();
        for &(i, ci) in c.coeffs() {
            let cutoff = cutoff_factor * ci;
            let mut budget = ci * y;
            for &tau in touched[i].iter().rev() {
                if budget <= 0.0 {
                    break;
                }
                let c_tau = log.steps[tau].constraint.coeff(i);
                if c_tau < cutoff || ytilde[tau] <= 0.0 {
                    continue;
                }
                let amount = ytilde[tau].min(budget / c_tau);
                budget -= c_tau * amount;
                if amount > decrease[tau] {
                    if decrease[tau] == 0.0 {
                        charged.push(tau);
                    }
                    decrease[tau] = amount;
                }
            }
        }
        for tau in charged {
            ytilde[tau] = (ytilde[tau] - decrease[tau]).max(0.0);
            decrease[tau] = 0.0;
        }
        ytilde[ell] = y;
        for &(i, _) in c.coeffs() {
            touched[i].push(ell);
        }
    }
    let (excess, _) = ineq1_excess(log, &ytilde, eps);
    if excess > FEASIBILITY_TOL * refined_scale(log, eps).max(1.0) {
        return Err(Error::Certificate(format!(
            "window bound exceeded by {excess:e} after refinement"
        )));
    }
    let margin = ineq2_margin(log, &ytilde, eps);
    if margin < -FEASIBILITY_TOL * (1.0 + log.covering_sum()) {
        return Err(Error::Certificate(format!(
            "refinement removed too much covering mass (margin {margin:e})"
        )));
    }
    Ok(ytilde)
}

pub fn build_refined_dual(log: &MultiplierLog, ytilde: &[f64], eps: f64) -> Result<DualCertificate> {
    check_eps(eps)?;
    if ytilde.len() != log.len() {
        return Err(Error::DimensionMismatch {
            left: log.len(),
            right: ytilde.len(),
        });
    }
    let a = refined_scale(log, eps);
    let n = log.dim();
    let step_duals: Vec<f64> = log
        .steps
        .iter()
        .zip(ytilde)
        .map(|(s, &yt)| match s.constraint.kind() {
            ConstraintKind::Covering => yt / a,
            ConstraintKind::Packing => s.multiplier / a,
        })
        .collect();
    let mut r = vec![vec![0.0; n]; log.len() + 1];
    for t in (0..log.len()).rev() {
        let (head, tail) = r.split_at_mut(t + 1);
        head[t].copy_from_slice(&tail[0]);
        let step = &log.steps[t];
        let sign = match step.constraint.kind() {
            ConstraintKind::Covering => 1.0,
            ConstraintKind::Packing => -1.0,
        };
        for &(i, coeff) in step.constraint.coeffs() {
            head[t][i] = (sign * coeff * step_duals[t] + tail[0][i]).max(0.0);
        }
    }
    let cert = finish(log, a, step_duals, r, Some(ytilde.to_vec()));
    if !cert.is_feasible() {
        return Err(Error::Certificate(format!(
            "refined dual violates a constraint by {:e}",
            cert.max_violation
        )));
    }
    Ok(cert)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::BadParameter { name: "eps", value: eps })
    }
}

fn finish(
    log: &MultiplierLog,
    scale: f64,
    step_duals: Vec<f64>,
    r: Vec<Vec<f64>>,
    ytilde: Option<Vec<f64>>,
) -> DualCertificate {
    let objective = log
        .steps
        .iter()
        .zip(&step_duals)
        .map(|(s, v)| match s.constraint.kind() {
            ConstraintKind::Covering => *v,
            ConstraintKind::Packing => -*v,
        })
        .sum();
    let max_violation = dual_violation(log, &step_duals, &r);
    DualCertificate {
        scale,
        step_duals,
        r,
        ytilde,
        objective,
        max_violation,
    }
}

/// Largest violation of any constraint of the dual recourse LP, including
/// the box `0 <= r̄ <= w` and the rows for coordinates a step does not name.
pub fn dual_violation(log: &MultiplierLog, step_duals: &[f64], r: &[Vec<f64>]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for row in r.iter().take(log.len()) {
        for (i, &v) in row.iter().enumerate() {
            worst = worst.max(-v).max(v - log.weights[i]);
        }
    }
    for (t, step) in log.steps.iter().enumerate() {
        worst = worst.max(-step_duals[t]);
        let sign = match step.constraint.kind() {
            ConstraintKind::Covering => 1.0,
            ConstraintKind::Packing => -1.0,
        };
        for i in 0..log.dim() {
            let a = sign * step.constraint.coeff(i) * step_duals[t];
            worst = worst.max(a - r[t][i] + r[t + 1][i]);
        }
    }
    if worst == f64::NEG_INFINITY {
        0.0
    } else {
        worst
    }
}

/// Window sum entry of coordinate `i` at step `t` under `ytilde`.
fn window_term(log: &MultiplierLog, ytilde: &[f64], t: usize, i: usize) -> f64 {
    let step = &log.steps[t];
    match step.constraint.kind() {
        ConstraintKind::Covering => step.constraint.coeff(i) * ytilde[t],
        ConstraintKind::Packing => -step.constraint.coeff(i) * step.multiplier,
    }
}

/// `max_{i, s <= t} [window sum - w_i ln(1 + 40 d² / eps²)]`, and the
/// coordinate attaining it. Linear time per coordinate (maximum subarray).
pub fn ineq1_excess(log: &MultiplierLog, ytilde: &[f64], eps: f64) -> (f64, Option<usize>) {
    let a = refined_scale(log, eps);
    let mut worst = (f64::NEG_INFINITY, None);
    for i in 0..log.dim() {
        let mut best = f64::NEG_INFINITY;
        let mut run = 0.0f64;
        for t in 0..log.len() {
            let v = window_term(log, ytilde, t, i);
            run = if run > 0.0 { run + v } else { v };
            best = best.max(run);
        }
        let excess = best - log.weights[i] * a;
        if excess > worst.0 {
            worst = (excess, Some(i));
        }
    }
    worst
}

/// `Σ ỹ - (1 - eps/10) Σ y`; nonnegative when the refinement kept enough mass.
pub fn ineq2_margin(log: &MultiplierLog, ytilde: &[f64], eps: f64) -> f64 {
    let kept: f64 = log
        .steps
        .iter()
        .zip(ytilde)
        .filter(|(s, _)| s.constraint.kind() == ConstraintKind::Covering)
        .map(|(_, v)| v)
        .sum();
    kept - (1.0 - eps / 10.0) * log.covering_sum()
}

/// Numerical checks of the inequalities that relate movement to multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaChecks {
    /// `max_t [upward movement at t - (1 + eps/4) y^t]` over covering steps.
    pub movement_excess: f64,
    /// `(1 + eps/4) Σ y - (1 + eps) Σ z`.
    pub yz_balance: f64,
    /// Largest excess of the subset inequality over the sampled tuples.
    pub subset_excess: f64,
    /// `(2+eps)(1+eps)/eps · (Σ ỹ - Σ z) - upward recourse`.
    pub recourse_slack: f64,
}

impl LemmaChecks {
    pub fn run(log: &MultiplierLog, ytilde: &[f64], eps: f64, subset_samples: usize, seed: u64) -> Self {
        let ledger = log.ledger();
        let mut movement_excess = f64::NEG_INFINITY;
        for (t, step) in log.steps.iter().enumerate() {
            if step.constraint.kind() == ConstraintKind::Covering {
                let up = ledger.steps()[t].upward;
                movement_excess = movement_excess.max(up - (1.0 + eps / 4.0) * step.multiplier);
            }
        }
        if movement_excess == f64::NEG_INFINITY {
            movement_excess = 0.0;
        }
        let yz_balance = (1.0 + eps / 4.0) * log.covering_sum() - (1.0 + eps) * log.packing_sum();
        let kept: f64 = log
            .steps
            .iter()
            .zip(ytilde)
            .filter(|(s, _)| s.constraint.kind() == ConstraintKind::Covering)
            .map(|(_, v)| v)
            .sum();
        let recourse_slack =
            (2.0 + eps) * (1.0 + eps) / eps * (kept - log.packing_sum()) - ledger.upward_total();
        Self {
            movement_excess,
            yz_balance,
            subset_excess: subset_lemma_excess(log, eps, subset_samples, seed),
            recourse_slack,
        }
    }

    /// Error out if any inequality fails beyond a tolerance relative to `scale`.
    pub fn verify(&self, scale: f64) -> Result<()> {
        let tol = FEASIBILITY_TOL * scale.max(1.0);
        let failures = [
            (self.movement_excess > tol, "per-step movement"),
            (self.yz_balance < -tol, "covering/packing multiplier balance"),
            (self.subset_excess > tol, "subset window"),
            (self.recourse_slack < -tol, "recourse bound"),
        ];
        match failures.iter().find(|(bad, _)| *bad) {
            Some((_, what)) => Err(Error::Certificate(format!("{what} inequality fails: {self:?}"))),
            None => Ok(()),
        }
    }
}

/// Left side minus right side of the subset inequality for one tuple,
/// divided through by `w_i`. `subset` lists covering steps inside `[s, t]`.
pub fn subset_lemma_gap(log: &MultiplierLog, eps: f64, s: usize, t: usize, i: usize, subset: &[usize]) -> f64 {
    let d = log.d_floor();
    let mut lhs = 0.0;
    let mut c_max = 0.0f64;
    for &tau in subset {
        let c = log.steps[tau].constraint.coeff(i);
        lhs += c * log.steps[tau].multiplier;
        c_max = c_max.max(c);
    }
    for tau in s..=t {
        let step = &log.steps[tau];
        if step.constraint.kind() == ConstraintKind::Packing {
            lhs -= step.constraint.coeff(i) * step.multiplier;
        }
    }
    // points[t + 1] is x after step t.
    let rhs = (1.0 + 4.0 * d * c_max * log.points[t + 1][i] / eps).ln();
    lhs / log.weights[i] - rhs
}

fn subset_lemma_excess(log: &MultiplierLog, eps: f64, samples: usize, seed: u64) -> f64 {
    if log.is_empty() || log.dim() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let a = rng.gen_range(0..log.len());
        let b = rng.gen_range(0..log.len());
        let (s, t) = (a.min(b), a.max(b));
        let i = rng.gen_range(0..log.dim());
        let subset: Vec<usize> = (s..=t)
            .filter(|&tau| log.steps[tau].constraint.kind() == ConstraintKind::Covering && rng.gen_bool(0.5))
            .collect();
        worst = worst.max(subset_lemma_gap(log, eps, s, t, i, &subset));
    }
    if worst == f64::NEG_INFINITY {
        0.0
    } else {
        worst
    }
}

/// Certified lower bounds next to the realized recourse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedReport {
    pub upward_recourse: f64,
    pub l1_recourse: f64,
    pub warmup_bound: f64,
    pub refined_bound: f64,
    /// `None` when the bound is zero.
    pub ratio_warmup: Option<f64>,
    pub ratio_refined: Option<f64>,
    /// `(2+eps)(1+eps)/eps · A` with the refined `A`.
    pub theoretical_cap: f64,
    #[serde(rename = "A_warmup")]
    pub a_warmup: f64,
    #[serde(rename = "A_refined")]
    pub a_refined: f64,
    pub d: usize,
    #[serde(rename = "Delta")]
    pub delta: f64,
}

pub fn certified_report(
    warmup: &DualCertificate,
    refined: &DualCertificate,
    ledger: &RecourseLedger,
    log: &MultiplierLog,
    eps: f64,
) -> CertifiedReport {
    let ratio = |bound: f64| (bound > 0.0).then(|| ledger.upward_total() / bound);
    CertifiedReport {
        upward_recourse: ledger.upward_total(),
        l1_recourse: ledger.l1_total(),
        warmup_bound: warmup.bound(),
        refined_bound: refined.bound(),
        ratio_warmup: ratio(warmup.bound()),
        ratio_refined: ratio(refined.bound()),
        theoretical_cap: recourse_factor(eps) * refined.scale,
        a_warmup: warmup.scale,
        a_refined: refined.scale,
        d: log.sparsity(),
        delta: log.aspect_ratio(),
    }
}

/// `(2+eps)(1+eps)/eps`.
pub fn recourse_factor(eps: f64) -> f64 {
    (2.0 + eps) * (1.0 + eps) / eps
}

/// Both duals, the lemma checks, and the report for a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub warmup: DualCertificate,
    pub refined: DualCertificate,
    pub checks: LemmaChecks,
    pub report: CertifiedReport,
}

pub fn certify(log: &MultiplierLog, eps: f64) -> Result<Certification> {
    let warmup = build_warmup_dual(log, eps)?;
    if !warmup.is_feasible() {
        return Err(Error::Certificate(format!(
            "warmup dual violates a constraint by {:e}",
            warmup.max_violation
        )));
    }
    let ytilde = refine_ytilde(log, eps)?;
    let refined = build_refined_dual(log, &ytilde, eps)?;
    let checks = LemmaChecks::run(log, &ytilde, eps, 4 * log.len().max(1), 0x5eed);
    checks.verify(1.0 + log.covering_sum())?;
    let ledger = log.ledger();
    let report = certified_report(&warmup, &refined, &ledger, log, eps);
    Ok(Certification {
        warmup,
        refined,
        checks,
        report,
    })
}
