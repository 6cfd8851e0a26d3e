//! The offline recourse LP: choose `x^1, ..., x^T` meeting every constraint
//! of its time step and minimize `sum_t sum_i w_i (x_i^t - x_i^{t-1})_+`
//! from `x^0 = 0`. Packing rows are enforced at 1, without slack.

use crate::error::{Error, Result};
use crate::lp::simplex::{LinearProgram, Sense};
use crate::point::{ConstraintKind, FractionalPoint, HalfspaceConstraint};

/// Default cap on `2 n T`.
pub const DEFAULT_SIZE_CAP: usize = 4000;
/// Tolerance for the optimality certificate of each solve.
pub const OPTIMALITY_TOL: f64 = 1e-8;

/// Everything the offline solution must satisfy at one time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeStep {
    pub constraints: Vec<HalfspaceConstraint>,
    /// Coordinates forced to zero at this time.
    pub frozen: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub value: f64,
    /// `x^1, ..., x^T`.
    pub trajectory: Vec<FractionalPoint>,
    pub pivots: usize,
}

/// One constraint per time step.
pub fn solve_optimal_recourse(stream: &[HalfspaceConstraint], weights: &[f64]) -> Result<OfflineSolution> {
    let steps: Vec<TimeStep> = stream
        .iter()
        .map(|h| TimeStep {
            constraints: vec![h.clone()],
            frozen: Vec::new(),
        })
        .collect();
    solve_recourse_steps(&steps, weights, DEFAULT_SIZE_CAP)
}

/// True iff `dual_objective <= opt_value + tol`.
pub fn verify_weak_duality(dual_objective: f64, opt_value: f64, tol: f64) -> bool {
    dual_objective <= opt_value + tol
}

pub fn solve_recourse_steps(steps: &[TimeStep], weights: &[f64], size_cap: usize) -> Result<OfflineSolution> {
    let n = weights.len();
    let t_len = steps.len();
    let size = 2 * n * t_len;
    if size > size_cap {
        return Err(Error::SizeCap { size, cap: size_cap });
    }
    let mut frozen = vec![vec![false; n]; t_len];
    // Times at which each coordinate is named by some constraint.
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0usize; n];
    for (t, step) in steps.iter().enumerate() {
        for &i in &step.frozen {
            if i >= n {
                return Err(Error::CoordinateOutOfRange { index: i, dim: n });
            }
            frozen[t][i] = true;
        }
        for h in &step.constraints {
            h.check_dim(n)?;
            for &(i, _) in h.coeffs() {
                first[i] = first[i].min(t);
                last[i] = last[i].max(t);
            }
        }
    }

    // A coordinate only needs variables between its first and last mention:
    // before, zero is optimal; after, staying put costs nothing.
    let mut x_var = vec![vec![None; n]; t_len];
    let mut num_vars = 0;
    let mut costs = Vec::new();
    for i in 0..n {
        if first[i] == usize::MAX {
            continue;
        }
        for t in first[i]..=last[i] {
            if !frozen[t][i] {
                // x_i^t, then l_i^t right after it.
                x_var[t][i] = Some(num_vars);
                costs.push(0.0);
                costs.push(weights[i]);
                num_vars += 2;
            }
        }
    }

    let mut lp = LinearProgram::new(num_vars, costs);
    for (t, step) in steps.iter().enumerate() {
        for h in &step.constraints {
            let coeffs: Vec<(usize, f64)> = h
                .coeffs()
                .iter()
                .filter_map(|&(i, c)| x_var[t][i].map(|v| (v, c)))
                .collect();
            match h.kind() {
                ConstraintKind::Covering => {
                    if coeffs.is_empty() {
                        return Err(Error::Infeasible);
                    }
                    lp.add_row(coeffs, Sense::Ge, 1.0);
                }
                ConstraintKind::Packing => {
                    if !coeffs.is_empty() {
                        lp.add_row(coeffs, Sense::Le, 1.0);
                    }
                }
            }
        }
    }
    for i in 0..n {
        if first[i] == usize::MAX {
            continue;
        }
        for t in first[i]..=last[i] {
            if let Some(v) = x_var[t][i] {
                let mut row = vec![(v, 1.0), (v + 1, -1.0)];
                if t > 0 {
                    if let Some(prev) = x_var[t - 1][i] {
                        row.push((prev, -1.0));
                    }
                }
                lp.add_row(row, Sense::Le, 0.0);
            }
        }
    }

    let sol = lp.solve()?;
    lp.verify_optimality(&sol, OPTIMALITY_TOL)?;

    let mut trajectory = Vec::with_capacity(t_len);
    let mut current = vec![0.0; n];
    for t in 0..t_len {
        for i in 0..n {
            current[i] = match x_var[t][i] {
                Some(v) => sol.x[v],
                None if frozen[t][i] || t < first[i].min(t_len) => 0.0,
                None => current[i],
            };
        }
        trajectory.push(FractionalPoint::new(current.clone(), weights.to_vec())?);
    }
    Ok(OfflineSolution {
        value: sol.value,
        trajectory,
        pivots: sol.pivots,
    })
}
