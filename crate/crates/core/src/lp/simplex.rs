//! Dense tableau simplex for small LPs `min c·x` with `x >= 0`.
//!
//! Every row gets a slack column so the initial basis is the identity. When
//! all costs are nonnegative (every LP this crate builds) the dual simplex
//! runs from that basis directly; otherwise a primal two-phase method is used.
//! Pivoting follows Dantzig's rule and falls back to Bland's rule after a run
//! of degenerate pivots.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
pub const DEFAULT_PIVOT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimized.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per row: `>= 0` for `Ge`, `<= 0` for `Le`, free for `Eq`.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), num_vars);
        Self {
            num_vars,
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_with_limit(DEFAULT_PIVOT_LIMIT)
    }

    pub fn solve_with_limit(&self, pivot_limit: usize) -> Result<LpSolution> {
        // Expand equalities into two inequalities; remember where each came from.
        let mut le_rows: Vec<(Vec<(usize, f64)>, f64, usize, f64)> = Vec::new();
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, _) in &row.coeffs {
                if j >= self.num_vars {
                    return Err(Error::CoordinateOutOfRange {
                        index: j,
                        dim: self.num_vars,
                    });
                }
            }
            let negated = || row.coeffs.iter().map(|&(j, a)| (j, -a)).collect();
            match row.sense {
                Sense::Le => le_rows.push((row.coeffs.clone(), row.rhs, k, 1.0)),
                Sense::Ge => le_rows.push((negated(), -row.rhs, k, -1.0)),
                Sense::Eq => {
                    le_rows.push((row.coeffs.clone(), row.rhs, k, 1.0));
                    le_rows.push((negated(), -row.rhs, k, -1.0));
                }
            }
        }
        let mut tab = Tableau::new(self.num_vars, &self.objective, &le_rows);
        tab.pivot_limit = pivot_limit;
        if self.objective.iter().all(|&c| c >= 0.0) {
            tab.dual_simplex()?;
        } else {
            tab.two_phase()?;
        }
        let x = tab.primal(self.num_vars);
        let mut duals = vec![0.0; self.rows.len()];
        for (r, &(_, _, k, sign)) in le_rows.iter().enumerate() {
            duals[k] += sign * tab.row_dual(r);
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution {
            x,
            value,
            duals,
            pivots: tab.pivots,
        })
    }

    /// Check primal and dual feasibility, equal objectives, and complementary
    /// slackness of a solution, each within `tol` (scaled by problem magnitude).
    pub fn verify_optimality(&self, sol: &LpSolution, tol: f64) -> Result<()> {
        let fail = |what: String| Err(Error::Certificate(what));
        let scale = 1.0
            + self.objective.iter().map(|c| c.abs()).fold(0.0, f64::max)
            + self.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        let tol = tol * scale;
        if sol.x.iter().any(|&v| v < -tol) {
            return fail("negative primal variable".into());
        }
        let mut reduced = self.objective.clone();
        let mut dual_value = 0.0;
        for (k, row) in self.rows.iter().enumerate() {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * sol.x[j]).sum();
            let y = sol.duals[k];
            let (feasible, sign_ok) = match row.sense {
                Sense::Le => (lhs <= row.rhs + tol, y <= tol),
                Sense::Ge => (lhs >= row.rhs - tol, y >= -tol),
                Sense::Eq => ((lhs - row.rhs).abs() <= tol, true),
            };
            if !feasible {
                return fail(format!("row {k} violated: {lhs} vs {}", row.rhs));
            }
            if !sign_ok {
                return fail(format!("row {k} dual has the wrong sign: {y}"));
            }
            if (y * (lhs - row.rhs)).abs() > tol {
                return fail(format!("row {k} not complementary"));
            }
            dual_value += y * row.rhs;
            for &(j, a) in &row.coeffs {
                reduced[j] -= a * y;
            }
        }
        for (j, &d) in reduced.iter().enumerate() {
            if d < -tol {
                return fail(format!("reduced cost of column {j} is {d}"));
            }
            if (d * sol.x[j]).abs() > tol {
                return fail(format!("column {j} not complementary"));
            }
        }
        if (dual_value - sol.value).abs() > tol * (1.0 + sol.value.abs()) {
            return fail(format!("duality gap: primal {} dual {dual_value}", sol.value));
        }
        Ok(())
    }
}

struct Tableau {
    rows: usize,
    /// Structural + slack (+ artificial) columns; rhs is stored separately.
    cols: usize,
    width: usize,
    /// Row-major, `width` entries per row, last entry is the rhs.
    a: Vec<f64>,
    /// Reduced costs, last entry is minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    structural: usize,
    pivots: usize,
    pivot_limit: usize,
    degenerate: usize,
    bland: bool,
}

impl Tableau {
    fn new(structural: usize, objective: &[f64], rows: &[(Vec<(usize, f64)>, f64, usize, f64)]) -> Self {
        let m = rows.len();
        let cols = structural + m;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        for (r, (coeffs, rhs, _, _)) in rows.iter().enumerate() {
            for &(j, v) in coeffs {
                a[r * width + j] += v;
            }
            a[r * width + structural + r] = 1.0;
            a[r * width + cols] = *rhs;
        }
        let mut cost = vec![0.0; width];
        cost[..structural].copy_from_slice(objective);
        Self {
            rows: m,
            cols,
            width,
            a,
            cost,
            basis: (structural..structural + m).collect(),
            structural,
            pivots: 0,
            pivot_limit: DEFAULT_PIVOT_LIMIT,
            degenerate: 0,
            bland: false,
        }
    }

    #[inline]
    fn at(&self, r: usize, j: usize) -> f64 {
        self.a[r * self.width + j]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.a[r * self.width + self.cols]
    }

    fn pivot(&mut self, r: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.pivot_limit {
            return Err(Error::PivotLimit(self.pivot_limit));
        }
        let w = self.width;
        let inv = 1.0 / self.at(r, col);
        let start = r * w;
        for v in &mut self.a[start..start + w] {
            *v *= inv;
        }
        self.a[start + col] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| self.a[start + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.a[start + j]).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + col];
            if f == 0.0 {
                continue;
            }
            let base = i * w;
            for (&j, &p) in nz.iter().zip(&pivot_row) {
                self.a[base + j] -= f * p;
            }
            self.a[base + col] = 0.0;
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (&j, &p) in nz.iter().zip(&pivot_row) {
                self.cost[j] -= f * p;
            }
            self.cost[col] = 0.0;
        }
        self.basis[r] = col;
        Ok(())
    }

    fn note_progress(&mut self, step: f64) {
        if step.abs() <= PIVOT_TOL {
            self.degenerate += 1;
            if self.degenerate >= DEGENERATE_STREAK {
                self.bland = true;
            }
        } else {
            self.degenerate = 0;
        }
    }

    /// Dual simplex; requires nonnegative reduced costs.
    fn dual_simplex(&mut self) -> Result<()> {
        loop {
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let b = self.rhs(r);
                if b < -PIVOT_TOL {
                    let better = match leave {
                        None => true,
                        Some((best_r, best_b)) => {
                            if self.bland {
                                self.basis[r] < self.basis[best_r]
                            } else {
                                b < best_b
                            }
                        }
                    };
                    if better {
                        leave = Some((r, b));
                    }
                }
            }
            let Some((r, _)) = leave else { return Ok(()) };
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                let v = self.at(r, j);
                if v < -PIVOT_TOL {
                    let ratio = self.cost[j].max(0.0) / -v;
                    if enter.map_or(true, |(_, best)| ratio < best - 1e-12) {
                        enter = Some((j, ratio));
                    }
                }
            }
            let Some((col, ratio)) = enter else {
                return Err(Error::Infeasible);
            };
            self.note_progress(ratio);
            self.pivot(r, col)?;
        }
    }

    /// Primal simplex on the current cost row; requires a feasible basis.
    fn primal_simplex(&mut self, allowed: usize) -> Result<()> {
        loop {
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..allowed {
                let d = self.cost[j];
                if d < -PIVOT_TOL {
                    if self.bland {
                        enter = Some((j, d));
                        break;
                    }
                    if enter.map_or(true, |(_, best)| d < best) {
                        enter = Some((j, d));
                    }
                }
            }
            let Some((col, _)) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let v = self.at(r, col);
                if v > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / v;
                    let better = match leave {
                        None => true,
                        Some((best_r, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[r] < self.basis[best_r])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            self.note_progress(ratio);
            self.pivot(r, col)?;
        }
    }

    /// Phase one with one artificial column per infeasible row, then phase two.
    fn two_phase(&mut self) -> Result<()> {
        let bad: Vec<usize> = (0..self.rows).filter(|&r| self.rhs(r) < 0.0).collect();
        if !bad.is_empty() {
            let extra = bad.len();
            let old_w = self.width;
            let new_cols = self.cols + extra;
            let new_w = new_cols + 1;
            let mut a = vec![0.0; self.rows * new_w];
            for r in 0..self.rows {
                a[r * new_w..r * new_w + self.cols].copy_from_slice(&self.a[r * old_w..r * old_w + self.cols]);
                a[r * new_w + new_cols] = self.a[r * old_w + self.cols];
            }
            for (k, &r) in bad.iter().enumerate() {
                for v in &mut a[r * new_w..(r + 1) * new_w] {
                    *v = -*v;
                }
                a[r * new_w + self.cols + k] = 1.0;
                self.basis[r] = self.cols + k;
            }
            let real_cost = std::mem::take(&mut self.cost);
            let real_cols = self.cols;
            self.a = a;
            self.cols = new_cols;
            self.width = new_w;
            // Phase-one objective: sum of artificials, priced out.
            self.cost = vec![0.0; new_w];
            for &r in &bad {
                for j in 0..new_w {
                    self.cost[j] -= self.a[r * new_w + j];
                }
            }
            for k in 0..extra {
                self.cost[real_cols + k] = 0.0;
            }
            self.primal_simplex(new_cols)?;
            if -self.cost[new_cols] > 1e-7 {
                return Err(Error::Infeasible);
            }
            // Drive remaining artificials out of the basis where possible.
            for r in 0..self.rows {
                if self.basis[r] >= real_cols {
                    if let Some(j) = (0..real_cols).find(|&j| self.at(r, j).abs() > PIVOT_TOL) {
                        self.pivot(r, j)?;
                    }
                }
            }
            // Restore the real cost row over the new basis.
            let mut cost = vec![0.0; new_w];
            cost[..real_cols].copy_from_slice(&real_cost[..real_cols]);
            for r in 0..self.rows {
                let b = self.basis[r];
                let cb = if b < real_cols { cost[b] } else { 0.0 };
                if cb != 0.0 {
                    for j in 0..new_w {
                        cost[j] -= cb * self.a[r * new_w + j];
                    }
                }
            }
            self.cost = cost;
            self.bland = false;
            self.degenerate = 0;
            return self.primal_simplex(real_cols);
        }
        self.primal_simplex(self.cols)
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for r in 0..self.rows {
            let b = self.basis[r];
            if b < n {
                x[b] = self.rhs(r).max(0.0);
            }
        }
        x
    }

    /// Multiplier of `<=` row `r`: minus the reduced cost of its slack.
    fn row_dual(&self, r: usize) -> f64 {
        -self.cost[self.structural + r]
    }
}
