//! Set cover rounding: frequency thresholds with hysteresis, or fixed
//! exponential clocks plus cheapest backup sets.

use std::collections::BTreeSet;

use rand_distr::{Distribution, Exp};
use serde::Serialize;

use crate::adapters::SetCoverInstance;
use crate::rng::{labeled_rng, StreamLabel};

/// Clock rate `ln(alpha·n)`.
pub fn clock_rate(alpha: f64, n: usize) -> f64 {
    (alpha * n as f64).ln()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoverStep {
    /// `|S^t ⊕ S^{t-1}|`.
    pub recourse: usize,
    /// `|R^t ⊕ R^{t-1}|`; zero in deterministic mode.
    pub sampled_recourse: usize,
    pub size: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverState {
    selected: BTreeSet<usize>,
    /// Empty in deterministic mode.
    clocks: Vec<f64>,
    sampled: BTreeSet<usize>,
    backup: BTreeSet<usize>,
    recourse: usize,
}

impl CoverState {
    pub fn deterministic() -> Self {
        Self {
            selected: BTreeSet::new(),
            clocks: Vec::new(),
            sampled: BTreeSet::new(),
            backup: BTreeSet::new(),
            recourse: 0,
        }
    }

    /// Draws one clock per set from `Exp(ln(alpha·n))`. A nonpositive rate
    /// gives clocks at infinity, so nothing is ever sampled.
    pub fn randomized(num_sets: usize, alpha: f64, n: usize, seed: u64) -> Self {
        let rate = clock_rate(alpha, n);
        let clocks = (0..num_sets)
            .map(|i| match Exp::new(rate) {
                Ok(exp) if rate > 0.0 => exp.sample(&mut labeled_rng(seed, StreamLabel::SetCoverClocks, i as u64)),
                _ => f64::INFINITY,
            })
            .collect();
        Self {
            clocks,
            ..Self::deterministic()
        }
    }

    pub fn selected(&self) -> &BTreeSet<usize> {
        &self.selected
    }

    pub fn sampled(&self) -> &BTreeSet<usize> {
        &self.sampled
    }

    pub fn backup(&self) -> &BTreeSet<usize> {
        &self.backup
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clocks
    }

    pub fn recourse(&self) -> usize {
        self.recourse
    }

    /// Add sets with `x >= 1/f`, drop members with `x <= 1/(2f)`.
    pub fn round_det(&mut self, x: &[f64], f: usize, costs: &[f64]) -> CoverStep {
        let f = f.max(1) as f64;
        let mut changes = 0;
        for (i, &xi) in x.iter().enumerate() {
            if self.selected.contains(&i) {
                if 2.0 * f * xi <= 1.0 {
                    self.selected.remove(&i);
                    changes += 1;
                }
            } else if f * xi >= 1.0 {
                self.selected.insert(i);
                changes += 1;
            }
        }
        self.recourse += changes;
        self.step(changes, 0, costs)
    }

    /// `S = R ∪ B` with `R = {i : x_i >= clock_i}` and `B` the cheapest set of
    /// every live element `R` misses.
    pub fn round_rand<'a>(
        &mut self,
        x: &[f64],
        instance: &SetCoverInstance,
        live: impl IntoIterator<Item = &'a usize>,
    ) -> CoverStep {
        assert_eq!(self.clocks.len(), x.len(), "randomized state needs one clock per set");
        let sampled: BTreeSet<usize> = (0..x.len()).filter(|&i| x[i] >= self.clocks[i]).collect();
        let backup: BTreeSet<usize> = live
            .into_iter()
            .filter(|&&e| !instance.sets_containing(e).iter().any(|i| sampled.contains(i)))
            .filter_map(|&e| instance.cheapest_set(e))
            .collect();
        let selected: BTreeSet<usize> = sampled.union(&backup).copied().collect();
        let changes = selected.symmetric_difference(&self.selected).count();
        let sampled_changes = sampled.symmetric_difference(&self.sampled).count();
        self.selected = selected;
        self.sampled = sampled;
        self.backup = backup;
        self.recourse += changes;
        self.step(changes, sampled_changes, instance.costs())
    }

    fn step(&self, recourse: usize, sampled_recourse: usize, costs: &[f64]) -> CoverStep {
        CoverStep {
            recourse,
            sampled_recourse,
            size: self.selected.len(),
            cost: self.selected.iter().map(|&i| costs[i]).sum(),
        }
    }
}
