use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::FractionalPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerStep {
    /// `sum_i w_i (x_new,i - x_prev,i)_+`
    pub upward: f64,
    /// `sum_i w_i |x_new,i - x_prev,i|`
    pub l1: f64,
}

/// Weighted movement of a trajectory, step by step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecourseLedger {
    steps: Vec<LedgerStep>,
    upward_total: f64,
    l1_total: f64,
}

impl RecourseLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_step(&mut self, x_prev: &FractionalPoint, x_new: &FractionalPoint) -> Result<LedgerStep> {
        if x_prev.dim() != x_new.dim() {
            return Err(Error::DimensionMismatch {
                left: x_prev.dim(),
                right: x_new.dim(),
            });
        }
        if !x_prev.same_weights(x_new) {
            return Err(Error::Rejected("points carry different weights".into()));
        }
        let step = movement(x_prev.values(), x_new.values(), x_prev.weights());
        self.push(step);
        Ok(step)
    }

    pub(crate) fn push(&mut self, step: LedgerStep) {
        self.upward_total += step.upward;
        self.l1_total += step.l1;
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[LedgerStep] {
        &self.steps
    }

    pub fn upward_total(&self) -> f64 {
        self.upward_total
    }

    pub fn l1_total(&self) -> f64 {
        self.l1_total
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn movement(prev: &[f64], next: &[f64], weights: &[f64]) -> LedgerStep {
    let mut upward = 0.0;
    let mut l1 = 0.0;
    for ((a, b), w) in prev.iter().zip(next).zip(weights) {
        let diff = b - a;
        if diff > 0.0 {
            upward += w * diff;
        }
        l1 += w * diff.abs();
    }
    LedgerStep { upward, l1 }
}

/// Unweighted `||next - prev||_1`.
pub fn l1_distance(prev: &[f64], next: &[f64]) -> f64 {
    prev.iter().zip(next).map(|(a, b)| (b - a).abs()).sum()
}
