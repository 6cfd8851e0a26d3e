use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative point together with the per-coordinate movement weights.
///
/// Weights are shared between all points of one run and never change.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    values: Vec<f64>,
    weights: Arc<[f64]>,
}

impl FractionalPoint {
    /// The origin with unit weights.
    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![0.0; dim],
            weights: vec![1.0; dim].into(),
        }
    }

    pub fn zeros_weighted(weights: Vec<f64>) -> Result<Self> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::BadWeight { index, value });
            }
        }
        Ok(Self {
            values: vec![0.0; weights.len()],
            weights: weights.into(),
        })
    }

    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let mut p = Self::zeros_weighted(weights)?;
        if values.len() != p.values.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: p.values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::BadCoefficient { index, value });
            }
        }
        p.values = values;
        Ok(p)
    }

    /// Same weights, new coordinates. Callers guarantee nonnegativity.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        Self {
            values,
            weights: Arc::clone(&self.weights),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn same_weights(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }

    /// Multiply every coordinate by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.with_values(self.values.iter().map(|v| v * factor).collect())
    }

    /// Force the listed coordinates to zero.
    pub fn clamped_to_zero(&self, coords: &[usize]) -> Self {
        let mut values = self.values.clone();
        for &i in coords {
            if i < values.len() {
                values[i] = 0.0;
            }
        }
        self.with_values(values)
    }

    /// Grow the dimension, new coordinates at zero with the given weight.
    pub fn extended(&self, dim: usize, weight: f64) -> Self {
        if dim <= self.dim() {
            return self.clone();
        }
        let mut values = self.values.clone();
        values.resize(dim, 0.0);
        let mut weights = self.weights.to_vec();
        weights.resize(dim, weight);
        Self {
            values,
            weights: weights.into(),
        }
    }

    /// Weighted sum of values.
    pub fn weighted_mass(&self) -> f64 {
        self.values
            .iter()
            .zip(self.weights.iter())
            .map(|(x, w)| x * w)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// `<c, x> >= 1`
    Covering,
    /// `<p, x> <= 1`
    Packing,
}

impl ConstraintKind {
    pub fn tag(self) -> &'static str {
        match self {
            ConstraintKind::Covering => "C",
            ConstraintKind::Packing => "P",
        }
    }
}

/// A normalized covering or packing halfspace with right-hand side 1.
///
/// Coefficients are kept sorted by coordinate and strictly positive; zero
/// entries are dropped on construction and duplicate coordinates are summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceConstraint {
    kind: ConstraintKind,
    coeffs: Vec<(usize, f64)>,
}

impl HalfspaceConstraint {
    pub fn new(kind: ConstraintKind, coeffs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (index, value) in coeffs {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::BadCoefficient { index, value });
            }
            if value > 0.0 {
                entries.push((index, value));
            }
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        Ok(Self {
            kind,
            coeffs: merged,
        })
    }

    pub fn covering(coeffs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::new(ConstraintKind::Covering, coeffs)
    }

    pub fn packing(coeffs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::new(ConstraintKind::Packing, coeffs)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[(usize, f64)] {
        &self.coeffs
    }

    /// Number of nonzero coefficients.
    pub fn sparsity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> f64 {
        match self.coeffs.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(pos) => self.coeffs[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.last().map(|&(i, _)| i)
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, c)| c * x[i]).sum()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.max_index() {
            Some(index) if index >= dim => Err(Error::CoordinateOutOfRange { index, dim }),
            _ => Ok(()),
        }
    }
}
