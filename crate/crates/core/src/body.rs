//! Chasing a whole positive body by feeding its violated halfspaces, one at a
//! time, to the single-constraint projections.

use crate::error::{Error, Result};
use crate::point::{ConstraintKind, FractionalPoint, HalfspaceConstraint};
use crate::projection::{project_covering, project_packing, ProjectionResult};

/// Default number of projections allowed inside one `chase_body` call.
pub const DEFAULT_ROUND_CAP: usize = 100_000;

/// Covering trigger margin. Keeps the scaled output strictly feasible after
/// floating-point rounding.
const COVER_MARGIN: f64 = 1e-12;

/// When does a constraint of the body count as violated?
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationBand {
    /// Covering rows with `<c, x>` below this are violated.
    pub cover_floor: f64,
    /// Packing rows with `<p, x>` above this are violated.
    pub pack_ceiling: f64,
}

impl ViolationBand {
    /// The band used while chasing with accuracy `delta`: violation by `delta / 10`.
    pub fn for_delta(delta: f64) -> Self {
        Self {
            cover_floor: (1.0 - delta / 10.0) * (1.0 + COVER_MARGIN),
            pack_ceiling: 1.0 + delta / 10.0,
        }
    }

    pub fn symmetric(threshold: f64) -> Self {
        Self {
            cover_floor: 1.0 - threshold,
            pack_ceiling: 1.0 + threshold,
        }
    }

    /// Amount by which `value` violates a row of the given kind, if at all.
    pub fn violation(&self, kind: ConstraintKind, value: f64) -> Option<f64> {
        match kind {
            ConstraintKind::Covering if value < self.cover_floor => Some(1.0 - value),
            ConstraintKind::Packing if value > self.pack_ceiling => Some(value - 1.0),
            _ => None,
        }
    }
}

/// Produces a violated constraint of the current body, or `None`.
pub trait SeparationOracle {
    fn separate(&mut self, x: &FractionalPoint, band: &ViolationBand) -> Result<Option<HalfspaceConstraint>>;
}

/// A body given by an explicit list of constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PositiveBody {
    pub constraints: Vec<HalfspaceConstraint>,
}

impl PositiveBody {
    pub fn new(constraints: Vec<HalfspaceConstraint>) -> Self {
        Self { constraints }
    }

    /// The most violated row; ties go to the earliest one.
    pub fn most_violated(&self, x: &[f64], band: &ViolationBand) -> Option<&HalfspaceConstraint> {
        let mut best: Option<(f64, &HalfspaceConstraint)> = None;
        for h in &self.constraints {
            if let Some(v) = band.violation(h.kind(), h.dot(x)) {
                if best.map_or(true, |(b, _)| v > b) {
                    best = Some((v, h));
                }
            }
        }
        best.map(|(_, h)| h)
    }
}

impl SeparationOracle for PositiveBody {
    fn separate(&mut self, x: &FractionalPoint, band: &ViolationBand) -> Result<Option<HalfspaceConstraint>> {
        Ok(self.most_violated(x.values(), band).cloned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaseStep {
    pub constraint: HalfspaceConstraint,
    pub result: ProjectionResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaseOutcome {
    /// The raw point; see [`scaled_output`] for the feasible version.
    pub point: FractionalPoint,
    pub trace: Vec<ChaseStep>,
}

/// Projection accuracy used inside [`chase_body`] for a given `delta`.
pub fn inner_eps(delta: f64) -> f64 {
    delta / 20.0
}

pub fn chase_body(
    x_prev: &FractionalPoint,
    oracle: &mut dyn SeparationOracle,
    delta: f64,
) -> Result<ChaseOutcome> {
    chase_body_capped(x_prev, oracle, delta, DEFAULT_ROUND_CAP)
}

pub fn chase_body_capped(
    x_prev: &FractionalPoint,
    oracle: &mut dyn SeparationOracle,
    delta: f64,
    round_cap: usize,
) -> Result<ChaseOutcome> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::BadParameter {
            name: "delta",
            value: delta,
        });
    }
    let eps = inner_eps(delta);
    let band = ViolationBand::for_delta(delta);
    let mut x = x_prev.clone();
    let mut trace = Vec::new();
    while let Some(h) = oracle.separate(&x, &band)? {
        if trace.len() >= round_cap {
            return Err(Error::SeparationCap {
                iterations: trace.len(),
                kind: h.kind(),
                value: h.dot(x.values()),
            });
        }
        let result = match h.kind() {
            ConstraintKind::Covering => project_covering(&x, &h, eps)?,
            ConstraintKind::Packing => project_packing(&x, &h, eps)?,
        };
        x = result.point.clone();
        trace.push(ChaseStep { constraint: h, result });
    }
    Ok(ChaseOutcome { point: x, trace })
}

/// Scale a chased point by `(1 - delta/10)^-1` so every covering row holds.
pub fn scaled_output(x: &FractionalPoint, delta: f64) -> FractionalPoint {
    x.scaled(1.0 / (1.0 - delta / 10.0))
}
