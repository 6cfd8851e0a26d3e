//! Compiling dynamic combinatorial problems into positive bodies.
//!
//! Every problem uses unit movement weights, so fractional recourse is plain
//! ℓ1 distance. Graph problems index coordinates by unordered vertex pairs.

mod loadbalance;
mod matching;
mod mst;
mod setcover;

pub use loadbalance::{loadbalance_body, makespan_optimum, LoadBalanceState, MakespanOptimum, EXACT_JOB_LIMIT};
pub use matching::{matching_body, MatchingState};
pub use mst::{mst_cut_snapshot, mst_separation, MstOracle, MstState, CUT_ENUMERATION_LIMIT};
pub use setcover::{setcover_body, SetCoverInstance, SetCoverState};

use serde::Serialize;

use crate::body::PositiveBody;
use crate::lp::TimeStep;
use crate::point::HalfspaceConstraint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    SetCover,
    Matching,
    Mst,
    LoadBalance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateOp {
    Insert,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Element(usize),
    Edge { u: usize, v: usize, cost: Option<f64> },
    Job { id: usize, loads: Vec<(usize, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpdateEvent {
    pub problem: ProblemKind,
    pub op: UpdateOp,
    pub payload: Payload,
}

impl UpdateEvent {
    /// Short human-readable form used in report rows.
    pub fn label(&self) -> String {
        let op = match self.op {
            UpdateOp::Insert => "insert",
            UpdateOp::Delete => "delete",
        };
        match &self.payload {
            Payload::Element(e) => format!("{op} {e}"),
            Payload::Edge { u, v, .. } => format!("{op} {u}-{v}"),
            Payload::Job { id, .. } => format!("{op} job {id}"),
        }
    }
}

/// The body `K_t` of one time step, right-hand sides normalized to 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BodySnapshot {
    pub covering: Vec<HalfspaceConstraint>,
    pub packing: Vec<HalfspaceConstraint>,
    /// Coordinates forced to 0.
    pub frozen: Vec<usize>,
    /// The optimum the rows were normalized by, when one was needed.
    pub normalization: Option<f64>,
}

impl BodySnapshot {
    pub fn constraints(&self) -> impl Iterator<Item = &HalfspaceConstraint> {
        self.covering.iter().chain(&self.packing)
    }

    pub fn body(&self) -> PositiveBody {
        PositiveBody::new(self.constraints().cloned().collect())
    }

    pub fn time_step(&self) -> TimeStep {
        TimeStep {
            constraints: self.constraints().cloned().collect(),
            frozen: self.frozen.clone(),
        }
    }
}

/// Number of unordered pairs over `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Coordinate of the pair `{u, v}`, `u != v`.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    debug_assert!(a != b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_of(n: usize, index: usize) -> (usize, usize) {
    let mut a = 0;
    let mut start = 0;
    while start + (n - a - 1) <= index {
        start += n - a - 1;
        a += 1;
    }
    (a, a + 1 + index - start)
}
