use std::collections::BTreeSet;

use crate::adapters::{pair_count, pair_index, BodySnapshot, Payload, UpdateEvent, UpdateOp};
use crate::error::{Error, Result};
use crate::graph::{max_bipartite_matching, two_coloring};
use crate::point::HalfspaceConstraint;

/// A dynamic bipartite graph on a fixed vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingState {
    n: usize,
    live: BTreeSet<(usize, usize)>,
}

impl MatchingState {
    pub fn new(n: usize) -> Self {
        Self { n, live: BTreeSet::new() }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        pair_count(self.n)
    }

    /// Live edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.live.iter().copied().collect()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.live.contains(&ordered(u, v))
    }

    pub fn apply(&mut self, event: &UpdateEvent) -> Result<()> {
        let Payload::Edge { u, v, .. } = event.payload else {
            return Err(Error::Rejected(format!("matching cannot apply {}", event.label())));
        };
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::Rejected(format!("edge {u}-{v} is not a pair of distinct vertices below {}", self.n)));
        }
        let e = ordered(u, v);
        match event.op {
            UpdateOp::Insert => {
                if self.live.contains(&e) {
                    return Err(Error::Rejected(format!("edge {u}-{v} is already present")));
                }
                let mut edges = self.edges();
                edges.push(e);
                if two_coloring(self.n, &edges).is_none() {
                    return Err(Error::Rejected(format!("edge {u}-{v} closes an odd cycle")));
                }
                self.live.insert(e);
            }
            UpdateOp::Delete => {
                if !self.live.remove(&e) {
                    return Err(Error::Rejected(format!("edge {u}-{v} is not present")));
                }
            }
        }
        Ok(())
    }

    /// A maximum matching of the live graph.
    pub fn maximum_matching(&self) -> Vec<(usize, usize)> {
        let edges = self.edges();
        let side = two_coloring(self.n, &edges).expect("live graph stays bipartite");
        max_bipartite_matching(self.n, &edges, &side)
    }
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Degree rows for every vertex, one covering row `sum x_e >= beta·Opt`, and
/// every non-edge frozen.
pub fn matching_body(state: &MatchingState, beta: f64) -> Result<BodySnapshot> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::BadParameter { name: "beta", value: beta });
    }
    let n = state.n;
    let mut snap = BodySnapshot::default();
    let mut incident = vec![Vec::new(); n];
    let mut live = vec![false; state.dim()];
    for &(u, v) in &state.live {
        let e = pair_index(n, u, v);
        live[e] = true;
        incident[u].push(e);
        incident[v].push(e);
    }
    let opt = state.maximum_matching().len();
    if opt > 0 {
        let coeff = 1.0 / (beta * opt as f64);
        let row = state.live.iter().map(|&(u, v)| (pair_index(n, u, v), coeff));
        snap.covering.push(HalfspaceConstraint::covering(row)?);
        snap.normalization = Some(opt as f64);
    }
    for edges in incident.into_iter().filter(|list| !list.is_empty()) {
        snap.packing.push(HalfspaceConstraint::packing(edges.into_iter().map(|e| (e, 1.0)))?);
    }
    snap.frozen = (0..state.dim()).filter(|&e| !live[e]).collect();
    Ok(snap)
}
