use std::collections::BTreeMap;

use crate::adapters::{pair_count, pair_index, BodySnapshot, Payload, UpdateEvent, UpdateOp};
use crate::body::{SeparationOracle, ViolationBand};
use crate::error::{Error, Result};
use crate::graph::{is_connected, minimum_spanning_tree, stoer_wagner, WeightedEdge};
use crate::point::{FractionalPoint, HalfspaceConstraint};

/// Largest vertex count for which every cut row is written out explicitly.
pub const CUT_ENUMERATION_LIMIT: usize = 8;

/// A dynamic connected graph with positive edge costs.
#[derive(Debug, Clone, PartialEq)]
pub struct MstState {
    n: usize,
    live: BTreeMap<(usize, usize), f64>,
}

impl MstState {
    pub fn new(n: usize) -> Self {
        Self { n, live: BTreeMap::new() }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        pair_count(self.n)
    }

    /// Live edges with their pair coordinate as id.
    pub fn edges(&self) -> Vec<WeightedEdge> {
        self.live
            .iter()
            .map(|(&(u, v), &cost)| WeightedEdge {
                id: pair_index(self.n, u, v),
                u,
                v,
                cost,
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.n, self.live.keys().copied())
    }

    /// Cost of a minimum spanning tree of the live graph.
    pub fn mst_cost(&self) -> Result<f64> {
        minimum_spanning_tree(self.n, &self.edges())
            .map(|(_, cost)| cost)
            .ok_or(Error::Disconnected)
    }

    /// Adds an edge without any connectivity requirement; used to build the
    /// initial graph.
    pub fn add_initial_edge(&mut self, u: usize, v: usize, cost: f64) -> Result<()> {
        let e = self.check_pair(u, v)?;
        if !(cost.is_finite() && cost > 0.0) {
            return Err(Error::Rejected(format!("edge {u}-{v} has cost {cost}")));
        }
        if self.live.insert(e, cost).is_some() {
            return Err(Error::Rejected(format!("edge {u}-{v} is already present")));
        }
        Ok(())
    }

    pub fn apply(&mut self, event: &UpdateEvent) -> Result<()> {
        let Payload::Edge { u, v, cost } = event.payload else {
            return Err(Error::Rejected(format!("mst cannot apply {}", event.label())));
        };
        match event.op {
            UpdateOp::Insert => {
                let cost = cost.ok_or_else(|| Error::Rejected(format!("edge {u}-{v} needs a cost")))?;
                self.add_initial_edge(u, v, cost)
            }
            UpdateOp::Delete => {
                let e = self.check_pair(u, v)?;
                let Some(cost) = self.live.remove(&e) else {
                    return Err(Error::Rejected(format!("edge {u}-{v} is not present")));
                };
                if !self.is_connected() {
                    self.live.insert(e, cost);
                    return Err(Error::Disconnected);
                }
                Ok(())
            }
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(usize, usize)> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::Rejected(format!("edge {u}-{v} is not a pair of distinct vertices below {}", self.n)));
        }
        Ok(if u < v { (u, v) } else { (v, u) })
    }

    fn budget_row(&self, beta: f64, opt: f64) -> Result<HalfspaceConstraint> {
        HalfspaceConstraint::packing(self.edges().into_iter().map(|e| (e.id, e.cost / (beta * opt))))
    }
}

/// Most violated cut row from a global minimum cut of `x` on the live edges;
/// failing that, the budget row `c·x <= beta·Opt` if it is violated.
pub fn mst_separation(
    state: &MstState,
    x: &FractionalPoint,
    beta: f64,
    band: &ViolationBand,
) -> Result<Option<HalfspaceConstraint>> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::BadParameter { name: "beta", value: beta });
    }
    let n = state.n;
    if !state.is_connected() {
        return Err(Error::Disconnected);
    }
    if n < 2 {
        return Ok(None);
    }
    let edges = state.edges();
    let mut w = vec![vec![0.0; n]; n];
    for e in &edges {
        w[e.u][e.v] = x.get(e.id);
        w[e.v][e.u] = x.get(e.id);
    }
    let (value, side) = stoer_wagner(&w);
    if band.violation(crate::point::ConstraintKind::Covering, value).is_some() {
        let row = edges.iter().filter(|e| side[e.u] != side[e.v]).map(|e| (e.id, 1.0));
        return HalfspaceConstraint::covering(row).map(Some);
    }
    let opt = state.mst_cost()?;
    let budget = state.budget_row(beta, opt)?;
    let value = budget.dot(x.values());
    Ok(band
        .violation(crate::point::ConstraintKind::Packing, value)
        .map(|_| budget))
}

/// Separation oracle over the current graph, for `chase_body`.
#[derive(Debug, Clone, Copy)]
pub struct MstOracle<'a> {
    pub state: &'a MstState,
    pub beta: f64,
}

impl SeparationOracle for MstOracle<'_> {
    fn separate(&mut self, x: &FractionalPoint, band: &ViolationBand) -> Result<Option<HalfspaceConstraint>> {
        mst_separation(self.state, x, self.beta, band)
    }
}

/// The full body with every cut written out; only for small vertex counts.
pub fn mst_cut_snapshot(state: &MstState, beta: f64) -> Result<BodySnapshot> {
    let n = state.n;
    if n > CUT_ENUMERATION_LIMIT {
        return Err(Error::SizeCap {
            size: n,
            cap: CUT_ENUMERATION_LIMIT,
        });
    }
    let opt = state.mst_cost()?;
    let edges = state.edges();
    let mut snap = BodySnapshot::default();
    // Vertex n-1 is always outside S, so each cut is listed once.
    for mask in 1u32..(1u32 << (n.max(1) - 1)) {
        let inside = |v: usize| v < n - 1 && mask >> v & 1 == 1;
        let row = edges.iter().filter(|e| inside(e.u) != inside(e.v)).map(|e| (e.id, 1.0));
        snap.covering.push(HalfspaceConstraint::covering(row)?);
    }
    if opt > 0.0 {
        snap.packing.push(state.budget_row(beta, opt)?);
        snap.normalization = Some(opt);
    }
    let mut live = vec![false; state.dim()];
    for e in &edges {
        live[e.id] = true;
    }
    snap.frozen = (0..state.dim()).filter(|&e| !live[e]).collect();
    Ok(snap)
}
