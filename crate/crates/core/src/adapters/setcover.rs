use std::collections::{BTreeMap, BTreeSet};

use crate::adapters::{BodySnapshot, Payload, UpdateEvent, UpdateOp};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Sense};
use crate::point::HalfspaceConstraint;

/// A fixed family of weighted sets over element ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SetCoverInstance {
    costs: Vec<f64>,
    /// For each element, the sets containing it, ascending.
    containing: BTreeMap<usize, Vec<usize>>,
}

impl SetCoverInstance {
    pub fn new(sets: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let mut costs = Vec::with_capacity(sets.len());
        let mut containing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, (cost, elems)) in sets.into_iter().enumerate() {
            if !(cost.is_finite() && cost > 0.0) {
                return Err(Error::BadWeight { index: i, value: cost });
            }
            costs.push(cost);
            for e in elems {
                let list = containing.entry(e).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        Ok(Self { costs, containing })
    }

    pub fn num_sets(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Number of distinct elements appearing in some set.
    pub fn num_elements(&self) -> usize {
        self.containing.len()
    }

    pub fn sets_containing(&self, element: usize) -> &[usize] {
        self.containing.get(&element).map_or(&[], Vec::as_slice)
    }

    /// Largest number of sets sharing one element.
    pub fn frequency(&self) -> usize {
        self.containing.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Cheapest set containing `element`, ties to the lowest index.
    pub fn cheapest_set(&self, element: usize) -> Option<usize> {
        self.sets_containing(element)
            .iter()
            .copied()
            .min_by(|&a, &b| self.costs[a].total_cmp(&self.costs[b]).then(a.cmp(&b)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetCoverState {
    instance: SetCoverInstance,
    live: BTreeSet<usize>,
}

impl SetCoverState {
    pub fn new(instance: SetCoverInstance) -> Self {
        Self {
            instance,
            live: BTreeSet::new(),
        }
    }

    pub fn instance(&self) -> &SetCoverInstance {
        &self.instance
    }

    pub fn live(&self) -> &BTreeSet<usize> {
        &self.live
    }

    pub fn dim(&self) -> usize {
        self.instance.num_sets()
    }

    pub fn apply(&mut self, event: &UpdateEvent) -> Result<()> {
        let Payload::Element(e) = event.payload else {
            return Err(Error::Rejected(format!("set cover cannot apply {}", event.label())));
        };
        match event.op {
            UpdateOp::Insert => {
                if self.instance.sets_containing(e).is_empty() {
                    return Err(Error::Rejected(format!("element {e} is in no set")));
                }
                if !self.live.insert(e) {
                    return Err(Error::Rejected(format!("element {e} is already present")));
                }
            }
            UpdateOp::Delete => {
                if !self.live.remove(&e) {
                    return Err(Error::Rejected(format!("element {e} is not present")));
                }
            }
        }
        Ok(())
    }

    /// Exact optimum of the fractional set cover LP over the live elements.
    pub fn fractional_optimum(&self) -> Result<f64> {
        if self.live.is_empty() {
            return Ok(0.0);
        }
        let mut lp = LinearProgram::new(self.dim(), self.instance.costs.clone());
        for &e in &self.live {
            let row = self.instance.sets_containing(e).iter().map(|&i| (i, 1.0)).collect();
            lp.add_row(row, Sense::Ge, 1.0);
        }
        let sol = lp.solve()?;
        lp.verify_optimality(&sol, crate::lp::OPTIMALITY_TOL)?;
        Ok(sol.value)
    }

    /// Does `selected` cover every live element?
    pub fn is_cover(&self, selected: &BTreeSet<usize>) -> bool {
        self.live
            .iter()
            .all(|&e| self.instance.sets_containing(e).iter().any(|i| selected.contains(i)))
    }
}

/// One covering row per live element and the budget row `c·x <= beta·opt`.
pub fn setcover_body(state: &SetCoverState, beta: f64) -> Result<BodySnapshot> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::BadParameter { name: "beta", value: beta });
    }
    let mut snap = BodySnapshot::default();
    for &e in &state.live {
        let row = state.instance.sets_containing(e).iter().map(|&i| (i, 1.0));
        snap.covering.push(HalfspaceConstraint::covering(row)?);
    }
    let opt = state.fractional_optimum()?;
    if opt > 0.0 {
        let scale = beta * opt;
        let row = state.instance.costs.iter().enumerate().map(|(i, &c)| (i, c / scale));
        snap.packing.push(HalfspaceConstraint::packing(row)?);
        snap.normalization = Some(opt);
    }
    Ok(snap)
}
