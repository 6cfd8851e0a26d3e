//! Spanning tree rounding: sample edges against fixed uniform thresholds,
//! fall back to an exact MST when the sample is too expensive, and keep an
//! MST of the result with cycle swaps and cut repairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge_order, minimum_spanning_tree, WeightedEdge};
use crate::rng::{labeled_rng, StreamLabel};

/// Sampling rate `100·gamma·(alpha+1)·ln n / delta^2`.
pub fn sampling_rate(gamma: f64, alpha: f64, delta: f64, n: usize) -> f64 {
    100.0 * gamma * (alpha + 1.0) * (n as f64).ln() / (delta * delta)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SamplerStep {
    pub added: Vec<WeightedEdge>,
    pub removed: Vec<usize>,
    pub fallback_fired: bool,
    /// `|E_F^t ⊕ E_F^{t-1}|`.
    pub sample_changes: usize,
    /// `sum_e c_e x_e`.
    pub fractional_cost: f64,
}

#[derive(Debug, Clone)]
pub struct MstSampler {
    rate: f64,
    delta: f64,
    seed: u64,
    thresholds: BTreeMap<usize, f64>,
    sampled: BTreeSet<usize>,
    combined: BTreeSet<usize>,
}

impl MstSampler {
    pub fn new(n: usize, alpha: f64, delta: f64, gamma: f64, seed: u64) -> Self {
        Self {
            rate: sampling_rate(gamma, alpha, delta, n),
            delta,
            seed,
            thresholds: BTreeMap::new(),
            sampled: BTreeSet::new(),
            combined: BTreeSet::new(),
        }
    }

    pub fn probability(&self, x_e: f64) -> f64 {
        (self.rate * x_e).min(1.0)
    }

    /// The fixed uniform threshold of a potential edge.
    pub fn threshold(&mut self, id: usize) -> f64 {
        let seed = self.seed;
        *self
            .thresholds
            .entry(id)
            .or_insert_with(|| labeled_rng(seed, StreamLabel::MstThresholds, id as u64).gen::<f64>())
    }

    pub fn sampled(&self) -> &BTreeSet<usize> {
        &self.sampled
    }

    /// `E_F ∪ Q`, the graph the tree lives in.
    pub fn combined(&self) -> &BTreeSet<usize> {
        &self.combined
    }

    /// Resample against the live edges of a connected graph; `x` is indexed by
    /// edge id.
    pub fn step(&mut self, x: &[f64], n: usize, graph: &[WeightedEdge]) -> Result<SamplerStep> {
        let mut sampled_edges = Vec::new();
        let mut fractional_cost = 0.0;
        for e in graph {
            fractional_cost += e.cost * x[e.id];
            if self.probability(x[e.id]) > self.threshold(e.id) {
                sampled_edges.push(*e);
            }
        }
        let sampled: BTreeSet<usize> = sampled_edges.iter().map(|e| e.id).collect();
        let budget = (2.0 + self.delta) * fractional_cost;
        let fallback_fired = match minimum_spanning_tree(n, &sampled_edges) {
            Some((_, cost)) => cost > budget,
            None => true,
        };
        let mut combined = sampled.clone();
        if fallback_fired {
            let (tree, _) = minimum_spanning_tree(n, graph).ok_or(Error::Disconnected)?;
            combined.extend(tree);
        }
        let sample_changes = sampled.symmetric_difference(&self.sampled).count();
        let added = graph.iter().filter(|e| combined.contains(&e.id) && !self.combined.contains(&e.id)).copied().collect();
        let removed = self.combined.difference(&combined).copied().collect();
        self.sampled = sampled;
        self.combined = combined;
        Ok(SamplerStep {
            added,
            removed,
            fallback_fired,
            sample_changes,
            fractional_cost,
        })
    }
}

/// An MST of a changing graph, repaired one edge at a time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DynamicTree {
    n: usize,
    edges: BTreeMap<usize, WeightedEdge>,
    tree: BTreeSet<usize>,
    recourse: usize,
}

impl DynamicTree {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn tree(&self) -> &BTreeSet<usize> {
        &self.tree
    }

    pub fn graph(&self) -> Vec<WeightedEdge> {
        self.edges.values().copied().collect()
    }

    pub fn cost(&self) -> f64 {
        self.tree.iter().map(|id| self.edges[id].cost).sum()
    }

    pub fn recourse(&self) -> usize {
        self.recourse
    }

    pub fn is_spanning(&self) -> bool {
        self.tree.len() + 1 == self.n.max(1)
    }

    /// Insertions first, so the graph never loses connectivity midway.
    /// Returns the recourse of each unit update.
    pub fn apply(&mut self, step: &SamplerStep) -> Result<Vec<usize>> {
        let mut per_update = Vec::with_capacity(step.added.len() + step.removed.len());
        for e in &step.added {
            per_update.push(self.insert(*e));
        }
        for &id in &step.removed {
            per_update.push(self.delete(id)?);
        }
        Ok(per_update)
    }

    /// Cycle rule: the new edge replaces the most expensive edge on the tree
    /// path between its endpoints if it is cheaper.
    pub fn insert(&mut self, e: WeightedEdge) -> usize {
        self.edges.insert(e.id, e);
        let changes = match self.tree_path(e.u, e.v) {
            None => {
                self.tree.insert(e.id);
                1
            }
            Some(path) => {
                let worst = path
                    .into_iter()
                    .map(|id| self.edges[&id])
                    .max_by(edge_order)
                    .expect("endpoints are distinct");
                if edge_order(&e, &worst).is_lt() {
                    self.tree.remove(&worst.id);
                    self.tree.insert(e.id);
                    2
                } else {
                    0
                }
            }
        };
        self.recourse += changes;
        changes
    }

    /// Cut rule: a removed tree edge is replaced by the cheapest edge across
    /// the cut it leaves.
    pub fn delete(&mut self, id: usize) -> Result<usize> {
        let Some(e) = self.edges.remove(&id) else {
            return Ok(0);
        };
        if !self.tree.remove(&id) {
            return Ok(0);
        }
        let side = self.tree_component(e.u);
        let best = self
            .edges
            .values()
            .filter(|f| side[f.u] != side[f.v])
            .min_by(|a, b| edge_order(a, b))
            .copied();
        let Some(best) = best else {
            self.recourse += 1;
            return Err(Error::Disconnected);
        };
        self.tree.insert(best.id);
        self.recourse += 2;
        Ok(2)
    }

    fn tree_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for id in &self.tree {
            let e = self.edges[id];
            adj[e.u].push((e.v, e.id));
            adj[e.v].push((e.u, e.id));
        }
        adj
    }

    fn tree_component(&self, root: usize) -> Vec<bool> {
        let adj = self.tree_adjacency();
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Edge ids on the tree path from `a` to `b`, if connected.
    fn tree_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let adj = self.tree_adjacency();
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut path = Vec::new();
                let mut cur = b;
                while let Some((prev, id)) = via[cur] {
                    path.push(id);
                    cur = prev;
                }
                return Some(path);
            }
            for &(w, id) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some((v, id));
                    queue.push_back(w);
                }
            }
        }
        None
    }
}
