//! Matching rounding: a threshold-sampled stabilizer `H`, and a matching in
//! `H` kept free of short augmenting paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::adapters::{pair_count, pair_index, pair_of};
use crate::graph::{max_bipartite_matching, two_coloring};
use crate::rng::{labeled_rng, StreamLabel};

/// Copies per potential edge, `ceil(100(alpha+4) ln n / delta^2)`, at least 1.
pub fn kappa(alpha: f64, delta: f64, n: usize) -> usize {
    let k = (100.0 * (alpha + 4.0) * (n as f64).ln() / (delta * delta)).ceil();
    (k as usize).max(1)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StabilizerStep {
    /// Pair coordinates entering `H`.
    pub added: Vec<usize>,
    /// Pair coordinates leaving `H`.
    pub removed: Vec<usize>,
    /// Some vertex had more than `(1+delta)·kappa` copies.
    pub case_b: bool,
    /// `|E_F^t ⊕ E_F^{t-1}|` counted in copies.
    pub copy_changes: usize,
}

#[derive(Debug, Clone)]
pub struct Stabilizer {
    n: usize,
    kappa: usize,
    delta: f64,
    seed: u64,
    /// Sorted thresholds of each potential edge, drawn on first use.
    thresholds: BTreeMap<usize, Vec<f64>>,
    copies: Vec<usize>,
    h: BTreeSet<usize>,
    case_b_steps: usize,
}

impl Stabilizer {
    pub fn new(n: usize, alpha: f64, delta: f64, seed: u64) -> Self {
        Self {
            n,
            kappa: kappa(alpha, delta, n),
            delta,
            seed,
            thresholds: BTreeMap::new(),
            copies: vec![0; pair_count(n)],
            h: BTreeSet::new(),
            case_b_steps: 0,
        }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Value `1/((1+delta)·kappa)` carried by each copy.
    pub fn copy_value(&self) -> f64 {
        1.0 / ((1.0 + self.delta) * self.kappa as f64)
    }

    /// `Obj(z)`: total value of the copies present.
    pub fn z_objective(&self) -> f64 {
        self.copies.iter().sum::<usize>() as f64 * self.copy_value()
    }

    pub fn copies(&self, pair: usize) -> usize {
        self.copies[pair]
    }

    pub fn h_edges(&self) -> &BTreeSet<usize> {
        &self.h
    }

    pub fn case_b_steps(&self) -> usize {
        self.case_b_steps
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.n];
        for (e, &c) in self.copies.iter().enumerate().filter(|(_, &c)| c > 0) {
            let (u, v) = pair_of(self.n, e);
            deg[u] += c;
            deg[v] += c;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    fn thresholds(&mut self, pair: usize) -> &[f64] {
        let (seed, kappa) = (self.seed, self.kappa);
        self.thresholds.entry(pair).or_insert_with(|| {
            let mut rng = labeled_rng(seed, StreamLabel::MatchingThresholds, pair as u64);
            let mut t: Vec<f64> = (0..kappa).map(|_| rng.gen::<f64>()).collect();
            t.sort_by(f64::total_cmp);
            t
        })
    }

    /// Recompute `F` and `H` from the raw fractional matching `x` on the live
    /// edges `graph`.
    pub fn step(&mut self, x: &[f64], graph: &[(usize, usize)]) -> StabilizerStep {
        let mut copies = vec![0; self.copies.len()];
        for &(u, v) in graph {
            let e = pair_index(self.n, u, v);
            if x[e] > 0.0 {
                let xe = x[e];
                copies[e] = self.thresholds(e).partition_point(|&chi| chi < xe);
            }
        }
        let copy_changes = copies.iter().zip(&self.copies).map(|(&a, &b)| a.abs_diff(b)).sum();
        self.copies = copies;

        let case_b = self.max_degree() as f64 > (1.0 + self.delta) * self.kappa as f64;
        let mut h: BTreeSet<usize> = (0..self.copies.len()).filter(|&e| self.copies[e] > 0).collect();
        if case_b {
            self.case_b_steps += 1;
            let side = two_coloring(self.n, graph).expect("matching graphs are bipartite");
            for (u, v) in max_bipartite_matching(self.n, graph, &side) {
                h.insert(pair_index(self.n, u, v));
            }
        }
        let added = h.difference(&self.h).copied().collect();
        let removed = self.h.difference(&h).copied().collect();
        self.h = h;
        StabilizerStep {
            added,
            removed,
            case_b,
            copy_changes,
        }
    }
}

/// A matching with no augmenting path of length at most `2k - 1`,
/// `k = ceil(1/delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaintainedMatching {
    n: usize,
    k: usize,
    adj: Vec<BTreeSet<usize>>,
    mate: Vec<Option<usize>>,
    recourse: usize,
}

impl MaintainedMatching {
    pub fn new(n: usize, delta: f64) -> Self {
        Self {
            n,
            k: (1.0 / delta).ceil().max(1.0) as usize,
            adj: vec![BTreeSet::new(); n],
            mate: vec![None; n],
            recourse: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Longest augmenting path that is not allowed to exist.
    pub fn max_path_len(&self) -> usize {
        2 * self.k - 1
    }

    pub fn recourse(&self) -> usize {
        self.recourse
    }

    pub fn size(&self) -> usize {
        self.mate.iter().filter(|m| m.is_some()).count() / 2
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    /// Matched pairs `(u, v)` with `u < v`.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .filter_map(|u| self.mate[u].filter(|&v| u < v).map(|v| (u, v)))
            .collect()
    }

    /// Edges of `H` as `(u, v)` with `u < v`.
    pub fn graph(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    /// Apply a stabilizer delta one edge at a time; returns the recourse of
    /// each unit update, removals first.
    pub fn apply(&mut self, step: &StabilizerStep) -> Vec<usize> {
        let mut per_update = Vec::with_capacity(step.added.len() + step.removed.len());
        for &e in &step.removed {
            let (u, v) = pair_of(self.n, e);
            per_update.push(self.delete_edge(u, v));
        }
        for &e in &step.added {
            let (u, v) = pair_of(self.n, e);
            per_update.push(self.insert_edge(u, v));
        }
        per_update
    }

    pub fn insert_edge(&mut self, u: usize, v: usize) -> usize {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.restore()
    }

    pub fn delete_edge(&mut self, u: usize, v: usize) -> usize {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        let mut changes = 0;
        if self.mate[u] == Some(v) {
            self.mate[u] = None;
            self.mate[v] = None;
            changes = 1;
            self.recourse += 1;
        }
        changes + self.restore()
    }

    /// Augment along short paths until none is left.
    fn restore(&mut self) -> usize {
        let mut changes = 0;
        while let Some(path) = self.find_augmenting_path(self.max_path_len()) {
            for pair in path.chunks(2) {
                self.mate[pair[0]] = Some(pair[1]);
                self.mate[pair[1]] = Some(pair[0]);
            }
            changes += path.len() - 1;
        }
        self.recourse += changes;
        changes
    }

    /// Shortest augmenting path with at most `max_len` edges starting at the
    /// lowest free vertex that has one, as a vertex sequence.
    pub fn find_augmenting_path(&self, max_len: usize) -> Option<Vec<usize>> {
        for s in (0..self.n).filter(|&s| self.mate[s].is_none() && !self.adj[s].is_empty()) {
            let mut parent = vec![usize::MAX; self.n];
            let mut depth = vec![usize::MAX; self.n];
            depth[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for &b in &self.adj[a] {
                    if depth[b] != usize::MAX {
                        continue;
                    }
                    let d = depth[a] + 1;
                    match self.mate[b] {
                        None if d <= max_len => {
                            let mut path = vec![b, a];
                            let mut v = a;
                            while v != s {
                                v = parent[v];
                                path.push(v);
                            }
                            path.reverse();
                            return Some(path);
                        }
                        None => {}
                        Some(m) if d + 2 <= max_len => {
                            depth[b] = d;
                            depth[m] = d + 1;
                            parent[b] = a;
                            parent[m] = b;
                            queue.push_back(m);
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        None
    }
}
