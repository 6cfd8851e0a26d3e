//! Small graph routines: union-find, Kruskal, Stoer-Wagner, Hopcroft-Karp.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Merge the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// An undirected edge with a stable id.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WeightedEdge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub cost: f64,
}

/// Total order used for every MST decision: cost, then id.
pub fn edge_order(a: &WeightedEdge, b: &WeightedEdge) -> std::cmp::Ordering {
    a.cost.total_cmp(&b.cost).then(a.id.cmp(&b.id))
}

/// Minimum spanning forest; returns edge ids in the forest and its cost.
pub fn kruskal(n: usize, edges: &[WeightedEdge]) -> (Vec<usize>, f64, usize) {
    let mut sorted = edges.to_vec();
    sorted.sort_by(edge_order);
    let mut dsu = Dsu::new(n);
    let mut chosen = Vec::new();
    let mut cost = 0.0;
    for e in sorted {
        if dsu.union(e.u, e.v) {
            chosen.push(e.id);
            cost += e.cost;
        }
    }
    chosen.sort_unstable();
    (chosen, cost, dsu.components())
}

/// Minimum spanning tree, or `None` when the edges do not connect all `n` vertices.
pub fn minimum_spanning_tree(n: usize, edges: &[WeightedEdge]) -> Option<(Vec<usize>, f64)> {
    let (ids, cost, components) = kruskal(n, edges);
    (components <= 1).then_some((ids, cost))
}

pub fn is_connected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let mut dsu = Dsu::new(n);
    for (u, v) in edges {
        dsu.union(u, v);
    }
    dsu.components() <= 1
}

/// Global minimum cut of a symmetric nonnegative weight matrix (`n >= 2`).
/// Returns the cut value and the indicator of one side.
pub fn stoer_wagner(weights: &[Vec<f64>]) -> (f64, Vec<bool>) {
    let n = weights.len();
    assert!(n >= 2, "a cut needs two vertices");
    let mut w: Vec<Vec<f64>> = weights.to_vec();
    // members[v] lists the original vertices merged into v.
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, Vec::new());
    while alive.len() > 1 {
        let mut added = vec![false; n];
        let mut key = vec![0.0; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let mut pick = None;
            for &v in &alive {
                if !added[v] && pick.map_or(true, |p: usize| key[v] > key[p]) {
                    pick = Some(v);
                }
            }
            let v = pick.expect("vertex left to add");
            added[v] = true;
            if step == alive.len() - 1 {
                if key[v] < best.0 {
                    best = (key[v], members[v].clone());
                }
                last = v;
            } else {
                prev = v;
            }
            for &u in &alive {
                if !added[u] {
                    key[u] += w[v][u];
                }
            }
        }
        // Merge `last` into `prev`.
        let moved = std::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &u in &alive {
            w[prev][u] += w[last][u];
            w[u][prev] = w[prev][u];
        }
        w[prev][prev] = 0.0;
        alive.retain(|&u| u != last);
    }
    let mut side = vec![false; n];
    for v in best.1 {
        side[v] = true;
    }
    (best.0, side)
}

/// Proper 2-coloring, or `None` if the graph has an odd cycle.
pub fn two_coloring(n: usize, edges: &[(usize, usize)]) -> Option<Vec<u8>> {
    let adj = adjacency(n, edges);
    let mut color = vec![u8::MAX; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if color[u] == u8::MAX {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if color[u] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Maximum matching of a bipartite graph (Hopcroft-Karp). `side[v]` is 0 for
/// left vertices. Returns matched pairs `(left, right)` sorted.
pub fn max_bipartite_matching(n: usize, edges: &[(usize, usize)], side: &[u8]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        let (l, r) = if side[a] == 0 { (a, b) } else { (b, a) };
        adj[l].push(r);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let left: Vec<usize> = (0..n).filter(|&v| side[v] == 0).collect();
    let mut mate = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for &l in &left {
            if mate[l] == usize::MAX {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate[r];
                if m == usize::MAX {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        for &l in &left {
            if mate[l] == usize::MAX {
                augment(l, &adj, &mut mate, &mut dist);
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = left
        .iter()
        .filter(|&&l| mate[l] != usize::MAX)
        .map(|&l| (l, mate[l]))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn augment(l: usize, adj: &[Vec<usize>], mate: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let m = mate[r];
        if m == usize::MAX || (dist[m] == dist[l] + 1 && augment(m, adj, mate, dist)) {
            mate[l] = r;
            mate[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}
