//! Random instance generators shared by the criteria.

use posbody::adapters::{Payload, ProblemKind, UpdateEvent, UpdateOp};
use posbody::adapters::SetCoverInstance;
use posbody::stream::Stream;
use posbody::{ConstraintKind, HalfspaceConstraint};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

/// `k` distinct coordinates out of `0..n`, sorted.
pub fn support(rng: &mut Rng8, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(k);
    all.sort_unstable();
    all
}

/// Mixed stream for the certificate criteria: coefficients in `[1, 8]`.
pub fn mixed_stream(rng: &mut Rng8) -> Stream {
    let n = rng.gen_range(1..=8);
    let t_len = rng.gen_range(1..=50);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
    let constraints = (0..t_len)
        .map(|_| {
            let kind = if rng.gen_bool(0.6) {
                ConstraintKind::Covering
            } else {
                ConstraintKind::Packing
            };
            let k = rng.gen_range(1..=n.min(4));
            let coeffs: Vec<(usize, f64)> = support(rng, n, k)
                .into_iter()
                .map(|i| (i, rng.gen_range(1.0..=8.0)))
                .collect();
            HalfspaceConstraint::new(kind, coeffs).unwrap()
        })
        .collect();
    Stream { constraints, weights }
}

/// Tiny stream for the grid search: `n <= 3`, `T <= 4`, coefficients on a
/// quarter grid in `[1, 2]`.
pub fn tiny_stream(rng: &mut Rng8) -> Stream {
    let n = rng.gen_range(1..=3);
    let t_len = rng.gen_range(1..=4);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=4) as f64 * 0.5).collect();
    let constraints = (0..t_len)
        .map(|_| {
            let kind = if rng.gen_bool(0.6) {
                ConstraintKind::Covering
            } else {
                ConstraintKind::Packing
            };
            let k = rng.gen_range(1..=n);
            let coeffs: Vec<(usize, f64)> = support(rng, n, k)
                .into_iter()
                .map(|i| (i, rng.gen_range(4..=8) as f64 / 4.0))
                .collect();
            HalfspaceConstraint::new(kind, coeffs).unwrap()
        })
        .collect();
    Stream { constraints, weights }
}

pub fn element_event(op: UpdateOp, e: usize) -> UpdateEvent {
    UpdateEvent {
        problem: ProblemKind::SetCover,
        op,
        payload: Payload::Element(e),
    }
}

pub fn edge_event(problem: ProblemKind, op: UpdateOp, u: usize, v: usize, cost: Option<f64>) -> UpdateEvent {
    UpdateEvent {
        problem,
        op,
        payload: Payload::Edge { u, v, cost },
    }
}

/// Set system with at most `m` sets, `n` elements, each element in `1..=f` sets.
pub fn setcover_instance(rng: &mut Rng8) -> (SetCoverInstance, Vec<UpdateEvent>) {
    let m = rng.gen_range(3..=20);
    let n = rng.gen_range(3..=30);
    let f = rng.gen_range(1..=4usize);
    let mut sets: Vec<(f64, Vec<usize>)> = (0..m)
        .map(|_| ((rng.gen_range(100..=1000) as f64) / 100.0, Vec::new()))
        .collect();
    for e in 0..n {
        let k = rng.gen_range(1..=f.min(m));
        for s in support(rng, m, k) {
            sets[s].1.push(e);
        }
    }
    let instance = SetCoverInstance::new(sets).unwrap();
    let t_len = rng.gen_range(1..=100);
    let mut live = vec![false; n];
    let mut events = Vec::with_capacity(t_len);
    for _ in 0..t_len {
        let present: Vec<usize> = (0..n).filter(|&e| live[e]).collect();
        let absent: Vec<usize> = (0..n).filter(|&e| !live[e]).collect();
        let insert = present.is_empty() || (!absent.is_empty() && rng.gen_bool(0.65));
        let e = *if insert { &absent } else { &present }.choose(rng).unwrap();
        live[e] = insert;
        events.push(element_event(if insert { UpdateOp::Insert } else { UpdateOp::Delete }, e));
    }
    (instance, events)
}

/// Bipartite insert/delete sequence on at most 16 vertices.
pub fn bipartite_events(rng: &mut Rng8) -> (usize, Vec<UpdateEvent>) {
    let n = rng.gen_range(4..=16);
    let side: Vec<bool> = (0..n).map(|v| v % 2 == 0 || rng.gen_bool(0.2)).collect();
    let cross: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| side[u] != side[v])
        .collect();
    let t_len = rng.gen_range(5..=40);
    let mut live = vec![false; cross.len()];
    let mut events = Vec::new();
    for _ in 0..t_len {
        let present: Vec<usize> = (0..cross.len()).filter(|&e| live[e]).collect();
        let absent: Vec<usize> = (0..cross.len()).filter(|&e| !live[e]).collect();
        let insert = present.is_empty() || (!absent.is_empty() && rng.gen_bool(0.7));
        let e = *if insert { &absent } else { &present }.choose(rng).unwrap();
        live[e] = insert;
        let (u, v) = cross[e];
        let op = if insert { UpdateOp::Insert } else { UpdateOp::Delete };
        events.push(edge_event(ProblemKind::Matching, op, u, v, None));
    }
    (n, events)
}

fn connected(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b, _) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Connected initial graph plus updates that keep it connected.
pub fn mst_instance(rng: &mut Rng8) -> (usize, Vec<(usize, usize, f64)>, Vec<UpdateEvent>) {
    let n = rng.gen_range(3..=9);
    let cost = |rng: &mut Rng8| rng.gen_range(100..=1000) as f64 / 100.0;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, cost(rng)));
    }
    let has = |edges: &[(usize, usize, f64)], u: usize, v: usize| {
        edges.iter().any(|&(a, b, _)| (a, b) == (u.min(v), u.max(v)) || (a, b) == (u.max(v), u.min(v)))
    };
    for _ in 0..rng.gen_range(0..=n) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !has(&edges, u, v) {
            edges.push((u.min(v), u.max(v), cost(rng)));
        }
    }
    let initial = edges.clone();
    let mut events = Vec::new();
    for _ in 0..rng.gen_range(3..=30) {
        if rng.gen_bool(0.5) {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && !has(&edges, u, v) {
                let c = cost(rng);
                edges.push((u.min(v), u.max(v), c));
                events.push(edge_event(ProblemKind::Mst, UpdateOp::Insert, u, v, Some(c)));
            }
        } else {
            let removable: Vec<usize> = (0..edges.len())
                .filter(|&k| {
                    let mut rest = edges.clone();
                    rest.remove(k);
                    connected(n, &rest)
                })
                .collect();
            if let Some(&k) = removable.choose(rng) {
                let (u, v, _) = edges.remove(k);
                events.push(edge_event(ProblemKind::Mst, UpdateOp::Delete, u, v, None));
            }
        }
    }
    (n, initial, events)
}
