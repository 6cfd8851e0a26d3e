use std::collections::BTreeMap;

use serde::Serialize;

use crate::adapters::{BodySnapshot, Payload, UpdateEvent, UpdateOp};
use crate::error::{Error, Result};
use crate::point::HalfspaceConstraint;

/// Above this many live jobs the integral makespan is only upper-bounded.
pub const EXACT_JOB_LIMIT: usize = 12;

/// Unrelated-machine load balancing: job `j` may run on the machines in its
/// load map. Coordinate `(i, j)` is `j * machines + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadBalanceState {
    machines: usize,
    job_slots: usize,
    jobs: BTreeMap<usize, Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MakespanOptimum {
    pub value: f64,
    /// False when `value` is the list-scheduling upper bound.
    pub exact: bool,
}

impl LoadBalanceState {
    /// `job_slots` bounds every job id that may appear.
    pub fn new(machines: usize, job_slots: usize) -> Self {
        Self {
            machines,
            job_slots,
            jobs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.machines * self.job_slots
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn coordinate(&self, machine: usize, job: usize) -> usize {
        job * self.machines + machine
    }

    pub fn jobs(&self) -> &BTreeMap<usize, Vec<(usize, f64)>> {
        &self.jobs
    }

    pub fn apply(&mut self, event: &UpdateEvent) -> Result<()> {
        let Payload::Job { id, ref loads } = event.payload else {
            return Err(Error::Rejected(format!("load balancing cannot apply {}", event.label())));
        };
        if id >= self.job_slots {
            return Err(Error::Rejected(format!("job {id} exceeds the declared job range")));
        }
        match event.op {
            UpdateOp::Insert => {
                if loads.is_empty() {
                    return Err(Error::Rejected(format!("job {id} has no machine")));
                }
                let mut map = BTreeMap::new();
                for &(i, p) in loads {
                    if i >= self.machines {
                        return Err(Error::Rejected(format!("job {id} names machine {i} of {}", self.machines)));
                    }
                    if !(p.is_finite() && p > 0.0) {
                        return Err(Error::Rejected(format!("job {id} has load {p} on machine {i}")));
                    }
                    if map.insert(i, p).is_some() {
                        return Err(Error::Rejected(format!("job {id} lists machine {i} twice")));
                    }
                }
                if self.jobs.contains_key(&id) {
                    return Err(Error::Rejected(format!("job {id} is already present")));
                }
                self.jobs.insert(id, map.into_iter().collect());
            }
            UpdateOp::Delete => {
                if self.jobs.remove(&id).is_none() {
                    return Err(Error::Rejected(format!("job {id} is not present")));
                }
            }
        }
        Ok(())
    }
}

/// Integral makespan optimum: branch and bound up to [`EXACT_JOB_LIMIT`] jobs,
/// greedy list scheduling otherwise.
pub fn makespan_optimum(state: &LoadBalanceState) -> MakespanOptimum {
    let mut jobs: Vec<&Vec<(usize, f64)>> = state.jobs.values().collect();
    if jobs.is_empty() {
        return MakespanOptimum { value: 0.0, exact: true };
    }
    // Big jobs first makes both greedy and pruning better.
    let min_load = |j: &Vec<(usize, f64)>| j.iter().map(|&(_, p)| p).fold(f64::INFINITY, f64::min);
    jobs.sort_by(|a, b| min_load(b).total_cmp(&min_load(a)));

    let mut loads = vec![0.0; state.machines];
    for job in &jobs {
        let &(i, p) = job
            .iter()
            .min_by(|a, b| (loads[a.0] + a.1).total_cmp(&(loads[b.0] + b.1)))
            .expect("jobs have machines");
        loads[i] += p;
    }
    let greedy = loads.iter().copied().fold(0.0, f64::max);
    if jobs.len() > EXACT_JOB_LIMIT {
        return MakespanOptimum { value: greedy, exact: false };
    }
    let mut best = greedy;
    let mut loads = vec![0.0; state.machines];
    branch(&jobs, 0, &mut loads, 0.0, &mut best);
    MakespanOptimum { value: best, exact: true }
}

fn branch(jobs: &[&Vec<(usize, f64)>], k: usize, loads: &mut [f64], current: f64, best: &mut f64) {
    if k == jobs.len() {
        *best = best.min(current);
        return;
    }
    for &(i, p) in jobs[k] {
        let next = loads[i] + p;
        if next >= *best {
            continue;
        }
        loads[i] = next;
        branch(jobs, k + 1, loads, current.max(next), best);
        loads[i] -= p;
    }
}

/// Assignment rows per job, load rows per machine normalized by
/// `beta·opt`, and every pair that cannot be used frozen.
pub fn loadbalance_body(state: &LoadBalanceState, beta: f64) -> Result<BodySnapshot> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::BadParameter { name: "beta", value: beta });
    }
    let mut snap = BodySnapshot::default();
    let mut usable = vec![false; state.dim()];
    let opt = makespan_optimum(state);
    let mut machine_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); state.machines];
    for (&j, loads) in &state.jobs {
        let mut row = Vec::new();
        for &(i, p) in loads.iter().filter(|&&(_, p)| p <= opt.value) {
            let c = state.coordinate(i, j);
            usable[c] = true;
            row.push((c, 1.0));
            machine_rows[i].push((c, p / (beta * opt.value)));
        }
        snap.covering.push(HalfspaceConstraint::covering(row)?);
    }
    for row in machine_rows.into_iter().filter(|r| !r.is_empty()) {
        snap.packing.push(HalfspaceConstraint::packing(row)?);
    }
    if !state.jobs.is_empty() {
        snap.normalization = Some(opt.value);
    }
    snap.frozen = (0..state.dim()).filter(|&c| !usable[c]).collect();
    Ok(snap)
}
