use crate::adapters::{
    loadbalance_body, matching_body, mst_cut_snapshot, pair_index, setcover_body, BodySnapshot, LoadBalanceState,
    MatchingState, MstOracle, MstState, ProblemKind, SetCoverState, UpdateEvent,
};
use crate::body::{chase_body_capped, scaled_output, SeparationOracle};
use crate::error::{Error, Result};
use crate::graph::{max_bipartite_matching, two_coloring};
use crate::harness::chase::offline_into;
use crate::harness::{at_update, Manifest, RoundingMode, RoundingRow, RunConfig, RunReport, StepRow, Summary};
use crate::ledger::movement;
use crate::lp::{solve_recourse_steps, TimeStep};
use crate::point::FractionalPoint;
use crate::rounding::{CoverState, DynamicTree, MaintainedMatching, MstSampler, Stabilizer};
use crate::updates::ProblemInstance;

enum Engine {
    SetCover {
        state: SetCoverState,
        cover: CoverState,
        f: usize,
        mode: RoundingMode,
    },
    Matching {
        state: MatchingState,
        stabilizer: Stabilizer,
        matching: MaintainedMatching,
    },
    Mst {
        state: MstState,
        sampler: MstSampler,
        tree: DynamicTree,
    },
    LoadBalance {
        state: LoadBalanceState,
    },
}

/// One dynamic problem driven step by step: adapter, body chase, rounding.
pub struct ProblemRun {
    config: RunConfig,
    beta: f64,
    engine: Engine,
    point: FractionalPoint,
    consumed: Vec<f64>,
    /// Full bodies per step for the offline LP; `None` once one is unavailable.
    bodies: Option<Vec<TimeStep>>,
    offline_note: Option<String>,
    t: usize,
}

impl ProblemRun {
    /// Builds the initial state; the initial graph must already be valid.
    pub fn new(config: &RunConfig, instance: &ProblemInstance) -> Result<Self> {
        config.validate()?;
        let (engine, beta) = match instance {
            ProblemInstance::SetCover { instance, .. } => {
                let freq = instance.frequency();
                let f = config.f.unwrap_or(freq);
                if f < freq {
                    return Err(Error::BadParameter {
                        name: "f",
                        value: f as f64,
                    });
                }
                let cover = match config.mode {
                    RoundingMode::Det => CoverState::deterministic(),
                    RoundingMode::Rand => {
                        CoverState::randomized(instance.num_sets(), config.alpha, instance.num_elements(), config.seed)
                    }
                };
                let engine = Engine::SetCover {
                    state: SetCoverState::new(instance.clone()),
                    cover,
                    f: f.max(1),
                    mode: config.mode,
                };
                (engine, config.beta.unwrap_or(1.0))
            }
            ProblemInstance::Matching { vertices, initial, .. } => {
                let mut state = MatchingState::new(*vertices);
                for &(u, v) in initial {
                    state.apply(&edge_event(ProblemKind::Matching, u, v, None)).map_err(at_update(0))?;
                }
                let engine = Engine::Matching {
                    state,
                    stabilizer: Stabilizer::new(*vertices, config.alpha, config.delta, config.seed),
                    matching: MaintainedMatching::new(*vertices, config.delta),
                };
                (engine, config.beta.unwrap_or(1.0))
            }
            ProblemInstance::Mst { vertices, initial, .. } => {
                let mut state = MstState::new(*vertices);
                for &(u, v, cost) in initial {
                    state.add_initial_edge(u, v, cost).map_err(at_update(0))?;
                }
                if !state.is_connected() {
                    return Err(at_update(0)(Error::Disconnected));
                }
                let engine = Engine::Mst {
                    state,
                    sampler: MstSampler::new(*vertices, config.alpha, config.delta, config.gamma, config.seed),
                    tree: DynamicTree::new(*vertices),
                };
                (engine, config.beta.unwrap_or(1.0))
            }
            ProblemInstance::LoadBalance {
                machines, job_slots, ..
            } => {
                let engine = Engine::LoadBalance {
                    state: LoadBalanceState::new(*machines, *job_slots),
                };
                (engine, config.beta.unwrap_or(1.0))
            }
        };
        let dim = match &engine {
            Engine::SetCover { state, .. } => state.dim(),
            Engine::Matching { state, .. } => state.dim(),
            Engine::Mst { state, .. } => state.dim(),
            Engine::LoadBalance { state } => state.dim(),
        };
        Ok(Self {
            config: config.clone(),
            beta,
            engine,
            point: FractionalPoint::zeros(dim),
            consumed: vec![0.0; dim],
            bodies: config.offline.then(Vec::new),
            offline_note: None,
            t: 0,
        })
    }

    /// The raw chased point.
    pub fn point(&self) -> &FractionalPoint {
        &self.point
    }

    /// The point the rounding consumed at the last step.
    pub fn consumed(&self) -> &[f64] {
        &self.consumed
    }

    pub fn cover(&self) -> Option<(&SetCoverState, &CoverState)> {
        match &self.engine {
            Engine::SetCover { state, cover, .. } => Some((state, cover)),
            _ => None,
        }
    }

    pub fn matching(&self) -> Option<(&MatchingState, &Stabilizer, &MaintainedMatching)> {
        match &self.engine {
            Engine::Matching {
                state,
                stabilizer,
                matching,
            } => Some((state, stabilizer, matching)),
            _ => None,
        }
    }

    pub fn mst(&self) -> Option<(&MstState, &MstSampler, &DynamicTree)> {
        match &self.engine {
            Engine::Mst { state, sampler, tree } => Some((state, sampler, tree)),
            _ => None,
        }
    }

    pub fn loadbalance(&self) -> Option<&LoadBalanceState> {
        match &self.engine {
            Engine::LoadBalance { state } => Some(state),
            _ => None,
        }
    }

    /// Chase the initial body (row `t = 0`).
    pub fn warmup(&mut self) -> Result<StepRow> {
        self.advance("warmup".to_string()).map_err(at_update(0))
    }

    pub fn step(&mut self, event: &UpdateEvent) -> Result<StepRow> {
        let index = self.t + 1;
        match &mut self.engine {
            Engine::SetCover { state, .. } => state.apply(event),
            Engine::Matching { state, .. } => state.apply(event),
            Engine::Mst { state, .. } => state.apply(event),
            Engine::LoadBalance { state } => state.apply(event),
        }
        .map_err(at_update(index))?;
        self.t = index;
        self.advance(event.label()).map_err(at_update(index))
    }

    fn advance(&mut self, label: String) -> Result<StepRow> {
        let (delta, beta, cap) = (self.config.delta, self.beta, self.config.round_cap);
        let (frozen, mut body, normalization): (Vec<usize>, Option<BodySnapshot>, Option<f64>) = match &self.engine {
            Engine::SetCover { state, .. } => {
                let snap = setcover_body(state, beta)?;
                (snap.frozen.clone(), Some(snap.clone()), snap.normalization)
            }
            Engine::Matching { state, .. } => {
                let snap = matching_body(state, beta)?;
                (snap.frozen.clone(), Some(snap.clone()), snap.normalization)
            }
            Engine::LoadBalance { state } => {
                let snap = loadbalance_body(state, beta)?;
                (snap.frozen.clone(), Some(snap.clone()), snap.normalization)
            }
            Engine::Mst { state, .. } => {
                let mut live = vec![false; state.dim()];
                for e in state.edges() {
                    live[e.id] = true;
                }
                let frozen = (0..state.dim()).filter(|&e| !live[e]).collect();
                (frozen, None, Some(state.mst_cost()?))
            }
        };

        let clamped = self.point.clamped_to_zero(&frozen);
        let outcome = match (&self.engine, body.as_mut()) {
            (Engine::Mst { state, .. }, _) => {
                let mut oracle = MstOracle { state, beta };
                chase_body_capped(&clamped, &mut oracle as &mut dyn SeparationOracle, delta, cap)?
            }
            (_, Some(snap)) => chase_body_capped(&clamped, &mut snap.body(), delta, cap)?,
            (_, None) => unreachable!("only the spanning tree body is implicit"),
        };
        let step = movement(self.point.values(), outcome.point.values(), self.point.weights());
        self.point = outcome.point;
        self.record_body(body)?;

        let scaled = scaled_output(&self.point, delta);
        let rounding = self.round(&scaled)?;
        Ok(StepRow {
            t: self.t,
            event: label,
            projections: outcome.trace.len(),
            multiplier: None,
            normalization,
            upward: step.upward,
            l1: step.l1,
            rounding,
        })
    }

    fn record_body(&mut self, body: Option<BodySnapshot>) -> Result<()> {
        let Some(bodies) = self.bodies.as_mut() else {
            return Ok(());
        };
        let snap = match (body, &self.engine) {
            (Some(snap), _) => snap,
            (None, Engine::Mst { state, .. }) => match mst_cut_snapshot(state, self.beta) {
                Ok(snap) => snap,
                Err(e @ Error::SizeCap { .. }) => {
                    self.offline_note = Some(format!("skipped: cut family not enumerable, {e}"));
                    self.bodies = None;
                    return Ok(());
                }
                Err(e) => return Err(e),
            },
            (None, _) => unreachable!("explicit bodies are always present"),
        };
        bodies.push(snap.time_step());
        Ok(())
    }

    fn round(&mut self, scaled: &FractionalPoint) -> Result<Option<RoundingRow>> {
        let raw = self.point.values();
        let row = match &mut self.engine {
            Engine::SetCover { state, cover, f, mode } => {
                let x = scaled.values();
                let costs = state.instance().costs();
                let step = match mode {
                    RoundingMode::Det => cover.round_det(x, *f, costs),
                    RoundingMode::Rand => cover.round_rand(x, state.instance(), state.live()),
                };
                self.consumed = x.to_vec();
                Some(RoundingRow {
                    size: step.size,
                    cost: step.cost,
                    fractional: x.iter().zip(costs).map(|(a, c)| a * c).sum(),
                    recourse: step.recourse,
                    max_unit_recourse: None,
                    sample_recourse: (*mode == RoundingMode::Rand).then_some(step.sampled_recourse),
                    mu_h: None,
                    special_case: None,
                })
            }
            Engine::Matching {
                state,
                stabilizer,
                matching,
            } => {
                let graph = state.edges();
                let step = stabilizer.step(raw, &graph);
                let units = matching.apply(&step);
                self.consumed = raw.to_vec();
                let h = matching.graph();
                let side = two_coloring(state.vertices(), &h).expect("subgraph of a bipartite graph");
                let mu_h = max_bipartite_matching(state.vertices(), &h, &side).len();
                let n = state.vertices();
                Some(RoundingRow {
                    size: matching.size(),
                    cost: matching.size() as f64,
                    fractional: graph.iter().map(|&(u, v)| raw[pair_index(n, u, v)]).sum(),
                    recourse: units.iter().sum(),
                    max_unit_recourse: Some(units.iter().copied().max().unwrap_or(0)),
                    sample_recourse: Some(step.copy_changes),
                    mu_h: Some(mu_h),
                    special_case: Some(step.case_b),
                })
            }
            Engine::Mst { state, sampler, tree } => {
                let x = scaled.values();
                let step = sampler.step(x, state.vertices(), &state.edges())?;
                let units = tree.apply(&step)?;
                self.consumed = x.to_vec();
                Some(RoundingRow {
                    size: tree.tree().len(),
                    cost: tree.cost(),
                    fractional: step.fractional_cost,
                    recourse: units.iter().sum(),
                    max_unit_recourse: Some(units.iter().copied().max().unwrap_or(0)),
                    sample_recourse: Some(step.sample_changes),
                    mu_h: None,
                    special_case: Some(step.fallback_fired),
                })
            }
            Engine::LoadBalance { .. } => {
                self.consumed = scaled.values().to_vec();
                None
            }
        };
        Ok(row)
    }

    /// Summary for the rows produced so far, with the offline optimum if
    /// it was requested.
    pub fn summarize(&self, rows: &[StepRow]) -> Result<Summary> {
        let mut summary = Summary::from_rows(rows);
        if self.config.offline {
            match &self.bodies {
                Some(bodies) => {
                    let weights = vec![1.0; self.point.dim()];
                    offline_into(&mut summary, solve_recourse_steps(bodies, &weights, self.config.oracle_cap))?;
                }
                None => summary.offline_note = self.offline_note.clone(),
            }
        }
        Ok(summary)
    }
}

fn edge_event(problem: ProblemKind, u: usize, v: usize, cost: Option<f64>) -> UpdateEvent {
    UpdateEvent {
        problem,
        op: crate::adapters::UpdateOp::Insert,
        payload: crate::adapters::Payload::Edge { u, v, cost },
    }
}

/// Warm up on the initial state, then process every update.
pub fn run_problem(config: &RunConfig, instance: &ProblemInstance) -> Result<RunReport> {
    let mut run = ProblemRun::new(config, instance)?;
    let mut rows = vec![run.warmup()?];
    for event in instance.events() {
        rows.push(run.step(event)?);
    }
    let summary = run.summarize(&rows)?;
    let command = match instance.kind() {
        ProblemKind::SetCover => "setcover",
        ProblemKind::Matching => "matching",
        ProblemKind::Mst => "mst",
        ProblemKind::LoadBalance => "loadbalance",
    };
    Ok(RunReport {
        manifest: Manifest::new(command, config),
        steps: rows,
        summary,
    })
}
