use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use posbody::adapters::{pair_count, pair_index, Payload, SetCoverInstance, UpdateEvent, UpdateOp};
use posbody::body::{chase_body, scaled_output, PositiveBody};
use posbody::certify::{certify, Certification};
use posbody::graph::WeightedEdge;
use posbody::harness::{chase_stream, run_chase, run_problem, ProblemRun, RoundingMode, RunConfig};
use posbody::lp::solve_optimal_recourse;
use posbody::projection::{project_covering, project_packing};
use posbody::rounding::{CoverState, MaintainedMatching, MstSampler, Stabilizer};
use posbody::stream::Stream;
use posbody::updates::{parse_updates, ProblemInstance};
use posbody::{ConstraintKind, FractionalPoint, HalfspaceConstraint};
use rand::{Rng, SeedableRng};

use crate::gen::{self, Rng8};
use crate::oracles::{self, KlProblem};
use crate::Outcome;

fn dot(coeffs: &[(usize, f64)], x: &[f64]) -> f64 {
    coeffs.iter().map(|&(i, c)| c * x[i]).sum()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn upward(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| w * (y - x).max(0.0)).sum()
}

/// Mean and standard error of a sample.
fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn timed(start: Instant, limit: Duration) -> (bool, String) {
    let took = start.elapsed();
    (took < limit, format!("{:.2}s of {}s", took.as_secs_f64(), limit.as_secs()))
}

pub fn kkt_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng8::seed_from_u64(0x4b4b54);
    let (mut worst_kkt, mut worst_brute, mut brute_calls) = (0.0f64, 0.0f64, 0);
    for call in 0..1000 {
        let eps = [0.1, 0.5, 1.0][call % 3];
        let covering = (call / 3) % 2 == 0;
        let n = if call % 4 == 0 { rng.gen_range(1..=3) } else { rng.gen_range(1..=20) };
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.25..4.0)).collect();
        let mut x0: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.5) })
            .collect();
        let k = rng.gen_range(1..=n.min(6));
        let idx = gen::support(&mut rng, n, k);
        let mut coeffs: Vec<(usize, f64)> = idx.iter().map(|&i| (i, rng.gen_range(0.1..5.0))).collect();
        if covering {
            let d = dot(&coeffs, &x0);
            if d >= 0.9 {
                let s = rng.gen_range(0.05..0.9) / d;
                coeffs.iter_mut().for_each(|c| c.1 *= s);
            }
        } else {
            if idx.iter().all(|&i| x0[i] == 0.0) {
                x0[idx[0]] = rng.gen_range(0.1..1.0);
            }
            let s = (1.0 + eps) * rng.gen_range(1.05..5.0) / dot(&coeffs, &x0);
            coeffs.iter_mut().for_each(|c| c.1 *= s);
        }
        let kind = if covering { ConstraintKind::Covering } else { ConstraintKind::Packing };
        let h = HalfspaceConstraint::new(kind, coeffs.clone()).unwrap();
        let prev = FractionalPoint::new(x0.clone(), w.clone()).unwrap();
        let result = if covering {
            project_covering(&prev, &h, eps)
        } else {
            project_packing(&prev, &h, eps)
        };
        let result = match result {
            Ok(r) => r,
            Err(e) => return Outcome::check(false, format!("call {call}: {e}")),
        };
        let x = result.point.values();
        let mult = result.multiplier;

        let mut residual = (-mult).max(0.0);
        for i in (0..n).filter(|i| !idx.contains(i)) {
            residual = residual.max((x[i] - x0[i]).abs());
        }
        if covering {
            residual = residual.max((dot(&coeffs, x) - 1.0).abs());
            for &(i, c) in &coeffs {
                let s = eps / (4.0 * k as f64 * c);
                residual = residual.max((w[i] * ((x[i] + s) / (x0[i] + s)).ln() - c * mult).abs());
            }
        } else {
            residual = residual.max((dot(&coeffs, x) - (1.0 + eps)).abs());
            for &(i, p) in &coeffs {
                if x0[i] > 0.0 {
                    residual = residual.max((w[i] * (x[i] / x0[i]).ln() + p * mult).abs());
                } else {
                    residual = residual.max(x[i].abs());
                }
            }
        }
        worst_kkt = worst_kkt.max(residual);

        if n <= 3 {
            brute_calls += 1;
            let active: Vec<(usize, f64)> =
                coeffs.iter().copied().filter(|&(i, _)| covering || x0[i] > 0.0).collect();
            let problem = KlProblem {
                a: active.iter().map(|a| a.1).collect(),
                w: active.iter().map(|a| w[a.0]).collect(),
                shift: active
                    .iter()
                    .map(|a| if covering { eps / (4.0 * k as f64 * a.1) } else { 0.0 })
                    .collect(),
                x0: active.iter().map(|a| x0[a.0]).collect(),
                b: if covering { 1.0 } else { 1.0 + eps },
            };
            let mut expected = x0.clone();
            for &(i, _) in &coeffs {
                expected[i] = 0.0;
            }
            for (&(i, _), v) in active.iter().zip(problem.minimize()) {
                expected[i] = v;
            }
            worst_brute = worst_brute.max(l1_max(x, &expected));
        }
    }
    let (fast, took) = timed(start, Duration::from_secs(10));
    Outcome::check(
        worst_kkt <= 1e-8 && worst_brute <= 1e-6 && fast,
        format!(
            "max KKT residual {worst_kkt:.2e} <= 1e-8, max brute-force gap {worst_brute:.2e} <= 1e-6 over {brute_calls} calls, {took}"
        ),
    )
}

fn l1_max(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct CertifiedRun {
    stream: Stream,
    eps: f64,
    multipliers: Vec<f64>,
    upward: f64,
    cert: Certification,
    opt: f64,
}

fn certified_runs() -> &'static Vec<CertifiedRun> {
    static RUNS: OnceLock<Vec<CertifiedRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut rng = Rng8::seed_from_u64(0xce27);
        (0..200)
            .map(|k| {
                let stream = gen::mixed_stream(&mut rng);
                let eps = [0.25, 1.0][k % 2];
                let run = chase_stream(&stream, eps).expect("chase");
                let multipliers = run.log.steps().iter().map(|s| s.multiplier).collect();
                let upward = (0..run.log.len())
                    .map(|t| upward(run.log.point(t), run.log.point(t + 1), &stream.weights))
                    .sum();
                let cert = certify(&run.log, eps).expect("certify");
                let opt = solve_optimal_recourse(&stream.constraints, &stream.weights).expect("offline").value;
                CertifiedRun {
                    stream,
                    eps,
                    multipliers,
                    upward,
                    cert,
                    opt,
                }
            })
            .collect()
    })
}

/// `ln(1 + 40 d² / eps²)` with `d` the largest covering sparsity, at least 1.
fn refined_a(stream: &Stream, eps: f64) -> f64 {
    let d = stream
        .constraints
        .iter()
        .filter(|h| h.kind() == ConstraintKind::Covering)
        .map(|h| h.coeffs().len())
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    (1.0 + 40.0 * d * d / (eps * eps)).ln()
}

pub fn certified_competitiveness() -> Outcome {
    let start = Instant::now();
    let runs = certified_runs();
    let (mut cap_fail, mut duality_fail, mut worst_ratio) = (0, 0, 0.0f64);
    for run in runs {
        let eps = run.eps;
        let cap = (2.0 + eps) * (1.0 + eps) / eps * refined_a(&run.stream, eps);
        let refined = oracles::dual_objective(&run.stream.constraints, &run.cert.refined.step_duals);
        let warmup = oracles::dual_objective(&run.stream.constraints, &run.cert.warmup.step_duals);
        if run.upward > cap * refined * (1.0 + 1e-6) + 1e-12 {
            cap_fail += 1;
        }
        if refined > 0.0 {
            worst_ratio = worst_ratio.max(run.upward / (cap * refined));
        }
        for bound in [warmup, refined] {
            if bound > run.opt * (1.0 + 1e-6) + 1e-12 {
                duality_fail += 1;
            }
        }
    }
    let (fast, took) = timed(start, Duration::from_secs(120));
    Outcome::check(
        cap_fail == 0 && duality_fail == 0 && fast,
        format!(
            "{} streams, cap violations {cap_fail}, weak duality violations {duality_fail}, worst recourse/(cap x dual) {worst_ratio:.3}, {took}",
            runs.len()
        ),
    )
}

pub fn dual_feasibility() -> Outcome {
    let runs = certified_runs();
    let (mut worst_violation, mut worst_window, mut ineq2_fail, mut objective_gap) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0, 0.0f64);
    for run in runs {
        let (h, w) = (&run.stream.constraints, &run.stream.weights);
        for cert in [&run.cert.warmup, &run.cert.refined] {
            worst_violation = worst_violation.max(oracles::dual_violation(h, w, &cert.step_duals, &cert.r));
            let objective = oracles::dual_objective(h, &cert.step_duals);
            objective_gap = objective_gap.max((objective - cert.objective).abs() / (1.0 + objective.abs()));
        }
        let ytilde = run.cert.refined.ytilde.as_ref().expect("refined certificate keeps ytilde");
        let a = refined_a(&run.stream, run.eps);
        let excess = oracles::window_excess(h, w, &run.multipliers, ytilde, a);
        worst_window = worst_window.max(excess / (1.0 + a));
        let (mut kept, mut total) = (0.0, 0.0);
        for (t, step) in h.iter().enumerate() {
            if step.kind() == ConstraintKind::Covering {
                kept += ytilde[t];
                total += run.multipliers[t];
                if ytilde[t] < 0.0 || ytilde[t] > run.multipliers[t] {
                    ineq2_fail += 1;
                }
            }
        }
        if kept < (1.0 - run.eps / 10.0) * total - 1e-8 * (1.0 + total) {
            ineq2_fail += 1;
        }
    }
    Outcome::check(
        worst_violation <= 1e-8 && worst_window <= 1e-8 && ineq2_fail == 0 && objective_gap <= 1e-9,
        format!(
            "max dual violation {worst_violation:.2e} <= 1e-8, max window excess {worst_window:.2e}, ineq2 failures {ineq2_fail}, objective mismatch {objective_gap:.1e}"
        ),
    )
}

pub fn body_chasing() -> Outcome {
    let mut rng = Rng8::seed_from_u64(0xb0d7);
    let (mut failures, mut projections) = (Vec::new(), 0);
    for b in 0..100 {
        let delta = [0.1, 0.5][b % 2];
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=6);
        let witness: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let constraints: Vec<HalfspaceConstraint> = (0..m)
            .map(|_| {
                let covering = rng.gen_bool(0.5);
                let k = rng.gen_range(1..=n);
                let mut coeffs: Vec<(usize, f64)> =
                    gen::support(&mut rng, n, k).into_iter().map(|i| (i, rng.gen_range(0.5..3.0))).collect();
                let target = if covering { rng.gen_range(1.0..1.5) } else { rng.gen_range(0.5..1.0) };
                let s = target / dot(&coeffs, &witness);
                coeffs.iter_mut().for_each(|c| c.1 *= s);
                let kind = if covering { ConstraintKind::Covering } else { ConstraintKind::Packing };
                HalfspaceConstraint::new(kind, coeffs).unwrap()
            })
            .collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let x0: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) }).collect();
        let prev = FractionalPoint::new(x0, w).unwrap();
        let mut body = PositiveBody::new(constraints.clone());
        let out = match chase_body(&prev, &mut body, delta) {
            Ok(out) => out,
            Err(e) => {
                failures.push(format!("body {b}: {e}"));
                continue;
            }
        };
        projections += out.trace.len();
        let scaled = scaled_output(&out.point, delta);
        for h in &constraints {
            let v = dot(h.coeffs(), scaled.values());
            let ok = match h.kind() {
                ConstraintKind::Covering => v >= 1.0,
                ConstraintKind::Packing => v <= 1.0 + delta,
            };
            if !ok {
                failures.push(format!("body {b}: {} row at {v}", h.kind().tag()));
            }
        }
    }
    Outcome::check(
        failures.is_empty(),
        format!("100 bodies, {projections} projections, failures {:?}", failures),
    )
}

/// Frequency of the instance: the most sets any element belongs to.
fn frequency(instance: &SetCoverInstance) -> usize {
    (0..instance.num_elements()).map(|e| instance.sets_containing(e).len()).max().unwrap_or(1)
}

fn covers(instance: &SetCoverInstance, live: &BTreeSet<usize>, chosen: &BTreeSet<usize>) -> bool {
    live.iter().all(|&e| instance.sets_containing(e).iter().any(|s| chosen.contains(s)))
}

fn apply_live(live: &mut BTreeSet<usize>, event: &UpdateEvent) {
    if let Payload::Element(e) = event.payload {
        match event.op {
            UpdateOp::Insert => live.insert(e),
            UpdateOp::Delete => live.remove(&e),
        };
    }
}

/// Consumed points and live sets after the warmup and each update.
struct CoverTrace {
    instance: SetCoverInstance,
    points: Vec<Vec<f64>>,
    live: Vec<BTreeSet<usize>>,
}

pub fn set_cover() -> Outcome {
    let mut rng = Rng8::seed_from_u64(0x5e7c);
    let mut det_failures: Vec<String> = Vec::new();
    let mut traces = Vec::new();
    let mut steps = 0;
    for k in 0..100 {
        let (instance, events) = gen::setcover_instance(&mut rng);
        let delta = [0.25, 0.5, 1.0][k % 3];
        let config = RunConfig {
            delta,
            mode: RoundingMode::Det,
            ..RunConfig::default()
        };
        let problem = ProblemInstance::SetCover {
            instance: instance.clone(),
            events: events.clone(),
        };
        let f = frequency(&instance) as f64;
        let costs = instance.costs().to_vec();
        let mut run = ProblemRun::new(&config, &problem).unwrap();
        let mut live = BTreeSet::new();
        let mut prev_sel: BTreeSet<usize> = BTreeSet::new();
        let mut prev_x = vec![0.0; instance.num_sets()];
        let (mut changes, mut movement) = (0usize, 0.0f64);
        let mut trace = CoverTrace {
            instance: instance.clone(),
            points: Vec::new(),
            live: Vec::new(),
        };
        for t in 0..=events.len() {
            if t == 0 {
                run.warmup().unwrap();
            } else {
                run.step(&events[t - 1]).unwrap();
                apply_live(&mut live, &events[t - 1]);
            }
            steps += 1;
            let x = run.consumed().to_vec();
            let sel = run.cover().unwrap().1.selected().clone();
            changes += sel.symmetric_difference(&prev_sel).count();
            movement += l1(&x, &prev_x);
            let cost: f64 = sel.iter().map(|&s| costs[s]).sum();
            let fractional: f64 = x.iter().zip(&costs).map(|(a, c)| a * c).sum();
            if !covers(&instance, &live, &sel) {
                det_failures.push(format!("instance {k} step {t}: not a cover"));
            }
            if cost > 2.0 * f * fractional {
                det_failures.push(format!("instance {k} step {t}: cost {cost} > 2f x {fractional}"));
            }
            if changes as f64 > 2.0 * f * movement {
                det_failures.push(format!("instance {k} step {t}: recourse {changes} > 2f x {movement}"));
            }
            trace.points.push(x.clone());
            trace.live.push(live.clone());
            prev_sel = sel;
            prev_x = x;
        }
        if k % 3 == 1 && traces.len() < 3 && events.len() >= 20 {
            traces.push(trace);
        }
    }

    // Inclusion probability of the clock sampling.
    let alpha = 1.0;
    let xs = [0.05, 0.2, 0.5, 1.0, 2.0];
    let n_el = 10;
    let lambda = (alpha * n_el as f64).ln();
    let probe = SetCoverInstance::new(xs.iter().map(|_| (1.0, vec![0])).collect()).unwrap();
    let seeds = 100_000u64;
    let mut hits = vec![0usize; xs.len()];
    for seed in 0..seeds {
        let mut state = CoverState::randomized(xs.len(), alpha, n_el, seed);
        state.round_rand(&xs, &probe, &[]);
        for &i in state.sampled() {
            hits[i] += 1;
        }
    }
    let worst_prob = xs
        .iter()
        .zip(&hits)
        .map(|(&x, &h)| (h as f64 / seeds as f64 - (1.0 - (-x * lambda).exp())).abs())
        .fold(0.0, f64::max);

    // Expected sample churn along fixed fractional trajectories.
    let churn_seeds = 10_000u64;
    let (mut churn_fail, mut rand_cover_fail, mut churn_checks) = (0, 0, 0);
    for trace in &traces {
        let n_el = trace.instance.num_elements();
        let lambda = (alpha * n_el as f64).ln();
        let t_len = trace.points.len();
        let mut churn = vec![vec![0.0; churn_seeds as usize]; t_len];
        for seed in 0..churn_seeds {
            let mut state = CoverState::randomized(trace.instance.num_sets(), alpha, n_el, seed);
            for t in 0..t_len {
                let step = state.round_rand(&trace.points[t], &trace.instance, &trace.live[t]);
                churn[t][seed as usize] = step.sampled_recourse as f64;
                if !covers(&trace.instance, &trace.live[t], state.selected()) {
                    rand_cover_fail += 1;
                }
            }
        }
        let mut prev = vec![0.0; trace.instance.num_sets()];
        for t in 0..t_len {
            let (mean, se) = mean_se(&churn[t]);
            let bound = lambda * l1(&trace.points[t], &prev);
            churn_checks += 1;
            if mean > bound + 3.0 * se {
                churn_fail += 1;
            }
            prev = trace.points[t].clone();
        }
    }

    Outcome::check(
        det_failures.is_empty() && worst_prob <= 0.01 && churn_fail == 0 && rand_cover_fail == 0 && traces.len() == 3,
        format!(
            "deterministic: 100 instances, {steps} steps, failures {:?}; randomized: max |freq - (1-e^(-x lambda))| {worst_prob:.4} <= 0.01 over {seeds} seeds, churn bound failures {churn_fail}/{churn_checks} over {churn_seeds} seeds, uncovered {rand_cover_fail}",
            det_failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn kappa(alpha: f64, delta: f64, n: usize) -> usize {
    ((100.0 * (alpha + 4.0) * (n as f64).ln() / (delta * delta)).ceil() as usize).max(1)
}

pub fn matching() -> Outcome {
    let mut rng = Rng8::seed_from_u64(0x3a7c);
    let alpha = 1.0;
    let seeds = 200u64;
    let (mut aug_fail, mut approx_fail, mut unit_fail, mut churn_fail, mut h_mismatch) = (0, 0, 0, 0, 0);
    let mut worst_unit = (0usize, 0usize);
    let mut churn_report = Vec::new();
    for k in 0..6 {
        let delta = [0.5, 1.0][k % 2];
        let (n, events) = gen::bipartite_events(&mut rng);
        let problem = ProblemInstance::Matching {
            vertices: n,
            initial: Vec::new(),
            events: events.clone(),
        };
        let config = RunConfig {
            delta,
            alpha,
            ..RunConfig::default()
        };
        let mut run = ProblemRun::new(&config, &problem).unwrap();
        let mut points = Vec::new();
        let mut graphs = Vec::new();
        for t in 0..=events.len() {
            if t == 0 {
                run.warmup().unwrap();
            } else {
                run.step(&events[t - 1]).unwrap();
            }
            points.push(run.point().values().to_vec());
            graphs.push(run.matching().unwrap().0.edges());
        }
        let movement: f64 = std::iter::once(vec![0.0; pair_count(n)])
            .chain(points.iter().cloned())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|p| l1(&p[0], &p[1]))
            .sum();
        let kap = kappa(alpha, delta, n) as f64;
        let k_len = (1.0 / delta).ceil() as usize;
        let mut totals = Vec::with_capacity(seeds as usize);
        for seed in 0..seeds {
            let mut stab = Stabilizer::new(n, alpha, delta, seed);
            let mut mm = MaintainedMatching::new(n, delta);
            let mut total = 0.0;
            for (x, graph) in points.iter().zip(&graphs) {
                let step = stab.step(x, graph);
                total += step.copy_changes as f64;
                for u in mm.apply(&step) {
                    if u > 2 * k_len + 1 {
                        unit_fail += 1;
                    }
                    worst_unit = worst_unit.max((u, 2 * k_len + 1));
                }
                let h = mm.graph();
                let expected: Vec<(usize, usize)> = stab.h_edges().iter().map(|&e| posbody::adapters::pair_of(n, e)).collect();
                if {
                    let mut a = h.clone();
                    a.sort_unstable();
                    a
                } != expected
                {
                    h_mismatch += 1;
                }
                let m = mm.matching();
                if oracles::has_short_augmenting_path(n, &h, &m, 2 * k_len - 1) {
                    aug_fail += 1;
                }
                let mu = oracles::max_matching_size(n, &h);
                if (m.len() as f64) < (1.0 - delta) * mu as f64 {
                    approx_fail += 1;
                }
            }
            totals.push(total);
        }
        let (mean, se) = mean_se(&totals);
        if mean > kap * movement + 3.0 * se {
            churn_fail += 1;
        }
        churn_report.push(format!("{:.0}/{:.0}", mean, kap * movement));
    }
    Outcome::check(
        aug_fail == 0 && approx_fail == 0 && unit_fail == 0 && churn_fail == 0 && h_mismatch == 0,
        format!(
            "6 graphs x {seeds} seeds: short augmenting paths {aug_fail}, approximation failures {approx_fail}, H mismatches {h_mismatch}, per-update recourse over 2k+1 {unit_fail} (worst {} vs {}), stabilizer churn mean/bound {:?}, churn failures {churn_fail}",
            worst_unit.0, worst_unit.1, churn_report
        ),
    )
}

pub fn spanning_tree() -> Outcome {
    let mut rng = Rng8::seed_from_u64(0x3577);
    let mut failures: Vec<String> = Vec::new();
    let (mut steps, mut fallbacks) = (0, 0);
    for k in 0..30 {
        let (n, initial, events) = gen::mst_instance(&mut rng);
        let problem = ProblemInstance::Mst {
            vertices: n,
            initial,
            events: events.clone(),
        };
        for seed in 0..3 {
            let delta = [0.25, 0.5, 1.0][(k + seed) % 3];
            // Small gamma thins the sample so the fallback fires.
            let gamma = [1.0, 0.01, 0.001][seed];
            let config = RunConfig {
                delta,
                gamma,
                seed: seed as u64,
                ..RunConfig::default()
            };
            let mut run = ProblemRun::new(&config, &problem).unwrap();
            let mut prev_f: BTreeSet<usize> = BTreeSet::new();
            let mut prev_h: BTreeSet<usize> = BTreeSet::new();
            for t in 0..=events.len() {
                let row = if t == 0 { run.warmup() } else { run.step(&events[t - 1]) };
                let row = match row {
                    Ok(row) => row,
                    Err(e) => {
                        failures.push(format!("instance {k} step {t}: {e}"));
                        break;
                    }
                };
                steps += 1;
                let rounding = row.rounding.expect("tree rounding row");
                fallbacks += usize::from(rounding.special_case == Some(true));
                let (state, sampler, tree) = run.mst().unwrap();
                let live: Vec<WeightedEdge> = state.edges();
                let f_tilde: Vec<(usize, usize, usize, f64)> = live
                    .iter()
                    .filter(|e| sampler.combined().contains(&e.id))
                    .map(|e| (e.id, e.u, e.v, e.cost))
                    .collect();
                if f_tilde.len() != sampler.combined().len() {
                    failures.push(format!("instance {k} step {t}: sampled graph holds a dead edge"));
                }
                let h: Vec<usize> = tree.tree().iter().copied().collect();
                if oracles::prim(n, &f_tilde) != Some(h.clone()) {
                    failures.push(format!("instance {k} step {t}: tree is not the MST of the sampled graph"));
                }
                let x = run.consumed();
                let fractional: f64 = live.iter().map(|e| e.cost * x[e.id]).sum();
                let cost: f64 = live.iter().filter(|e| tree.tree().contains(&e.id)).map(|e| e.cost).sum();
                if cost > (2.0 + delta) * fractional {
                    failures.push(format!("instance {k} step {t}: cost {cost} > (2+delta) x {fractional}"));
                }
                if rounding.max_unit_recourse.unwrap_or(0) > 2 {
                    failures.push(format!("instance {k} step {t}: unit recourse {:?}", rounding.max_unit_recourse));
                }
                let f_now: BTreeSet<usize> = sampler.combined().clone();
                let h_now: BTreeSet<usize> = h.into_iter().collect();
                let f_changes = f_now.symmetric_difference(&prev_f).count();
                let h_changes = h_now.symmetric_difference(&prev_h).count();
                if h_changes > 2 * f_changes {
                    failures.push(format!("instance {k} step {t}: {h_changes} tree changes for {f_changes} updates"));
                }
                prev_f = f_now;
                prev_h = h_now;
            }
        }
    }

    // Inclusion frequency on K_6 with fixed fractional values.
    let n = 6;
    let (alpha, delta, gamma) = (1.0, 1.0, 1.0);
    let rate = 100.0 * gamma * (alpha + 1.0) * (n as f64).ln() / (delta * delta);
    let levels = [0.0001, 0.0005, 0.001, 0.0015, 0.002, 0.0025, 0.005];
    let mut edges = Vec::new();
    let mut x = vec![0.0; pair_count(n)];
    for u in 0..n {
        for v in u + 1..n {
            let id = pair_index(n, u, v);
            edges.push(WeightedEdge {
                id,
                u,
                v,
                cost: 1.0 + id as f64,
            });
            x[id] = levels[id % levels.len()];
        }
    }
    let seeds = 100_000u64;
    let mut hits = vec![0usize; x.len()];
    for seed in 0..seeds {
        let mut sampler = MstSampler::new(n, alpha, delta, gamma, seed);
        sampler.step(&x, n, &edges).unwrap();
        for &e in sampler.sampled() {
            hits[e] += 1;
        }
    }
    let worst_freq = edges
        .iter()
        .map(|e| (hits[e.id] as f64 / seeds as f64 - (rate * x[e.id]).min(1.0)).abs())
        .fold(0.0, f64::max);

    Outcome::check(
        failures.is_empty() && worst_freq <= 0.01,
        format!(
            "90 runs, {steps} steps, {fallbacks} fallbacks, failures {:?}; max |freq - p_e| {worst_freq:.4} <= 0.01 over {seeds} seeds",
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

pub fn offline_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng8::seed_from_u64(0x0ff1);
    let (mut worst_gap, mut below, mut failures) = (0.0f64, 0, 0);
    for _ in 0..50 {
        let stream = gen::tiny_stream(&mut rng);
        let lp = solve_optimal_recourse(&stream.constraints, &stream.weights).unwrap().value;
        let grid = oracles::grid_optimum(&stream.constraints, &stream.weights);
        let cell: f64 = stream.weights.iter().sum::<f64>() / oracles::GRID as f64;
        if grid < lp - 1e-9 {
            below += 1;
        }
        if (grid - lp).abs() > 2.0 * cell {
            failures += 1;
        }
        worst_gap = worst_gap.max((grid - lp) / cell);
    }
    let (fast, took) = timed(start, Duration::from_secs(60));
    Outcome::check(
        failures == 0 && below == 0 && fast,
        format!("50 streams, worst gap {worst_gap:.3} cells <= 2, grid below LP {below}, {took}"),
    )
}

const SETCOVER_TEXT: &str = "\
setcover set 2 0 1
setcover set 1 1 2
setcover set 3 0 2 3
setcover insert 0
setcover insert 2
setcover insert 3
setcover delete 0
setcover insert 1
";

const MATCHING_TEXT: &str = "\
matching vertices 6
matching edge 0 1
matching insert 2 3
matching insert 0 3
matching insert 4 5
matching delete 0 1
matching insert 2 5
";

const MST_TEXT: &str = "\
mst vertices 4
mst edge 0 1 1
mst edge 1 2 2
mst edge 2 3 1.5
mst insert 0 3 0.5
mst insert 0 2 1
mst delete 1 2
";

const LOADBALANCE_TEXT: &str = "\
loadbalance machines 2
loadbalance insert 0 0:2 1:3
loadbalance insert 1 0:1 1:1
loadbalance delete 0
";

pub fn determinism() -> Outcome {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (name, text, mode) in [
        ("setcover", SETCOVER_TEXT, RoundingMode::Rand),
        ("setcover-det", SETCOVER_TEXT, RoundingMode::Det),
        ("matching", MATCHING_TEXT, RoundingMode::Det),
        ("mst", MST_TEXT, RoundingMode::Det),
        ("loadbalance", LOADBALANCE_TEXT, RoundingMode::Det),
    ] {
        let instance = parse_updates(text).unwrap();
        let config = RunConfig {
            seed: 17,
            mode,
            offline: true,
            ..RunConfig::default()
        };
        let first = run_problem(&config, &instance).unwrap().to_jsonl();
        let second = run_problem(&config, &instance.clone()).unwrap().to_jsonl();
        compared += 1;
        if first != second {
            mismatches.push(name);
        }
    }
    let mut rng = Rng8::seed_from_u64(0xde7);
    for _ in 0..5 {
        let stream = gen::mixed_stream(&mut rng);
        let config = RunConfig {
            eps: 0.5,
            certify: true,
            offline: true,
            seed: 3,
            ..RunConfig::default()
        };
        let first = run_chase(&config, &stream).unwrap().to_jsonl();
        let second = run_chase(&config, &stream.clone()).unwrap().to_jsonl();
        compared += 1;
        if first != second {
            mismatches.push("chase");
        }
    }
    Outcome::check(
        mismatches.is_empty(),
        format!("{compared} report pairs compared, mismatches {mismatches:?}"),
    )
}
