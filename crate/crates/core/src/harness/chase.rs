use crate::certify::{certify, MultiplierLog};
use crate::error::{Error, Result};
use crate::harness::{at_update, Manifest, RunConfig, RunReport, StepRow, Summary};
use crate::ledger::movement;
use crate::lp::{solve_recourse_steps, TimeStep};
use crate::point::{ConstraintKind, FractionalPoint};
use crate::projection::{project_covering, project_packing};
use crate::stream::Stream;

/// A processed raw stream: the multiplier log and one row per constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamRun {
    pub log: MultiplierLog,
    pub rows: Vec<StepRow>,
    pub point: FractionalPoint,
}

/// Project onto each constraint in arrival order. Satisfied constraints are
/// logged with multiplier 0.
pub fn chase_stream(stream: &Stream, eps: f64) -> Result<StreamRun> {
    let mut x = FractionalPoint::zeros_weighted(stream.weights.clone())?;
    let mut log = MultiplierLog::new(&x);
    let mut rows = Vec::with_capacity(stream.constraints.len());
    for (t, h) in stream.constraints.iter().enumerate() {
        let projected = match h.kind() {
            ConstraintKind::Covering => project_covering(&x, h, eps),
            ConstraintKind::Packing => project_packing(&x, h, eps),
        };
        let (next, multiplier, projections) = match projected {
            Ok(r) => (r.point, r.multiplier, 1),
            Err(Error::NotViolated { .. }) => (x.clone(), 0.0, 0),
            Err(e) => return Err(at_update(t + 1)(e)),
        };
        let step = movement(x.values(), next.values(), x.weights());
        log.append(h.clone(), multiplier, &next).map_err(at_update(t + 1))?;
        rows.push(StepRow {
            t: t + 1,
            event: h.kind().tag().to_string(),
            projections,
            multiplier: Some(multiplier),
            normalization: None,
            upward: step.upward,
            l1: step.l1,
            rounding: None,
        });
        x = next;
    }
    Ok(StreamRun { log, rows, point: x })
}

pub fn run_chase(config: &RunConfig, stream: &Stream) -> Result<RunReport> {
    config.validate()?;
    let run = chase_stream(stream, config.eps)?;
    let mut summary = Summary::from_rows(&run.rows);
    if config.certify {
        let cert = certify(&run.log, config.eps)?;
        summary.certificate = Some(cert.report);
        summary.lemma_checks = Some(cert.checks);
    }
    if config.offline {
        let steps: Vec<TimeStep> = stream
            .constraints
            .iter()
            .map(|h| TimeStep {
                constraints: vec![h.clone()],
                frozen: Vec::new(),
            })
            .collect();
        offline_into(&mut summary, solve_recourse_steps(&steps, &stream.weights, config.oracle_cap))?;
    }
    Ok(RunReport {
        manifest: Manifest::new(if config.certify { "certify" } else { "chase" }, config),
        steps: run.rows,
        summary,
    })
}

/// Record the offline optimum, or why it is missing.
pub(crate) fn offline_into(summary: &mut Summary, solved: Result<crate::lp::OfflineSolution>) -> Result<()> {
    match solved {
        Ok(sol) => {
            summary.offline_opt = Some(sol.value);
            summary.competitive_ratio = (sol.value > 0.0).then(|| summary.upward_total / sol.value);
        }
        Err(e @ Error::SizeCap { .. }) => summary.offline_note = Some(format!("skipped: {e}")),
        Err(e) => return Err(e),
    }
    Ok(())
}
