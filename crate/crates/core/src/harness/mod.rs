//! End-to-end runs: raw streams and dynamic problems, with JSON-lines reports.

mod chase;
mod problem;
mod replicate;

pub use chase::{chase_stream, run_chase, StreamRun};
pub use problem::{run_problem, ProblemRun};
pub use replicate::{replicate, ReplicateSummary, Stat};

use serde::Serialize;

use crate::certify::{CertifiedReport, LemmaChecks};
use crate::error::{Error, Result};
use crate::lp::DEFAULT_SIZE_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    Det,
    Rand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub eps: f64,
    pub delta: f64,
    pub alpha: f64,
    /// Budget factor; each problem has its own default.
    pub beta: Option<f64>,
    pub gamma: f64,
    /// Set cover frequency bound; defaults to the instance's.
    pub f: Option<usize>,
    pub seed: u64,
    pub mode: RoundingMode,
    pub certify: bool,
    pub offline: bool,
    /// Cap on `2 n T` for the offline LP.
    pub oracle_cap: usize,
    /// Cap on projections inside one body chase.
    pub round_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps: 1.0,
            delta: 0.5,
            alpha: 1.0,
            beta: None,
            gamma: 1.0,
            f: None,
            seed: 0,
            mode: RoundingMode::Det,
            certify: false,
            offline: false,
            oracle_cap: DEFAULT_SIZE_CAP,
            round_cap: crate::body::DEFAULT_ROUND_CAP,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("eps", self.eps, self.eps > 0.0 && self.eps <= 1.0),
            ("delta", self.delta, self.delta > 0.0 && self.delta <= 1.0),
            ("alpha", self.alpha, self.alpha > 0.0 && self.alpha.is_finite()),
            ("gamma", self.gamma, self.gamma > 0.0 && self.gamma.is_finite()),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::BadParameter { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

/// Integral side of one step.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoundingRow {
    /// Sets, matched edges, or tree edges.
    pub size: usize,
    pub cost: f64,
    /// Fractional objective of the point the rounding consumed.
    pub fractional: f64,
    pub recourse: usize,
    /// Largest recourse of a single unit update inside this step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_unit_recourse: Option<usize>,
    /// Changes of the sampled layer (clocks, copies, or edge sample).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_recourse: Option<usize>,
    /// Maximum matching size of the stabilizer graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_h: Option<usize>,
    /// Stabilizer overload or MST fallback fired.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_case: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub t: usize,
    pub event: String,
    pub projections: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<f64>,
    /// Optimum the body was normalized by.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<f64>,
    pub upward: f64,
    pub l1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounding: Option<RoundingRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoundingSummary {
    pub recourse: usize,
    pub max_unit_recourse: usize,
    pub sample_recourse: usize,
    pub mean_size: f64,
    pub mean_cost: f64,
    /// Largest `cost / fractional` over steps with positive fractional value.
    pub max_cost_ratio: f64,
    pub special_steps: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub steps: usize,
    pub projections: usize,
    pub upward_total: f64,
    pub l1_total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounding: Option<RoundingSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertifiedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_checks: Option<LemmaChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offline_opt: Option<f64>,
    /// Why the offline optimum is missing, when it was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offline_note: Option<String>,
    /// Upward recourse over the offline optimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub competitive_ratio: Option<f64>,
}

impl Summary {
    fn from_rows(rows: &[StepRow]) -> Self {
        let mut s = Summary {
            steps: rows.len(),
            ..Summary::default()
        };
        let mut rounding: Option<RoundingSummary> = None;
        for row in rows {
            s.projections += row.projections;
            s.upward_total += row.upward;
            s.l1_total += row.l1;
            if let Some(r) = &row.rounding {
                let agg = rounding.get_or_insert_with(RoundingSummary::default);
                agg.recourse += r.recourse;
                agg.max_unit_recourse = agg.max_unit_recourse.max(r.max_unit_recourse.unwrap_or(0));
                agg.sample_recourse += r.sample_recourse.unwrap_or(0);
                agg.mean_size += r.size as f64;
                agg.mean_cost += r.cost;
                if r.fractional > 0.0 {
                    agg.max_cost_ratio = agg.max_cost_ratio.max(r.cost / r.fractional);
                }
                agg.special_steps += usize::from(r.special_case == Some(true));
            }
        }
        if let Some(agg) = rounding.as_mut() {
            agg.mean_size /= rows.len() as f64;
            agg.mean_cost /= rows.len() as f64;
        }
        s.rounding = rounding;
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub manifest: Manifest,
    pub steps: Vec<StepRow>,
    pub summary: Summary,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Manifest(&'a Manifest),
    Step(&'a StepRow),
    Summary(&'a Summary),
}

impl RunReport {
    /// Manifest, one line per step, then the summary.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let records = std::iter::once(Record::Manifest(&self.manifest))
            .chain(self.steps.iter().map(Record::Step))
            .chain(std::iter::once(Record::Summary(&self.summary)));
        for record in records {
            out.push_str(&serde_json::to_string(&record).expect("reports serialize"));
            out.push('\n');
        }
        out
    }
}

/// Attach the index of the update that failed.
pub(crate) fn at_update(index: usize) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        e @ Error::AtUpdate { .. } => e,
        e => Error::AtUpdate {
            index,
            source: Box::new(e),
        },
    }
}
