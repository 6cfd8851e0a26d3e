use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{RunConfig, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std_error: f64,
}

impl Stat {
    pub fn of(samples: &[f64]) -> Self {
        // Constant samples report exactly that constant, free of rounding.
        if samples.windows(2).all(|w| w[0] == w[1]) {
            return Self {
                mean: samples.first().copied().unwrap_or(0.0),
                std_error: 0.0,
            };
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub runs: usize,
    pub first_seed: u64,
    pub metrics: BTreeMap<&'static str, Stat>,
}

/// Run with seeds `seed, seed+1, ..., seed+runs-1` and aggregate.
pub fn replicate(
    config: &RunConfig,
    runs: usize,
    mut run: impl FnMut(&RunConfig) -> Result<RunReport>,
) -> Result<ReplicateSummary> {
    if runs < 2 {
        return Err(Error::BadParameter {
            name: "runs",
            value: runs as f64,
        });
    }
    let mut samples: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    for r in 0..runs {
        let cfg = RunConfig {
            seed: config.seed.wrapping_add(r as u64),
            ..config.clone()
        };
        let s = run(&cfg)?.summary;
        let mut push = |name, v: f64| samples.entry(name).or_default().push(v);
        push("upward_total", s.upward_total);
        push("l1_total", s.l1_total);
        if let Some(r) = &s.rounding {
            push("rounding_recourse", r.recourse as f64);
            push("sample_recourse", r.sample_recourse as f64);
            push("mean_size", r.mean_size);
            push("mean_cost", r.mean_cost);
            push("max_cost_ratio", r.max_cost_ratio);
            push("special_steps", r.special_steps as f64);
        }
    }
    Ok(ReplicateSummary {
        runs,
        first_seed: config.seed,
        metrics: samples.into_iter().map(|(k, v)| (k, Stat::of(&v))).collect(),
    })
}
