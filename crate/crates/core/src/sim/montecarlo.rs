use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{splitmix64, CodeAssignment, Design, DesignParams, VgRegistry};
use crate::transform::VirtualGraph;

use super::{percolate, transfer_matrix, SimError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McTrial {
    pub trial: usize,
    pub seed: u64,
    /// Sinks whose transfer matrix was singular in this trial.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub design: Design,
    pub trials: usize,
    /// Trials in which at least one sink failed.
    pub failures: usize,
    pub rate: f64,
    pub ci95: f64,
    #[serde(skip)]
    pub per_trial: Vec<McTrial>,
}

impl McResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,failures\n");
        for t in &self.per_trial {
            out.push_str(&format!("{},{},{}\n", t.trial, t.seed, t.failures));
        }
        out
    }
}

fn failing_sinks(vg: &VirtualGraph, ca: &CodeAssignment) -> Result<usize, SimError> {
    let perc = percolate(vg, ca)?;
    let mut failures = 0;
    for t in vg.sinks() {
        let singular = match transfer_matrix(vg, &perc, t) {
            Ok((m, _)) => m.det()?.is_zero(),
            Err(SimError::SinkTooFewInputs { .. }) => true,
            Err(e) => return Err(e),
        };
        failures += usize::from(singular);
    }
    Ok(failures)
}

/// Estimates the probability that some sink cannot decode. Trial `i` uses
/// a seed derived from `seed` and `i` alone, so results do not depend on
/// scheduling.
pub fn monte_carlo(
    vg: &VirtualGraph,
    reg: &VgRegistry,
    design: Design,
    params: DesignParams,
    trials: usize,
    seed: u64,
) -> Result<McResult, SimError> {
    if trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = splitmix64(seed ^ splitmix64(trial as u64));
            let ca = CodeAssignment::assign(design, DesignParams { seed: s, ..params }, vg, reg)?;
            Ok(McTrial { trial, seed: s, failures: failing_sinks(vg, &ca)? })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let failures = per_trial.iter().filter(|t| t.failures > 0).count();
    let p = failures as f64 / trials as f64;
    let ci95 = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
    Ok(McResult { design, trials, failures, rate: p, ci95, per_trial })
}
