//! Many independent clusterings of one return series, each with its own seed
//! and lifting offset, and selection of the run with the widest centroid
//! separation.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_clustering, ClusterConfig, ClusteringResult};
use crate::error::{Error, Result};
use crate::labeling::{majority_vote, score, AccuracyReport, LabeledSeries};
use crate::measures::{lift, LiftConfig, ReturnSeries};
use crate::par;
use crate::wasserstein::{project_measure, ProjectedMeasure, ProjectionSet};

/// Seed and lifting offset of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub run: usize,
    pub seed: u64,
    pub delta: usize,
}

/// Per-run seeds and offsets derived from one master seed. Run `r` draws from
/// ChaCha stream `r` and is reproducible on its own.
pub fn run_plan(master_seed: u64, n_runs: usize, h2: usize) -> Vec<RunSpec> {
    (0..n_runs)
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(run as u64);
            let seed = rng.next_u64();
            let delta = rng.random_range(0..h2.max(1));
            RunSpec { run, seed, delta }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub result: ClusteringResult,
    pub labels: LabeledSeries,
    pub accuracy: Option<AccuracyReport>,
}

impl RunRecord {
    pub fn total_accuracy(&self) -> Option<f64> {
        self.accuracy.as_ref().map(|a| a.total)
    }

    pub fn final_separation(&self) -> f64 {
        self.result.final_diagnostics().mean_centroid_centroid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiRunResult {
    pub runs: Vec<RunRecord>,
    pub h1: usize,
    pub h2: usize,
}

impl MultiRunResult {
    /// Run with the largest final mean centroid-centroid distance; the earliest
    /// run wins ties.
    pub fn selected_index(&self) -> usize {
        let mut best = 0;
        for (i, r) in self.runs.iter().enumerate() {
            if r.final_separation() > self.runs[best].final_separation() {
                best = i;
            }
        }
        best
    }

    pub fn selected(&self) -> &RunRecord {
        &self.runs[self.selected_index()]
    }

    /// Total accuracy of every run, when ground truth was supplied.
    pub fn accuracies(&self) -> Option<Vec<f64>> {
        self.runs.iter().map(RunRecord::total_accuracy).collect()
    }

    pub fn converged_count(&self) -> usize {
        self.runs.iter().filter(|r| r.result.converged).count()
    }
}

/// Lifts with the run's offset and projects every window.
pub fn project_windows(
    returns: &ReturnSeries,
    lift_cfg: &LiftConfig,
    projections: &ProjectionSet,
    exec: par::Execution,
) -> Result<Vec<ProjectedMeasure>> {
    let windows = lift(returns, lift_cfg)?;
    par::map_slice(exec, &windows, |w| project_measure(w, projections))
        .into_iter()
        .collect()
}

/// Runs `n_runs` clusterings with seeds and offsets from [`run_plan`]. `cfg.seed`
/// is the master seed. `truth`, when given, is one regime id per return point.
pub fn multi_run(
    returns: &ReturnSeries,
    h1: usize,
    h2: usize,
    cfg: &ClusterConfig,
    projections: &ProjectionSet,
    n_runs: usize,
    truth: Option<&[usize]>,
) -> Result<MultiRunResult> {
    if n_runs == 0 {
        return Err(Error::Parameter("at least one run is required".into()));
    }
    if let Some(t) = truth {
        if t.len() != returns.len() {
            return Err(Error::Shape(format!(
                "{} truth labels for {} return points",
                t.len(),
                returns.len()
            )));
        }
    }
    // the largest offset yields the fewest windows
    let worst = LiftConfig::new(h1, h2, h2 - 1)?;
    let fewest = worst.window_count(returns.len());
    if fewest < cfg.k.max(1) {
        return Err(Error::InsufficientData(format!(
            "{} return points give only {fewest} windows for h1={h1}, h2={h2} (need at least K = {} \
             and h1 + h2 - 1 = {} points)",
            returns.len(),
            cfg.k,
            h1 + h2 - 1
        )));
    }

    let plan = run_plan(cfg.seed, n_runs, h2);
    let runs = par::map_slice(cfg.execution, &plan, |spec| -> Result<RunRecord> {
        let lift_cfg = LiftConfig::new(h1, h2, spec.delta)?;
        let measures = project_windows(returns, &lift_cfg, projections, cfg.execution)?;
        let result = run_clustering(&measures, &cfg.with_seed(spec.seed))?;
        let mut labels = majority_vote(&result.assignments, &lift_cfg, returns.len());
        labels.clusters = cfg.k;
        let accuracy = match truth {
            Some(t) => {
                labels = labels.with_truth(t.to_vec())?;
                Some(score(&labels)?)
            }
            None => None,
        };
        Ok(RunRecord {
            spec: *spec,
            result,
            labels,
            accuracy,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(MultiRunResult { runs, h1, h2 })
}
