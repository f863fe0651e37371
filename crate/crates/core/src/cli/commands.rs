use std::path::Path;

use serde::Serialize;

use super::config::{DataSource, ExperimentConfig};
use super::io::{
    json_bytes, label_rows, prices_csv, read_prices, read_truth, rows_csv, truth_rows, write_bundle, DiagnosticsRow,
    PriceTable, SweepRow, DIAGNOSTICS_HEADER, LABELS_HEADER, SWEEP_HEADER, TRUTH_HEADER,
};
use crate::clustering::{multi_run, ClusterConfig, MultiRunResult, RunSpec};
use crate::error::{Error, Result};
use crate::labeling::{regime_stats, AccuracyReport};
use crate::measures::{log_returns, ReturnSeries};
use crate::par;
use crate::synthgen::{gen_scenario, MinorityPeriod, Scenario, ScenarioSpec};
use crate::wasserstein::ProjectionSet;

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const PRICES_FILE: &str = "prices.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const REGIME_STATS_FILE: &str = "regime_stats.json";
pub const ACCURACY_FILE: &str = "accuracy.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Prices, optional truth per observation, and the returns derived from them.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub table: PriceTable,
    pub truth: Option<Vec<usize>>,
    pub returns: ReturnSeries,
}

impl LoadedData {
    /// Truth aligned with return points.
    pub fn return_truth(&self) -> Option<&[usize]> {
        self.truth.as_deref().map(|t| &t[1..])
    }
}

pub fn load_data(source: &DataSource) -> Result<LoadedData> {
    let (table, truth) = match source {
        DataSource::Synthetic { scenario, seed, years } => {
            let mut ds = gen_scenario(*scenario, *seed)?;
            if let Some(y) = years {
                ds = ds.prefix_years(*y)?;
            }
            (PriceTable::indexed(ds.prices), Some(ds.truth))
        }
        DataSource::Csv { data, truth } => {
            let table = read_prices(data)?;
            let truth = truth.as_deref().map(|p| read_truth(p, &table)).transpose()?;
            (table, truth)
        }
    };
    let returns = log_returns(&table.stream)?;
    Ok(LoadedData { table, truth, returns })
}

#[derive(Serialize)]
struct GenerateManifest<'a> {
    version: &'static str,
    command: &'static str,
    scenario: Scenario,
    seed: u64,
    points: usize,
    spec: &'a ScenarioSpec,
    periods: &'a [MinorityPeriod],
    files: [&'static str; 2],
}

/// Writes `prices.csv`, `truth.csv` and `manifest.json` for a scenario.
pub fn cmd_generate(scenario: Scenario, seed: u64, out: &Path) -> Result<()> {
    let ds = gen_scenario(scenario, seed)?;
    let table = PriceTable::indexed(ds.prices.clone());
    let manifest = GenerateManifest {
        version: VERSION,
        command: "generate",
        scenario,
        seed,
        points: ds.truth.len(),
        spec: &ds.spec,
        periods: &ds.periods,
        files: [PRICES_FILE, TRUTH_FILE],
    };
    write_bundle(
        out,
        &[
            (PRICES_FILE, prices_csv(&table)?),
            (TRUTH_FILE, rows_csv(TRUTH_HEADER, &truth_rows(&table.timestamps, &ds.truth))?),
            (MANIFEST_FILE, json_bytes(&manifest)?),
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub delta: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_mean_centroid_centroid: f64,
    pub total_accuracy: Option<f64>,
}

fn run_summaries(res: &MultiRunResult) -> Vec<RunSummary> {
    res.runs
        .iter()
        .map(|r| RunSummary {
            run: r.spec.run,
            seed: r.spec.seed,
            delta: r.spec.delta,
            iterations: r.result.iterations(),
            converged: r.result.converged,
            final_mean_centroid_centroid: r.final_separation(),
            total_accuracy: r.total_accuracy(),
        })
        .collect()
}

fn cluster_config(cfg: &ExperimentConfig) -> ClusterConfig {
    ClusterConfig {
        k: cfg.k,
        order: cfg.p,
        epsilon: cfg.epsilon,
        max_iterations: cfg.max_iterations,
        seed: cfg.seed,
        execution: cfg.execution,
    }
}

fn run_cell(data: &LoadedData, cfg: &ExperimentConfig, h1: usize, h2: usize, l: usize) -> Result<MultiRunResult> {
    let projections = ProjectionSet::new(data.returns.dim(), l)?;
    multi_run(
        &data.returns,
        h1,
        h2,
        &cluster_config(cfg),
        &projections,
        cfg.n_runs,
        data.return_truth(),
    )
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[derive(Serialize)]
struct AccuracySummary<'a> {
    selected_run: usize,
    selected: &'a AccuracyReport,
    ta_median: Option<f64>,
    ta_max: Option<f64>,
    runs: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct ClusterManifest<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    h1: usize,
    h2: usize,
    l: usize,
    master_seed: u64,
    selected_run: usize,
    converged_runs: usize,
    runs: Vec<RunSummary>,
    files: Vec<&'static str>,
}

/// Runs `n_runs` clusterings of one `(h1, h2, L)` cell and writes per-run
/// diagnostics, the selected run's labels and regime statistics, accuracy when
/// truth is known, and a manifest.
pub fn cmd_cluster(cfg: &ExperimentConfig) -> Result<MultiRunResult> {
    let cells = cfg.cells()?;
    let &[(h1, h2, l)] = cells.as_slice() else {
        return Err(Error::Config(format!(
            "cluster takes one h1, one h2 and one L; got {} combinations (use sweep for grids)",
            cells.len()
        )));
    };
    let data = load_data(&cfg.source)?;
    let res = run_cell(&data, cfg, h1, h2, l)?;
    let selected = res.selected();

    let diagnostics: Vec<DiagnosticsRow> = res
        .runs
        .iter()
        .flat_map(|r| {
            r.result.diagnostics.iter().map(move |d| DiagnosticsRow {
                run: r.spec.run,
                iteration: d.iteration,
                mean_sq_point_centroid: d.mean_sq_point_centroid,
                mean_centroid_centroid: d.mean_centroid_centroid,
                centroid_shift: d.centroid_shift,
                assignments_changed: d.assignments_changed,
            })
        })
        .collect();
    let mut files = vec![
        (DIAGNOSTICS_FILE, rows_csv(DIAGNOSTICS_HEADER, &diagnostics)?),
        (LABELS_FILE, rows_csv(LABELS_HEADER, &label_rows(&data.table.timestamps, &selected.labels))?),
        (REGIME_STATS_FILE, json_bytes(&regime_stats(&data.returns, &selected.labels)?)?),
    ];
    if let Some(report) = &selected.accuracy {
        let accuracies: Vec<Option<f64>> = res.runs.iter().map(|r| r.total_accuracy()).collect();
        let known: Vec<f64> = accuracies.iter().flatten().copied().collect();
        files.push((
            ACCURACY_FILE,
            json_bytes(&AccuracySummary {
                selected_run: res.selected_index(),
                selected: report,
                ta_median: median(&known),
                ta_max: known.iter().copied().reduce(f64::max),
                runs: accuracies,
            })?,
        ));
    }
    let manifest = ClusterManifest {
        version: VERSION,
        command: "cluster",
        config: cfg,
        h1,
        h2,
        l,
        master_seed: cfg.seed,
        selected_run: res.selected_index(),
        converged_runs: res.converged_count(),
        runs: run_summaries(&res),
        files: files.iter().map(|(n, _)| *n).collect(),
    };
    files.push((MANIFEST_FILE, json_bytes(&manifest)?));
    write_bundle(&cfg.out, &files)?;
    Ok(res)
}

/// Outcome of one sweep cell: the CSV row plus what the manifest records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    #[serde(flatten)]
    pub row: SweepRow,
    pub plan: Vec<RunSpec>,
    pub accuracies: Vec<f64>,
    pub separations: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.cells.iter().map(|c| c.row.clone()).collect()
    }

    pub fn cell(&self, h1: usize, h2: usize, l: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| (c.row.h1, c.row.h2, c.row.l) == (h1, h2, l))
    }
}

/// Aggregates the accuracy of every run in a cell.
pub fn summarize_cell(cfg: &ExperimentConfig, h1: usize, h2: usize, l: usize, res: Result<MultiRunResult>) -> SweepCell {
    let mut row = SweepRow {
        h1,
        h2,
        l,
        k: cfg.k,
        n_runs: cfg.n_runs,
        ta_median: None,
        ta_max: None,
        ta_metric_selected: None,
    };
    match res {
        Ok(res) => {
            let accuracies = res.accuracies().unwrap_or_default();
            row.ta_median = median(&accuracies);
            row.ta_max = accuracies.iter().copied().reduce(f64::max);
            row.ta_metric_selected = res.selected().total_accuracy();
            SweepCell {
                row,
                plan: res.runs.iter().map(|r| r.spec).collect(),
                separations: res.runs.iter().map(|r| r.final_separation()).collect(),
                accuracies,
                error: None,
            }
        }
        Err(e) => SweepCell {
            row,
            plan: Vec::new(),
            accuracies: Vec::new(),
            separations: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

#[derive(Serialize)]
struct SweepManifest<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    master_seed: u64,
    failed_cells: usize,
    cells: &'a [SweepCell],
}

/// Runs every grid cell on one dataset. Failed cells keep empty accuracy
/// fields and their error goes to the manifest; the sweep carries on.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let cells = cfg.cells()?;
    let data = load_data(&cfg.source)?;
    if data.truth.is_none() {
        return Err(Error::Config("sweep needs ground truth (--truth or a synthetic scenario)".into()));
    }
    let outcomes = par::map_slice(cfg.execution, &cells, |&(h1, h2, l)| {
        summarize_cell(cfg, h1, h2, l, run_cell(&data, cfg, h1, h2, l))
    });
    let report = SweepReport { cells: outcomes };
    let manifest = SweepManifest {
        version: VERSION,
        command: "sweep",
        config: cfg,
        master_seed: cfg.seed,
        failed_cells: report.cells.iter().filter(|c| c.error.is_some()).count(),
        cells: &report.cells,
    };
    write_bundle(
        &cfg.out,
        &[
            (SWEEP_FILE, rows_csv(SWEEP_HEADER, &report.rows())?),
            (MANIFEST_FILE, json_bytes(&manifest)?),
        ],
    )?;
    Ok(report)
}
