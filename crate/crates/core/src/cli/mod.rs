//! Command-line front end: `generate`, `cluster` and `sweep`.
//!
//! Exit codes: 0 success, 2 configuration errors, 3 data errors, 4 runtime
//! failures. `REGIME_SWK_WORKERS` caps the number of worker threads.

pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_cluster, cmd_generate, cmd_sweep, load_data, LoadedData, SweepCell, SweepReport};
pub use config::{DataSource, ExperimentConfig, H2Rule};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::synthgen::Scenario;
use crate::wasserstein::Order;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Parameter(_) => EXIT_CONFIG,
        Error::Format { .. }
        | Error::Degenerate { .. }
        | Error::InsufficientData(_)
        | Error::Shape(_)
        | Error::Domain(_) => EXIT_DATA,
        Error::Io { .. }
        | Error::Generation(_)
        | Error::EmptyCluster(_)
        | Error::SizeGuard(_)
        | Error::Contract(_) => EXIT_RUNTIME,
    }
}

#[derive(Debug, Parser)]
#[command(name = "regime-swk", version, about = "Market regime detection with sliced Wasserstein k-means")]
pub struct Cli {
    /// Evaluate runs one after another instead of on the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic scenario as prices.csv, truth.csv and manifest.json.
    Generate {
        /// One of 1d, A, B, C, D, 3d-A, 3d-B.
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster one (h1, h2, L) configuration over many runs.
    Cluster(ClusterArgs),
    /// Cluster every cell of an (h1, h2, L) grid and tabulate accuracy.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Prices CSV (`timestamp,c0,...`).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    pub data: Option<PathBuf>,
    /// Truth CSV (`timestamp,regime`) aligned with --data.
    #[arg(long, requires = "data")]
    pub truth: Option<PathBuf>,
    /// Generate a scenario in memory instead of reading --data.
    #[arg(long)]
    pub scenario: Option<Scenario>,
    /// Seed of the generated scenario; defaults to --seed.
    #[arg(long, requires = "scenario")]
    pub data_seed: Option<u64>,
    /// Keep only the first N years of the generated scenario.
    #[arg(long, requires = "scenario")]
    pub years: Option<usize>,
}

impl SourceArgs {
    fn resolve(&self, seed: u64) -> DataSource {
        match (&self.data, self.scenario) {
            (Some(data), _) => DataSource::Csv {
                data: data.clone(),
                truth: self.truth.clone(),
            },
            (None, Some(scenario)) => DataSource::Synthetic {
                scenario,
                seed: self.data_seed.unwrap_or(seed),
                years: self.years,
            },
            (None, None) => unreachable!("clap requires --data or --scenario"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub h1: usize,
    /// Offset in observations, or a percentage of h1 such as 20%.
    #[arg(long, default_value = "20%")]
    pub h2: H2Rule,
    /// Number of projection directions.
    #[arg(long = "L", default_value_t = 9)]
    pub l: usize,
    /// Number of clusters.
    #[arg(long = "K", default_value_t = 2)]
    pub k: usize,
    /// Wasserstein order, 1 or 2.
    #[arg(long, default_value_t = 1, value_parser = parse_order)]
    pub p: u8,
    #[arg(long, default_value_t = config::DEFAULT_RUNS)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub h1_list: Vec<usize>,
    /// Offsets in observations or percentages of h1, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "20%")]
    pub h2_list: Vec<H2Rule>,
    #[arg(long = "L-list", value_delimiter = ',', default_value = "9")]
    pub l_list: Vec<usize>,
    #[arg(long = "K", default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1, value_parser = parse_order)]
    pub p: u8,
    #[arg(long, default_value_t = config::DEFAULT_RUNS)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_order(s: &str) -> std::result::Result<u8, String> {
    match s {
        "1" => Ok(1),
        "2" => Ok(2),
        _ => Err(format!("p must be 1 or 2, got '{s}'")),
    }
}

fn order(p: u8) -> Order {
    if p == 2 {
        Order::Two
    } else {
        Order::One
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn experiment(
    source: &SourceArgs,
    (h1, h2, l): (Vec<usize>, Vec<H2Rule>, Vec<usize>),
    (k, p, runs, seed): (usize, u8, usize, u64),
    out: PathBuf,
    sequential: bool,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(source.resolve(seed), out);
    cfg.h1 = h1;
    cfg.h2 = h2;
    cfg.l = l;
    cfg.k = k;
    cfg.p = order(p);
    cfg.n_runs = runs;
    cfg.seed = seed;
    cfg.workers = config::workers_from_env()?;
    cfg.execution = execution(sequential);
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { scenario, seed, out } => {
            let workers = config::workers_from_env()?;
            par::with_worker_cap(workers, || cmd_generate(scenario, seed, &out))?;
            eprintln!("wrote scenario {scenario} (seed {seed}) to {}", out.display());
        }
        Command::Cluster(a) => {
            let cfg = experiment(
                &a.source,
                (vec![a.h1], vec![a.h2], vec![a.l]),
                (a.k, a.p, a.runs, a.seed),
                a.out,
                cli.sequential,
            )?;
            let res = par::with_worker_cap(cfg.workers, || cmd_cluster(&cfg))?;
            let sel = res.selected();
            eprintln!(
                "{} runs, selected run {} (mean centroid distance {:.6}){}; output in {}",
                res.runs.len(),
                sel.spec.run,
                sel.final_separation(),
                sel.total_accuracy().map(|t| format!(", TA {t:.4}")).unwrap_or_default(),
                cfg.out.display()
            );
        }
        Command::Sweep(a) => {
            let cfg = experiment(
                &a.source,
                (a.h1_list, a.h2_list, a.l_list),
                (a.k, a.p, a.runs, a.seed),
                a.out,
                cli.sequential,
            )?;
            let report = par::with_worker_cap(cfg.workers, || cmd_sweep(&cfg))?;
            for c in &report.cells {
                let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
                eprintln!(
                    "h1={} h2={} L={}: median {} max {} selected {}{}",
                    c.row.h1,
                    c.row.h2,
                    c.row.l,
                    fmt(c.row.ta_median),
                    fmt(c.row.ta_max),
                    fmt(c.row.ta_metric_selected),
                    c.error.as_ref().map(|e| format!(" (failed: {e})")).unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
