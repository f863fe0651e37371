use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::synthgen::Scenario;
use crate::wasserstein::Order;

pub const DEFAULT_RUNS: usize = 100;

/// Window offset given either in observations or as a percentage of `h1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum H2Rule {
    Absolute(usize),
    Percent(f64),
}

impl H2Rule {
    /// Percentages resolve to `max(1, round_half_up(pct/100 * h1))`.
    pub fn resolve(self, h1: usize) -> Result<usize> {
        let h2 = match self {
            H2Rule::Absolute(v) => v,
            H2Rule::Percent(pct) => ((pct * h1 as f64 / 100.0 + 0.5).floor() as usize).max(1),
        };
        if h2 == 0 || h2 > h1 {
            return Err(Error::Config(format!("h2 = {h2} (from {self}) must lie in 1..={h1}")));
        }
        Ok(h2)
    }
}

impl FromStr for H2Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = s.strip_suffix('%') {
            let pct: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad h2 percentage '{s}'")))?;
            if !(pct > 0.0 && pct <= 100.0) {
                return Err(Error::Config(format!("h2 percentage must lie in (0, 100], got '{s}'")));
            }
            Ok(H2Rule::Percent(pct))
        } else {
            s.parse()
                .map(H2Rule::Absolute)
                .map_err(|_| Error::Config(format!("bad h2 value '{s}' (expected an integer or a percentage like 20%)")))
        }
    }
}

impl fmt::Display for H2Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            H2Rule::Absolute(v) => write!(f, "{v}"),
            H2Rule::Percent(p) => write!(f, "{p}%"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum DataSource {
    /// A generated scenario, optionally cut to its first `years` years.
    Synthetic {
        scenario: Scenario,
        seed: u64,
        years: Option<usize>,
    },
    Csv {
        data: PathBuf,
        truth: Option<PathBuf>,
    },
}

/// Everything needed to reproduce a `cluster` or `sweep` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub h1: Vec<usize>,
    pub h2: Vec<H2Rule>,
    pub l: Vec<usize>,
    pub k: usize,
    pub p: Order,
    pub n_runs: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub out: PathBuf,
    pub workers: Option<usize>,
    #[serde(default)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, out: PathBuf) -> Self {
        ExperimentConfig {
            source,
            h1: vec![35],
            h2: vec![H2Rule::Percent(20.0)],
            l: vec![9],
            k: 2,
            p: Order::One,
            n_runs: DEFAULT_RUNS,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            out,
            workers: None,
            execution: Execution::default(),
        }
    }

    /// Every `(h1, h2, L)` cell in grid order, with `h2` resolved.
    pub fn cells(&self) -> Result<Vec<(usize, usize, usize)>> {
        if self.h1.is_empty() || self.h2.is_empty() || self.l.is_empty() {
            return Err(Error::Config("h1, h2 and L lists must be nonempty".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if self.n_runs == 0 {
            return Err(Error::Config("at least one run is required".into()));
        }
        let mut cells = Vec::new();
        for &h1 in &self.h1 {
            if h1 == 0 {
                return Err(Error::Config("h1 must be at least 1".into()));
            }
            for &rule in &self.h2 {
                let h2 = rule.resolve(h1)?;
                for &l in &self.l {
                    if l == 0 {
                        return Err(Error::Config("L must be at least 1".into()));
                    }
                    cells.push((h1, h2, l));
                }
            }
        }
        Ok(cells)
    }
}

/// Worker cap from `REGIME_SWK_WORKERS`; unset or empty means no cap.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var("REGIME_SWK_WORKERS") {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("REGIME_SWK_WORKERS must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}
