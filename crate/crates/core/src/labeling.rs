//! Per-point regime labels from window assignments, accuracy against ground
//! truth, and per-regime descriptive statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{LiftConfig, ReturnSeries};

/// Largest cluster or regime count accepted by [`map_clusters`].
pub const MAX_MATCHED_LABELS: usize = 8;

/// Voted labels for every point of a return series. `None` marks points no
/// window covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSeries {
    pub labels: Vec<Option<usize>>,
    /// Votes received by the chosen label.
    pub votes_for: Vec<u32>,
    /// Number of windows covering each point.
    pub coverage: Vec<u32>,
    pub truth: Option<Vec<usize>>,
    pub clusters: usize,
}

impl LabeledSeries {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn with_truth(mut self, truth: Vec<usize>) -> Result<Self> {
        if truth.len() != self.labels.len() {
            return Err(Error::Shape(format!(
                "{} truth labels for {} points",
                truth.len(),
                self.labels.len()
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    fn truth_or_err(&self) -> Result<&[usize]> {
        self.truth
            .as_deref()
            .ok_or_else(|| Error::Contract("ground-truth labels are required".into()))
    }
}

/// Majority vote over the windows covering each point.
///
/// Window `m` covers points `delta + h2*m .. delta + h2*m + h1`. The label with
/// the most votes wins. When several labels tie, the previous point's label is
/// kept if it is among them; otherwise the lowest tied id wins.
pub fn majority_vote(assignments: &[usize], lift: &LiftConfig, series_length: usize) -> LabeledSeries {
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let mut votes = vec![0u32; series_length * k];
    let mut coverage = vec![0u32; series_length];
    for (m, &c) in assignments.iter().enumerate() {
        let start = lift.window_start(m);
        let end = (start + lift.h1).min(series_length);
        for t in start..end {
            votes[t * k + c] += 1;
            coverage[t] += 1;
        }
    }

    let mut labels = vec![None; series_length];
    let mut votes_for = vec![0u32; series_length];
    let mut prevailing: Option<usize> = None;
    for t in 0..series_length {
        if coverage[t] == 0 {
            continue;
        }
        let row = &votes[t * k..(t + 1) * k];
        let top = *row.iter().max().expect("k >= 1 when covered");
        let label = match prevailing {
            Some(p) if row[p] == top => p,
            _ => row.iter().position(|&v| v == top).expect("max is present"),
        };
        labels[t] = Some(label);
        votes_for[t] = top;
        prevailing = Some(label);
    }
    LabeledSeries {
        labels,
        votes_for,
        coverage,
        truth: None,
        clusters: k,
    }
}

/// `regimes x clusters` counts over labeled points.
pub fn confusion_matrix(labeled: &LabeledSeries) -> Result<Vec<Vec<usize>>> {
    let truth = labeled.truth_or_err()?;
    let regimes = truth.iter().max().map_or(0, |m| m + 1);
    let clusters = labeled
        .labels
        .iter()
        .flatten()
        .max()
        .map_or(0, |m| m + 1)
        .max(labeled.clusters);
    let mut counts = vec![vec![0usize; clusters]; regimes];
    for (l, &y) in labeled.labels.iter().zip(truth) {
        if let Some(c) = l {
            counts[y][*c] += 1;
        }
    }
    Ok(counts)
}

/// Cluster id to regime id; `None` for clusters left unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMapping(pub Vec<Option<usize>>);

impl ClusterMapping {
    pub fn identity(k: usize) -> Self {
        ClusterMapping((0..k).map(Some).collect())
    }

    pub fn regime_of(&self, cluster: usize) -> Option<usize> {
        self.0.get(cluster).copied().flatten()
    }
}

/// One-to-one matching of clusters onto regimes maximizing the number of
/// correctly labeled points, by exhaustive search. Surplus clusters (or
/// regimes) stay unmatched.
pub fn map_clusters(labeled: &LabeledSeries) -> Result<ClusterMapping> {
    let counts = confusion_matrix(labeled)?;
    let regimes = counts.len();
    let clusters = counts.first().map_or(labeled.clusters, Vec::len);
    if clusters > MAX_MATCHED_LABELS || regimes > MAX_MATCHED_LABELS {
        return Err(Error::SizeGuard(format!(
            "exhaustive matching supports at most {MAX_MATCHED_LABELS} clusters and regimes \
             (got {clusters} and {regimes})"
        )));
    }

    struct Search<'a> {
        counts: &'a [Vec<usize>],
        clusters: usize,
        regimes: usize,
        current: Vec<Option<usize>>,
        used: Vec<bool>,
        best: Option<(usize, Vec<Option<usize>>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, c: usize, score: usize, matched: usize) {
            if c == self.clusters {
                if matched == self.clusters.min(self.regimes)
                    && self.best.as_ref().is_none_or(|(b, _)| score > *b)
                {
                    self.best = Some((score, self.current.clone()));
                }
                return;
            }
            for r in 0..self.regimes {
                if !self.used[r] {
                    self.used[r] = true;
                    self.current[c] = Some(r);
                    self.visit(c + 1, score + self.counts[r][c], matched + 1);
                    self.used[r] = false;
                }
            }
            let remaining = self.clusters - c - 1;
            if matched + remaining >= self.clusters.min(self.regimes) {
                self.current[c] = None;
                self.visit(c + 1, score, matched);
            }
        }
    }

    let mut search = Search {
        counts: &counts,
        clusters,
        regimes,
        current: vec![None; clusters],
        used: vec![false; regimes],
        best: None,
    };
    search.visit(0, 0, 0);
    Ok(ClusterMapping(search.best.map(|(_, m)| m).unwrap_or_default()))
}

/// Fraction of labeled points in `partition` (all points when `None`) whose
/// mapped label equals the truth.
pub fn total_accuracy(labeled: &LabeledSeries, mapping: &ClusterMapping, partition: Option<&[usize]>) -> Result<f64> {
    let truth = labeled.truth_or_err()?;
    let mut hits = 0usize;
    let mut total = 0usize;
    let mut tally = |t: usize| {
        if let Some(c) = labeled.labels[t] {
            total += 1;
            if mapping.regime_of(c) == Some(truth[t]) {
                hits += 1;
            }
        }
    };
    match partition {
        Some(idx) => {
            for &t in idx {
                if t >= labeled.len() {
                    return Err(Error::Shape(format!("partition index {t} out of range")));
                }
                tally(t);
            }
        }
        None => (0..labeled.len()).for_each(tally),
    }
    if total == 0 {
        return Err(Error::Contract("partition contains no labeled points".into()));
    }
    Ok(hits as f64 / total as f64)
}

/// Points whose true regime is `regime`.
pub fn regime_partition(labeled: &LabeledSeries, regime: usize) -> Result<Vec<usize>> {
    Ok(labeled
        .truth_or_err()?
        .iter()
        .enumerate()
        .filter(|(_, &y)| y == regime)
        .map(|(t, _)| t)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub total: f64,
    /// Accuracy within each true regime; `None` if no point of the regime is labeled.
    pub per_regime: Vec<Option<f64>>,
    pub mapping: ClusterMapping,
    pub labeled_points: usize,
}

/// Optimal matching followed by total and per-regime accuracy.
pub fn score(labeled: &LabeledSeries) -> Result<AccuracyReport> {
    let mapping = map_clusters(labeled)?;
    let total = total_accuracy(labeled, &mapping, None)?;
    let regimes = labeled.truth_or_err()?.iter().max().map_or(0, |m| m + 1);
    let per_regime = (0..regimes)
        .map(|r| {
            let part = regime_partition(labeled, r)?;
            Ok(total_accuracy(labeled, &mapping, Some(&part)).ok())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AccuracyReport {
        total,
        per_regime,
        mapping,
        labeled_points: labeled.labeled_count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub label: usize,
    pub count: usize,
    /// Set when fewer than two points carry this label; moments are then empty.
    pub suppressed: bool,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Pearson correlations; `None` where a coordinate has zero variance.
    pub correlation: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeStats {
    pub regimes: Vec<RegimeSummary>,
}

/// Mean, standard deviation and correlation of the raw log returns within
/// each voted regime.
pub fn regime_stats(returns: &ReturnSeries, labeled: &LabeledSeries) -> Result<RegimeStats> {
    if returns.len() != labeled.len() {
        return Err(Error::Shape(format!(
            "{} returns but {} labels",
            returns.len(),
            labeled.len()
        )));
    }
    let d = returns.dim();
    let k = labeled
        .labels
        .iter()
        .flatten()
        .max()
        .map_or(0, |m| m + 1)
        .max(labeled.clusters);
    let regimes = (0..k)
        .map(|label| {
            let rows: Vec<&[f64]> = (0..returns.len())
                .filter(|&t| labeled.labels[t] == Some(label))
                .map(|t| returns.raw_row(t))
                .collect();
            summarize(label, &rows, d)
        })
        .collect();
    Ok(RegimeStats { regimes })
}

fn summarize(label: usize, rows: &[&[f64]], d: usize) -> RegimeSummary {
    let n = rows.len();
    if n < 2 {
        return RegimeSummary {
            label,
            count: n,
            suppressed: true,
            mean: Vec::new(),
            std: Vec::new(),
            correlation: Vec::new(),
        };
    }
    let nf = n as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / nf).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for a in 0..d {
            for b in a..d {
                cov[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    let std: Vec<f64> = (0..d).map(|j| (cov[j][j] / nf).sqrt()).collect();
    let correlation = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    let (lo, hi) = (a.min(b), a.max(b));
                    if std[a] == 0.0 || std[b] == 0.0 {
                        None
                    } else if a == b {
                        Some(1.0)
                    } else {
                        Some((cov[lo][hi] / nf / (std[a] * std[b])).clamp(-1.0, 1.0))
                    }
                })
                .collect()
        })
        .collect();
    RegimeSummary {
        label,
        count: n,
        suppressed: false,
        mean,
        std,
        correlation,
    }
}
