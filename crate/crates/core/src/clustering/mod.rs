//! Sliced Wasserstein k-means over projected window measures.
//!
//! Centroids exist only as their sorted projections along the fixed directions
//! of a [`ProjectionSet`](crate::wasserstein::ProjectionSet); each centroid
//! update is a per-direction 1-D barycentre. The loop stops when the summed
//! sliced distance between successive centroids drops below `epsilon`.

mod multi_run;
mod wk_means;

pub use multi_run::{multi_run, project_windows, run_plan, MultiRunResult, RunRecord, RunSpec};
pub use wk_means::{run_wk_means, WkMeansResult};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::wasserstein::{
    barycentre_unchecked, distance_unchecked, sliced_unchecked, Order, ProjectedMeasure, Sliced,
    SortedAtoms,
};

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k: usize,
    pub order: Order,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub execution: Execution,
}

impl ClusterConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        ClusterConfig {
            k,
            order: Order::One,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed,
            execution: Execution::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, measures: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Parameter("cluster count K must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Parameter("tolerance epsilon must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be at least 1".into()));
        }
        if self.k > measures {
            return Err(Error::InsufficientData(format!(
                "K = {} clusters but only M = {measures} windows",
                self.k
            )));
        }
        Ok(())
    }
}

/// A cluster representative, held only through its sorted projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub per_direction: Vec<SortedAtoms>,
}

impl Sliced for Centroid {
    fn slices(&self) -> &[SortedAtoms] {
        &self.per_direction
    }
}

impl From<&ProjectedMeasure> for Centroid {
    fn from(m: &ProjectedMeasure) -> Self {
        Centroid {
            per_direction: m.per_direction.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub iteration: usize,
    pub mean_sq_point_centroid: f64,
    /// Zero when `K = 1`; see `separation_defined`.
    pub mean_centroid_centroid: f64,
    pub separation_defined: bool,
    pub assignments_changed: usize,
    /// Summed sliced distance between this and the previous centroids.
    pub centroid_shift: f64,
    pub repaired_clusters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Cluster id per window, indexed like the input measures.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Centroid>,
    pub diagnostics: Vec<IterationDiagnostics>,
    pub converged: bool,
    pub delta_used: usize,
    pub seed_used: u64,
}

impl ClusteringResult {
    pub fn final_diagnostics(&self) -> &IterationDiagnostics {
        self.diagnostics.last().expect("a run records at least one iteration")
    }

    pub fn iterations(&self) -> usize {
        self.diagnostics.len()
    }
}

/// `K` distinct window indices drawn uniformly without replacement.
pub fn init_indices(measures: usize, cfg: &ClusterConfig) -> Result<Vec<usize>> {
    cfg.validate(measures)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(rand::seq::index::sample(&mut rng, measures, cfg.k).into_vec())
}

pub fn init_centroids(measures: &[ProjectedMeasure], cfg: &ClusterConfig) -> Result<Vec<Centroid>> {
    Ok(init_indices(measures.len(), cfg)?
        .into_iter()
        .map(|i| Centroid::from(&measures[i]))
        .collect())
}

fn nearest(slices: &[SortedAtoms], centroids: &[Centroid], order: Order) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centroids.iter().enumerate() {
        let d = sliced_unchecked(slices, &c.per_direction, order);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Nearest centroid for every measure; ties go to the lowest cluster id.
pub fn assign_step(
    measures: &[ProjectedMeasure],
    centroids: &[Centroid],
    order: Order,
    exec: Execution,
) -> Vec<usize> {
    assert!(!centroids.is_empty(), "assignment needs at least one centroid");
    par::map_slice(exec, measures, |m| nearest(&m.per_direction, centroids, order))
}

/// New centroids and the number of clusters that had to be re-seeded.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub centroids: Vec<Centroid>,
    pub repaired: usize,
}

/// Per-direction barycentre of each cluster's members.
///
/// An empty cluster is re-seeded with the measure farthest from its own
/// freshly updated centroid; each measure seeds at most one empty cluster.
pub fn update_step(
    measures: &[ProjectedMeasure],
    assignments: &[usize],
    k: usize,
    order: Order,
    exec: Execution,
) -> UpdateOutcome {
    let directions = measures[0].per_direction.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignments.iter().enumerate() {
        members[c].push(i);
    }
    let per_cell = par::map_range(exec, k * directions, |cell| {
        let (c, l) = (cell / directions, cell % directions);
        if members[c].is_empty() {
            return None;
        }
        let slices: Vec<&[f64]> = members[c]
            .iter()
            .map(|&i| measures[i].per_direction[l].as_slice())
            .collect();
        Some(SortedAtoms::from_sorted_unchecked(barycentre_unchecked(&slices, order)))
    });
    let mut cells = per_cell.into_iter();
    let mut centroids: Vec<Option<Centroid>> = (0..k)
        .map(|_| {
            let dirs: Option<Vec<SortedAtoms>> = cells.by_ref().take(directions).collect();
            dirs.map(|per_direction| Centroid { per_direction })
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&c| centroids[c].is_none()).collect();
    if !empty.is_empty() {
        let spread: Vec<f64> = measures
            .iter()
            .zip(assignments)
            .map(|(m, &c)| {
                centroids[c]
                    .as_ref()
                    .map_or(0.0, |cen| sliced_unchecked(&m.per_direction, &cen.per_direction, order))
            })
            .collect();
        let mut taken = vec![false; measures.len()];
        for &c in &empty {
            let far = farthest(&spread, &taken);
            taken[far] = true;
            centroids[c] = Some(Centroid::from(&measures[far]));
        }
    }
    UpdateOutcome {
        centroids: centroids.into_iter().map(|c| c.expect("every cluster seeded")).collect(),
        repaired: empty.len(),
    }
}

/// Index of the largest untaken value; earliest index wins ties.
pub(crate) fn farthest(spread: &[f64], taken: &[bool]) -> usize {
    let mut best = None;
    for (i, &d) in spread.iter().enumerate() {
        if taken[i] {
            continue;
        }
        match best {
            Some((_, bd)) if d <= bd => {}
            _ => best = Some((i, d)),
        }
    }
    best.expect("more measures than clusters").0
}

/// Within-cluster cost `sum_i W^p(mu_i, centroid_{a(i)})` under the sliced distance.
pub fn within_cluster_cost(
    measures: &[ProjectedMeasure],
    assignments: &[usize],
    centroids: &[Centroid],
    order: Order,
) -> f64 {
    measures
        .iter()
        .zip(assignments)
        .map(|(m, &c)| order.pow(sliced_unchecked(&m.per_direction, &centroids[c].per_direction, order)))
        .sum()
}

/// Per-direction within-cluster cost `sum_i W_p^p` along direction `l`.
pub fn direction_cost(
    measures: &[ProjectedMeasure],
    assignments: &[usize],
    centroids: &[Centroid],
    direction: usize,
    order: Order,
) -> f64 {
    measures
        .iter()
        .zip(assignments)
        .map(|(m, &c)| {
            order.pow(distance_unchecked(
                m.per_direction[direction].as_slice(),
                centroids[c].per_direction[direction].as_slice(),
                order,
            ))
        })
        .sum()
}

/// Mean over nonempty clusters of the mean squared member-centroid distance.
pub(crate) fn mean_sq_point_centroid(point_dist: &[f64], assignments: &[usize], k: usize) -> f64 {
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&d, &c) in point_dist.iter().zip(assignments) {
        sums[c] += d * d;
        counts[c] += 1;
    }
    let mut total = 0.0;
    let mut nonempty = 0usize;
    for (s, &n) in sums.iter().zip(&counts) {
        if n > 0 {
            total += s / n as f64;
            nonempty += 1;
        }
    }
    if nonempty == 0 {
        0.0
    } else {
        total / nonempty as f64
    }
}

/// Mean over unordered centroid pairs, from a pairwise distance callback.
pub(crate) fn mean_pairwise(k: usize, dist: impl Fn(usize, usize) -> f64) -> (f64, bool) {
    if k < 2 {
        return (0.0, false);
    }
    let mut total = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            total += dist(a, b);
        }
    }
    (total / (k * (k - 1) / 2) as f64, true)
}

/// Mean centroid-centroid sliced distance over unordered pairs.
pub fn mean_centroid_centroid(centroids: &[Centroid], order: Order) -> f64 {
    mean_pairwise(centroids.len(), |a, b| {
        sliced_unchecked(&centroids[a].per_direction, &centroids[b].per_direction, order)
    })
    .0
}

fn check_shapes(measures: &[ProjectedMeasure]) -> Result<()> {
    let first = measures
        .first()
        .ok_or_else(|| Error::InsufficientData("no windows to cluster".into()))?;
    let (l, n) = (first.per_direction.len(), first.atom_count());
    if l == 0 || n == 0 {
        return Err(Error::Shape("windows carry no projected atoms".into()));
    }
    for m in measures {
        if m.per_direction.len() != l || m.per_direction.iter().any(|s| s.len() != n) {
            return Err(Error::Shape(format!(
                "window {} does not match L = {l} directions of {n} atoms",
                m.window_index
            )));
        }
    }
    Ok(())
}

/// The full sliced Wasserstein k-means loop from a seeded random start.
pub fn run_clustering(measures: &[ProjectedMeasure], cfg: &ClusterConfig) -> Result<ClusteringResult> {
    check_shapes(measures)?;
    let mut centroids = init_centroids(measures, cfg)?;
    let order = cfg.order;
    let mut previous: Option<Vec<usize>> = None;
    let mut diagnostics = Vec::new();
    let mut converged = false;

    for iteration in 0..cfg.max_iterations {
        let assignments = assign_step(measures, &centroids, order, cfg.execution);
        let changed = previous.as_ref().map_or(assignments.len(), |prev| {
            prev.iter().zip(&assignments).filter(|(a, b)| a != b).count()
        });
        let update = update_step(measures, &assignments, cfg.k, order, cfg.execution);
        let shift: f64 = update
            .centroids
            .iter()
            .zip(&centroids)
            .map(|(new, old)| sliced_unchecked(&new.per_direction, &old.per_direction, order))
            .sum();
        centroids = update.centroids;

        let point_dist = par::map_range(cfg.execution, measures.len(), |i| {
            sliced_unchecked(
                &measures[i].per_direction,
                &centroids[assignments[i]].per_direction,
                order,
            )
        });
        let (separation, defined) = mean_pairwise(cfg.k, |a, b| {
            sliced_unchecked(&centroids[a].per_direction, &centroids[b].per_direction, order)
        });
        diagnostics.push(IterationDiagnostics {
            iteration,
            mean_sq_point_centroid: mean_sq_point_centroid(&point_dist, &assignments, cfg.k),
            mean_centroid_centroid: separation,
            separation_defined: defined,
            assignments_changed: changed,
            centroid_shift: shift,
            repaired_clusters: update.repaired,
        });
        previous = Some(assignments);
        if shift < cfg.epsilon {
            converged = true;
            break;
        }
    }

    Ok(ClusteringResult {
        assignments: previous.expect("at least one iteration"),
        centroids,
        diagnostics,
        converged,
        delta_used: measures.iter().map(|m| m.start_index).min().unwrap_or(0),
        seed_used: cfg.seed,
    })
}
