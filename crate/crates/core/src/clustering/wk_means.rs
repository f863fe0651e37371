//! Plain one-dimensional Wasserstein k-means, working directly on sorted
//! windows without any projection machinery. With a single `+1` direction the
//! sliced loop must reproduce this one exactly.

use super::{farthest, init_indices, mean_pairwise, mean_sq_point_centroid, ClusterConfig, IterationDiagnostics};
use crate::error::{Error, Result};
use crate::wasserstein::{w1_barycentre, w1_distance, SortedAtoms};

#[derive(Debug, Clone, PartialEq)]
pub struct WkMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<SortedAtoms>,
    pub diagnostics: Vec<IterationDiagnostics>,
    pub converged: bool,
}

pub fn run_wk_means(measures: &[SortedAtoms], cfg: &ClusterConfig) -> Result<WkMeansResult> {
    let n = measures.first().map(SortedAtoms::len).unwrap_or(0);
    if n == 0 || measures.iter().any(|m| m.len() != n) {
        return Err(Error::Shape("windows must be nonempty and of equal size".into()));
    }
    let order = cfg.order;
    let dist = |a: &SortedAtoms, b: &SortedAtoms| w1_distance(a, b, order).expect("equal sizes");
    let mut centroids: Vec<SortedAtoms> = init_indices(measures.len(), cfg)?
        .into_iter()
        .map(|i| measures[i].clone())
        .collect();
    let mut previous: Option<Vec<usize>> = None;
    let mut diagnostics = Vec::new();
    let mut converged = false;

    for iteration in 0..cfg.max_iterations {
        let assignments: Vec<usize> = measures
            .iter()
            .map(|m| {
                let mut best = (0, f64::INFINITY);
                for (k, c) in centroids.iter().enumerate() {
                    let d = dist(m, c);
                    if d < best.1 {
                        best = (k, d);
                    }
                }
                best.0
            })
            .collect();
        let changed = previous.as_ref().map_or(assignments.len(), |prev| {
            prev.iter().zip(&assignments).filter(|(a, b)| a != b).count()
        });

        let mut updated: Vec<Option<SortedAtoms>> = (0..cfg.k)
            .map(|k| {
                let members: Vec<&SortedAtoms> = measures
                    .iter()
                    .zip(&assignments)
                    .filter(|(_, &c)| c == k)
                    .map(|(m, _)| m)
                    .collect();
                (!members.is_empty()).then(|| w1_barycentre(&members, order).expect("nonempty"))
            })
            .collect();
        let empty: Vec<usize> = (0..cfg.k).filter(|&k| updated[k].is_none()).collect();
        if !empty.is_empty() {
            let spread: Vec<f64> = measures
                .iter()
                .zip(&assignments)
                .map(|(m, &c)| updated[c].as_ref().map_or(0.0, |cen| dist(m, cen)))
                .collect();
            let mut taken = vec![false; measures.len()];
            for &k in &empty {
                let far = farthest(&spread, &taken);
                taken[far] = true;
                updated[k] = Some(measures[far].clone());
            }
        }
        let updated: Vec<SortedAtoms> = updated.into_iter().map(Option::unwrap).collect();

        let shift: f64 = updated.iter().zip(&centroids).map(|(a, b)| dist(a, b)).sum();
        centroids = updated;
        let point_dist: Vec<f64> = measures
            .iter()
            .zip(&assignments)
            .map(|(m, &c)| dist(m, &centroids[c]))
            .collect();
        let (separation, defined) = mean_pairwise(cfg.k, |a, b| dist(&centroids[a], &centroids[b]));
        diagnostics.push(IterationDiagnostics {
            iteration,
            mean_sq_point_centroid: mean_sq_point_centroid(&point_dist, &assignments, cfg.k),
            mean_centroid_centroid: separation,
            separation_defined: defined,
            assignments_changed: changed,
            centroid_shift: shift,
            repaired_clusters: empty.len(),
        });
        previous = Some(assignments);
        if shift < cfg.epsilon {
            converged = true;
            break;
        }
    }

    Ok(WkMeansResult {
        assignments: previous.expect("at least one iteration"),
        centroids,
        diagnostics,
        converged,
    })
}
