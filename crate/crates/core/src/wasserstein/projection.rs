use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Sliced, SortedAtoms};
use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;

/// How a [`ProjectionSet`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionScheme {
    /// `d = 1`: the single direction `+1`.
    Identity,
    /// `d = 2`: angles `pi * l / L` for `l = 0..L`.
    HalfCircle,
    /// `d = 3`: Fibonacci lattice on the upper hemisphere.
    FibonacciHemisphere,
    /// Directions supplied by the caller.
    Custom,
}

/// Fixed unit directions used for every projection in a clustering run.
///
/// Grids cover a half-sphere; antipodal directions give identical 1-D distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSet {
    dim: usize,
    directions: Vec<Vec<f64>>,
    scheme: ProjectionScheme,
}

const NORM_TOL: f64 = 1e-12;

impl ProjectionSet {
    /// Deterministic grid of `count` directions in `R^dim`. `dim = 1` always
    /// yields the single direction `+1`. Dimensions above 3 need
    /// [`ProjectionSet::from_directions`].
    pub fn new(dim: usize, count: usize) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::Parameter(format!(
                "projection grid needs d >= 1 and L >= 1 (d={dim}, L={count})"
            )));
        }
        let (directions, scheme) = match dim {
            1 => (vec![vec![1.0]], ProjectionScheme::Identity),
            2 => (
                (0..count)
                    .map(|l| {
                        let angle = PI * l as f64 / count as f64;
                        vec![angle.cos(), angle.sin()]
                    })
                    .collect(),
                ProjectionScheme::HalfCircle,
            ),
            3 => (fibonacci_hemisphere(count), ProjectionScheme::FibonacciHemisphere),
            _ => {
                return Err(Error::Parameter(format!(
                    "no built-in projection grid for d={dim}; supply directions explicitly"
                )))
            }
        };
        Ok(ProjectionSet {
            dim,
            directions,
            scheme,
        })
    }

    /// Caller-supplied directions; each is normalized, then the set is checked
    /// for duplicates and antipodal pairs.
    pub fn from_directions(directions: Vec<Vec<f64>>) -> Result<Self> {
        let dim = directions
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Parameter("at least one direction required".into()))?;
        if dim == 0 {
            return Err(Error::Parameter("directions must have d >= 1".into()));
        }
        let mut normalized = Vec::with_capacity(directions.len());
        for (l, v) in directions.into_iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Shape(format!("direction {l} has length {}, expected {dim}", v.len())));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm <= 0.0 {
                return Err(Error::Parameter(format!("direction {l} cannot be normalized")));
            }
            normalized.push(v.into_iter().map(|x| x / norm).collect::<Vec<_>>());
        }
        let set = ProjectionSet {
            dim,
            directions: normalized,
            scheme: ProjectionScheme::Custom,
        };
        set.check_distinct()?;
        Ok(set)
    }

    fn check_distinct(&self) -> Result<()> {
        for i in 0..self.directions.len() {
            for j in i + 1..self.directions.len() {
                let dot: f64 = self.directions[i]
                    .iter()
                    .zip(&self.directions[j])
                    .map(|(a, b)| a * b)
                    .sum();
                if dot.abs() >= 1.0 - NORM_TOL {
                    return Err(Error::Parameter(format!(
                        "directions {i} and {j} are equal or antipodal"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn scheme(&self) -> ProjectionScheme {
        self.scheme
    }
}

fn fibonacci_hemisphere(count: usize) -> Vec<Vec<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Sorted projections of one window onto every direction of a [`ProjectionSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedMeasure {
    pub per_direction: Vec<SortedAtoms>,
    pub window_index: usize,
    pub start_index: usize,
}

impl ProjectedMeasure {
    pub fn atom_count(&self) -> usize {
        self.per_direction.first().map_or(0, SortedAtoms::len)
    }
}

impl Sliced for ProjectedMeasure {
    fn slices(&self) -> &[SortedAtoms] {
        &self.per_direction
    }
}

/// Projects every atom onto each direction and sorts once per direction.
pub fn project_measure(measure: &EmpiricalMeasure, projections: &ProjectionSet) -> Result<ProjectedMeasure> {
    if measure.dim() != projections.dim() {
        return Err(Error::Shape(format!(
            "measure has dimension {}, projections have {}",
            measure.dim(),
            projections.dim()
        )));
    }
    let per_direction = projections
        .directions()
        .iter()
        .map(|theta| {
            SortedAtoms::from_unsorted(
                (0..measure.len())
                    .map(|i| measure.atom(i).iter().zip(theta).map(|(x, t)| x * t).sum())
                    .collect(),
            )
        })
        .collect();
    Ok(ProjectedMeasure {
        per_direction,
        window_index: measure.window_index,
        start_index: measure.start_index,
    })
}
