//! One-dimensional Wasserstein distance and barycentre on equal-size empirical
//! measures, and the sliced distance built on top of them.
//!
//! For two measures with `n` atoms each, sorting both atom lists gives the
//! optimal coupling, so
//!
//! ```text
//! W_p(a, b) = ( (1/n) * sum_i |a*_i - b*_i|^p )^(1/p)
//! ```
//!
//! and the barycentre is the per-order-statistic median (`p = 1`) or mean
//! (`p = 2`). The sliced distance averages the 1-D distance over a fixed set
//! of projection directions.

mod oracle;
mod projection;

pub use oracle::{brute_force_w1, MAX_BRUTE_FORCE_ATOMS};
pub use projection::{project_measure, ProjectedMeasure, ProjectionScheme, ProjectionSet};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The order `p` of the Wasserstein distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    #[default]
    One,
    Two,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::One => 1,
            Order::Two => 2,
        }
    }

    /// `|x|^p`
    #[inline]
    pub fn pow(self, x: f64) -> f64 {
        match self {
            Order::One => x.abs(),
            Order::Two => x * x,
        }
    }

    /// Inverse of [`Order::pow`] on nonnegative reals.
    #[inline]
    pub fn root(self, x: f64) -> f64 {
        match self {
            Order::One => x,
            Order::Two => x.sqrt(),
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(p: u8) -> Result<Self> {
        match p {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            other => Err(Error::Parameter(format!("order p must be 1 or 2, got {other}"))),
        }
    }
}

impl From<Order> for u8 {
    fn from(p: Order) -> u8 {
        p.as_u8()
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Atoms of a 1-D empirical measure in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedAtoms(Vec<f64>);

impl SortedAtoms {
    /// Wraps an already-sorted list. Fails if the list is not ascending or
    /// contains NaN.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("atoms must not be NaN".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Contract("atoms are not in ascending order".into()));
        }
        Ok(SortedAtoms(values))
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        SortedAtoms(values)
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        SortedAtoms(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for SortedAtoms {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f64], b: &[f64], order: Order) -> f64 {
    let n = a.len() as f64;
    match order {
        Order::One => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n,
        Order::Two => {
            let s = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n;
            s.sqrt()
        }
    }
}

/// `W_p` between two sorted 1-D measures with the same number of atoms.
pub fn w1_distance(a: &SortedAtoms, b: &SortedAtoms, order: Order) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "atom counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Shape("measures have no atoms".into()));
    }
    Ok(distance_unchecked(a.as_slice(), b.as_slice(), order))
}

/// Median of `buf`, midpoint of the two central values for even lengths.
/// Reorders `buf`.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let m = buf.len();
    let mid = m / 2;
    let (left, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if m % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Barycentre of sorted measures given as slices; skips validation.
pub(crate) fn barycentre_unchecked(measures: &[&[f64]], order: Order) -> Vec<f64> {
    let n = measures[0].len();
    let count = measures.len();
    match order {
        Order::One => {
            let mut scratch = vec![0.0; count];
            (0..n)
                .map(|j| {
                    for (s, m) in scratch.iter_mut().zip(measures) {
                        *s = m[j];
                    }
                    median_in_place(&mut scratch)
                })
                .collect()
        }
        Order::Two => {
            let mut acc = vec![0.0; n];
            for m in measures {
                for (a, v) in acc.iter_mut().zip(m.iter()) {
                    *a += v;
                }
            }
            acc.iter_mut().for_each(|a| *a /= count as f64);
            acc
        }
    }
}

/// Wasserstein barycentre of a family of sorted measures: per-index median for
/// `p = 1`, per-index mean for `p = 2`.
pub fn w1_barycentre(measures: &[&SortedAtoms], order: Order) -> Result<SortedAtoms> {
    let first = measures
        .first()
        .ok_or_else(|| Error::EmptyCluster("barycentre of an empty family".into()))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::Shape("measures have no atoms".into()));
    }
    if let Some(bad) = measures.iter().find(|m| m.len() != n) {
        return Err(Error::Shape(format!(
            "atom counts differ: {n} vs {}",
            bad.len()
        )));
    }
    let slices: Vec<&[f64]> = measures.iter().map(|m| m.as_slice()).collect();
    // per-index medians and means of sorted lists are monotone, and rounding
    // preserves that
    Ok(SortedAtoms::from_sorted_unchecked(barycentre_unchecked(
        &slices, order,
    )))
}

/// `sum_m W_p^p(candidate, measures[m])`, the quantity the barycentre minimizes.
pub fn barycentre_cost(candidate: &SortedAtoms, measures: &[&SortedAtoms], order: Order) -> Result<f64> {
    measures.iter().try_fold(0.0, |acc, m| {
        Ok(acc + order.pow(w1_distance(candidate, m, order)?))
    })
}

/// Anything represented by its sorted projections along a fixed direction set.
pub trait Sliced {
    fn slices(&self) -> &[SortedAtoms];
}

/// Average over directions of the per-direction `W_p`.
pub fn sliced_distance<A, B>(a: &A, b: &B, order: Order) -> Result<f64>
where
    A: Sliced + ?Sized,
    B: Sliced + ?Sized,
{
    let (sa, sb) = (a.slices(), b.slices());
    if sa.len() != sb.len() {
        return Err(Error::Shape(format!(
            "projection counts differ: {} vs {}",
            sa.len(),
            sb.len()
        )));
    }
    if sa.is_empty() {
        return Err(Error::Shape("no projection directions".into()));
    }
    let mut total = 0.0;
    for (x, y) in sa.iter().zip(sb) {
        total += w1_distance(x, y, order)?;
    }
    Ok(total / sa.len() as f64)
}

#[inline]
pub(crate) fn sliced_unchecked(a: &[SortedAtoms], b: &[SortedAtoms], order: Order) -> f64 {
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        total += distance_unchecked(x.as_slice(), y.as_slice(), order);
    }
    total / a.len() as f64
}
