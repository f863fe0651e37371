//! Regime detection in one- and multi-dimensional time series with Wasserstein
//! k-means and its sliced extension.
//!
//! The pipeline is: prices ([`measures::Stream`]) to standardized log returns,
//! a sliding-window lift into empirical measures, projection onto a fixed set of
//! directions, k-means under the sliced Wasserstein distance, and finally a
//! majority vote that turns window clusters back into per-point regime labels.

pub mod cli;
pub mod clustering;
pub mod error;
pub mod labeling;
pub mod measures;
pub mod par;
pub mod synthgen;
pub mod wasserstein;

pub use error::{Error, Result};
