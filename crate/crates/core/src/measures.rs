//! Price streams, standardized log returns, and the sliding-window lift into
//! families of empirical measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `N x d` path of strictly positive prices, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    values: Vec<f64>,
    dim: usize,
    timestamps: Option<Vec<f64>>,
}

impl Stream {
    pub fn new(values: Vec<f64>, dim: usize, timestamps: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("stream dimension must be at least 1".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} values do not form rows of width {dim}",
                values.len()
            )));
        }
        let n = values.len() / dim;
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "a stream needs at least 2 observations, got {n}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain(format!(
                "price at row {} column {} is not a positive finite number ({})",
                pos / dim,
                pos % dim,
                values[pos]
            )));
        }
        if let Some(ts) = &timestamps {
            if ts.len() != n {
                return Err(Error::Shape(format!(
                    "{} timestamps for {n} observations",
                    ts.len()
                )));
            }
            if let Some(i) = ts.windows(2).position(|w| w[1].is_nan() || w[1] <= w[0]) {
                return Err(Error::Domain(format!(
                    "timestamps not strictly increasing at row {}",
                    i + 1
                )));
            }
        }
        Ok(Stream {
            values,
            dim,
            timestamps,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("ragged price rows".into()));
        }
        Stream::new(rows.concat(), dim, None)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    /// The first `n` observations as a new stream.
    pub fn prefix(&self, n: usize) -> Result<Stream> {
        let n = n.min(self.len());
        Stream::new(
            self.values[..n * self.dim].to_vec(),
            self.dim,
            self.timestamps.as_ref().map(|t| t[..n].to_vec()),
        )
    }
}

/// Standardized log returns together with the raw returns they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    values: Vec<f64>,
    raw: Vec<f64>,
    dim: usize,
    pub mean_used: Vec<f64>,
    pub std_used: Vec<f64>,
}

impl ReturnSeries {
    /// Standardizes already-computed returns coordinate-wise (population variance).
    pub fn from_raw(raw: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !raw.len().is_multiple_of(dim) {
            return Err(Error::Shape("return matrix is not rectangular".into()));
        }
        let n = raw.len() / dim;
        if n == 0 {
            return Err(Error::InsufficientData("empty return series".into()));
        }
        let mut mean = vec![0.0; dim];
        for row in raw.chunks_exact(dim) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; dim];
        for row in raw.chunks_exact(dim) {
            for j in 0..dim {
                let c = row[j] - mean[j];
                var[j] += c * c;
            }
        }
        let std: Vec<f64> = var.iter().map(|v| (v / n as f64).sqrt()).collect();
        for (j, (s, m)) in std.iter().zip(&mean).enumerate() {
            // relative threshold: constant columns leave only rounding residue
            if *s <= 1e-12 * (1.0 + m.abs()) {
                return Err(Error::Degenerate { coordinate: j });
            }
        }
        let values = raw
            .chunks_exact(dim)
            .flat_map(|row| (0..dim).map(|j| (row[j] - mean[j]) / std[j]).collect::<Vec<_>>())
            .collect();
        Ok(ReturnSeries {
            values,
            raw,
            dim,
            mean_used: mean,
            std_used: std,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn raw_row(&self, i: usize) -> &[f64] {
        &self.raw[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// Standardized values of coordinate `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.dim).copied().collect()
    }
}

/// Log returns of every coordinate, standardized to zero mean and unit
/// population variance.
pub fn log_returns(stream: &Stream) -> Result<ReturnSeries> {
    let d = stream.dim();
    let raw: Vec<f64> = (0..stream.len() - 1)
        .flat_map(|i| {
            let (a, b) = (stream.row(i), stream.row(i + 1));
            (0..d).map(move |j| b[j].ln() - a[j].ln())
        })
        .collect();
    ReturnSeries::from_raw(raw, d)
}

/// Window size `h1`, lifting size `h2` and starting offset `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftConfig {
    pub h1: usize,
    pub h2: usize,
    pub delta: usize,
}

impl LiftConfig {
    pub fn new(h1: usize, h2: usize, delta: usize) -> Result<Self> {
        let cfg = LiftConfig { h1, h2, delta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h2 == 0 || self.h2 > self.h1 {
            return Err(Error::Parameter(format!(
                "lifting size must satisfy 1 <= h2 <= h1 (h1={}, h2={})",
                self.h1, self.h2
            )));
        }
        if self.delta >= self.h2 {
            return Err(Error::Parameter(format!(
                "offset must satisfy 0 <= delta <= h2-1 (delta={}, h2={})",
                self.delta, self.h2
            )));
        }
        Ok(())
    }

    /// Number of complete windows that fit in a series of `len` points.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.h1 + self.delta {
            0
        } else {
            (len - self.delta - self.h1) / self.h2 + 1
        }
    }

    pub fn window_start(&self, m: usize) -> usize {
        self.delta + self.h2 * m
    }
}

/// The atoms of one window: `h1` points in `R^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
    dim: usize,
    pub window_index: usize,
    pub start_index: usize,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<f64>, dim: usize, window_index: usize, start_index: usize) -> Result<Self> {
        if dim == 0 || atoms.is_empty() || !atoms.len().is_multiple_of(dim) {
            return Err(Error::Shape("atoms do not form a nonempty h1 x d matrix".into()));
        }
        Ok(EmpiricalMeasure {
            atoms,
            dim,
            window_index,
            start_index,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    /// Indices of the return points this window covers.
    pub fn span(&self) -> std::ops::Range<usize> {
        self.start_index..self.start_index + self.len()
    }
}

/// Sliding-window lift: window `m` holds points `delta + h2*m .. delta + h2*m + h1`.
/// Windows that would run past the end are dropped.
pub fn lift(returns: &ReturnSeries, cfg: &LiftConfig) -> Result<Vec<EmpiricalMeasure>> {
    cfg.validate()?;
    let n = returns.len();
    if n < cfg.h1 + cfg.delta {
        return Err(Error::InsufficientData(format!(
            "need at least h1 + delta = {} return points, have {n}",
            cfg.h1 + cfg.delta
        )));
    }
    let d = returns.dim();
    Ok((0..cfg.window_count(n))
        .map(|m| {
            let start = cfg.window_start(m);
            EmpiricalMeasure {
                atoms: returns.values()[start * d..(start + cfg.h1) * d].to_vec(),
                dim: d,
                window_index: m,
                start_index: start,
            }
        })
        .collect())
}
