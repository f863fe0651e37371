//! Two interleaving half-circles, moment-matched to a Gaussian regime.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::RegimeParams;
use crate::error::{Error, Result};

/// Standard two-moons cloud: an upper unit semicircle and a lower one shifted
/// right by 1 and down by 1/2, with isotropic Gaussian noise of scale
/// `noise` (radius units). Points come back shuffled.
pub fn two_moons<R: Rng + ?Sized>(n: usize, noise: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let n_out = n / 2;
    let n_in = n - n_out;
    let angle = |i: usize, count: usize| {
        if count <= 1 {
            0.0
        } else {
            PI * i as f64 / (count - 1) as f64
        }
    };
    let mut pts: Vec<[f64; 2]> = (0..n_out)
        .map(|i| {
            let t = angle(i, n_out);
            [t.cos(), t.sin()]
        })
        .chain((0..n_in).map(|i| {
            let t = angle(i, n_in);
            [1.0 - t.cos(), 1.0 - t.sin() - 0.5]
        }))
        .collect();
    if noise > 0.0 {
        for p in &mut pts {
            p[0] += noise * rng.sample::<f64, _>(StandardNormal);
            p[1] += noise * rng.sample::<f64, _>(StandardNormal);
        }
    }
    pts.shuffle(rng);
    pts
}

/// Affine map sending the sample to exact target mean and covariance:
/// whiten with the sample Cholesky factor, color with the target one.
pub fn match_moments(points: &[[f64; 2]], mean: [f64; 2], cov: Matrix2<f64>) -> Result<Vec<[f64; 2]>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Generation("moment matching needs at least 3 points".into()));
    }
    let nf = n as f64;
    let m = points
        .iter()
        .fold(Vector2::zeros(), |acc, p| acc + Vector2::new(p[0], p[1]))
        / nf;
    let sample_cov = points.iter().fold(Matrix2::zeros(), |acc, p| {
        let c = Vector2::new(p[0], p[1]) - m;
        acc + c * c.transpose()
    }) / nf;
    let whiten = sample_cov
        .cholesky()
        .and_then(|c| c.l().try_inverse())
        .ok_or_else(|| Error::Generation("sample covariance is singular".into()))?;
    let color = cov
        .cholesky()
        .ok_or_else(|| Error::Generation("target covariance is not positive definite".into()))?
        .l();
    let map = color * whiten;
    let target = Vector2::new(mean[0], mean[1]);
    Ok(points
        .iter()
        .map(|p| {
            let y = target + map * (Vector2::new(p[0], p[1]) - m);
            [y[0], y[1]]
        })
        .collect())
}

/// `n` moon-shaped return pairs with per-coordinate mean `(mu - sigma^2/2) dt`,
/// variance `sigma^2 dt` and correlation `rho`, all exact in-sample.
pub fn gen_moons_regime<R: Rng + ?Sized>(
    theta: &RegimeParams,
    n: usize,
    dt: f64,
    noise: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if noise.is_nan() || noise < 0.0 {
        return Err(Error::Parameter(format!("moon noise must be nonnegative, got {noise}")));
    }
    let drift = theta.drift(dt);
    let var = theta.sigma * theta.sigma * dt;
    let cov = Matrix2::new(var, theta.rho * var, theta.rho * var, var);
    let pts = match_moments(&two_moons(n, noise, rng), [drift, drift], cov)?;
    Ok(pts.into_iter().flatten().collect())
}
