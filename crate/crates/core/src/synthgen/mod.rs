//! Seeded synthetic price paths with known regimes.
//!
//! A majority regime fills the whole timeline except for non-overlapping
//! minority periods placed uniformly at random. Log returns of each regime are
//! drawn as one independent block and written into that regime's time points
//! in order. Normal variates come from `rand_distr::StandardNormal` (ziggurat)
//! driven by ChaCha8; output is a pure function of the scenario and seed.

mod moons;

pub use moons::{gen_moons_regime, match_moments, two_moons};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Stream;

pub const DAYS_PER_YEAR: usize = 252;
pub const OBS_PER_DAY: usize = 7;
pub const DEFAULT_MOON_NOISE: f64 = 0.05;
const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeShape {
    Gaussian,
    Moons,
}

/// Annualized drift `mu` and volatility `sigma` of log returns, plus the
/// cross-correlation and the shape of the joint law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
    pub shape: RegimeShape,
    pub moon_noise: f64,
}

impl RegimeParams {
    pub fn new(mu: f64, sigma: f64) -> Self {
        RegimeParams {
            mu,
            sigma,
            rho: 0.0,
            shape: RegimeShape::Gaussian,
            moon_noise: DEFAULT_MOON_NOISE,
        }
    }

    pub fn bull() -> Self {
        RegimeParams::new(0.02, 0.2)
    }

    pub fn bear() -> Self {
        RegimeParams::new(-0.02, 0.3)
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn moons(mut self) -> Self {
        self.shape = RegimeShape::Moons;
        self
    }

    /// Mean log return per step, `(mu - sigma^2/2) dt`.
    pub fn drift(&self, dt: f64) -> f64 {
        (self.mu - 0.5 * self.sigma * self.sigma) * dt
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Parameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.rho.is_nan() || self.rho <= -1.0 || self.rho >= 1.0 {
            return Err(Error::Parameter(format!("rho must lie in (-1, 1), got {}", self.rho)));
        }
        if self.moon_noise.is_nan() || self.moon_noise < 0.0 {
            return Err(Error::Parameter("moon_noise must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Layout of a synthetic dataset. Regime 0 is the majority regime; every other
/// regime gets `minority_periods` periods of `period_length` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub d: usize,
    pub years: usize,
    pub days_per_year: usize,
    pub obs_per_day: usize,
    pub regimes: Vec<RegimeParams>,
    pub minority_periods: usize,
    pub period_length: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Twenty years of hourly data, ten half-year periods per minority regime.
    pub fn new(d: usize, regimes: Vec<RegimeParams>, seed: u64) -> Self {
        ScenarioSpec {
            d,
            years: 20,
            days_per_year: DAYS_PER_YEAR,
            obs_per_day: OBS_PER_DAY,
            regimes,
            minority_periods: 10,
            period_length: DAYS_PER_YEAR * OBS_PER_DAY / 2,
            seed,
        }
    }

    pub fn points(&self) -> usize {
        self.years * self.days_per_year * self.obs_per_day
    }

    pub fn dt(&self) -> f64 {
        1.0 / (self.days_per_year * self.obs_per_day) as f64
    }

    pub fn points_per_year(&self) -> usize {
        self.days_per_year * self.obs_per_day
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if self.regimes.is_empty() {
            return Err(Error::Parameter("at least one regime is required".into()));
        }
        if self.points() < 2 {
            return Err(Error::Parameter("scenario must span at least 2 points".into()));
        }
        for r in &self.regimes {
            r.validate()?;
            if r.shape == RegimeShape::Moons && self.d != 2 {
                return Err(Error::Parameter("moon-shaped regimes exist only for d = 2".into()));
            }
        }
        Ok(())
    }
}

/// Half-open interval `[start, end)` of points belonging to `regime`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorityPeriod {
    pub start: usize,
    pub end: usize,
    pub regime: usize,
}

/// Uniform non-overlapping placement of every minority period by rejection
/// sampling. Fails after 10,000 rejected draws.
pub fn place_minority_periods(spec: &ScenarioSpec) -> Result<Vec<MinorityPeriod>> {
    let n = spec.points();
    let len = spec.period_length;
    let count = spec.minority_periods * spec.regimes.len().saturating_sub(1);
    if count == 0 {
        return Ok(Vec::new());
    }
    if len == 0 {
        return Err(Error::Parameter("minority period length must be positive".into()));
    }
    if count * len >= n {
        return Err(Error::Generation(format!(
            "{count} periods of {len} points leave no room for the majority regime in {n} points"
        )));
    }
    let mut rng = stream_rng(spec.seed, 0);
    let mut placed: Vec<MinorityPeriod> = Vec::with_capacity(count);
    let mut rejections = 0;
    for regime in 1..spec.regimes.len() {
        for _ in 0..spec.minority_periods {
            loop {
                let start = rng.random_range(0..=n - len);
                let end = start + len;
                if placed.iter().all(|p| end <= p.start || start >= p.end) {
                    placed.push(MinorityPeriod { start, end, regime });
                    break;
                }
                rejections += 1;
                if rejections >= MAX_REJECTIONS {
                    return Err(Error::Generation(format!(
                        "could not place {count} non-overlapping periods after {MAX_REJECTIONS} rejections"
                    )));
                }
            }
        }
    }
    placed.sort_by_key(|p| p.start);
    Ok(placed)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A generated price path with one true regime id per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub prices: Stream,
    pub truth: Vec<usize>,
    pub spec: ScenarioSpec,
    pub periods: Vec<MinorityPeriod>,
}

impl SyntheticDataset {
    /// Regime of each log return; return `i` ends at observation `i + 1`.
    pub fn return_truth(&self) -> &[usize] {
        &self.truth[1..]
    }

    /// The first `years` years: `years * 252 * 7 + 1` observations.
    pub fn prefix_years(&self, years: usize) -> Result<SyntheticDataset> {
        self.prefix(years * self.spec.points_per_year() + 1)
    }

    pub fn prefix(&self, points: usize) -> Result<SyntheticDataset> {
        let n = points.min(self.truth.len());
        Ok(SyntheticDataset {
            prices: self.prices.prefix(n)?,
            truth: self.truth[..n].to_vec(),
            spec: self.spec.clone(),
            periods: self
                .periods
                .iter()
                .filter(|p| p.start < n)
                .map(|p| MinorityPeriod {
                    end: p.end.min(n),
                    ..*p
                })
                .collect(),
        })
    }
}

/// `n` independent normal log returns with the regime's drift and volatility.
pub fn gen_1d_regime<R: Rng + ?Sized>(theta: &RegimeParams, n: usize, dt: f64, rng: &mut R) -> Vec<f64> {
    let (m, s) = (theta.drift(dt), theta.sigma * dt.sqrt());
    (0..n).map(|_| m + s * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `n` correlated return pairs: `r2 = rho * r1 + sqrt(1 - rho^2) * r'` with `r1`,
/// `r'` independent draws of the regime's 1-D law. Row-major `n x 2`.
pub fn gen_2d_gaussian_regime<R: Rng + ?Sized>(theta: &RegimeParams, n: usize, dt: f64, rng: &mut R) -> Vec<f64> {
    let (m, s) = (theta.drift(dt), theta.sigma * dt.sqrt());
    let c = (1.0 - theta.rho * theta.rho).sqrt();
    let mut out = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let r1 = m + s * rng.sample::<f64, _>(StandardNormal);
        let rp = m + s * rng.sample::<f64, _>(StandardNormal);
        out.push(r1);
        out.push(theta.rho * r1 + c * rp);
    }
    out
}

/// `n` draws from `N(drift * 1, sigma^2 * dt * E)` with `E` the `d x d`
/// equicorrelation matrix of parameter `rho`. Row-major `n x d`.
pub fn gen_equicorrelated_regime<R: Rng + ?Sized>(
    theta: &RegimeParams,
    d: usize,
    n: usize,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if d >= 2 && (theta.rho.is_nan() || theta.rho <= -1.0 / (d - 1) as f64) {
        return Err(Error::Parameter(format!(
            "equicorrelation rho = {} is not positive definite in d = {d} (needs rho > {})",
            theta.rho,
            -1.0 / (d - 1) as f64
        )));
    }
    let cov = DMatrix::from_fn(d, d, |i, j| {
        theta.sigma * theta.sigma * dt * if i == j { 1.0 } else { theta.rho }
    });
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::Parameter("covariance is not positive definite".into()))?
        .l();
    let m = theta.drift(dt);
    let mut out = Vec::with_capacity(d * n);
    let mut z = vec![0.0; d];
    for _ in 0..n {
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        for i in 0..d {
            out.push(m + (0..=i).map(|j| chol[(i, j)] * z[j]).sum::<f64>());
        }
    }
    Ok(out)
}

fn regime_block(spec: &ScenarioSpec, regime: usize, n: usize) -> Result<Vec<f64>> {
    let theta = &spec.regimes[regime];
    let dt = spec.dt();
    let mut rng = stream_rng(spec.seed, 1 + regime as u64);
    match (theta.shape, spec.d) {
        (RegimeShape::Moons, 2) => gen_moons_regime(theta, n, dt, theta.moon_noise, &mut rng),
        (RegimeShape::Moons, d) => Err(Error::Parameter(format!("moon-shaped regimes need d = 2, got {d}"))),
        (RegimeShape::Gaussian, 1) => Ok(gen_1d_regime(theta, n, dt, &mut rng)),
        (RegimeShape::Gaussian, 2) => Ok(gen_2d_gaussian_regime(theta, n, dt, &mut rng)),
        (RegimeShape::Gaussian, d) => gen_equicorrelated_regime(theta, d, n, dt, &mut rng),
    }
}

/// Builds the full dataset for any dimension and regime mix.
pub fn generate(spec: &ScenarioSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let n = spec.points();
    let d = spec.d;
    let periods = place_minority_periods(spec)?;
    let mut truth = vec![0usize; n];
    for p in &periods {
        truth[p.start..p.end].iter_mut().for_each(|t| *t = p.regime);
    }

    // return t (t >= 1) leads into observation t and follows truth[t]
    let mut blocks = Vec::with_capacity(spec.regimes.len());
    for regime in 0..spec.regimes.len() {
        let count = truth[1..].iter().filter(|&&r| r == regime).count();
        blocks.push(regime_block(spec, regime, count)?.into_iter());
    }
    let mut log_price = vec![0.0; d];
    let mut prices = Vec::with_capacity(n * d);
    prices.extend(std::iter::repeat_n(1.0, d));
    for &regime in &truth[1..] {
        for lp in log_price.iter_mut() {
            *lp += blocks[regime].next().expect("block sized to regime count");
        }
        prices.extend(log_price.iter().map(|lp| lp.exp()));
    }
    Ok(SyntheticDataset {
        prices: Stream::new(prices, d, Some((0..n).map(|t| t as f64).collect()))?,
        truth,
        spec: spec.clone(),
        periods,
    })
}

pub fn gen_1d(spec: &ScenarioSpec) -> Result<SyntheticDataset> {
    if spec.d != 1 {
        return Err(Error::Parameter(format!("gen_1d needs d = 1, got {}", spec.d)));
    }
    generate(spec)
}

pub fn gen_3d(spec: &ScenarioSpec) -> Result<SyntheticDataset> {
    if spec.d != 3 {
        return Err(Error::Parameter(format!("gen_3d needs d = 3, got {}", spec.d)));
    }
    generate(spec)
}

/// The shipped synthetic datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// 1-D bull majority, bear minority.
    #[serde(rename = "1d")]
    OneD,
    /// 2-D bull vs bear, both rho = +1/2.
    A,
    /// 2-D bull rho = +1/2 vs bull rho = -1/2.
    B,
    /// 2-D bull (+1/2) vs bear (+1/2) vs bear (-1/2).
    C,
    /// 2-D bull (-1/2) vs bear (-1/2) vs moon-shaped bear (-1/2).
    D,
    /// 3-D bull vs bear, both rho = +1/2.
    #[serde(rename = "3d-a")]
    ThreeDA,
    /// 3-D bull rho = +1/2 vs bull rho = -0.49.
    #[serde(rename = "3d-b")]
    ThreeDB,
}

/// Correlation used for the negatively correlated 3-D regime; -1/2 itself is
/// singular for a 3 x 3 equicorrelation matrix.
pub const THREE_D_NEGATIVE_RHO: f64 = -0.49;

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::OneD,
        Scenario::A,
        Scenario::B,
        Scenario::C,
        Scenario::D,
        Scenario::ThreeDA,
        Scenario::ThreeDB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::OneD => "1d",
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::C => "C",
            Scenario::D => "D",
            Scenario::ThreeDA => "3d-A",
            Scenario::ThreeDB => "3d-B",
        }
    }

    pub fn spec(self, seed: u64) -> ScenarioSpec {
        let (bull, bear) = (RegimeParams::bull(), RegimeParams::bear());
        let (d, regimes) = match self {
            Scenario::OneD => (1, vec![bull, bear]),
            Scenario::A => (2, vec![bull.with_rho(0.5), bear.with_rho(0.5)]),
            Scenario::B => (2, vec![bull.with_rho(0.5), bull.with_rho(-0.5)]),
            Scenario::C => (2, vec![bull.with_rho(0.5), bear.with_rho(0.5), bear.with_rho(-0.5)]),
            Scenario::D => (
                2,
                vec![bull.with_rho(-0.5), bear.with_rho(-0.5), bear.with_rho(-0.5).moons()],
            ),
            Scenario::ThreeDA => (3, vec![bull.with_rho(0.5), bear.with_rho(0.5)]),
            Scenario::ThreeDB => (3, vec![bull.with_rho(0.5), bull.with_rho(THREE_D_NEGATIVE_RHO)]),
        };
        ScenarioSpec::new(d, regimes, seed)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scenario '{s}' (expected one of 1d, A, B, C, D, 3d-A, 3d-B)"
                ))
            })
    }
}

pub fn gen_scenario(scenario: Scenario, seed: u64) -> Result<SyntheticDataset> {
    generate(&scenario.spec(seed))
}

/// Per-coordinate mean and population standard deviation plus Pearson
/// correlations of a row-major `n x d` sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub correlation: Vec<Vec<f64>>,
}

pub fn sample_moments(values: &[f64], d: usize) -> SampleMoments {
    let n = (values.len() / d) as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| values.iter().skip(j).step_by(d).sum::<f64>() / n)
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for row in values.chunks_exact(d) {
        for a in 0..d {
            for b in 0..d {
                cov[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
            }
        }
    }
    let std: Vec<f64> = (0..d).map(|j| (cov[j][j] / n).sqrt()).collect();
    let correlation = (0..d)
        .map(|a| (0..d).map(|b| cov[a][b] / n / (std[a] * std[b])).collect())
        .collect();
    SampleMoments { mean, std, correlation }
}

/// Largest absolute excess kurtosis, in standard errors `sqrt(24/n)`, over 8
/// directions of the whitened 2-D sample. Gaussian samples stay well under 5.
pub fn kurtosis_z_score(values: &[f64]) -> Result<f64> {
    let pts: Vec<[f64; 2]> = values.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    let white = match_moments(&pts, [0.0, 0.0], nalgebra::Matrix2::identity())?;
    let n = white.len() as f64;
    let se = (24.0 / n).sqrt();
    Ok((0..8)
        .map(|j| {
            let a = std::f64::consts::PI * j as f64 / 8.0;
            let (c, s) = (a.cos(), a.sin());
            let m4 = white.iter().map(|p| (c * p[0] + s * p[1]).powi(4)).sum::<f64>() / n;
            ((m4 - 3.0) / se).abs()
        })
        .fold(0.0, f64::max))
}
