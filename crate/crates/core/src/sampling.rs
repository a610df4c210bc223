//! Random simplices and a deterministic Monte Carlo engine.
//!
//! Trial `i` of a run with seed `s` draws from its own ChaCha8 stream: the
//! key is derived from `s` and the stream number is `i`. A trial's variates
//! therefore depend only on `(s, i)`, never on how trials are spread across
//! worker threads. Trials are processed in fixed blocks of [`BLOCK_SIZE`]
//! and block partial results are merged in block order, so probability and
//! mean estimates are bit-identical under any thread count.
//!
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat).
//! Results are reproducible for a given build of this crate and its pinned
//! dependency versions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point3, Tetrahedron, Triangle};

/// Trials per deterministic work unit.
pub const BLOCK_SIZE: u64 = 4096;

/// Smallest trial count accepted by the estimators.
pub const MIN_TRIALS: u64 = 100;

/// Largest tolerated fraction of trials excluded for degeneracy.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-6;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("n = {n} is below the minimum of {min} trials")]
    TooFewTrials { n: u64, min: u64 },
    #[error("{excluded} of {n} trials were degenerate (limit {MAX_EXCLUDED_FRACTION:e}); last: {last}")]
    DegeneracyAbort { excluded: u64, n: u64, last: GeometryError },
    #[error("functional returned a non-finite value at trial {index}")]
    NonFinite { index: u64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("sample contains NaN")]
    NanSample,
    #[error("reference CDF is not a monotone map into [0, 1] (at x = {at})")]
    NonMonotoneCdf { at: f64 },
    #[error("unknown sampler kind '{0}'")]
    UnknownKind(String),
}

pub type Result<T> = std::result::Result<T, SamplingError>;

/// Per-trial random stream.
pub struct TrialRng(ChaCha8Rng);

impl TrialRng {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(stream_key(seed));
        rng.set_stream(index);
        TrialRng(rng)
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn normal_point(&mut self) -> Point3 {
        Point3::new(self.normal(), self.normal(), self.normal())
    }

    pub fn normal_planar(&mut self) -> Point3 {
        Point3::planar(self.normal(), self.normal())
    }

    /// Uniform in the unit ball: a Gaussian direction scaled by `U^{1/3}`.
    pub fn ball_point(&mut self) -> Point3 {
        let dir = self.unit_vector();
        dir * self.uniform().cbrt()
    }

    pub fn cube_point(&mut self) -> Point3 {
        Point3::new(self.uniform(), self.uniform(), self.uniform())
    }

    /// Uniform on the unit sphere (normalized Gaussian 3-vector).
    pub fn unit_vector(&mut self) -> Point3 {
        loop {
            let g = self.normal_point();
            let len = g.norm();
            if len > 0.0 {
                return g * (1.0 / len);
            }
        }
    }
}

/// 32-byte ChaCha key from a 64-bit seed via SplitMix64.
fn stream_key(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Four i.i.d. `N(0, I_3)` vertices.
    GaussianTetra,
    /// `a, b, c ~ N(0, I_3)`, `d = 0`.
    PinnedTetra,
    /// Three i.i.d. `N(0, I_2)` vertices in the plane `z = 0`.
    GaussianTriangle,
    /// `a, b ~ N(0, I_2)`, `c = 0`.
    PinnedTriangle,
    UniformBallTetra,
    UniformCubeTetra,
    /// Uniform direction on the unit sphere.
    UniformPlaneNormal,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 7] = [
        SamplerKind::GaussianTetra,
        SamplerKind::PinnedTetra,
        SamplerKind::GaussianTriangle,
        SamplerKind::PinnedTriangle,
        SamplerKind::UniformBallTetra,
        SamplerKind::UniformCubeTetra,
        SamplerKind::UniformPlaneNormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::GaussianTetra => "gaussian-tetra",
            SamplerKind::PinnedTetra => "pinned-tetra",
            SamplerKind::GaussianTriangle => "gaussian-triangle",
            SamplerKind::PinnedTriangle => "pinned-triangle",
            SamplerKind::UniformBallTetra => "uniform-ball-tetra",
            SamplerKind::UniformCubeTetra => "uniform-cube-tetra",
            SamplerKind::UniformPlaneNormal => "uniform-plane-normal",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = SamplingError;
    fn from_str(s: &str) -> Result<Self> {
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SamplingError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    Tetra(Tetrahedron),
    Triangle(Triangle),
    Normal(Point3),
}

impl Sample {
    pub fn tetra(&self) -> Option<&Tetrahedron> {
        match self {
            Sample::Tetra(t) => Some(t),
            _ => None,
        }
    }

    pub fn triangle(&self) -> Option<&Triangle> {
        match self {
            Sample::Triangle(t) => Some(t),
            _ => None,
        }
    }

    pub fn normal(&self) -> Option<Point3> {
        match self {
            Sample::Normal(p) => Some(*p),
            _ => None,
        }
    }
}

/// Draws the object for trial `index`; a pure function of `(spec, index)`.
pub fn sample(spec: SamplerSpec, index: u64) -> Sample {
    draw(spec.kind, &mut TrialRng::new(spec.seed, index))
}

fn draw(kind: SamplerKind, rng: &mut TrialRng) -> Sample {
    match kind {
        SamplerKind::GaussianTetra => {
            let a = rng.normal_point();
            let b = rng.normal_point();
            let c = rng.normal_point();
            let d = rng.normal_point();
            Sample::Tetra(Tetrahedron::new(a, b, c, d))
        }
        SamplerKind::PinnedTetra => {
            let a = rng.normal_point();
            let b = rng.normal_point();
            let c = rng.normal_point();
            Sample::Tetra(Tetrahedron::new(a, b, c, Point3::ORIGIN))
        }
        SamplerKind::GaussianTriangle => {
            let a = rng.normal_planar();
            let b = rng.normal_planar();
            let c = rng.normal_planar();
            Sample::Triangle(Triangle::new(a, b, c))
        }
        SamplerKind::PinnedTriangle => {
            let a = rng.normal_planar();
            let b = rng.normal_planar();
            Sample::Triangle(Triangle::new(a, b, Point3::ORIGIN))
        }
        SamplerKind::UniformBallTetra => {
            let a = rng.ball_point();
            let b = rng.ball_point();
            let c = rng.ball_point();
            let d = rng.ball_point();
            Sample::Tetra(Tetrahedron::new(a, b, c, d))
        }
        SamplerKind::UniformCubeTetra => {
            let a = rng.cube_point();
            let b = rng.cube_point();
            let c = rng.cube_point();
            let d = rng.cube_point();
            Sample::Tetra(Tetrahedron::new(a, b, c, d))
        }
        SamplerKind::UniformPlaneNormal => Sample::Normal(rng.unit_vector()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    Probability,
    Mean,
}

/// A Monte Carlo probability or mean with its uncertainty.
///
/// For probabilities `stderr = sqrt(p(1-p)/n)` and the interval is the 95%
/// Wilson interval; for means `stderr` is the sample standard deviation over
/// `sqrt(n)` and the interval is `value ± 1.96 stderr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials that entered the estimate.
    pub n: u64,
    /// Trials dropped because the sampled object was degenerate.
    pub excluded: u64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn from_counts(hits: u64, n: u64, excluded: u64, seed: u64) -> Self {
        let nf = n as f64;
        let p = hits as f64 / nf;
        let (ci_low, ci_high) = wilson_interval(p, nf);
        MCEstimate {
            kind: EstimateKind::Probability,
            value: p,
            stderr: (p * (1.0 - p) / nf).sqrt(),
            ci_low,
            ci_high,
            n,
            excluded,
            seed,
        }
    }

    fn from_moments(m: Moments, excluded: u64, seed: u64) -> Self {
        let nf = m.count as f64;
        let var = if m.count > 1 { m.m2 / (nf - 1.0) } else { 0.0 };
        let stderr = (var / nf).sqrt();
        MCEstimate {
            kind: EstimateKind::Mean,
            value: m.mean,
            stderr,
            ci_low: m.mean - Z95 * stderr,
            ci_high: m.mean + Z95 * stderr,
            n: m.count,
            excluded,
            seed,
        }
    }

    /// `|value - target| / stderr`; infinite when `stderr = 0` and the
    /// value misses.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    pub fn within_sigmas(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) < sigmas
    }
}

fn wilson_interval(p: f64, n: f64) -> (f64, f64) {
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Runs `per_block` over consecutive blocks of trial indices in parallel and
/// returns the block results in block order.
fn blocks<T, F>(n: u64, per_block: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    let count = n.div_ceil(BLOCK_SIZE);
    (0..count)
        .into_par_iter()
        .map(|b| per_block(b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(n)))
        .collect()
}

fn check_trials(n: u64) -> Result<()> {
    if n < MIN_TRIALS {
        Err(SamplingError::TooFewTrials { n, min: MIN_TRIALS })
    } else {
        Ok(())
    }
}

fn check_exclusions(excluded: u64, n: u64, last: Option<GeometryError>) -> Result<()> {
    match last {
        Some(last) if excluded as f64 > MAX_EXCLUDED_FRACTION * n as f64 => {
            Err(SamplingError::DegeneracyAbort { excluded, n, last })
        }
        _ => Ok(()),
    }
}

/// Bernoulli trials driven directly by the per-trial stream.
///
/// `trial` returns whether the event occurred; an `Err` excludes the trial
/// from the estimate.
pub fn bernoulli_trials<F>(seed: u64, n: u64, trial: F) -> Result<MCEstimate>
where
    F: Fn(&mut TrialRng, u64) -> std::result::Result<bool, GeometryError> + Sync,
{
    check_trials(n)?;
    let parts = blocks(n, |range| {
        let mut hits = 0u64;
        let mut excluded = 0u64;
        let mut last = None;
        for i in range {
            match trial(&mut TrialRng::new(seed, i), i) {
                Ok(true) => hits += 1,
                Ok(false) => {}
                Err(e) => {
                    excluded += 1;
                    last = Some(e);
                }
            }
        }
        (hits, excluded, last)
    });
    let hits: u64 = parts.iter().map(|p| p.0).sum();
    let excluded: u64 = parts.iter().map(|p| p.1).sum();
    let last = parts.iter().rev().find_map(|p| p.2);
    check_exclusions(excluded, n, last)?;
    if n == excluded {
        return Err(SamplingError::DegeneracyAbort {
            excluded,
            n,
            last: last.unwrap_or(GeometryError::Degenerate("sample")),
        });
    }
    Ok(MCEstimate::from_counts(hits, n - excluded, excluded, seed))
}

/// Sample mean of `trial` over `n` per-trial streams.
pub fn mean_trials<F>(seed: u64, n: u64, trial: F) -> Result<MCEstimate>
where
    F: Fn(&mut TrialRng, u64) -> std::result::Result<f64, GeometryError> + Sync,
{
    check_trials(n)?;
    let parts = blocks(n, |range| -> Result<(Moments, u64, Option<GeometryError>)> {
        let mut m = Moments::default();
        let mut excluded = 0u64;
        let mut last = None;
        for i in range {
            match trial(&mut TrialRng::new(seed, i), i) {
                Ok(x) if x.is_finite() => m.push(x),
                Ok(_) => return Err(SamplingError::NonFinite { index: i }),
                Err(e) => {
                    excluded += 1;
                    last = Some(e);
                }
            }
        }
        Ok((m, excluded, last))
    });
    let mut total = Moments::default();
    let mut excluded = 0;
    let mut last = None;
    for part in parts {
        let (m, e, l) = part?;
        total = total.merge(m);
        excluded += e;
        last = l.or(last);
    }
    check_exclusions(excluded, n, last)?;
    if total.count == 0 {
        return Err(SamplingError::DegeneracyAbort {
            excluded,
            n,
            last: last.unwrap_or(GeometryError::Degenerate("sample")),
        });
    }
    Ok(MCEstimate::from_moments(total, excluded, seed))
}

/// Collects `trial` outputs in trial order, skipping excluded trials.
pub fn collect_trials<T, F>(seed: u64, n: u64, trial: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(&mut TrialRng, u64) -> std::result::Result<T, GeometryError> + Sync,
{
    check_trials(n)?;
    let parts = blocks(n, |range| {
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        let mut excluded = 0u64;
        let mut last = None;
        for i in range {
            match trial(&mut TrialRng::new(seed, i), i) {
                Ok(v) => out.push(v),
                Err(e) => {
                    excluded += 1;
                    last = Some(e);
                }
            }
        }
        (out, excluded, last)
    });
    let excluded = parts.iter().map(|p| p.1).sum();
    let last = parts.iter().rev().find_map(|p| p.2);
    check_exclusions(excluded, n, last)?;
    Ok((parts.into_iter().flat_map(|p| p.0).collect(), excluded))
}

/// `P(event)` over `n` draws from `spec`.
pub fn estimate_probability<E>(spec: SamplerSpec, n: u64, event: E) -> Result<MCEstimate>
where
    E: Fn(&Sample) -> std::result::Result<bool, GeometryError> + Sync,
{
    bernoulli_trials(spec.seed, n, |rng, _| event(&draw(spec.kind, rng)))
}

/// `E[functional]` over `n` draws from `spec`.
pub fn estimate_mean<F>(spec: SamplerSpec, n: u64, functional: F) -> Result<MCEstimate>
where
    F: Fn(&Sample) -> std::result::Result<f64, GeometryError> + Sync,
{
    mean_trials(spec.seed, n, |rng, _| functional(&draw(spec.kind, rng)))
}

/// Evaluates `statistic` on `n` draws from `spec`, in trial order.
pub fn collect_samples<T, F>(spec: SamplerSpec, n: u64, statistic: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(&Sample) -> std::result::Result<T, GeometryError> + Sync,
{
    collect_trials(spec.seed, n, |rng, _| statistic(&draw(spec.kind, rng)))
}

/// Sorted sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(SamplingError::NanSample);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }
}

/// Minimum sample size for [`ks_statistic`].
pub const KS_MIN_SAMPLES: usize = 1000;

/// `sup_x |F_n(x) - cdf(x)|`.
///
/// The reference CDF is spot-checked at every sample point: it must stay in
/// `[0, 1]` and be non-decreasing along the sorted sample.
pub fn ks_statistic<C>(samples: &EmpiricalDistribution, cdf: C) -> Result<f64>
where
    C: Fn(f64) -> f64,
{
    let n = samples.len();
    if n < KS_MIN_SAMPLES {
        return Err(SamplingError::TooFewSamples { got: n, min: KS_MIN_SAMPLES });
    }
    let nf = n as f64;
    let mut prev = f64::NEG_INFINITY;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.values().iter().enumerate() {
        let f = cdf(x);
        if !(f >= -1e-12 && f <= 1.0 + 1e-12) || f < prev - 1e-12 {
            return Err(SamplingError::NonMonotoneCdf { at: x });
        }
        prev = f;
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    Ok(d)
}

/// Asymptotic one-sample KS critical value `sqrt(-ln(α/2)/2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Pearson sample correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Pearson chi-square statistic of 2D points against the uniform law on
/// `[lo, hi]²` with `bins × bins` cells; returns `(statistic, dof)`.
pub fn chi_square_uniform_grid(points: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> (f64, usize) {
    let mut counts = vec![0u64; bins * bins];
    let width = (hi - lo) / bins as f64;
    let cell = |v: f64| (((v - lo) / width) as usize).min(bins - 1);
    for &(x, y) in points {
        counts[cell(x) * bins + cell(y)] += 1;
    }
    let expected = points.len() as f64 / (bins * bins) as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    (stat, bins * bins - 1)
}
