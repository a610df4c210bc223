//! Densities and characteristic functions for edge dot products and for the
//! angles of pinned tetrahedra.
//!
//! For a Gaussian tetrahedron the pair of dot products
//! `((b-a)·(d-a), (c-a)·(d-a))` is a sum of three independent copies of
//! `Z = y (x₁, x₂)`, where `(x₁, x₂, y) = (b-a, c-a, d-a)` are scalar
//! Gaussians. [`miller_density`] is the density of one copy, [`charfun`] its
//! Fourier transform, and [`triple_convolution_density`] the density of the
//! three-fold sum. The pinned case replaces `d - a` by `-a`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_1d, integrate_2d, Domain2d, QuadratureError, QuadratureResult, QuadratureSpec};
use crate::sampling::{mean_trials, SamplingError};
use crate::special::{bessel_k_half, DomainError};

pub type ComplexValue = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("covariance matrix is not symmetric")]
    NotSymmetric,
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("the density is singular at the origin")]
    Origin,
    #[error("{function}: argument {arg} outside the domain")]
    Domain { function: &'static str, arg: f64 },
    #[error("charfun MC check needs n >= {min}, got {n}")]
    TooFewSamples { n: u64, min: u64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

impl From<DomainError> for DensityError {
    fn from(e: DomainError) -> Self {
        DensityError::Domain { function: e.function, arg: e.arg }
    }
}

pub type Result<T> = std::result::Result<T, DensityError>;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplexCase {
    /// Four free Gaussian vertices.
    General,
    /// Fourth vertex pinned at the origin.
    Pinned,
}

impl SimplexCase {
    pub fn name(self) -> &'static str {
        match self {
            SimplexCase::General => "general",
            SimplexCase::Pinned => "pinned",
        }
    }

    /// `Cov(x₁, x₂, y)`.
    pub fn covariance(self) -> [[f64; 3]; 3] {
        match self {
            SimplexCase::General => [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]],
            SimplexCase::Pinned => [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 1.0]],
        }
    }
}

impl fmt::Display for SimplexCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimplexCase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(SimplexCase::General),
            "pinned" => Ok(SimplexCase::Pinned),
            other => Err(format!("unknown case '{other}' (expected general or pinned)")),
        }
    }
}

/// Blocks of `Σ⁻¹ = ((Ω, v), (v', ω))` for a 3×3 covariance `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MillerParams {
    /// Dimension of the `x` block; always 2 here.
    pub p: usize,
    pub omega_block: [[f64; 2]; 2],
    pub v: [f64; 2],
    pub omega: f64,
    /// `√det(Σ⁻¹)`.
    pub sqrt_det: f64,
}

impl MillerParams {
    pub fn from_cov(sigma: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..i {
                let scale = sigma[i][j].abs().max(sigma[j][i].abs()).max(1.0);
                if (sigma[i][j] - sigma[j][i]).abs() > 1e-12 * scale {
                    return Err(DensityError::NotSymmetric);
                }
            }
        }
        let s = sigma;
        // leading principal minors
        let m1 = s[0][0];
        let m2 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        let det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
            + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
        if !(m1 > 0.0 && m2 > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(DensityError::NotPositiveDefinite);
        }
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| s[r0][c0] * s[r1][c1] - s[r0][c1] * s[r1][c0];
        let inv = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ]
        .map(|row| row.map(|c| c / det));
        Ok(MillerParams {
            p: 2,
            omega_block: [[inv[0][0], inv[0][1]], [inv[1][0], inv[1][1]]],
            v: [inv[0][2], inv[1][2]],
            omega: inv[2][2],
            sqrt_det: (1.0 / det).sqrt(),
        })
    }

    pub fn for_case(case: SimplexCase) -> Self {
        Self::from_cov(case.covariance()).expect("built-in covariances are positive definite")
    }

    fn quad_form(&self, z: [f64; 2]) -> f64 {
        let o = &self.omega_block;
        z[0] * (o[0][0] * z[0] + o[0][1] * z[1]) + z[1] * (o[1][0] * z[0] + o[1][1] * z[1])
    }
}

/// Density of `Z = y x` for `(x, y)` jointly normal with inverse covariance
/// described by `params`:
/// `2√det/(2π)^{3/2} (ω/Q)^{1/4} exp(-v'z) K_{1/2}(√(ωQ))` with `Q = z'Ωz`.
pub fn miller_density(params: &MillerParams, z: [f64; 2]) -> Result<f64> {
    let q = params.quad_form(z);
    if !(q > 0.0) {
        return Err(DensityError::Origin);
    }
    let w = params.omega;
    let vz = params.v[0] * z[0] + params.v[1] * z[1];
    let k = bessel_k_half((w * q).sqrt())?;
    Ok(2.0 * params.sqrt_det / (2.0 * PI).powf(1.5) * (w / q).powf(0.25) * (-vz).exp() * k)
}

/// [`miller_density`] after simplification for the two built-in cases.
pub fn miller_density_simplified(case: SimplexCase, z: [f64; 2]) -> Result<f64> {
    let [z1, z2] = z;
    let r = match case {
        SimplexCase::General => 3.0 * z1 * z1 - 2.0 * z1 * z2 + 3.0 * z2 * z2,
        SimplexCase::Pinned => z1 * z1 + z2 * z2,
    };
    if !(r > 0.0) {
        return Err(DensityError::Origin);
    }
    let root = r.sqrt();
    let exponent = match case {
        SimplexCase::General => 0.25 * (z1 + z2 - SQRT3 * root),
        SimplexCase::Pinned => z1 + z2 - SQRT3 * root,
    };
    Ok(exponent.exp() / (2.0 * PI * root))
}

/// Density of the sum of three independent copies of `Z`.
pub fn triple_convolution_density(case: SimplexCase, z1: f64, z2: f64) -> f64 {
    match case {
        SimplexCase::General => {
            let r = (3.0 * z1 * z1 - 2.0 * z1 * z2 + 3.0 * z2 * z2).max(0.0);
            (0.25 * (z1 + z2 - SQRT3 * r.sqrt())).exp() / (4.0 * SQRT3 * PI)
        }
        SimplexCase::Pinned => (z1 + z2 - SQRT3 * z1.hypot(z2)).exp() / (2.0 * SQRT3 * PI),
    }
}

/// The polynomial `R(u, v)` with `E[exp(i(u Z₁ + v Z₂))] = R^{-1/2}`.
pub fn charfun_radicand(case: SimplexCase, u: f64, v: f64) -> ComplexValue {
    let i = Complex64::i();
    let (cu, cv) = (Complex64::from(u), Complex64::from(v));
    match case {
        SimplexCase::General => (cu - i) * (3.0 * cu + i) + (cv - i) * (3.0 * cv + i) + 2.0 * u * v - 1.0,
        SimplexCase::Pinned => (cu - i) * (cu - i) + (cv - i) * (cv - i) + 3.0,
    }
}

/// Characteristic function of `Z`: `1 / √R(u, v)`, principal branch.
pub fn charfun(case: SimplexCase, u: f64, v: f64) -> ComplexValue {
    charfun_radicand(case, u, v).sqrt().inv()
}

/// Characteristic function of the triple sum: `R^{-3/2}`, principal branch.
pub fn charfun_triple(case: SimplexCase, u: f64, v: f64) -> ComplexValue {
    charfun_radicand(case, u, v).powf(-1.5)
}

/// `max |charfun³ - charfun_triple|` over `points`.
pub fn charfun_identity_check(case: SimplexCase, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(u, v)| (charfun(case, u, v).powu(3) - charfun_triple(case, u, v)).norm())
        .fold(0.0, f64::max)
}

/// `min |R(u, v)|` over `points`; the principal branch is safe when this
/// stays away from zero.
pub fn min_radicand_modulus(case: SimplexCase, points: &[(f64, f64)]) -> f64 {
    points.iter().map(|&(u, v)| charfun_radicand(case, u, v).norm()).fold(f64::INFINITY, f64::min)
}

/// Points `lo, lo + step, ..., hi` on both axes.
pub fn square_grid(lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let count = ((hi - lo) / step).round() as usize + 1;
    let axis: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    axis.iter().flat_map(|&u| axis.iter().map(move |&v| (u, v))).collect()
}

/// Minimum sample size for [`charfun_mc_check`].
pub const CHARFUN_MC_MIN: u64 = 100_000;

/// Whole-plane integral of [`miller_density_simplified`]; the logarithmic
/// singularity at the origin sits on a cell corner of the quadrature.
pub fn miller_normalization(case: SimplexCase, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let mut failure = None;
    let r = integrate_2d(
        |x, y| match miller_density_simplified(case, [x, y]) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        Domain2d::WholePlane,
        spec,
    )?;
    match failure {
        // only the origin itself is rejected, and it is never a node
        Some(e) => Err(e),
        None => Ok(r.require_converged()?),
    }
}

pub fn triple_convolution_normalization(case: SimplexCase, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    Ok(integrate_2d(|x, y| triple_convolution_density(case, x, y), Domain2d::WholePlane, spec)?.require_converged()?)
}

/// `|mean of exp(i(u Z₁ + v Z₂)) - charfun(u, v)|` over `n` samples of `Z`.
pub fn charfun_mc_check(case: SimplexCase, u: f64, v: f64, n: u64, seed: u64) -> Result<f64> {
    if n < CHARFUN_MC_MIN {
        return Err(DensityError::TooFewSamples { n, min: CHARFUN_MC_MIN });
    }
    let phase = |rng: &mut crate::sampling::TrialRng| {
        let a = rng.normal();
        let b = rng.normal();
        let c = rng.normal();
        let y = match case {
            SimplexCase::General => rng.normal() - a,
            SimplexCase::Pinned => -a,
        };
        u * y * (b - a) + v * y * (c - a)
    };
    let re = mean_trials(seed, n, |rng, _| Ok(phase(rng).cos()))?;
    let im = mean_trials(seed, n, |rng, _| Ok(phase(rng).sin()))?;
    Ok((Complex64::new(re.value, im.value) - charfun(case, u, v)).norm())
}

/// `∫∫ density · exp(i(u x + v y))` over the plane, by quadrature of the
/// real and imaginary parts.
pub fn fourier_transform<F>(density: F, u: f64, v: f64, spec: &QuadratureSpec) -> Result<ComplexValue>
where
    F: Fn(f64, f64) -> f64,
{
    let re = integrate_2d(|x, y| density(x, y) * (u * x + v * y).cos(), Domain2d::WholePlane, spec)?.require_converged()?;
    let im = integrate_2d(|x, y| density(x, y) * (u * x + v * y).sin(), Domain2d::WholePlane, spec)?.require_converged()?;
    Ok(Complex64::new(re.value, im.value))
}

fn check_open(function: &'static str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if x > lo && x < hi {
        Ok(())
    } else {
        Err(DensityError::Domain { function, arg: x })
    }
}

/// Joint density of the three dihedral angles at the pinned vertex of a
/// pinned Gaussian tetrahedron (equivalently, of the angles of a random
/// spherical triangle).
///
/// Supported where `x + y + z > π`, `x + y < π + z`, `y + z < π + x` and
/// `z + x < π + y`. The product of the four half-angle cosines is negative
/// throughout the support, so the density is its negation over
/// `π sin²x sin²y sin²z`.
pub fn miles_joint_density(x: f64, y: f64, z: f64) -> Result<f64> {
    for a in [x, y, z] {
        check_open("miles_joint_density", a, 0.0, PI)?;
    }
    let on_support = x + y + z > PI && x + y < PI + z && y + z < PI + x && z + x < PI + y;
    if !on_support {
        return Ok(0.0);
    }
    Ok(miles_kernel(x, y, z))
}

#[inline]
fn miles_kernel(x: f64, y: f64, z: f64) -> f64 {
    let num = ((x + y + z) / 2.0).cos() * ((-x + y + z) / 2.0).cos() * ((x - y + z) / 2.0).cos() * ((x + y - z) / 2.0).cos();
    let den = (x.sin() * y.sin() * z.sin()).powi(2);
    (-num / (PI * den)).max(0.0)
}

/// Density of a single dihedral angle at `x`, by integrating out the other
/// two over the support. Should equal `1/π`.
pub fn miles_marginal(x: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_open("miles_marginal", x, 0.0, PI)?;
    // y = (s + d)/2, z = (s - d)/2 maps the support to a rectangle
    let w = PI - x;
    let r = integrate_2d(
        |s, d| 0.5 * miles_kernel(x, 0.5 * (s + d), 0.5 * (s - d)),
        Domain2d::Rectangle { x: (w, PI + x), y: (-w, w) },
        spec,
    )?;
    Ok(r.require_converged()?)
}

/// Joint density of two dihedral angles, integrating out the third.
pub fn miles_pair_density(x: f64, y: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_open("miles_pair_density", x, 0.0, PI)?;
    check_open("miles_pair_density", y, 0.0, PI)?;
    let lo = (x + y - PI).abs();
    let hi = PI - (x - y).abs();
    if !(lo < hi) {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0, converged: true });
    }
    Ok(integrate_1d(|z| miles_kernel(x, y, z), lo, hi, spec)?.require_converged()?)
}

/// `∫ miles_marginal` over `(0, π)`.
pub fn miles_normalization(spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let inner = QuadratureSpec { abs_tol: spec.abs_tol * 0.1, rel_tol: spec.rel_tol * 0.1, ..*spec };
    let mut failure = None;
    let r = integrate_1d(
        |x| match miles_marginal(x, &inner) {
            Ok(m) => m.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        PI,
        spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.require_converged()?),
    }
}

/// `P(α < a, β < b)` for two dihedral angles at the pinned vertex.
///
/// For each `x < a` the `(y, z)` support is the rectangle of
/// [`miles_marginal`]; `y < b` cuts it along `d < 2b - s`, which splits the
/// `s` range into a full-height piece and a piece with a linear upper edge.
pub fn miles_pair_cdf(a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_open("miles_pair_cdf", a, 0.0, PI + 1e-15)?;
    check_open("miles_pair_cdf", b, 0.0, PI + 1e-15)?;
    let (a, b) = (a.min(PI), b.min(PI));
    let inner = QuadratureSpec { abs_tol: spec.abs_tol * 0.1, rel_tol: spec.rel_tol * 0.1, ..*spec };
    let mut failure = None;
    let slice = |x: f64| -> Result<f64> {
        let w = PI - x;
        let end = (PI + x).min(2.0 * b + w);
        let kink = (2.0 * b - w).clamp(w, end.max(w));
        let mut total = 0.0;
        if kink > w {
            let r = integrate_2d(
                |s, d| 0.5 * miles_kernel(x, 0.5 * (s + d), 0.5 * (s - d)),
                Domain2d::Rectangle { x: (w, kink), y: (-w, w) },
                &inner,
            )?;
            total += r.require_converged()?.value;
        }
        if end > kink {
            let r = integrate_2d(
                |s, u| {
                    let h = 2.0 * b - s + w;
                    let d = -w + u * h;
                    0.5 * h * miles_kernel(x, 0.5 * (s + d), 0.5 * (s - d))
                },
                Domain2d::Rectangle { x: (kink, end), y: (0.0, 1.0) },
                &inner,
            )?;
            total += r.require_converged()?.value;
        }
        Ok(total)
    };
    let r = integrate_1d(
        |x| match slice(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        a,
        spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.require_converged()?),
    }
}

/// Taylor coefficients of [`crofton_density`] in `s = x - π`; even ones
/// carry a factor `1/π`.
const CROFTON_SERIES: [f64; 16] = [
    1.0 / (4.0 * PI),
    -1.0 / 30.0,
    1.0 / (24.0 * PI),
    -1.0 / 252.0,
    1.0 / (288.0 * PI),
    -1.0 / 3600.0,
    1.0 / (4800.0 * PI),
    -1.0 / 66528.0,
    1.0 / (96768.0 * PI),
    -691.0 / 990_662_400.0,
    691.0 / (1_524_096_000.0 * PI),
    -1.0 / 34_214_400.0,
    1.0 / (54_743_040.0 * PI),
    -3617.0 / 3_175_780_608_000.0,
    3617.0 / (5_230_697_472_000.0 * PI),
    -43867.0 / 1_043_524_145_664_000.0,
];

/// Below this `|x - π|` the series replaces the closed form.
pub const CROFTON_SERIES_RADIUS: f64 = 0.5;

/// Proposed density of the solid angle at the pinned vertex:
/// `-((x² - 4πx + 3π² - 6) cos x - 6(x - 2π) sin x - 2(x² - 4πx + 3π² + 3)) / (16π cos⁴(x/2))`
/// on `(0, 2π)`.
///
/// Numerator and denominator vanish to fourth order at `x = π`; within
/// [`CROFTON_SERIES_RADIUS`] of it the Taylor series is used instead.
pub fn crofton_density(x: f64) -> Result<f64> {
    check_open("crofton_density", x, 0.0, 2.0 * PI)?;
    let s = x - PI;
    if s.abs() < CROFTON_SERIES_RADIUS {
        return Ok(CROFTON_SERIES.iter().rev().fold(0.0, |acc, &c| acc * s + c));
    }
    let p = x * x - 4.0 * PI * x + 3.0 * PI * PI;
    let num = (p - 6.0) * x.cos() - 6.0 * (x - 2.0 * PI) * x.sin() - 2.0 * (p + 3.0);
    Ok(-num / (16.0 * PI * (x / 2.0).cos().powi(4)))
}

/// `∫₀^{2π} crofton_density`.
pub fn crofton_normalization(spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let r = integrate_1d(|x| crofton_density(x).unwrap_or(0.0), 0.0, 2.0 * PI, spec)?;
    Ok(r.require_converged()?)
}

/// Tabulated CDF of [`crofton_density`] with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct CroftonCdf {
    step: f64,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl CroftonCdf {
    pub const INTERVALS: usize = 4096;

    pub fn new() -> Self {
        let n = Self::INTERVALS;
        let step = 2.0 * PI / n as f64;
        // 8-point Gauss-Legendre on each interval
        const NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329_0, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
        const WEIGHTS: [f64; 4] = [0.362_683_783_378_362_0, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
        let density = |x: f64| if x <= 0.0 || x >= 2.0 * PI { 0.0 } else { crofton_density(x).unwrap_or(0.0) };
        let mut cdf = Vec::with_capacity(n + 1);
        let mut pdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        pdf.push(density_limit_at_zero());
        for i in 0..n {
            let c = (i as f64 + 0.5) * step;
            let h = 0.5 * step;
            let part: f64 = NODES.iter().zip(WEIGHTS).map(|(&t, w)| w * (density(c - h * t) + density(c + h * t))).sum();
            acc += part * h;
            cdf.push(acc);
            pdf.push(if i + 1 == n { crofton_limit_at_two_pi() } else { density((i + 1) as f64 * step) });
        }
        Self { step, cdf, pdf }
    }

    /// `∫₀^x crofton_density`, clamped to 0 below the support and to the
    /// table's total mass above it.
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let n = self.cdf.len() - 1;
        if x >= 2.0 * PI {
            return self.cdf[n];
        }
        let i = ((x / self.step) as usize).min(n - 1);
        let t = (x - i as f64 * self.step) / self.step;
        let h = self.step;
        let (f0, f1, d0, d1) = (self.cdf[i], self.cdf[i + 1], self.pdf[i], self.pdf[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * h * d1
    }

    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }
}

impl Default for CroftonCdf {
    fn default() -> Self {
        Self::new()
    }
}

/// `lim_{x→0⁺} crofton_density = (3π² + 12) / (16π)`.
pub fn density_limit_at_zero() -> f64 {
    (3.0 * PI * PI + 12.0) / (16.0 * PI)
}

/// `lim_{x→2π⁻} crofton_density = (12 - π²) / (16π)`.
pub fn crofton_limit_at_two_pi() -> f64 {
    (12.0 - PI * PI) / (16.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn miller_params_general() {
        let p = MillerParams::for_case(SimplexCase::General);
        let want = [[0.75, -0.25], [-0.25, 0.75]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(p.omega_block[i][j], want[i][j], 1e-15));
            }
            assert!(close(p.v[i], -0.25, 1e-15));
        }
        assert!(close(p.omega, 0.75, 1e-15));
        assert!(close(p.sqrt_det, 0.5, 1e-15));
        assert_eq!(p.p, 2);
    }

    #[test]
    fn miller_params_pinned_and_identity() {
        let p = MillerParams::for_case(SimplexCase::Pinned);
        assert!(close(p.omega_block[0][0], 1.0, 1e-15) && close(p.omega_block[0][1], 0.0, 1e-15));
        assert!(close(p.omega_block[1][1], 1.0, 1e-15));
        assert!(close(p.v[0], -1.0, 1e-15) && close(p.v[1], -1.0, 1e-15));
        assert!(close(p.omega, 3.0, 1e-14) && close(p.sqrt_det, 1.0, 1e-15));

        let id = MillerParams::from_cov([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(id.omega_block, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(id.v, [0.0, 0.0]);
        assert_eq!((id.omega, id.sqrt_det), (1.0, 1.0));
    }

    #[test]
    fn miller_params_inverse_round_trip() {
        let sigma = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.7], [0.5, -0.7, 2.0]];
        let p = MillerParams::from_cov(sigma).unwrap();
        let inv = [
            [p.omega_block[0][0], p.omega_block[0][1], p.v[0]],
            [p.omega_block[1][0], p.omega_block[1][1], p.v[1]],
            [p.v[0], p.v[1], p.omega],
        ];
        for i in 0..3 {
            for j in 0..3 {
                let e: f64 = (0..3).map(|k| sigma[i][k] * inv[k][j]).sum();
                assert!(close(e, if i == j { 1.0 } else { 0.0 }, 1e-14));
            }
        }
    }

    #[test]
    fn miller_params_rejects_bad_covariances() {
        let asym = [[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(MillerParams::from_cov(asym), Err(DensityError::NotSymmetric));
        let indefinite = [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(MillerParams::from_cov(indefinite), Err(DensityError::NotPositiveDefinite));
        let singular = [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]];
        assert_eq!(MillerParams::from_cov(singular), Err(DensityError::NotPositiveDefinite));
    }

    #[test]
    fn miller_density_values() {
        let g = MillerParams::for_case(SimplexCase::General);
        let want = ((1.0 - SQRT3) / 2.0).exp() / (4.0 * PI);
        assert!(close(miller_density(&g, [1.0, 1.0]).unwrap(), want, 1e-16));
        let p = MillerParams::for_case(SimplexCase::Pinned);
        let want = (1.0 - SQRT3).exp() / (2.0 * PI);
        assert!(close(miller_density(&p, [1.0, 0.0]).unwrap(), want, 1e-16));
        assert_eq!(miller_density(&p, [0.0, 0.0]), Err(DensityError::Origin));
        assert_eq!(miller_density_simplified(SimplexCase::General, [0.0, 0.0]), Err(DensityError::Origin));
    }

    #[test]
    fn miller_dual_paths_agree() {
        let mut state = 0x1234_5678_u64;
        let mut next = || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0
        };
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            let params = MillerParams::for_case(case);
            for _ in 0..10_000 {
                let z = [next(), next()];
                let a = miller_density(&params, z).unwrap();
                let b = miller_density_simplified(case, z).unwrap();
                assert!((a - b).abs() <= 1e-13 * b.max(1e-300) + 1e-300, "{case} {z:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn miller_density_normalizes() {
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            let total = integrate_2d(
                |x, y| miller_density_simplified(case, [x, y]).unwrap_or(0.0),
                Domain2d::WholePlane,
                &QuadratureSpec::new(1e-9, 1e-9, 5_000_000).unwrap(),
            )
            .unwrap();
            assert!((total.value - 1.0).abs() < 1e-6, "{case}: {total:?}");
        }
    }

    #[test]
    fn triple_convolution_values() {
        assert!(close(triple_convolution_density(SimplexCase::Pinned, 0.0, 0.0), 1.0 / (2.0 * SQRT3 * PI), 1e-16));
        assert!(close(triple_convolution_density(SimplexCase::General, 0.0, 0.0), 1.0 / (4.0 * SQRT3 * PI), 1e-16));
        let spec = QuadratureSpec::default();
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            let total = integrate_2d(|x, y| triple_convolution_density(case, x, y), Domain2d::WholePlane, &spec).unwrap();
            assert!((total.value - 1.0).abs() < 1e-8, "{case}: {total:?}");
        }
    }

    #[test]
    fn triple_convolution_matches_quadrant_integrand() {
        let want = ((1.0 - SQRT3) / 2.0).exp() / (4.0 * SQRT3 * PI);
        assert!(close(triple_convolution_density(SimplexCase::General, 1.0, 1.0), want, 1e-16));
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.5), (-1.0, -1.0)] {
            assert_eq!(
                triple_convolution_density(SimplexCase::General, x, y),
                crate::analytic::gamma_cone_integrand(x, y)
            );
            assert_eq!(
                triple_convolution_density(SimplexCase::Pinned, x, y),
                crate::analytic::pinned_quadrant_integrand(x, y)
            );
        }
    }

    #[test]
    fn charfun_values() {
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            assert_eq!(charfun_radicand(case, 0.0, 0.0), Complex64::new(1.0, 0.0));
            assert_eq!(charfun(case, 0.0, 0.0), Complex64::new(1.0, 0.0));
        }
        assert_eq!(charfun_radicand(SimplexCase::Pinned, 1.0, 0.0), Complex64::new(2.0, -2.0));
        let f = charfun(SimplexCase::Pinned, 1.0, 0.0);
        assert!((f - Complex64::new(0.549_342_056_733_904_983, 0.227_544_930_281_113_671)).norm() < 1e-15);
    }

    #[test]
    fn charfun_cubed_identity() {
        let grid = square_grid(-5.0, 5.0, 0.5);
        assert_eq!(grid.len(), 21 * 21);
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            assert!(charfun_identity_check(case, &grid) < 1e-13);
            assert!(min_radicand_modulus(case, &grid) >= 1.0 - 1e-12);
        }
        assert_eq!(charfun_identity_check(SimplexCase::Pinned, &[(0.0, 0.0)]), 0.0);
    }

    #[test]
    fn radicand_stays_off_zero() {
        // Re R = 3u² + 3v² + 2uv + 1 (general) and u² + v² + 1 (pinned) are >= 1
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            assert!(min_radicand_modulus(case, &square_grid(-50.0, 50.0, 0.25)) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn triple_density_is_inverse_transform_of_cubed_charfun() {
        let spec = QuadratureSpec::new(1e-10, 1e-10, 5_000_000).unwrap();
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            for &(u, v) in &[(0.3, -0.2), (1.0, 0.5), (-0.7, 0.0)] {
                let ft = fourier_transform(|x, y| triple_convolution_density(case, x, y), u, v, &spec).unwrap();
                let want = charfun_triple(case, u, v);
                assert!((ft - want).norm() < 1e-8, "{case} ({u}, {v}): {ft} vs {want}");
            }
        }
    }

    #[test]
    fn miller_density_is_inverse_transform_of_charfun() {
        let spec = QuadratureSpec::new(1e-9, 1e-9, 5_000_000).unwrap();
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            let (u, v) = (0.4, -0.3);
            let ft = fourier_transform(|x, y| miller_density_simplified(case, [x, y]).unwrap_or(0.0), u, v, &spec).unwrap();
            let want = charfun(case, u, v);
            assert!((ft - want).norm() < 1e-6, "{case}: {ft} vs {want}");
        }
    }

    #[test]
    fn charfun_mc() {
        assert_eq!(charfun_mc_check(SimplexCase::Pinned, 0.0, 0.0, 100_000, 1).unwrap(), 0.0);
        let d = charfun_mc_check(SimplexCase::Pinned, 1.0, 1.0, 1_000_000, 2).unwrap();
        assert!(d < 4e-3, "{d}");
        let d = charfun_mc_check(SimplexCase::General, 0.5, -0.5, 1_000_000, 3).unwrap();
        assert!(d < 4e-3, "{d}");
        assert!(matches!(charfun_mc_check(SimplexCase::General, 0.5, 0.5, 10, 0), Err(DensityError::TooFewSamples { .. })));
    }

    #[test]
    fn miles_sign_and_support() {
        let d = miles_joint_density(PI / 2.0, PI / 2.0, PI / 2.0).unwrap();
        assert!(close(d, 1.0 / (4.0 * PI), 1e-15));
        assert_eq!(miles_joint_density(PI / 3.0, PI / 3.0, PI / 3.0).unwrap(), 0.0);
        assert_eq!(miles_joint_density(0.3, 0.3, 1.0).unwrap(), 0.0);
        assert_eq!(miles_joint_density(0.2, 2.0, 0.4).unwrap(), 0.0);
        assert!(miles_joint_density(0.0, 1.0, 1.0).is_err());
        assert!(miles_joint_density(1.0, PI, 1.0).is_err());
        // the displayed cosine product is negative on the support
        for i in 1..30 {
            for j in 1..30 {
                let (x, y) = (i as f64 * PI / 30.0, j as f64 * PI / 30.0);
                let z = 0.5 * ((x + y - PI).abs() + PI - (x - y).abs());
                if (x + y - PI).abs() < PI - (x - y).abs() {
                    let num = ((x + y + z) / 2.0).cos() * ((-x + y + z) / 2.0).cos() * ((x - y + z) / 2.0).cos() * ((x + y - z) / 2.0).cos();
                    assert!(num < 0.0);
                    assert!(miles_joint_density(x, y, z).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn miles_marginals_are_uniform() {
        let spec = QuadratureSpec::new(1e-10, 1e-10, 5_000_000).unwrap();
        for x in [0.1, 0.7, PI / 2.0, 2.0, 3.0] {
            let m = miles_marginal(x, &spec).unwrap();
            assert!((m.value - 1.0 / PI).abs() < 1e-8, "x = {x}: {m:?}");
        }
    }

    #[test]
    fn miles_pair_cdf_limits() {
        let spec = QuadratureSpec::new(1e-8, 1e-8, 5_000_000).unwrap();
        let all = miles_pair_cdf(PI, PI, &spec).unwrap();
        assert!((all.value - 1.0).abs() < 1e-6, "{all:?}");
        // the single-angle marginal is uniform
        let half = miles_pair_cdf(PI / 2.0, PI, &spec).unwrap();
        assert!((half.value - 0.5).abs() < 1e-6, "{half:?}");
        let sym = miles_pair_cdf(PI, 1.0, &spec).unwrap();
        assert!((sym.value - 1.0 / PI).abs() < 1e-6, "{sym:?}");
    }

    #[test]
    fn miles_normalizes() {
        let total = miles_normalization(&QuadratureSpec::new(1e-8, 1e-8, 5_000_000).unwrap()).unwrap();
        assert!((total.value - 1.0).abs() < 1e-6, "{total:?}");
    }

    #[test]
    fn crofton_limits_and_values() {
        assert!(close(crofton_density(1e-7).unwrap(), density_limit_at_zero(), 1e-6));
        assert!(close(density_limit_at_zero(), 0.827_78, 1e-5));
        assert!(close(crofton_density(2.0 * PI - 1e-7).unwrap(), crofton_limit_at_two_pi(), 1e-6));
        assert!(close(crofton_density(PI).unwrap(), 1.0 / (4.0 * PI), 1e-16));
        assert!(crofton_density(0.0).is_err() && crofton_density(2.0 * PI).is_err());
    }

    #[test]
    fn crofton_series_joins_the_closed_form() {
        // both branches at the switch radius and a little outside it
        for s in [0.5, 0.55, 0.7, -0.5, -0.6] {
            let x = PI + s;
            let series = CROFTON_SERIES.iter().rev().fold(0.0, |acc, &c| acc * s + c);
            let p = x * x - 4.0 * PI * x + 3.0 * PI * PI;
            let num = (p - 6.0) * x.cos() - 6.0 * (x - 2.0 * PI) * x.sin() - 2.0 * (p + 3.0);
            let direct = -num / (16.0 * PI * (x / 2.0).cos().powi(4));
            assert!((series - direct).abs() < 1e-12 * direct.abs(), "s = {s}: {series} vs {direct}");
        }
    }

    #[test]
    fn crofton_near_pi_against_offset_oracle() {
        // high-precision values at π + δ
        let oracle = [
            (1e-6, 0.079_577_438_212_627_597_46),
            (1e-3, 0.079_544_151_471_559_109_87),
            (-1e-3, 0.079_610_818_146_162_285_03),
            (0.25, 0.072_015_127_646_716_644_77),
        ];
        for (d, want) in oracle {
            let got = crofton_density(PI + d).unwrap();
            assert!((got - want).abs() < 1e-15, "δ = {d}: {got} vs {want}");
        }
    }

    #[test]
    fn crofton_is_a_density() {
        let total = crofton_normalization(&QuadratureSpec::default()).unwrap();
        assert!((total.value - 1.0).abs() < 1e-8, "{total:?}");
        let mut x = 1e-3;
        while x < 2.0 * PI {
            assert!(crofton_density(x).unwrap() > 0.0);
            x += 1e-3;
        }
        let mean = integrate_1d(|x| x * crofton_density(x).unwrap_or(0.0), 0.0, 2.0 * PI, &QuadratureSpec::default()).unwrap();
        assert!((mean.value - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn crofton_cdf_table() {
        let table = CroftonCdf::new();
        assert!((table.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(table.cdf(-1.0), 0.0);
        let spec = QuadratureSpec::new(1e-13, 1e-13, 5_000_000).unwrap();
        for x in [0.01, 0.5, 1.0, PI - 0.01, PI, 4.0, 6.0, 6.28] {
            let exact = integrate_1d(|t| crofton_density(t).unwrap_or(0.0), 0.0, x, &spec).unwrap().value;
            assert!((table.cdf(x) - exact).abs() < 1e-11, "x = {x}");
        }
    }
}
