//! Closed-form and series answers for the simplex probabilities.
//!
//! The reflected-cone probability is a joint tail of two correlated F-ratios
//! sharing a denominator, summed as a power series in `ρ²` whose terms need a
//! two-dimensional integral `Λ_k` each. The gamma-cone and pinned-quadrant
//! probabilities are quadrant integrals of explicit bivariate densities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densities::{triple_convolution_density, SimplexCase};
use crate::quadrature::{integrate_2d, try_sum_series, Domain2d, QuadratureError, QuadratureResult, QuadratureSpec};
use crate::special::{log_gamma, DomainError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown quantity '{0}'")]
    UnknownQuantity(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

pub type Result<T> = std::result::Result<T, AnalyticError>;

/// Default truncation tolerance of the `ρ²` series.
pub const DEFAULT_SERIES_REL_TOL: f64 = 1e-12;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 200;

/// Parameters of the bivariate F-ratio tail
/// `P(m σ₁₁/(n τ) > ξ, m σ₂₂/(n τ) > ξ)` where `(σ₁₁, σ₂₂)` are the diagonal
/// of a Wishart matrix with `n` degrees and correlation `ρ`, and `τ` is an
/// independent chi-square with `m` degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KrishnaiahParams {
    n: f64,
    m: f64,
    rho: f64,
    xi: f64,
    eta: f64,
}

impl KrishnaiahParams {
    pub fn new(n: f64, m: f64, rho: f64, xi: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite() && m > 0.0 && m.is_finite()) {
            return Err(AnalyticError::InvalidParams(format!("degrees must be positive, got n = {n}, m = {m}")));
        }
        if !(rho * rho < 1.0) {
            return Err(AnalyticError::InvalidParams(format!("need ρ² < 1, got ρ = {rho}")));
        }
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(AnalyticError::InvalidParams(format!("need ξ >= 0, got {xi}")));
        }
        Ok(Self { n, m, rho, xi, eta: Self::eta_of(n, m, rho, xi) })
    }

    fn eta_of(n: f64, m: f64, rho: f64, xi: f64) -> f64 {
        n * xi / (m * (1.0 - rho * rho))
    }

    /// The tetrahedron case: `n = m = 3`, `ρ = 1/3`, `ξ = 1/3`.
    pub fn reflected_cone() -> Self {
        Self::new(3.0, 3.0, 1.0 / 3.0, 1.0 / 3.0).expect("valid constants")
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// `n ξ / (m (1 - ρ²))`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// True when the stored `η` equals a fresh recomputation bit for bit.
    pub fn is_consistent(&self) -> bool {
        Self::eta_of(self.n, self.m, self.rho, self.xi).to_bits() == self.eta.to_bits()
    }
}

/// `Λ_k = ∫_η^∞ ∫_η^∞ (xy)^{n/2+k-1} / (1+x+y)^{n+2k+m/2} dx dy`.
pub fn lambda_k(k: u32, n: f64, m: f64, eta: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(n > 0.0 && m > 0.0) {
        return Err(AnalyticError::InvalidParams(format!("degrees must be positive, got n = {n}, m = {m}")));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(AnalyticError::InvalidParams(format!("need η >= 0, got {eta}")));
    }
    let a = n / 2.0 + k as f64;
    let b = n + 2.0 * k as f64 + m / 2.0;
    let r = integrate_2d(
        |x, y| ((a - 1.0) * (x * y).ln() - b * (1.0 + x + y).ln()).exp(),
        Domain2d::QuadrantFrom(eta),
        spec,
    )?;
    Ok(r.require_converged()?)
}

/// A computed value with its error bound and cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms: usize,
    pub evaluations: usize,
}

/// The F-ratio joint tail as a series in `ρ²`.
///
/// Each `Λ_k` is integrated to an absolute tolerance of `spec.abs_tol`
/// divided by its coefficient, so every term contributes at most
/// `spec.abs_tol` of quadrature error; terms with a zero coefficient are
/// skipped.
pub fn krishnaiah_joint_tail(params: &KrishnaiahParams, spec: &QuadratureSpec, series_rel_tol: f64) -> Result<SeriesValue> {
    spec.validate()?;
    if !(series_rel_tol > 0.0) {
        return Err(AnalyticError::InvalidParams(format!("series tolerance must be positive, got {series_rel_tol}")));
    }
    let KrishnaiahParams { n, m, rho, eta, .. } = *params;
    let log_prefactor = 0.5 * n * (1.0 - rho * rho).ln() - log_gamma(m / 2.0)? - log_gamma(n / 2.0)?;
    let rho2 = rho * rho;

    let mut quad_error = 0.0;
    let mut evaluations = 0;
    let series = try_sum_series::<_, AnalyticError>(
        |k| {
            let kf = k as f64;
            if k > 0 && rho2 == 0.0 {
                return Ok(0.0);
            }
            let log_power = if k == 0 { 0.0 } else { kf * rho2.ln() };
            let coeff = (log_prefactor + log_power + log_gamma(n + m / 2.0 + 2.0 * kf)?
                - log_gamma(kf + 1.0)?
                - log_gamma(n / 2.0 + kf)?)
            .exp();
            if coeff == 0.0 {
                return Ok(0.0);
            }
            let term_spec = QuadratureSpec { abs_tol: spec.abs_tol / coeff, ..*spec };
            let lam = lambda_k(k as u32, n, m, eta, &term_spec)?;
            quad_error += coeff * lam.error_estimate;
            evaluations += lam.evaluations;
            Ok(coeff * lam.value)
        },
        series_rel_tol,
        MAX_SERIES_TERMS,
    )?;
    // geometric-tail bound from the last two terms
    let tail = series.last_term.abs() * 2.0;
    Ok(SeriesValue {
        value: series.value,
        error_bound: quad_error + tail,
        terms: series.terms,
        evaluations,
    })
}

/// Density of the pair of edge-dot-product statistics of a Gaussian
/// tetrahedron: `exp(¼(z₁ + z₂ - √3 √(3z₁² - 2z₁z₂ + 3z₂²))) / (4√3 π)`.
pub fn gamma_cone_integrand(z1: f64, z2: f64) -> f64 {
    triple_convolution_density(SimplexCase::General, z1, z2)
}

/// Pinned analogue: `exp(z₁ + z₂ - √3 √(z₁² + z₂²)) / (2√3 π)`.
pub fn pinned_quadrant_integrand(z1: f64, z2: f64) -> f64 {
    triple_convolution_density(SimplexCase::Pinned, z1, z2)
}

/// Probability that the fourth vertex of a Gaussian tetrahedron lies in the
/// cone `Γ` at vertex `d`: the positive-quadrant mass of
/// [`gamma_cone_integrand`].
pub fn gamma_cone_probability(spec: &QuadratureSpec) -> Result<QuadratureResult> {
    Ok(integrate_2d(gamma_cone_integrand, Domain2d::QuadrantFrom(0.0), spec)?.require_converged()?)
}

/// Positive-quadrant mass of [`pinned_quadrant_integrand`].
pub fn pinned_quadrant_probability(spec: &QuadratureSpec) -> Result<QuadratureResult> {
    Ok(integrate_2d(pinned_quadrant_integrand, Domain2d::QuadrantFrom(0.0), spec)?.require_converged()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityName {
    ReflectedCone,
    GammaCone,
    PinnedQuadrant,
    TriangleAcute,
    PinnedTriangleAcute,
    ProjectionBetween,
    PinnedProjectionBetween,
    MeanVolumeGaussian,
    MeanVolumeBall,
    MeanVolumeCube,
}

impl QuantityName {
    pub const ALL: [QuantityName; 10] = [
        QuantityName::ReflectedCone,
        QuantityName::GammaCone,
        QuantityName::PinnedQuadrant,
        QuantityName::TriangleAcute,
        QuantityName::PinnedTriangleAcute,
        QuantityName::ProjectionBetween,
        QuantityName::PinnedProjectionBetween,
        QuantityName::MeanVolumeGaussian,
        QuantityName::MeanVolumeBall,
        QuantityName::MeanVolumeCube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuantityName::ReflectedCone => "reflected-cone",
            QuantityName::GammaCone => "gamma-cone",
            QuantityName::PinnedQuadrant => "pinned-quadrant",
            QuantityName::TriangleAcute => "triangle-acute",
            QuantityName::PinnedTriangleAcute => "pinned-triangle-acute",
            QuantityName::ProjectionBetween => "projection-between",
            QuantityName::PinnedProjectionBetween => "pinned-projection-between",
            QuantityName::MeanVolumeGaussian => "mean-volume-gaussian",
            QuantityName::MeanVolumeBall => "mean-volume-ball",
            QuantityName::MeanVolumeCube => "mean-volume-cube",
        }
    }
}

impl fmt::Display for QuantityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantityName {
    type Err = AnalyticError;
    fn from_str(s: &str) -> Result<Self> {
        QuantityName::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| AnalyticError::UnknownQuantity(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Series,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticQuantity {
    pub name: QuantityName,
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
    /// Integrand evaluations spent; 0 for closed forms.
    pub evaluations: usize,
}

/// `E[volume]` for four independent standard normal vertices, computed
/// directly: `|det|` of the edge matrix is `2 χ₁χ₂χ₃` in law, so the mean is
/// `2√2/(3√π)`. Sampling agrees with this, not with the stated
/// [`QuantityName::MeanVolumeGaussian`] constant.
pub const MEAN_VOLUME_GAUSSIAN_DIRECT: f64 = 0.531_923_040_535_243_57;

/// `3977/216000 − π²/2160`, the unit-cube mean volume that sampling
/// reproduces; the stated [`QuantityName::MeanVolumeCube`] constant has
/// `21600` in the first denominator.
pub const MEAN_VOLUME_CUBE_DIRECT: f64 = 0.013_842_775_740_236_408;

/// Exact value, for the quantities that have one.
pub fn closed_form(name: QuantityName) -> Option<f64> {
    let v = match name {
        QuantityName::TriangleAcute => 0.25,
        QuantityName::ProjectionBetween => 0.5,
        QuantityName::PinnedTriangleAcute => -0.5 + std::f64::consts::FRAC_1_SQRT_2,
        QuantityName::PinnedProjectionBetween => std::f64::consts::FRAC_1_SQRT_2,
        QuantityName::MeanVolumeGaussian => 2.0 * std::f64::consts::SQRT_2 / (3.0 * PI),
        QuantityName::MeanVolumeBall => 12.0 * PI / 715.0,
        QuantityName::MeanVolumeCube => 3977.0 / 21600.0 - PI * PI / 2160.0,
        QuantityName::ReflectedCone | QuantityName::GammaCone | QuantityName::PinnedQuadrant => return None,
    };
    Some(v)
}

/// [`constant_with`] at the default quadrature and series tolerances.
pub fn constant(name: QuantityName) -> Result<AnalyticQuantity> {
    constant_with(name, &QuadratureSpec::default(), DEFAULT_SERIES_REL_TOL)
}

pub fn constant_with(name: QuantityName, spec: &QuadratureSpec, series_rel_tol: f64) -> Result<AnalyticQuantity> {
    if let Some(value) = closed_form(name) {
        return Ok(AnalyticQuantity { name, value, error_bound: 0.0, method: Method::ClosedForm, evaluations: 0 });
    }
    let quad = |r: QuadratureResult| AnalyticQuantity {
        name,
        value: r.value,
        error_bound: r.error_estimate,
        method: Method::Quadrature,
        evaluations: r.evaluations,
    };
    Ok(match name {
        QuantityName::ReflectedCone => {
            let s = krishnaiah_joint_tail(&KrishnaiahParams::reflected_cone(), spec, series_rel_tol)?;
            AnalyticQuantity {
                name,
                value: s.value,
                error_bound: s.error_bound,
                method: Method::Series,
                evaluations: s.evaluations,
            }
        }
        QuantityName::GammaCone => quad(gamma_cone_probability(spec)?),
        QuantityName::PinnedQuadrant => quad(pinned_quadrant_probability(spec)?),
        _ => unreachable!("closed forms handled above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{f22_tail, gamma};

    const REFLECTED: f64 = 0.681_066_906_922_566;
    const GAMMA_CONE: f64 = 0.683_776_298_473_930_68;
    const PINNED: f64 = 0.834_376_425_662_194_01;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-11, 1e-11, 5_000_000).unwrap()
    }

    /// `Γ(a)² Γ(c) / Γ(b) · E[Q(a, ηS)²]` with `S ~ Gamma(m/2)`, the
    /// expectation by Simpson's rule after `s = u²`.
    fn lambda_oracle(k: u32, n: f64, m: f64, eta: f64) -> f64 {
        use statrs::function::gamma::gamma_ur;
        let a = n / 2.0 + k as f64;
        let b = n + 2.0 * k as f64 + m / 2.0;
        let c = m / 2.0;
        let g = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let s = u * u;
            let q = if eta == 0.0 { 1.0 } else { gamma_ur(a, eta * s) };
            2.0 * u.powf(2.0 * c - 1.0) * (-s).exp() * q * q
        };
        let steps = 40_000;
        let hi = 9.0;
        let h = hi / steps as f64;
        let mut acc = g(0.0) + g(hi);
        for i in 1..steps {
            acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let expectation = acc * h / 3.0 / gamma(c).unwrap();
        gamma(a).unwrap().powi(2) * gamma(c).unwrap() / gamma(b).unwrap() * expectation
    }

    #[test]
    fn eta_of_the_tetrahedron_case() {
        let p = KrishnaiahParams::reflected_cone();
        assert_eq!(p.eta(), 0.375);
        assert!(p.is_consistent());
    }

    #[test]
    fn invalid_params() {
        assert!(KrishnaiahParams::new(3.0, 3.0, 1.0, 0.3).is_err());
        assert!(KrishnaiahParams::new(3.0, 3.0, -1.2, 0.3).is_err());
        assert!(KrishnaiahParams::new(0.0, 3.0, 0.2, 0.3).is_err());
        assert!(KrishnaiahParams::new(3.0, 3.0, 0.2, -0.1).is_err());
        assert!(KrishnaiahParams::new(3.0, 3.0, f64::NAN, 0.1).is_err());
        assert!(lambda_k(0, 3.0, 3.0, -1.0, &tight()).is_err());
    }

    #[test]
    fn lambda_reference_values() {
        let reference = [
            0.038_385_385_644_377_884_97,
            0.004_752_979_752_627_660_428,
            0.000_668_942_970_579_257_417,
            0.000_104_466_451_996_745_378_6,
        ];
        for (k, want) in reference.into_iter().enumerate() {
            let got = lambda_k(k as u32, 3.0, 3.0, 0.375, &tight()).unwrap();
            assert!((got.value - want).abs() < 1e-11, "k = {k}: {got:?}");
        }
    }

    #[test]
    fn lambda_matches_gamma_mixture_oracle() {
        for (k, eta) in [(0, 0.375), (0, 0.0), (2, 0.375), (4, 1.5), (1, 0.05)] {
            let got = lambda_k(k, 3.0, 3.0, eta, &tight()).unwrap().value;
            let want = lambda_oracle(k, 3.0, 3.0, eta);
            assert!((got - want).abs() < 1e-9 * want.max(1e-3), "k = {k}, η = {eta}: {got} vs {want}");
        }
        let got = lambda_k(1, 4.0, 5.0, 0.7, &tight()).unwrap().value;
        let want = lambda_oracle(1, 4.0, 5.0, 0.7);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn lambda_at_zero_is_a_beta_type_integral() {
        // Γ(a)² Γ(m/2) / Γ(b)
        let (a, b, c): (f64, f64, f64) = (1.5, 4.5, 1.5);
        let exact = gamma(a).unwrap().powi(2) * gamma(c).unwrap() / gamma(b).unwrap();
        let got = lambda_k(0, 3.0, 3.0, 0.0, &tight()).unwrap();
        assert!((got.value - exact).abs() < 1e-10, "{got:?} vs {exact}");
    }

    #[test]
    fn lambda_decays_and_decreases() {
        let far = lambda_k(0, 3.0, 3.0, 1e4, &tight()).unwrap().value;
        assert!(far > 0.0 && far < 1e-6, "{far}");
        let mut prev = f64::INFINITY;
        for i in 0..25 {
            let eta = 0.2 * i as f64;
            let v = lambda_k(1, 3.0, 3.0, eta, &tight()).unwrap().value;
            assert!(v < prev, "η = {eta}");
            prev = v;
        }
    }

    #[test]
    fn reflected_cone_series() {
        let s = krishnaiah_joint_tail(&KrishnaiahParams::reflected_cone(), &QuadratureSpec::default(), 1e-12).unwrap();
        assert!((s.value - REFLECTED).abs() < 1e-9, "{s:?}");
        assert!(s.error_bound < 1e-8);
        assert!(s.terms > 5 && s.terms < 40);
        assert!((s.value - 0.681_066_906_9).abs() < 1e-8);
    }

    #[test]
    fn uncorrelated_series_is_a_single_term() {
        let p = KrishnaiahParams::new(3.0, 3.0, 0.0, 1.0 / 3.0).unwrap();
        let s = krishnaiah_joint_tail(&p, &QuadratureSpec::default(), 1e-12).unwrap();
        assert!((s.value - 0.676_165_552_057_213_875).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn zero_threshold_gives_one() {
        let p = KrishnaiahParams::new(3.0, 3.0, 1.0 / 3.0, 0.0).unwrap();
        let s = krishnaiah_joint_tail(&p, &QuadratureSpec::default(), 1e-13).unwrap();
        assert!((s.value - 1.0).abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn quadrant_probabilities() {
        let g = gamma_cone_probability(&QuadratureSpec::default()).unwrap();
        assert!((g.value - GAMMA_CONE).abs() < 1e-9, "{g:?}");
        let p = pinned_quadrant_probability(&QuadratureSpec::default()).unwrap();
        assert!((p.value - PINNED).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn integrands_are_densities() {
        for f in [gamma_cone_integrand, pinned_quadrant_integrand] {
            let total = integrate_2d(f, Domain2d::WholePlane, &QuadratureSpec::default()).unwrap();
            assert!((total.value - 1.0).abs() < 1e-8, "{total:?}");
        }
    }

    #[test]
    fn pinned_integrand_swap_symmetry() {
        let spec = QuadratureSpec::default();
        let left = integrate_2d(
            pinned_quadrant_integrand,
            Domain2d::Rectangle { x: (0.0, f64::INFINITY), y: (f64::NEG_INFINITY, 0.0) },
            &spec,
        )
        .unwrap();
        let right = integrate_2d(
            pinned_quadrant_integrand,
            Domain2d::Rectangle { x: (f64::NEG_INFINITY, 0.0), y: (0.0, f64::INFINITY) },
            &spec,
        )
        .unwrap();
        assert!((left.value - right.value).abs() < 1e-10);
    }

    #[test]
    fn gamma_integrand_at_one_one() {
        let s3 = 3f64.sqrt();
        let want = ((1.0 - s3) / 2.0).exp() / (4.0 * s3 * PI);
        assert!((gamma_cone_integrand(1.0, 1.0) - want).abs() < 1e-16);
    }

    #[test]
    fn cone_probabilities_differ() {
        let spec = QuadratureSpec::default().with_tolerance(1e-10);
        let g = constant_with(QuantityName::GammaCone, &spec, 1e-12).unwrap().value;
        let r = constant_with(QuantityName::ReflectedCone, &spec, 1e-12).unwrap().value;
        assert!(g - r > 0.0);
        assert!((g - r - 2.709_39e-3).abs() < 1e-7, "{}", g - r);
    }

    #[test]
    fn direct_mean_volumes() {
        use statrs::function::gamma::gamma;
        let chi_mean = |k: f64| std::f64::consts::SQRT_2 * gamma((k + 1.0) / 2.0) / gamma(k / 2.0);
        let gaussian = 2.0 * chi_mean(1.0) * chi_mean(2.0) * chi_mean(3.0) / 6.0;
        assert!((MEAN_VOLUME_GAUSSIAN_DIRECT - gaussian).abs() < 1e-14);
        let cube = 3977.0 / 216_000.0 - PI * PI / 2160.0;
        assert!((MEAN_VOLUME_CUBE_DIRECT - cube).abs() < 1e-16);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(constant(QuantityName::TriangleAcute).unwrap().value, 0.25);
        let p = constant(QuantityName::PinnedTriangleAcute).unwrap();
        assert!((p.value - 0.207_106_781_1).abs() < 1e-10);
        assert_eq!(p.method, Method::ClosedForm);
        assert_eq!(p.error_bound, 0.0);
        let v = constant(QuantityName::MeanVolumeGaussian).unwrap().value;
        assert!((v - 0.300_105_438_7).abs() < 1e-10);
        assert!((constant(QuantityName::MeanVolumeBall).unwrap().value - 0.052_726_030_549_758_768).abs() < 1e-15);
        assert!((constant(QuantityName::MeanVolumeCube).unwrap().value - 0.179_551_109_073_569_741).abs() < 1e-15);
    }

    #[test]
    fn projection_constants_from_f22() {
        let pb = constant(QuantityName::ProjectionBetween).unwrap().value;
        assert!((pb - (2.0 * f22_tail(1.0 / 3.0).unwrap() - 1.0)).abs() < 1e-15);
        let ppb = constant(QuantityName::PinnedProjectionBetween).unwrap().value;
        let x = 3.0 - 2.0 * std::f64::consts::SQRT_2;
        assert!((ppb - (2.0 * f22_tail(x).unwrap() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in QuantityName::ALL {
            assert_eq!(q.name().parse::<QuantityName>().unwrap(), q);
            assert_eq!(serde_json::to_string(&q).unwrap(), format!("\"{}\"", q.name()));
        }
        assert!(matches!("nope".parse::<QuantityName>(), Err(AnalyticError::UnknownQuantity(_))));
    }

    #[test]
    fn dispatch_methods() {
        let r = constant(QuantityName::ReflectedCone).unwrap();
        assert_eq!(r.method, Method::Series);
        assert!((r.value - REFLECTED).abs() < 1e-8);
        let g = constant(QuantityName::PinnedQuadrant).unwrap();
        assert_eq!(g.method, Method::Quadrature);
        assert!(g.error_bound >= 0.0 && g.evaluations > 0);
    }
}
