//! Named Monte Carlo estimands: the events and functionals that the CLI and
//! the validation suite run by name.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{closed_form, QuantityName};
use crate::densities::CroftonCdf;
use crate::geometry::{
    cone_events, dihedral_angles, is_acute_tetrahedron, is_acute_triangle, pinned_dihedral_angles, shadow_is_triangle,
    solid_angle, solid_angle_sum, triangle_projection_t, GeometryError, Point3, Tetrahedron,
};
use crate::sampling::{
    bernoulli_trials, collect_samples, estimate_mean, estimate_probability, ks_critical_value, ks_statistic,
    EmpiricalDistribution, MCEstimate, Sample, SamplerKind, SamplerSpec, SamplingError, TrialRng,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventError {
    #[error("unknown event '{0}'")]
    Unknown(String),
    #[error("volume-mean needs a tetrahedron sampler, got '{0}'")]
    NotATetraSampler(SamplerKind),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Fixed tetrahedron whose random shadows are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Regular,
    /// Vertices at the origin and the three unit vectors.
    Corner,
    /// A fresh Gaussian tetrahedron per trial.
    Gaussian,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Regular => "regular",
            Shape::Corner => "corner",
            Shape::Gaussian => "gaussian",
        }
    }

    fn fixed(self) -> Option<Tetrahedron> {
        match self {
            Shape::Regular => Some(Tetrahedron::regular()),
            Shape::Corner => Some(Tetrahedron::corner()),
            Shape::Gaussian => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// Projection of `d` lies in the cone at `a` (Gaussian tetrahedron).
    GammaCone,
    /// Projection of `d` lies in the reflected cone at `b + c - a`.
    ReflectedCone,
    Parallelogram,
    /// In either cone.
    ConeUnion,
    AcuteTetra,
    AcuteTriangle,
    PinnedAcuteTriangle,
    /// Foot of `c` on line `ab` strictly between `a` and `b`.
    ProjectionBetween,
    /// Same with `c` pinned at the origin.
    PinnedProjectionBetween,
    /// Cone-at-`a` event for a pinned tetrahedron (`d = 0`).
    PinnedQuadrant,
    ShadowTriangle(Shape),
    /// Solid angle at the pinned vertex, compared with the Crofton law.
    SolidAngleSamples,
    /// Dihedral angle at `da` of a pinned tetrahedron, compared with the
    /// uniform law on `[0, π]`.
    DihedralSamples,
    VolumeMean(SamplerKind),
}

impl Event {
    /// Every event with a fixed name, plus one instance of each family.
    pub fn catalogue() -> Vec<Event> {
        vec![
            Event::GammaCone,
            Event::ReflectedCone,
            Event::Parallelogram,
            Event::ConeUnion,
            Event::AcuteTetra,
            Event::AcuteTriangle,
            Event::PinnedAcuteTriangle,
            Event::ProjectionBetween,
            Event::PinnedProjectionBetween,
            Event::PinnedQuadrant,
            Event::ShadowTriangle(Shape::Regular),
            Event::ShadowTriangle(Shape::Corner),
            Event::ShadowTriangle(Shape::Gaussian),
            Event::SolidAngleSamples,
            Event::DihedralSamples,
            Event::VolumeMean(SamplerKind::GaussianTetra),
            Event::VolumeMean(SamplerKind::PinnedTetra),
            Event::VolumeMean(SamplerKind::UniformBallTetra),
            Event::VolumeMean(SamplerKind::UniformCubeTetra),
        ]
    }

    /// Known exact or analytic value of the estimand, if any.
    pub fn target(&self) -> Option<f64> {
        let q = match self {
            Event::GammaCone => return Some(GAMMA_CONE),
            Event::ReflectedCone => return Some(REFLECTED_CONE),
            Event::PinnedQuadrant => return Some(PINNED_QUADRANT),
            Event::AcuteTriangle => QuantityName::TriangleAcute,
            Event::PinnedAcuteTriangle => QuantityName::PinnedTriangleAcute,
            Event::ProjectionBetween => QuantityName::ProjectionBetween,
            Event::PinnedProjectionBetween => QuantityName::PinnedProjectionBetween,
            Event::VolumeMean(SamplerKind::GaussianTetra) => QuantityName::MeanVolumeGaussian,
            Event::VolumeMean(SamplerKind::UniformBallTetra) => QuantityName::MeanVolumeBall,
            Event::VolumeMean(SamplerKind::UniformCubeTetra) => QuantityName::MeanVolumeCube,
            Event::ShadowTriangle(shape) => {
                return shape.fixed().and_then(|t| solid_angle_sum(&t).ok()).map(|s| s / (2.0 * PI));
            }
            // mean of a uniform angle on [0, π] and of the solid angle of a
            // random spherical triangle (an eighth of the sphere)
            Event::DihedralSamples | Event::SolidAngleSamples => return Some(PI / 2.0),
            _ => return None,
        };
        closed_form(q)
    }

    pub fn is_probability(&self) -> bool {
        !matches!(self, Event::SolidAngleSamples | Event::DihedralSamples | Event::VolumeMean(_))
    }

    /// Runs `n` trials from `seed`.
    pub fn run(&self, n: u64, seed: u64) -> Result<EventOutcome, EventError> {
        let spec = |kind| SamplerSpec::new(kind, seed);
        let tetra = |s: &Sample| *s.tetra().expect("tetrahedron sampler");
        let events = |s: &Sample| {
            let t = tetra(s);
            cone_events(t.a, t.b, t.c, t.d)
        };
        let p = |e: MCEstimate| Ok(EventOutcome::Probability(e));
        match *self {
            Event::GammaCone => p(estimate_probability(spec(SamplerKind::GaussianTetra), n, |s| Ok(events(s)?.in_gamma))?),
            Event::ReflectedCone => {
                p(estimate_probability(spec(SamplerKind::GaussianTetra), n, |s| Ok(events(s)?.in_reflected))?)
            }
            Event::Parallelogram => {
                p(estimate_probability(spec(SamplerKind::GaussianTetra), n, |s| Ok(events(s)?.in_parallelogram))?)
            }
            Event::ConeUnion => p(estimate_probability(spec(SamplerKind::GaussianTetra), n, |s| {
                let e = events(s)?;
                Ok(e.in_gamma || e.in_reflected)
            })?),
            Event::AcuteTetra => p(estimate_probability(spec(SamplerKind::GaussianTetra), n, |s| is_acute_tetrahedron(&tetra(s)))?),
            Event::AcuteTriangle => p(estimate_probability(spec(SamplerKind::GaussianTriangle), n, |s| {
                is_acute_triangle(s.triangle().expect("triangle sampler"))
            })?),
            Event::PinnedAcuteTriangle => p(estimate_probability(spec(SamplerKind::PinnedTriangle), n, |s| {
                is_acute_triangle(s.triangle().expect("triangle sampler"))
            })?),
            Event::ProjectionBetween | Event::PinnedProjectionBetween => {
                let kind = if *self == Event::ProjectionBetween { SamplerKind::GaussianTriangle } else { SamplerKind::PinnedTriangle };
                p(estimate_probability(spec(kind), n, |s| {
                    let t = s.triangle().expect("triangle sampler");
                    let x = triangle_projection_t(t.a, t.b, t.c)?;
                    Ok(x > 0.0 && x < 1.0)
                })?)
            }
            Event::PinnedQuadrant => p(estimate_probability(spec(SamplerKind::PinnedTetra), n, |s| Ok(events(s)?.in_gamma))?),
            Event::ShadowTriangle(shape) => match shape.fixed() {
                Some(t) => p(estimate_probability(spec(SamplerKind::UniformPlaneNormal), n, |s| {
                    shadow_is_triangle(&t, s.normal().expect("normal sampler"))
                })?),
                None => p(bernoulli_trials(seed, n, |rng, _| {
                    let t = gaussian_tetra(rng);
                    let normal = rng.unit_vector();
                    shadow_is_triangle(&t, normal)
                })?),
            },
            Event::VolumeMean(kind) => {
                if !matches!(
                    kind,
                    SamplerKind::GaussianTetra | SamplerKind::PinnedTetra | SamplerKind::UniformBallTetra | SamplerKind::UniformCubeTetra
                ) {
                    return Err(EventError::NotATetraSampler(kind));
                }
                Ok(EventOutcome::Mean(estimate_mean(spec(kind), n, |s| Ok(tetra(s).volume()))?))
            }
            Event::DihedralSamples => {
                let (values, excluded) = collect_samples(spec(SamplerKind::PinnedTetra), n, |s| {
                    let t = tetra(s);
                    Ok(pinned_dihedral_angles(t.a, t.b, t.c)?[0])
                })?;
                samples_outcome(values, excluded, seed, "uniform-0-pi", |x| (x / PI).clamp(0.0, 1.0))
            }
            Event::SolidAngleSamples => {
                let (values, excluded) = collect_samples(spec(SamplerKind::PinnedTetra), n, |s| {
                    let t = tetra(s);
                    solid_angle(t.d, t.a, t.b, t.c)
                })?;
                let table = CroftonCdf::new();
                samples_outcome(values, excluded, seed, "crofton", |x| table.cdf(x))
            }
        }
    }
}

/// Reference values of the three analytic cone probabilities.
pub const GAMMA_CONE: f64 = 0.683_776_298_4;
pub const REFLECTED_CONE: f64 = 0.681_066_906_9;
pub const PINNED_QUADRANT: f64 = 0.834_376_425_6;

fn gaussian_tetra(rng: &mut TrialRng) -> Tetrahedron {
    Tetrahedron::new(rng.normal_point(), rng.normal_point(), rng.normal_point(), rng.normal_point())
}

fn samples_outcome<C: Fn(f64) -> f64>(
    values: Vec<f64>,
    excluded: u64,
    seed: u64,
    reference: &'static str,
    cdf: C,
) -> Result<EventOutcome, EventError> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    let mean = MCEstimate {
        kind: crate::sampling::EstimateKind::Mean,
        value: mean,
        stderr,
        ci_low: mean - 1.959_963_984_540_054 * stderr,
        ci_high: mean + 1.959_963_984_540_054 * stderr,
        n: values.len() as u64,
        excluded,
        seed,
    };
    let emp = EmpiricalDistribution::new(values)?;
    let ks = ks_statistic(&emp, cdf)?;
    Ok(EventOutcome::Samples {
        mean,
        ks_statistic: ks,
        ks_critical_01: ks_critical_value(emp.len(), 0.01),
        reference,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum EventOutcome {
    Probability(MCEstimate),
    Mean(MCEstimate),
    Samples {
        mean: MCEstimate,
        ks_statistic: f64,
        /// One-sample KS critical value at the 1% level.
        ks_critical_01: f64,
        /// Name of the reference law.
        reference: &'static str,
    },
}

impl EventOutcome {
    pub fn estimate(&self) -> &MCEstimate {
        match self {
            EventOutcome::Probability(e) | EventOutcome::Mean(e) => e,
            EventOutcome::Samples { mean, .. } => mean,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::GammaCone => f.write_str("gamma-cone"),
            Event::ReflectedCone => f.write_str("reflected-cone"),
            Event::Parallelogram => f.write_str("parallelogram"),
            Event::ConeUnion => f.write_str("cone-union"),
            Event::AcuteTetra => f.write_str("acute-tetra"),
            Event::AcuteTriangle => f.write_str("acute-triangle"),
            Event::PinnedAcuteTriangle => f.write_str("pinned-acute-triangle"),
            Event::ProjectionBetween => f.write_str("projection-between"),
            Event::PinnedProjectionBetween => f.write_str("pinned-projection-between"),
            Event::PinnedQuadrant => f.write_str("pinned-quadrant"),
            Event::ShadowTriangle(shape) => write!(f, "shadow-triangle:{}", shape.name()),
            Event::SolidAngleSamples => f.write_str("solid-angle-samples"),
            Event::DihedralSamples => f.write_str("dihedral-samples"),
            Event::VolumeMean(kind) => write!(f, "volume-mean:{kind}"),
        }
    }
}

impl FromStr for Event {
    type Err = EventError;
    fn from_str(s: &str) -> Result<Self, EventError> {
        let unknown = || EventError::Unknown(s.to_string());
        if let Some(shape) = s.strip_prefix("shadow-triangle:") {
            let shape = [Shape::Regular, Shape::Corner, Shape::Gaussian]
                .into_iter()
                .find(|k| k.name() == shape)
                .ok_or_else(unknown)?;
            return Ok(Event::ShadowTriangle(shape));
        }
        if let Some(kind) = s.strip_prefix("volume-mean:") {
            let kind: SamplerKind = kind.parse().map_err(|_| unknown())?;
            return match kind {
                SamplerKind::GaussianTetra | SamplerKind::PinnedTetra | SamplerKind::UniformBallTetra | SamplerKind::UniformCubeTetra => {
                    Ok(Event::VolumeMean(kind))
                }
                other => Err(EventError::NotATetraSampler(other)),
            };
        }
        Event::catalogue().into_iter().find(|e| e.to_string() == s).ok_or_else(unknown)
    }
}

/// Unit normal of a plane through the origin, exposed for callers that
/// build their own shadow experiments.
pub fn random_plane_normal(seed: u64, index: u64) -> Point3 {
    TrialRng::new(seed, index).unit_vector()
}

/// Dihedral angle at edge `da`, via the general six-angle routine;
/// used to cross-check the pinned formula.
pub fn dihedral_at_da(t: &Tetrahedron) -> Result<f64, GeometryError> {
    Ok(dihedral_angles(t)?.at_d()[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Event::catalogue() {
            assert_eq!(e.to_string().parse::<Event>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Event>(), Err(EventError::Unknown(_))));
        assert!(matches!("shadow-triangle:blob".parse::<Event>(), Err(EventError::Unknown(_))));
        assert!(matches!(
            "volume-mean:gaussian-triangle".parse::<Event>(),
            Err(EventError::NotATetraSampler(SamplerKind::GaussianTriangle))
        ));
    }

    #[test]
    fn targets() {
        assert_eq!(Event::AcuteTriangle.target(), Some(0.25));
        assert!((Event::ShadowTriangle(Shape::Regular).target().unwrap() - 0.350_959_312_1).abs() < 1e-9);
        assert_eq!(Event::ShadowTriangle(Shape::Gaussian).target(), None);
        assert_eq!(Event::AcuteTetra.target(), None);
    }

    #[test]
    fn union_and_parallelogram_close_on_the_same_trials() {
        let n = 200_000;
        let g = Event::GammaCone.run(n, 4).unwrap().estimate().value;
        let r = Event::ReflectedCone.run(n, 4).unwrap().estimate().value;
        let u = Event::ConeUnion.run(n, 4).unwrap().estimate().value;
        let par = Event::Parallelogram.run(n, 4).unwrap().estimate().value;
        // counts are integers, so the identity holds up to rounding of k/n
        assert!(((g + r - u) - par).abs() < 1e-12);
    }

    #[test]
    fn pinned_quadrant_frequency() {
        let e = Event::PinnedQuadrant.run(1_000_000, 8).unwrap();
        assert!(e.estimate().within_sigmas(PINNED_QUADRANT, 4.0), "{e:?}");
    }

    #[test]
    fn dihedral_pinned_formula_matches_general() {
        for i in 0..2000 {
            let t = *crate::sampling::sample(SamplerSpec::new(SamplerKind::PinnedTetra, 6), i).tetra().unwrap();
            let a = pinned_dihedral_angles(t.a, t.b, t.c).unwrap()[0];
            let b = dihedral_at_da(&t).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
