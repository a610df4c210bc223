//! Adaptive Gauss–Kronrod integration in one and two dimensions, and a
//! guarded series summator.
//!
//! Infinite directions are mapped onto finite parameter intervals:
//!
//! ```text
//! [lo, ∞):   x = lo + t/(1-t),   dx = dt/(1-t)²,          t ∈ [0, 1)
//! (-∞, hi]:  x = hi - t/(1-t),   dx = dt/(1-t)²,          t ∈ [0, 1)
//! (-∞, ∞):   x = t/(1-t²),       dx = (1+t²)/(1-t²)² dt,  t ∈ (-1, 1)
//! ```
//!
//! Both integrators keep a priority queue of regions keyed by their local
//! error estimate and bisect the worst one until the summed estimate is
//! below `max(abs_tol, rel_tol·|value|)` or the evaluation budget runs out.
//! Refinement order is deterministic. Nodes are interior, so integrands are
//! never evaluated at the ends of an interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("integrand returned a non-finite value at {at:?}")]
    NonFinite { at: Vec<f64> },
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    NotConverged {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("series did not converge within {max_terms} terms (partial sum {partial})")]
    SeriesNotConverged { max_terms: usize, partial: f64 },
}

pub type Result<T> = std::result::Result<T, QuadratureError>;

/// Tolerances and evaluation budget for one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_evaluations: 5_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evaluations: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_evaluations,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("tolerances must be positive"));
        }
        if self.max_evaluations < 1000 {
            return Err(QuadratureError::InvalidSpec("max_evaluations must be at least 1000"));
        }
        Ok(())
    }

    /// Same budget, both tolerances set to `tol`.
    pub fn with_tolerance(self, tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turns a non-converged result into [`QuadratureError::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadratureError::NotConverged {
                value: self.value,
                error_estimate: self.error_estimate,
                evaluations: self.evaluations,
            })
        }
    }
}

// 15-point Kronrod abscissae (non-negative half) and weights; the 7-point
// Gauss rule uses the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 nodes on [-1, 1] with Kronrod and Gauss weights (Gauss weight 0
/// for Kronrod-only nodes).
struct Rule {
    nodes: [f64; 15],
    kronrod: [f64; 15],
    gauss: [f64; 15],
}

const RULE: Rule = build_rule();

const fn build_rule() -> Rule {
    let mut nodes = [0.0; 15];
    let mut kronrod = [0.0; 15];
    let mut gauss = [0.0; 15];
    let mut i = 0;
    while i < 7 {
        nodes[i] = -XGK[i];
        nodes[14 - i] = XGK[i];
        kronrod[i] = WGK[i];
        kronrod[14 - i] = WGK[i];
        if i % 2 == 1 {
            gauss[i] = WG[i / 2];
            gauss[14 - i] = WG[i / 2];
        }
        i += 1;
    }
    nodes[7] = 0.0;
    kronrod[7] = WGK[7];
    gauss[7] = WG[3];
    Rule { nodes, kronrod, gauss }
}

/// Map from a parameter interval onto one axis of the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AxisMap {
    Finite { lo: f64, hi: f64 },
    Upper { lo: f64 },
    Lower { hi: f64 },
    Whole,
}

impl AxisMap {
    fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        let bad = QuadratureError::InvalidBounds { lo, hi };
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(bad);
        }
        Ok(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => AxisMap::Finite { lo, hi },
            (true, false) => AxisMap::Upper { lo },
            (false, true) => AxisMap::Lower { hi },
            (false, false) => AxisMap::Whole,
        })
    }

    /// Initial parameter cells. Infinite axes start as a few cells so that
    /// a feature far out cannot hide between the nodes of a single rule;
    /// the whole line is split at `t = 0` so the origin is a cell boundary.
    fn cells(&self) -> Vec<(f64, f64)> {
        const QUARTERS: [(f64, f64); 4] = [(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)];
        match *self {
            AxisMap::Finite { lo, hi } => vec![(lo, hi)],
            AxisMap::Upper { .. } | AxisMap::Lower { .. } => QUARTERS.to_vec(),
            AxisMap::Whole => QUARTERS.iter().flat_map(|&(a, b)| [(-b, -a), (a, b)]).collect(),
        }
    }

    /// Parameter values where integrands tend to be singular: the ends of
    /// the parameter range, and the origin of the whole line.
    fn special_points(&self) -> Vec<f64> {
        match *self {
            AxisMap::Finite { lo, hi } => vec![lo, hi],
            AxisMap::Upper { .. } | AxisMap::Lower { .. } => vec![0.0, 1.0],
            AxisMap::Whole => vec![-1.0, 0.0, 1.0],
        }
    }

    /// `(x(t), dx/dt)`.
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            AxisMap::Finite { .. } => (t, 1.0),
            AxisMap::Upper { lo } => {
                let (x, jac) = half_line(t);
                (lo + x, jac)
            }
            AxisMap::Lower { hi } => {
                let (x, jac) = half_line(t);
                (hi - x, jac)
            }
            AxisMap::Whole => {
                let (x, jac) = half_line(t.abs());
                (x.copysign(t), jac)
            }
        }
    }
}

/// `x = (t/(1-t))³` on `[0, 1)`. An algebraic tail `x^{-p}` becomes
/// `(1-t)^{3p-4}`, and a two-dimensional tail homogeneous of degree `-q`
/// leaves a corner of degree `3(q-2) - 2` at `(1, 1)`.
#[inline]
fn half_line(t: f64) -> (f64, f64) {
    let s = 1.0 - t;
    let r = t / s;
    (r * r * r, 3.0 * r * r / (s * s))
}

/// Cells narrower than this (relative to their position) are not split.
const MIN_RELATIVE_WIDTH: f64 = 1e-13;

fn splittable(a: f64, b: f64) -> bool {
    (b - a) > MIN_RELATIVE_WIDTH * a.abs().max(b.abs()).max(1.0)
}

struct Cell<R> {
    region: R,
    value: f64,
    error: f64,
    seq: usize,
}

impl<R> PartialEq for Cell<R> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<R> Eq for Cell<R> {}
impl<R> PartialOrd for Cell<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R> Ord for Cell<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        // worst error first; earlier cells win ties
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Priority-queue driver shared by the 1D and 2D integrators.
///
/// `eval` returns the region (possibly annotated) with its value and error;
/// `split` returns `None` when a region may not be refined further.
fn adapt<R, E, S>(
    initial: Vec<R>,
    spec: &QuadratureSpec,
    max_region_cost: usize,
    mut eval: E,
    split: S,
) -> Result<QuadratureResult>
where
    E: FnMut(R) -> Result<(R, f64, f64, usize)>,
    S: Fn(&R) -> Option<(R, R)>,
{
    spec.validate()?;
    let mut heap: BinaryHeap<Cell<R>> = BinaryHeap::new();
    let mut frozen: Vec<(usize, f64, f64)> = Vec::new();
    let mut seq = 0usize;
    let mut evaluations = 0usize;
    let mut value = 0.0;
    let mut error = 0.0;

    let mut evaluate = |r: R, evaluations: &mut usize, seq: &mut usize| -> Result<Cell<R>> {
        let (region, value, error, cost) = eval(r)?;
        *evaluations += cost;
        *seq += 1;
        Ok(Cell { region, value, error, seq: *seq })
    };

    for r in initial {
        let cell = evaluate(r, &mut evaluations, &mut seq)?;
        value += cell.value;
        error += cell.error;
        heap.push(cell);
    }

    while error > spec.target(value) && evaluations + 2 * max_region_cost <= spec.max_evaluations {
        let Some(worst) = heap.pop() else { break };
        match split(&worst.region) {
            Some((left, right)) => {
                let l = evaluate(left, &mut evaluations, &mut seq)?;
                let r = evaluate(right, &mut evaluations, &mut seq)?;
                value += l.value + r.value - worst.value;
                error += l.error + r.error - worst.error;
                heap.push(l);
                heap.push(r);
            }
            None => frozen.push((worst.seq, worst.value, worst.error)),
        }
    }

    // Re-sum from scratch in a fixed order to shed running-sum drift.
    let mut cells: Vec<(usize, f64, f64)> = heap.into_iter().map(|c| (c.seq, c.value, c.error)).collect();
    cells.extend(frozen);
    cells.sort_by_key(|c| c.0);
    let value: f64 = cells.iter().map(|c| c.1).sum();
    let error: f64 = cells.iter().map(|c| c.2).sum();
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= spec.target(value),
    })
}

/// `∫_lo^hi f(x) dx`; either bound may be infinite.
pub fn integrate_1d<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let axis = AxisMap::from_bounds(lo, hi)?;
    let eval = |(a, b): (f64, f64)| -> Result<((f64, f64), f64, f64, usize)> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut fv = [0.0; 15];
        for (k, slot) in fv.iter_mut().enumerate() {
            let (x, jac) = axis.map(center + half * RULE.nodes[k]);
            let y = f(x);
            if !y.is_finite() {
                return Err(QuadratureError::NonFinite { at: vec![x] });
            }
            *slot = if y == 0.0 { 0.0 } else { y * jac };
            if !slot.is_finite() {
                return Err(QuadratureError::NonFinite { at: vec![x] });
            }
        }
        let kron: f64 = (0..15).map(|k| RULE.kronrod[k] * fv[k]).sum();
        let gauss: f64 = (0..15).map(|k| RULE.gauss[k] * fv[k]).sum();
        let mean = kron * 0.5;
        let resasc: f64 = (0..15).map(|k| RULE.kronrod[k] * (fv[k] - mean).abs()).sum::<f64>() * half.abs();
        let mut err = ((kron - gauss) * half).abs();
        // QUADPACK scaling of the Kronrod–Gauss difference
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        let resabs: f64 = (0..15).map(|k| RULE.kronrod[k] * fv[k].abs()).sum::<f64>() * half.abs();
        let err = err.max(50.0 * f64::EPSILON * resabs);
        Ok(((a, b), kron * half, err, 15))
    };
    let split = |&(a, b): &(f64, f64)| {
        if splittable(a, b) {
            let m = 0.5 * (a + b);
            Some(((a, m), (m, b)))
        } else {
            None
        }
    };
    adapt(axis.cells(), spec, 15, eval, split)
}

/// Two-dimensional integration domain. Bounds of a rectangle may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain2d {
    Rectangle { x: (f64, f64), y: (f64, f64) },
    /// `[lo, ∞) × [lo, ∞)`.
    QuadrantFrom(f64),
    WholePlane,
}

impl Domain2d {
    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            Domain2d::Rectangle { x, y } => (x, y),
            Domain2d::QuadrantFrom(lo) => ((lo, f64::INFINITY), (lo, f64::INFINITY)),
            Domain2d::WholePlane => ((f64::NEG_INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::INFINITY)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x: (f64, f64),
    y: (f64, f64),
    /// error attributable to the x resolution
    ex: f64,
    ey: f64,
}

struct TensorEstimate {
    value: f64,
    /// error attributable to the x resolution
    ex: f64,
    ey: f64,
}

/// 15×15 Kronrod product rule on a parameter cell, with per-axis error
/// shares from swapping in the embedded Gauss rule along that axis.
fn tensor_rule<F>(f: &mut F, ax: &AxisMap, ay: &AxisMap, x: (f64, f64), y: (f64, f64)) -> Result<TensorEstimate>
where
    F: FnMut(f64, f64) -> f64,
{
    let (cx, hx) = (0.5 * (x.0 + x.1), 0.5 * (x.1 - x.0));
    let (cy, hy) = (0.5 * (y.0 + y.1), 0.5 * (y.1 - y.0));
    let mut xs = [(0.0, 0.0); 15];
    for (k, slot) in xs.iter_mut().enumerate() {
        *slot = ax.map(cx + hx * RULE.nodes[k]);
    }
    let mut vals = [0.0; 225];
    let mut kk = 0.0;
    let mut gk = 0.0;
    let mut kg = 0.0;
    for j in 0..15 {
        let (y, jy) = ay.map(cy + hy * RULE.nodes[j]);
        let mut row_k = 0.0;
        let mut row_g = 0.0;
        for i in 0..15 {
            let (x, jx) = xs[i];
            let v = f(x, y);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { at: vec![x, y] });
            }
            let w = if v == 0.0 { 0.0 } else { v * jx * jy };
            if !w.is_finite() {
                return Err(QuadratureError::NonFinite { at: vec![x, y] });
            }
            vals[j * 15 + i] = w;
            row_k += RULE.kronrod[i] * w;
            row_g += RULE.gauss[i] * w;
        }
        kk += RULE.kronrod[j] * row_k;
        gk += RULE.kronrod[j] * row_g;
        kg += RULE.gauss[j] * row_k;
    }
    let area = (hx * hy).abs();
    let mean = kk * 0.25;
    let mut resasc = 0.0;
    let mut resabs = 0.0;
    for j in 0..15 {
        for i in 0..15 {
            let w = RULE.kronrod[i] * RULE.kronrod[j];
            resasc += w * (vals[j * 15 + i] - mean).abs();
            resabs += w * vals[j * 15 + i].abs();
        }
    }
    let resasc = resasc * area;
    let floor = 50.0 * f64::EPSILON * resabs * area;
    let scale = |e: f64| {
        if resasc != 0.0 && e != 0.0 {
            (resasc * (200.0 * e / resasc).powf(1.5).min(1.0)).max(floor)
        } else {
            e.max(floor)
        }
    };
    Ok(TensorEstimate {
        value: kk * area,
        ex: scale(((kk - gk) * area).abs()),
        ey: scale(((kk - kg) * area).abs()),
    })
}

/// `∫∫_domain f(x, y) dx dy`.
///
/// Each rectangle gets a 15×15 tensor Kronrod rule. Replacing the Kronrod
/// rule by the embedded Gauss rule along one axis gives that axis's error
/// share; the region error is their sum, and a refined region is bisected
/// across the axis with the larger share.
pub fn integrate_2d<F>(mut f: F, domain: Domain2d, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64, f64) -> f64,
{
    let ((xl, xh), (yl, yh)) = domain.bounds();
    let ax = AxisMap::from_bounds(xl, xh)?;
    let ay = AxisMap::from_bounds(yl, yh)?;

    let mut initial = Vec::new();
    for &x in &ax.cells() {
        for &y in &ay.cells() {
            initial.push(Rect { x, y, ex: 0.0, ey: 0.0 });
        }
    }

    let corners_x = ax.special_points();
    let corners_y = ay.special_points();
    let eval = |r: Rect| -> Result<(Rect, f64, f64, usize)> {
        let t = tensor_rule(&mut f, &ax, &ay, r.x, r.y)?;
        let touches = |pts: &[f64], (a, b): (f64, f64)| pts.iter().any(|&p| p == a || p == b);
        if touches(&corners_x, r.x) && touches(&corners_y, r.y) {
            // A point singularity at a cell corner can fool both embedded
            // rules alike; compare against the four children instead.
            let mx = 0.5 * (r.x.0 + r.x.1);
            let my = 0.5 * (r.y.0 + r.y.1);
            let mut fine = 0.0;
            for x in [(r.x.0, mx), (mx, r.x.1)] {
                for y in [(r.y.0, my), (my, r.y.1)] {
                    fine += tensor_rule(&mut f, &ax, &ay, x, y)?.value;
                }
            }
            let diff = (fine - t.value).abs();
            let ex = t.ex.max(0.5 * diff);
            let ey = t.ey.max(0.5 * diff);
            return Ok((Rect { ex, ey, ..r }, fine, ex + ey, 5 * 225));
        }
        Ok((Rect { ex: t.ex, ey: t.ey, ..r }, t.value, t.ex + t.ey, 225))
    };
    let split = |r: &Rect| {
        let can_x = splittable(r.x.0, r.x.1);
        let can_y = splittable(r.y.0, r.y.1);
        let along_x = match (can_x, can_y) {
            (false, false) => return None,
            (true, false) => true,
            (false, true) => false,
            (true, true) => r.ex >= r.ey,
        };
        if along_x {
            let m = 0.5 * (r.x.0 + r.x.1);
            Some((Rect { x: (r.x.0, m), ..*r }, Rect { x: (m, r.x.1), ..*r }))
        } else {
            let m = 0.5 * (r.y.0 + r.y.1);
            Some((Rect { y: (r.y.0, m), ..*r }, Rect { y: (m, r.y.1), ..*r }))
        }
    };
    adapt(initial, spec, 5 * 225, eval, split)
}

/// Outcome of a series summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms: usize,
    /// Magnitude of the last term added; a truncation-error proxy.
    pub last_term: f64,
}

/// Sums `term(0) + term(1) + ...`, stopping once two consecutive terms are
/// below `rel_tol·|partial sum|`.
pub fn sum_series<F>(mut term: F, rel_tol: f64, max_terms: usize) -> Result<SeriesResult>
where
    F: FnMut(usize) -> f64,
{
    try_sum_series::<_, QuadratureError>(|k| Ok(term(k)), rel_tol, max_terms)
}

/// [`sum_series`] for terms whose evaluation can fail.
pub fn try_sum_series<F, E>(mut term: F, rel_tol: f64, max_terms: usize) -> std::result::Result<SeriesResult, E>
where
    F: FnMut(usize) -> std::result::Result<f64, E>,
    E: From<QuadratureError>,
{
    if !(rel_tol > 0.0) {
        return Err(QuadratureError::InvalidSpec("series tolerance must be positive").into());
    }
    let mut partial = 0.0;
    let mut small_in_a_row = 0;
    for k in 0..max_terms {
        let t = term(k)?;
        if !t.is_finite() {
            return Err(QuadratureError::NonFinite { at: vec![k as f64] }.into());
        }
        partial += t;
        if t.abs() < rel_tol * partial.abs() {
            small_in_a_row += 1;
            if small_in_a_row == 2 {
                return Ok(SeriesResult {
                    value: partial,
                    terms: k + 1,
                    last_term: t.abs(),
                });
            }
        } else {
            small_in_a_row = 0;
        }
    }
    Err(QuadratureError::SeriesNotConverged { max_terms, partial }.into())
}
