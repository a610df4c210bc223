//! Exact predicates and measurements on triangles and tetrahedra.
//!
//! Everything here is a pure function of the vertex coordinates. Planar
//! triangles are embedded in 3-space with `z = 0`.
//!
//! Boundary cases (a ratio exactly 0, 1 or 1/3, a right angle) resolve to
//! `false`: every inequality is strict. Degenerate input is an error.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative threshold below which a volume (or area) counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("two vertices coincide")]
    CoincidentVertices,
    #[error("degenerate {0}: zero area or volume")]
    Degenerate(&'static str),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("zero plane normal")]
    ZeroNormal,
    #[error("projected points are collinear")]
    CollinearProjection,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A point (or vector) in Euclidean 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// A point of the plane `z = 0`.
    pub const fn planar(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, rhs: Point3) -> Point3 {
        rhs * self
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Angle between two nonzero vectors, computed with `atan2` so that it stays
/// accurate near 0 and π.
fn angle_between(u: Point3, v: Point3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

fn check_finite(points: &[Point3]) -> Result<()> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::NonFinite)
    }
}

fn check_distinct(points: &[Point3]) -> Result<()> {
    check_finite(points)?;
    for (i, p) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|q| q == p) {
            return Err(GeometryError::CoincidentVertices);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point3,
    pub b: Point3,
    pub c: Point3,
}

impl Triangle {
    pub const fn new(a: Point3, b: Point3, c: Point3) -> Self {
        Self { a, b, c }
    }

    /// Area vector `(b - a) × (c - a) / 2`.
    pub fn area_vector(&self) -> Point3 {
        (self.b - self.a).cross(self.c - self.a) * 0.5
    }

    pub fn area(&self) -> f64 {
        self.area_vector().norm()
    }

    fn max_edge(&self) -> f64 {
        [self.b - self.a, self.c - self.a, self.c - self.b]
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Errors unless the triangle has distinct vertices and positive area.
    pub fn check_nondegenerate(&self) -> Result<()> {
        check_distinct(&[self.a, self.b, self.c])?;
        let scale = self.max_edge();
        if self.area() <= DEGENERACY_TOLERANCE * scale * scale {
            return Err(GeometryError::Degenerate("triangle"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub a: Point3,
    pub b: Point3,
    pub c: Point3,
    pub d: Point3,
}

/// Edges in the order used by [`DihedralAngles`].
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Tetrahedron {
    pub const fn new(a: Point3, b: Point3, c: Point3, d: Point3) -> Self {
        Self { a, b, c, d }
    }

    /// The regular tetrahedron with vertices at alternate corners of the cube
    /// `[-1, 1]^3`; centroid and circumcenter at the origin.
    pub const fn regular() -> Self {
        Self::new(
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        )
    }

    /// The corner tetrahedron `0, e1, e2, e3`.
    pub const fn corner() -> Self {
        Self::new(
            Point3::ORIGIN,
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        )
    }

    pub fn vertices(&self) -> [Point3; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_vertices([a, b, c, d]: [Point3; 4]) -> Self {
        Self { a, b, c, d }
    }

    /// `(b - a) · ((c - a) × (d - a)) / 6`.
    pub fn signed_volume(&self) -> f64 {
        (self.b - self.a).dot((self.c - self.a).cross(self.d - self.a)) / 6.0
    }

    pub fn volume(&self) -> f64 {
        self.signed_volume().abs()
    }

    pub fn centroid(&self) -> Point3 {
        (self.a + self.b + self.c + self.d) * 0.25
    }

    fn max_edge(&self) -> f64 {
        let v = self.vertices();
        EDGES
            .iter()
            .map(|&(i, j)| (v[j] - v[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Errors on coincident vertices or `|volume| <= 1e-12 * (max edge)^3`.
    pub fn check_nondegenerate(&self) -> Result<()> {
        check_distinct(&self.vertices())?;
        let scale = self.max_edge();
        if self.volume() <= DEGENERACY_TOLERANCE * scale * scale * scale {
            return Err(GeometryError::Degenerate("tetrahedron"));
        }
        Ok(())
    }

    /// The face opposite vertex `i`.
    pub fn face(&self, i: usize) -> Triangle {
        let v = self.vertices();
        let others: Vec<Point3> = (0..4).filter(|&j| j != i).map(|j| v[j]).collect();
        Triangle::new(others[0], others[1], others[2])
    }

    /// Barycentric coordinates of `p`, from signed sub-volumes.
    pub fn barycentric(&self, p: Point3) -> Result<[f64; 4]> {
        self.check_nondegenerate()?;
        let total = self.signed_volume();
        let v = self.vertices();
        let mut out = [0.0; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut w = v;
            w[i] = p;
            *slot = Tetrahedron::from_vertices(w).signed_volume() / total;
        }
        Ok(out)
    }
}

/// Coefficients of the non-orthogonal decomposition of `d - a` along the
/// edges `b - a` and `c - a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCoeffs {
    /// `(b - a)·(d - a) / ‖b - a‖²`
    pub r: f64,
    /// `(c - a)·(d - a) / ‖c - a‖²`
    pub s: f64,
}

pub fn projection_coeffs(a: Point3, b: Point3, c: Point3, d: Point3) -> Result<ProjectionCoeffs> {
    check_finite(&[a, b, c, d])?;
    if a == b || a == c {
        return Err(GeometryError::CoincidentVertices);
    }
    let u = b - a;
    let v = c - a;
    let w = d - a;
    Ok(ProjectionCoeffs {
        r: u.dot(w) / u.dot(u),
        s: v.dot(w) / v.dot(v),
    })
}

/// Which of the two planar cones the projection of `d` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeEvents {
    /// `(b-a)·(d-a) > 0` and `(c-a)·(d-a) > 0`.
    pub in_gamma: bool,
    /// `(a-b)·(d-b) > 0` and `(a-c)·(d-c) > 0`.
    pub in_reflected: bool,
    /// Both of the above.
    pub in_parallelogram: bool,
}

/// The four dot products `[(a-b)·(d-b), (b-a)·(d-a), (a-c)·(d-c), (c-a)·(d-a)]`.
///
/// The order matches [`f_ratio_forms`]: the first and third decide the
/// reflected cone, the second and fourth decide the cone at `a`.
pub fn cone_dot_products(a: Point3, b: Point3, c: Point3, d: Point3) -> [f64; 4] {
    [
        (a - b).dot(d - b),
        (b - a).dot(d - a),
        (a - c).dot(d - c),
        (c - a).dot(d - a),
    ]
}

pub fn cone_events(a: Point3, b: Point3, c: Point3, d: Point3) -> Result<ConeEvents> {
    check_distinct(&[a, b, c, d])?;
    let [ref_b, gam_b, ref_c, gam_c] = cone_dot_products(a, b, c, d);
    let in_gamma = gam_b > 0.0 && gam_c > 0.0;
    let in_reflected = ref_b > 0.0 && ref_c > 0.0;
    Ok(ConeEvents {
        in_gamma,
        in_reflected,
        in_parallelogram: in_gamma && in_reflected,
    })
}

/// The four norm-squared ratios whose exceeding 1/3 is equivalent to the
/// matching entry of [`cone_dot_products`] being positive.
///
/// Each dot product `(p - q)·(d - q)` equals
/// `3/2 ‖-√(2/3) q + p/√6 + d/√6‖² - 1/2 ‖(d - p)/√2‖²`, so its sign is
/// the sign of `ratio - 1/3`.
pub fn f_ratio_forms(a: Point3, b: Point3, c: Point3, d: Point3) -> Result<[f64; 4]> {
    check_finite(&[a, b, c, d])?;
    let s6 = 6f64.sqrt();
    let s23 = (2.0f64 / 3.0).sqrt();
    let s2 = 2f64.sqrt();
    // (vertex, other end) for each form
    let pairs = [(b, a), (a, b), (c, a), (a, c)];
    let mut out = [0.0; 4];
    for (slot, &(vertex, other)) in out.iter_mut().zip(pairs.iter()) {
        let num = (other * (1.0 / s6) - vertex * s23 + d * (1.0 / s6)).norm_squared();
        let den = ((d - other) * (1.0 / s2)).norm_squared();
        if den == 0.0 {
            return Err(GeometryError::Degenerate("ratio denominator"));
        }
        *slot = num / den;
    }
    Ok(out)
}

/// `t = (b-a)·(c-a) / ‖b-a‖²`; the foot of `c` on line `ab` lies strictly
/// between `a` and `b` iff `0 < t < 1`.
pub fn triangle_projection_t(a: Point3, b: Point3, c: Point3) -> Result<f64> {
    check_finite(&[a, b, c])?;
    if a == b {
        return Err(GeometryError::CoincidentVertices);
    }
    let u = b - a;
    Ok(u.dot(c - a) / u.dot(u))
}

/// Interior angles at `a`, `b`, `c`.
pub fn triangle_angles(t: &Triangle) -> Result<[f64; 3]> {
    t.check_nondegenerate()?;
    Ok([
        angle_between(t.b - t.a, t.c - t.a),
        angle_between(t.a - t.b, t.c - t.b),
        angle_between(t.a - t.c, t.b - t.c),
    ])
}

/// All three angles strictly below π/2, decided by the signs of the three
/// vertex dot products.
pub fn is_acute_triangle(t: &Triangle) -> Result<bool> {
    t.check_nondegenerate()?;
    Ok((t.b - t.a).dot(t.c - t.a) > 0.0
        && (t.a - t.b).dot(t.c - t.b) > 0.0
        && (t.a - t.c).dot(t.b - t.c) > 0.0)
}

/// Interior dihedral angles, one per edge in [`EDGES`] order:
/// `ab, ac, ad, bc, bd, cd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngles {
    pub edges: [f64; 6],
}

impl DihedralAngles {
    /// Angle along the edge joining vertices `i` and `j` (0-based, a..d).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        let k = EDGES
            .iter()
            .position(|&e| e == key)
            .expect("vertex indices must be distinct and below 4");
        self.edges[k]
    }

    /// The angles at edges `da`, `db`, `dc`; for a tetrahedron pinned with
    /// `d` at the origin these are the named triple α, β, γ.
    pub fn at_d(&self) -> [f64; 3] {
        [self.edges[2], self.edges[4], self.edges[5]]
    }

    pub fn max(&self) -> f64 {
        self.edges.iter().copied().fold(f64::MIN, f64::max)
    }
}

/// Outward normal of the face `(p, q, r)` of a tetrahedron whose fourth
/// vertex is `opposite`.
fn outward_normal(p: Point3, q: Point3, r: Point3, opposite: Point3) -> Point3 {
    let n = (q - p).cross(r - p);
    if n.dot(opposite - p) > 0.0 {
        -n
    } else {
        n
    }
}

pub fn dihedral_angles(t: &Tetrahedron) -> Result<DihedralAngles> {
    t.check_nondegenerate()?;
    let v = t.vertices();
    let mut edges = [0.0; 6];
    for (slot, &(i, j)) in edges.iter_mut().zip(EDGES.iter()) {
        let (k, l) = match (i, j) {
            (0, 1) => (2, 3),
            (0, 2) => (1, 3),
            (0, 3) => (1, 2),
            (1, 2) => (0, 3),
            (1, 3) => (0, 2),
            _ => (0, 1),
        };
        // faces (i, j, k) opposite l and (i, j, l) opposite k
        let n1 = outward_normal(v[i], v[j], v[k], v[l]);
        let n2 = outward_normal(v[i], v[j], v[l], v[k]);
        *slot = PI - angle_between(n1, n2);
    }
    Ok(DihedralAngles { edges })
}

/// α, β, γ for the tetrahedron `a, b, c, 0`: the angle between the normals
/// `A×B`, `A×C` (and cyclically), evaluated through `arccos` as written.
pub fn pinned_dihedral_angles(a: Point3, b: Point3, c: Point3) -> Result<[f64; 3]> {
    Tetrahedron::new(a, b, c, Point3::ORIGIN).check_nondegenerate()?;
    let angle = |p: Point3, q: Point3, r: Point3| {
        let n1 = p.cross(q);
        let n2 = p.cross(r);
        (n1.dot(n2) / (n1.norm() * n2.norm())).clamp(-1.0, 1.0).acos()
    };
    Ok([angle(a, b, c), angle(b, a, c), angle(c, a, b)])
}

/// Strictly fewer than π/2 at all six edges.
///
/// Decided by the sign of the outward-normal dot product at each edge, so a
/// right dihedral angle counts as not acute.
pub fn is_acute_tetrahedron(t: &Tetrahedron) -> Result<bool> {
    t.check_nondegenerate()?;
    let v = t.vertices();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    // The dihedral at the edge shared by the faces opposite vertices k and l
    // is acute iff their outward normals make an obtuse angle.
    Ok(pairs.iter().all(|&(k, l)| {
        let face_normal = |opp: usize| {
            let idx: Vec<usize> = (0..4).filter(|&m| m != opp).collect();
            outward_normal(v[idx[0]], v[idx[1]], v[idx[2]], v[opp])
        };
        face_normal(k).dot(face_normal(l)) < 0.0
    }))
}

/// Every vertex's orthogonal projection onto the plane of the opposite face
/// lies strictly inside that face.
///
/// Equivalent to acuteness; kept as an independent predicate for
/// cross-checking [`is_acute_tetrahedron`].
pub fn projections_inside_opposite_faces(t: &Tetrahedron) -> Result<bool> {
    t.check_nondegenerate()?;
    let v = t.vertices();
    for i in 0..4 {
        let face = t.face(i);
        let lambda = planar_barycentric(&face, v[i]);
        if lambda.iter().any(|&l| l <= 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Barycentric coordinates, relative to `face`, of the orthogonal projection
/// of `p` onto the face's plane.
fn planar_barycentric(face: &Triangle, p: Point3) -> [f64; 3] {
    let u = face.b - face.a;
    let v = face.c - face.a;
    let w = p - face.a;
    let (uu, uv, vv) = (u.dot(u), u.dot(v), v.dot(v));
    let (uw, vw) = (u.dot(w), v.dot(w));
    let det = uu * vv - uv * uv;
    let beta = (vv * uw - uv * vw) / det;
    let gamma = (uu * vw - uv * uw) / det;
    [1.0 - beta - gamma, beta, gamma]
}

/// Solid angle subtended at `apex` by the triangle `p1 p2 p3`.
///
/// Uses `ζ = |A·(B×C)| / (‖A‖‖B‖‖C‖ + (A·B)‖C‖ + (A·C)‖B‖ + (B·C)‖A‖)`
/// with `A, B, C` the edge vectors from the apex. The two-branch rule
/// (`2 arctan ζ`, or `2π + 2 arctan ζ` when the denominator is negative) is
/// exactly `2 atan2(numerator, denominator)`, which also covers a zero
/// denominator.
pub fn solid_angle(apex: Point3, p1: Point3, p2: Point3, p3: Point3) -> Result<f64> {
    check_distinct(&[apex, p1, p2, p3])?;
    let a = p1 - apex;
    let b = p2 - apex;
    let c = p3 - apex;
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let triple = a.dot(b.cross(c)).abs();
    if triple <= DEGENERACY_TOLERANCE * la * lb * lc {
        return Err(GeometryError::Degenerate("solid angle"));
    }
    let denom = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    Ok(2.0 * triple.atan2(denom))
}

/// Solid angles at the four vertices and their sum σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidAngles {
    pub at: [f64; 4],
    pub sum: f64,
}

pub fn solid_angles(t: &Tetrahedron) -> Result<SolidAngles> {
    t.check_nondegenerate()?;
    let v = t.vertices();
    let mut at = [0.0; 4];
    for (i, slot) in at.iter_mut().enumerate() {
        let f = t.face(i);
        *slot = solid_angle(v[i], f.a, f.b, f.c)?;
    }
    Ok(SolidAngles {
        at,
        sum: at.iter().sum(),
    })
}

pub fn solid_angle_sum(t: &Tetrahedron) -> Result<f64> {
    Ok(solid_angles(t)?.sum)
}

/// Orthonormal basis `(e1, e2)` of the plane with normal `n` (unit).
fn plane_basis(n: Point3) -> (Point3, Point3) {
    let helper = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Point3::new(1.0, 0.0, 0.0)
    } else if n.y.abs() <= n.z.abs() {
        Point3::new(0.0, 1.0, 0.0)
    } else {
        Point3::new(0.0, 0.0, 1.0)
    };
    let e1 = n.cross(helper);
    let e1 = e1 * (1.0 / e1.norm());
    (e1, n.cross(e1))
}

fn orient2d(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

/// Whether the orthogonal projection of `t` onto the plane through the
/// origin with normal `plane_normal` is a triangle (one projected vertex
/// strictly inside the other three) rather than a quadrilateral.
pub fn shadow_is_triangle(t: &Tetrahedron, plane_normal: Point3) -> Result<bool> {
    check_finite(&t.vertices())?;
    if !plane_normal.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    let len = plane_normal.norm();
    if len == 0.0 {
        return Err(GeometryError::ZeroNormal);
    }
    let (e1, e2) = plane_basis(plane_normal * (1.0 / len));
    let p: Vec<[f64; 2]> = t.vertices().iter().map(|v| [v.dot(e1), v.dot(e2)]).collect();

    let extent = p
        .iter()
        .flat_map(|a| p.iter().map(move |b| (a[0] - b[0]).hypot(a[1] - b[1])))
        .fold(0.0, f64::max);
    let threshold = DEGENERACY_TOLERANCE * extent * extent;
    let orient = |i: usize, j: usize, k: usize| -> Result<f64> {
        let o = orient2d(p[i], p[j], p[k]);
        if o.abs() <= threshold {
            Err(GeometryError::CollinearProjection)
        } else {
            Ok(o)
        }
    };

    for inner in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&j| j != inner).collect();
        let (x, y, z) = (idx[0], idx[1], idx[2]);
        let o1 = orient(x, y, inner)?;
        let o2 = orient(y, z, inner)?;
        let o3 = orient(z, x, inner)?;
        if (o1 > 0.0 && o2 > 0.0 && o3 > 0.0) || (o1 < 0.0 && o2 < 0.0 && o3 < 0.0) {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn circumcenter_triangle(t: &Triangle) -> Result<Point3> {
    t.check_nondegenerate()?;
    let u = t.b - t.a;
    let v = t.c - t.a;
    let w = u.cross(v);
    let offset = (v * u.norm_squared() - u * v.norm_squared()).cross(w) * (1.0 / (2.0 * w.norm_squared()));
    Ok(t.a + offset)
}

pub fn circumcenter_tetra(t: &Tetrahedron) -> Result<Point3> {
    t.check_nondegenerate()?;
    let u = t.b - t.a;
    let v = t.c - t.a;
    let w = t.d - t.a;
    let num = v.cross(w) * u.norm_squared() + w.cross(u) * v.norm_squared() + u.cross(v) * w.norm_squared();
    Ok(t.a + num * (1.0 / (2.0 * u.dot(v.cross(w)))))
}

/// Circumcenter strictly inside the tetrahedron.
pub fn is_3_well_centered(t: &Tetrahedron) -> Result<bool> {
    let center = circumcenter_tetra(t)?;
    Ok(t.barycentric(center)?.iter().all(|&l| l > 0.0))
}

/// Every face's circumcenter strictly inside that face.
pub fn is_2_well_centered(t: &Tetrahedron) -> Result<bool> {
    t.check_nondegenerate()?;
    for i in 0..4 {
        let face = t.face(i);
        let center = circumcenter_triangle(&face)?;
        if planar_barycentric(&face, center).iter().any(|&l| l <= 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}
