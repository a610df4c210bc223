use std::f64::consts::PI;

use proptest::prelude::*;

use gtet::densities::{charfun, charfun_triple, SimplexCase};
use gtet::events::Event;
use gtet::geometry::*;
use gtet::sampling::{sample, SamplerKind, SamplerSpec};
use gtet::special::log_gamma;

fn point() -> impl Strategy<Value = Point3> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

/// Tetrahedra that are not close to flat.
fn tetra() -> impl Strategy<Value = Tetrahedron> {
    (point(), point(), point(), point())
        .prop_map(|(a, b, c, d)| Tetrahedron::new(a, b, c, d))
        .prop_filter("well-shaped", |t| {
            let edges = EDGES.iter().map(|&(i, j)| (t.vertices()[i] - t.vertices()[j]).norm()).fold(0.0, f64::max);
            t.volume() > 1e-2 * edges.powi(3)
        })
}

#[derive(Debug, Clone, Copy)]
struct Rigid {
    rot: [[f64; 3]; 3],
    shift: Point3,
}

impl Rigid {
    fn apply(&self, p: Point3) -> Point3 {
        let v = p.to_array();
        let r = |i: usize| self.rot[i][0] * v[0] + self.rot[i][1] * v[1] + self.rot[i][2] * v[2];
        Point3::new(r(0), r(1), r(2)) + self.shift
    }

    fn tetra(&self, t: &Tetrahedron) -> Tetrahedron {
        Tetrahedron::from_vertices(t.vertices().map(|p| self.apply(p)))
    }
}

/// Rotation from a unit quaternion, plus a translation.
fn rigid() -> impl Strategy<Value = Rigid> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, point())
        .prop_filter("quaternion away from zero", |(w, x, y, z, _)| w * w + x * x + y * y + z * z > 0.1)
        .prop_map(|(w, x, y, z, shift)| {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            let (w, x, y, z) = (w / n, x / n, y / n, z / n);
            let rot = [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
                [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
                [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
            ];
            Rigid { rot, shift }
        })
}

/// Dihedral angles closer than this to π/2 may flip under rounding.
fn away_from_right_angles(t: &Tetrahedron) -> bool {
    dihedral_angles(t).map(|d| d.edges.iter().all(|a| (a - PI / 2.0).abs() > 1e-8)).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn angles_are_rigid_motion_invariant(t in tetra(), m in rigid()) {
        let u = m.tetra(&t);
        let (d0, d1) = (dihedral_angles(&t).unwrap(), dihedral_angles(&u).unwrap());
        for k in 0..6 {
            prop_assert!((d0.edges[k] - d1.edges[k]).abs() < 1e-10);
        }
        let (s0, s1) = (solid_angles(&t).unwrap(), solid_angles(&u).unwrap());
        for k in 0..4 {
            prop_assert!((s0.at[k] - s1.at[k]).abs() < 1e-10);
        }
        prop_assert!((t.volume() - u.volume()).abs() < 1e-10 * t.volume().max(1.0));
    }

    #[test]
    fn predicates_are_rigid_motion_invariant(t in tetra(), m in rigid()) {
        prop_assume!(away_from_right_angles(&t));
        let u = m.tetra(&t);
        prop_assert_eq!(is_acute_tetrahedron(&t).unwrap(), is_acute_tetrahedron(&u).unwrap());
        prop_assert_eq!(projections_inside_opposite_faces(&t).unwrap(), projections_inside_opposite_faces(&u).unwrap());
        let dots = cone_dot_products(t.a, t.b, t.c, t.d);
        let scale = EDGES.iter().map(|&(i, j)| (t.vertices()[i] - t.vertices()[j]).norm_squared()).fold(0.0, f64::max);
        prop_assume!(dots.iter().all(|p| p.abs() > 1e-9 * scale));
        prop_assert_eq!(cone_events(t.a, t.b, t.c, t.d).unwrap(), cone_events(u.a, u.b, u.c, u.d).unwrap());
    }

    #[test]
    fn angles_and_flags_are_scale_invariant(t in tetra(), k in 0.01..100.0f64) {
        prop_assume!(away_from_right_angles(&t));
        let u = Tetrahedron::from_vertices(t.vertices().map(|p| p * k));
        let (d0, d1) = (dihedral_angles(&t).unwrap(), dihedral_angles(&u).unwrap());
        for e in 0..6 {
            prop_assert!((d0.edges[e] - d1.edges[e]).abs() < 1e-10);
        }
        prop_assert_eq!(is_acute_tetrahedron(&t).unwrap(), is_acute_tetrahedron(&u).unwrap());
        prop_assert_eq!(cone_events(t.a, t.b, t.c, t.d).unwrap(), cone_events(u.a, u.b, u.c, u.d).unwrap());
    }

    #[test]
    fn f_ratio_forms_match_dot_signs(t in tetra()) {
        let dots = cone_dot_products(t.a, t.b, t.c, t.d);
        let ratios = f_ratio_forms(t.a, t.b, t.c, t.d).unwrap();
        let scale = EDGES.iter().map(|&(i, j)| (t.vertices()[i] - t.vertices()[j]).norm_squared()).fold(0.0, f64::max);
        for (r, p) in ratios.iter().zip(dots.iter()) {
            prop_assume!(p.abs() > 1e-9 * scale);
            prop_assert_eq!(*r > 1.0 / 3.0, *p > 0.0);
        }
    }

    #[test]
    fn cone_events_are_consistent(a in point(), b in point(), c in point(), d in point()) {
        if let Ok(e) = cone_events(a, b, c, d) {
            prop_assert_eq!(e.in_parallelogram, e.in_gamma && e.in_reflected);
        }
    }

    #[test]
    fn triangle_angles_sum_to_pi(a in point(), b in point(), c in point()) {
        let t = Triangle::new(a, b, c);
        prop_assume!(t.area() > 1e-3);
        let s: f64 = triangle_angles(&t).unwrap().iter().sum();
        prop_assert!((s - PI).abs() < 1e-12);
    }

    #[test]
    fn solid_angle_is_spherical_excess(t in tetra()) {
        let d = dihedral_angles(&t).unwrap();
        let s = solid_angles(&t).unwrap();
        for i in 0..4 {
            let excess: f64 = (0..4).filter(|&j| j != i).map(|j| d.at(i, j)).sum::<f64>() - PI;
            prop_assert!((s.at[i] - excess).abs() < 1e-10, "vertex {}: {} vs {}", i, s.at[i], excess);
        }
    }

    #[test]
    fn acute_implies_small_solid_angles_and_acute_faces(t in tetra()) {
        if is_acute_tetrahedron(&t).unwrap() {
            prop_assert!(solid_angles(&t).unwrap().at.iter().all(|&w| w < PI / 2.0));
            prop_assert!(is_2_well_centered(&t).unwrap());
        }
    }

    #[test]
    fn charfun_cubed_identity(u in -8.0..8.0f64, v in -8.0..8.0f64) {
        for case in [SimplexCase::General, SimplexCase::Pinned] {
            let f = charfun(case, u, v);
            prop_assert!((f * f * f - charfun_triple(case, u, v)).norm() < 1e-13);
        }
    }

    #[test]
    fn log_gamma_recurrence(x in 0.05..50.0f64) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        prop_assert!((d - x.ln()).abs() < 1e-12 * x.ln().abs().max(1.0));
    }

    #[test]
    fn trials_depend_only_on_seed_and_index(seed in any::<u64>(), i in any::<u64>()) {
        for kind in SamplerKind::ALL {
            let spec = SamplerSpec::new(kind, seed);
            prop_assert_eq!(sample(spec, i), sample(spec, i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inclusion_exclusion_closes_on_shared_trials(seed in any::<u64>()) {
        let n = 20_000u64;
        let count = |e: Event| {
            let v = e.run(n, seed).unwrap().estimate().clone();
            (v.value * v.n as f64).round() as i64
        };
        let (g, r, u, p) = (count(Event::GammaCone), count(Event::ReflectedCone), count(Event::ConeUnion), count(Event::Parallelogram));
        prop_assert_eq!(g + r - u, p);
    }
}
