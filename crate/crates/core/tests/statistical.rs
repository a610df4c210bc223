//! Sampling checks of special-function and geometric claims.

use gtet::geometry::{is_3_well_centered, is_acute_tetrahedron, Tetrahedron};
use gtet::sampling::{bernoulli_trials, collect_trials};
use gtet::special::f22_tail;

#[test]
fn f22_tail_matches_chi_square_ratios() {
    let x_vals = [1.0 / 3.0, 1.0, 3.0 - 2.0 * 2f64.sqrt()];
    for (i, &x) in x_vals.iter().enumerate() {
        let e = bernoulli_trials(50 + i as u64, 1_000_000, |rng, _| {
            let num = rng.normal().powi(2) + rng.normal().powi(2);
            let den = rng.normal().powi(2) + rng.normal().powi(2);
            Ok(num / den > x)
        })
        .unwrap();
        let want = f22_tail(x).unwrap();
        assert!(e.within_sigmas(want, 4.0), "x = {x}: {} vs {want}", e.value);
    }
}

#[test]
fn acute_but_not_3_well_centered_witness() {
    let (hits, _) = collect_trials(61, 1_000_000, |rng, _| {
        let t = Tetrahedron::new(rng.normal_point(), rng.normal_point(), rng.normal_point(), rng.normal_point());
        Ok(is_acute_tetrahedron(&t)? && !is_3_well_centered(&t)?)
    })
    .unwrap();
    let witnesses = hits.iter().filter(|&&h| h).count();
    assert!(witnesses > 0);
}
