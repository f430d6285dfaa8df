mod common;

use equidist::manifold::{Manifold, Point};
use equidist::randombasis::*;
use equidist::spectral::{eigenspace, BasisEvaluator};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn samples_are_unitary(m in 1usize..40, master in any::<u64>(), a in any::<u32>(), b in any::<u32>()) {
        let u = haar_unitary(m, &SeedSpec::new(master), (a, b)).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-12);
        prop_assert!((u.unitary.clone().determinant().norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn unit_vectors_have_unit_norm(m in 1usize..200, master in any::<u64>()) {
        let v = random_unit_coeffs(m, &mut SeedSpec::new(master).rng(0, 0));
        prop_assert!((v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-14);
    }
}

fn within_3se(xs: &[f64], target: f64) -> bool {
    let (mean, var) = common::mean_var(xs);
    (mean - target).abs() <= 3.0 * (var / xs.len() as f64).sqrt()
}

#[test]
fn haar_entry_moment() {
    let seed = SeedSpec::new(21);
    let xs: Vec<f64> = (0..10_000).map(|i| haar_unitary(21, &seed, (0, i)).unwrap().unitary[(0, 0)].norm_sqr()).collect();
    assert!(within_3se(&xs, 1.0 / 21.0));
}

#[test]
fn unit_coordinate_is_beta_1_20() {
    let mut rng = SeedSpec::new(22).rng(0, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| random_unit_coeffs(21, &mut rng)[0].norm_sqr()).collect();
    assert!(within_3se(&xs, 1.0 / 21.0));
    // Beta(1, 20) CDF 1 − (1 − x)^20
    assert!(ks_distance_cdf(&xs, |x| 1.0 - (1.0 - x).powi(20)).unwrap() <= 0.01);
}

#[test]
fn left_invariance() {
    let seed = SeedSpec::new(23);
    let v = haar_unitary(6, &seed, (99, 99)).unwrap().unitary;
    let (mut plain, mut rotated) = (Vec::new(), Vec::new());
    for i in 0..10_000 {
        let u = haar_unitary(6, &seed, (1, i)).unwrap().unitary;
        plain.push(u[(2, 3)].norm_sqr());
        rotated.push((&v * &u)[(2, 3)].norm_sqr());
    }
    let (mp, vp) = common::mean_var(&plain);
    let (mr, vr) = common::mean_var(&rotated);
    assert!((mp - mr).abs() <= 3.0 * ((vp + vr) / 10_000.0).sqrt());
}

#[test]
fn survival_at_half_matches_monte_carlo() {
    let spec = eigenspace(&Manifold::sphere2(), 10).unwrap();
    let e = BasisEvaluator::new(&spec).eval(&Point::from_angles(1.2, 0.3));
    let mut rng = SeedSpec::new(24).rng(0, 0);
    let n = 1_000_000;
    let hits = (0..n).filter(|_| e.contract(&random_unit_coeffs(21, &mut rng)).norm() > 0.5).count();
    let p = hits as f64 / n as f64;
    let want = (1.0 - std::f64::consts::PI / 21.0).powi(20);
    assert!((survival_law(&spec, 0.5) - want).abs() < 1e-15);
    assert!((p - want).abs() <= 3.0 * (want * (1.0 - want) / n as f64).sqrt());
}

#[test]
fn pointwise_law_across_eigenspaces() {
    let t2 = Manifold::torus(2).unwrap();
    let cases = [
        (Manifold::sphere2(), 5u64, Point::from_angles(0.5, 0.5)),
        (Manifold::sphere2(), 10, Point::from_angles(3.0, 1.0)),
        (Manifold::sphere2(), 25, Point::north_pole()),
        (t2, 5, Point::torus(&[1.0, 2.0])),
        (t2, 25, Point::torus(&[0.0, 4.0])),
    ];
    for (man, idx, x) in cases {
        let spec = eigenspace(&man, idx).unwrap();
        let e = BasisEvaluator::new(&spec).eval(&x);
        let mut rng = SeedSpec::new(25).rng(idx as u32, 0);
        let xs: Vec<f64> =
            (0..100_000).map(|_| e.contract(&random_unit_coeffs(spec.multiplicity(), &mut rng)).norm()).collect();
        let ks = ks_distance(&xs, &SurvivalLaw::for_spec(&spec)).unwrap();
        assert!(ks <= 0.01, "{man} {idx}: {ks}");
    }
}

#[test]
fn reproducible_bytes() {
    let dump = || {
        let mut buf = Vec::new();
        haar_unitary(9, &SeedSpec::new(5), (3, 4)).unwrap().write_to(&mut buf).unwrap();
        buf
    };
    assert_eq!(dump(), dump());
}
