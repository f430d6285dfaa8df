mod common;

use std::f64::consts::PI;

use equidist::concentration::sample_masses;
use equidist::manifold::{Manifold, Point};
use equidist::randombasis::{haar_unitary, ks_two_sample, SeedSpec};
use equidist::spectral::*;
use equidist::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_constant_on_sphere(k in 0u64..=20, theta in 0.0..PI, phi in -PI..PI) {
        let spec = eigenspace(&Manifold::sphere2(), k).unwrap();
        prop_assert!(kernel_deviation(&spec, &Point::from_angles(theta, phi)) <= 1e-10);
    }

    #[test]
    fn kernel_is_constant_on_torus(n in 2usize..=6, e in 1u64..=12, x in proptest::collection::vec(0.0..6.3f64, 6)) {
        let t = Manifold::torus(n).unwrap();
        if let Ok(spec) = eigenspace(&t, e) {
            prop_assert!(kernel_deviation(&spec, &Point::torus(&x[..n])) <= 1e-14);
        }
    }

    #[test]
    fn sphere_gram_is_a_compression(k in 0u64..=24, r in 0.05..PI, theta in 0.0..PI, phi in -PI..PI) {
        let spec = eigenspace(&Manifold::sphere2(), k).unwrap();
        let g = ball_gram_at(&spec, &Point::from_angles(theta, phi), r).unwrap();
        prop_assert!(g.hermitian_defect() <= 1e-12);
        let ev = g.eigenvalues();
        prop_assert!(ev[0] >= -1e-9 && ev[ev.len() - 1] <= 1.0 + 1e-9);
        prop_assert!((g.trace() - g.expected_trace()).abs() <= 1e-8 * g.expected_trace().max(1e-3));
    }

    #[test]
    fn torus_gram_is_a_compression(n in 2usize..=5, e in 1u64..=6, r in 0.05..3.0f64) {
        let t = Manifold::torus(n).unwrap();
        if let Ok(spec) = eigenspace(&t, e) {
            let g = ball_gram_at(&spec, &Point::torus(&vec![0.3; n]), r).unwrap();
            let ev = g.eigenvalues();
            prop_assert!(ev[0] >= -1e-9 && ev[ev.len() - 1] <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn torus_gram_matches_numeric_integration() {
    let t2 = Manifold::torus(2).unwrap();
    for e in [1u64, 2, 5, 25] {
        let spec = eigenspace(&t2, e).unwrap();
        for (c, r) in [([0.0, 0.0], 0.3), ([3.0, 1.0], 1.0)] {
            let g = ball_gram_at(&spec, &Point::torus(&c), r).unwrap();
            let oracle = common::torus2_gram_numeric(spec.torus_frequencies(), c, r);
            assert!(common::max_abs_diff(&g.matrix, &oracle) <= 1e-5);
        }
    }
}

#[test]
fn basis_remixing_leaves_mass_law_unchanged() {
    let spec = eigenspace(&Manifold::sphere2(), 10).unwrap();
    let g = ball_gram_at(&spec, &Point::from_angles(0.8, 1.0), 0.6).unwrap();
    let v = haar_unitary(21, &SeedSpec::new(77), (0, 0)).unwrap().unitary;
    let mut mixed = g.clone();
    mixed.matrix = v.adjoint() * &g.matrix * &v;
    let mut a = g.eigenvalues();
    let mut b = mixed.eigenvalues();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    let fa = sample_masses(&g, 10_000, &SeedSpec::new(1), 0).unwrap();
    let fb = sample_masses(&mixed, 10_000, &SeedSpec::new(2), 0).unwrap();
    assert!(ks_two_sample(&fa, &fb).unwrap() <= 0.02);
}

#[test]
fn orthonormality_through_quadrature() {
    for k in [0u64, 7, 30] {
        let spec = eigenspace(&Manifold::sphere2(), k).unwrap();
        let g = ball_gram_at(&spec, &Point::south_pole(), PI).unwrap();
        let m = spec.multiplicity();
        let id = nalgebra::DMatrix::<Complex64>::identity(m, m);
        assert!(common::max_abs_diff(&g.matrix, &id) <= 1e-8);
    }
}

#[test]
fn multiplicities_respect_envelope() {
    for m in [Manifold::sphere2(), Manifold::torus(3).unwrap(), Manifold::torus(5).unwrap()] {
        let spec = enumerate_energies(&m, 400);
        let c = multiplicity_envelope(&m, &spec);
        let p = m.dim() as f64 - 1.0;
        for &(e, mult) in &spec {
            if e > 0 {
                assert!(mult as f64 <= c * (e as f64).sqrt().powf(p) * (1.0 + 1e-12));
            }
        }
    }
    for e in [1i64, 2, 3, 6, 9, 14] {
        let got = eigenspace(&Manifold::torus(3).unwrap(), e as u64).map(|s| s.multiplicity()).unwrap_or(0);
        assert_eq!(got, common::brute_lattice_count(3, e));
    }
}
