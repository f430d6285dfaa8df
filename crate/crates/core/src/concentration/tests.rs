use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::*;
use crate::manifold::{Covering, Manifold, Point};
use crate::quadrature::cap_rule;
use crate::randombasis::{random_basis, random_unit_coeffs, SeedSpec};
use crate::spectral::{ball_gram_at, eigenspace, BasisEvaluator};

#[test]
fn mass_of_whole_sphere_is_one() {
    let spec = eigenspace(&Manifold::sphere2(), 6).unwrap();
    let g = ball_gram_at(&spec, &Point::north_pole(), PI).unwrap();
    let mut rng = SeedSpec::new(1).rng(0, 0);
    for _ in 0..20 {
        let u = random_unit_coeffs(13, &mut rng);
        assert!((ball_mass(&u, &g).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(matches!(ball_mass(&u_of(3), &g), Err(crate::Error::DimensionMismatch { .. })));
}

fn u_of(m: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

#[test]
fn constant_eigenfunction_mass() {
    let s2 = Manifold::sphere2();
    let spec = eigenspace(&s2, 0).unwrap();
    let g = ball_gram_at(&spec, &Point::from_angles(0.3, 0.3), 0.7).unwrap();
    let u = [Complex64::from_polar(1.0, 0.4)];
    let want = s2.ball_volume(0.7).unwrap() / s2.volume();
    assert!((ball_mass(&u, &g).unwrap() - want).abs() < 1e-15);

    let t3 = Manifold::torus(3).unwrap();
    let spec = eigenspace(&t3, 0).unwrap();
    let g = ball_gram_at(&spec, &Point::torus(&[1.0, 2.0, 3.0]), 0.7).unwrap();
    let want = t3.ball_volume(0.7).unwrap() / t3.volume();
    assert!((ball_mass(&[Complex64::new(1.0, 0.0)], &g).unwrap() - want).abs() < 1e-16);
}

#[test]
fn mass_matches_nodewise_quadrature() {
    let spec = eigenspace(&Manifold::sphere2(), 10).unwrap();
    let c = Point::from_angles(2.1, 0.8);
    let g = ball_gram_at(&spec, &c, 0.6).unwrap();
    let rule = cap_rule(12, 0.6, &c).unwrap();
    let ev = BasisEvaluator::new(&spec);
    let mut rng = SeedSpec::new(4).rng(0, 0);
    for _ in 0..10 {
        let u = random_unit_coeffs(21, &mut rng);
        let direct = rule.integrate(|x| {
            let mut e = vec![Complex64::new(0.0, 0.0); 21];
            ev.eval_into(x, &mut e);
            u.iter().zip(&e).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()
        });
        assert!((ball_mass(&u, &g).unwrap() - direct).abs() < 1e-8);
    }
}

#[test]
fn out_of_range_mass_is_error() {
    let spec = eigenspace(&Manifold::sphere2(), 1).unwrap();
    let mut g = ball_gram_at(&spec, &Point::north_pole(), 1.0).unwrap();
    g.matrix = DMatrix::identity(3, 3) * Complex64::new(1.5, 0.0);
    assert!(ball_mass(&u_of(3), &g).is_err());
    g.matrix = DMatrix::identity(3, 3) * Complex64::new(1.0 + 1e-11, 0.0);
    assert_eq!(ball_mass(&u_of(3), &g).unwrap(), 1.0);
}

#[test]
fn variance_formula_small_cases() {
    let id = DMatrix::<Complex64>::identity(5, 5);
    assert_eq!(variance_oracle(&id, 5), 0.0);
    let mut d = DMatrix::<Complex64>::zeros(2, 2);
    d[(0, 0)] = Complex64::new(1.0, 0.0);
    assert!((variance_oracle(&d, 2) - 1.0 / 12.0).abs() < 1e-15);
    // fixed trace fraction, growing m
    let v = |m: usize| {
        let g = DMatrix::from_fn(m, m, |i, j| Complex64::new(if i == j && i < m / 4 { 1.0 } else { 0.0 }, 0.0));
        variance_oracle(&g, m)
    };
    assert!(v(400) < v(40) && v(40) < v(8));
}

#[test]
fn median_convention() {
    assert_eq!(median_sorted(&[1.0, 2.0, 3.0, 10.0]), 2.5);
    assert_eq!(median_sorted(&[1.0, 2.0, 3.0]), 2.0);
}

#[test]
fn stats_are_reproducible_and_sane() {
    let spec = eigenspace(&Manifold::sphere2(), 8).unwrap();
    let g = ball_gram_at(&spec, &Point::from_angles(1.0, 1.0), 0.5).unwrap();
    let seed = SeedSpec::new(9);
    let a = sample_stats(&g, 3000, &seed).unwrap();
    let b = sample_stats(&g, 3000, &seed).unwrap();
    assert_eq!(a, b);
    assert!(a.mean > 0.0 && a.mean < 1.0 && a.variance > 0.0);
    assert!(a.tail_curve.windows(2).all(|w| w[1].1 <= w[0].1));
    assert!(a.bootstrap_ci_median.0 <= a.median && a.median <= a.bootstrap_ci_median.1);
    assert!(sample_stats(&g, 50, &seed).is_err());
}

#[test]
fn lipschitz_of_constant_functional_is_zero() {
    let spec = eigenspace(&Manifold::sphere2(), 3).unwrap();
    let g = ball_gram_at(&spec, &Point::north_pole(), PI).unwrap();
    let l = lipschitz_estimate(&g, 300, &SeedSpec::new(2)).unwrap();
    assert!(l < 1e-6, "{l}");
    let g = ball_gram_at(&spec, &Point::north_pole(), 1.0).unwrap();
    let l = lipschitz_estimate(&g, 3000, &SeedSpec::new(2)).unwrap();
    assert!(l > 0.0 && l <= 2.0);
}

#[test]
fn geodesic_distance_forms_agree() {
    let mut rng = SeedSpec::new(8).rng(0, 0);
    for _ in 0..100 {
        let u = random_unit_coeffs(4, &mut rng);
        let v = random_unit_coeffs(4, &mut rng);
        let re: f64 = u.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((sphere_geodesic(&u, &v) - re.clamp(-1.0, 1.0).acos()).abs() < 1e-12);
    }
    assert_eq!(sphere_geodesic(&u_of(3), &u_of(3)), 0.0);
}

#[test]
fn levy_zero_threshold_never_violated() {
    let stats = MassStats {
        mean: 0.5,
        median: 0.5,
        variance: 0.1,
        sample_count: 1000,
        tail_curve: vec![(0.0, 1.0)],
        bootstrap_ci_median: (0.4, 0.6),
    };
    let r = levy_tail_check(&stats, 2.0, 10);
    assert_eq!(r.rows[0].bound, 1.0);
    assert!(r.violations().is_empty());
}

#[test]
fn synthetic_scaling() {
    let pts: Vec<(f64, f64)> = [3.0, 9.0, 27.0, 81.0].iter().map(|&m| (m, 1.0 / m)).collect();
    let fit = scaling_fit(&pts).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
    assert!(matches!(scaling_fit(&[(4.0, 1.0), (4.0, 2.0)]), Err(crate::Error::DegenerateInput(_))));
}

#[test]
fn experiment_parameters() {
    let s2 = Manifold::sphere2();
    let c = ExperimentConfig::new(&s2, 0.2, None, None).unwrap();
    assert!((c.beta - 0.45).abs() < 1e-15);
    assert_eq!(c.gamma, 3.0);
    assert!(ExperimentConfig::new(&s2, 0.25, None, None).is_err());
    assert!(ExperimentConfig::new(&s2, -0.1, None, None).is_err());
    assert!(ExperimentConfig::new(&s2, 0.2, Some(0.4), None).is_err());
    let t = c.thresholds(100, 3);
    assert!((t[2] - 3.0 * 100f64.powf(-0.45)).abs() < 1e-15);
    assert_eq!(c.first_threshold_index(100, t[1] * 0.99), 2);
    let t5 = Manifold::torus(5).unwrap();
    assert!(ExperimentConfig::new(&t5, 0.1, None, None).is_err());
    assert!(ExperimentConfig::new(&t5, 0.09, None, None).is_ok());
}

#[test]
fn constants_have_no_defect() {
    let s2 = Manifold::sphere2();
    let spec = eigenspace(&s2, 0).unwrap();
    let cov = Covering::build(&s2, 0.5).unwrap();
    let basis = random_basis(&spec, &SeedSpec::new(1), 0);
    let rep = discrepancy_sup(&spec, &basis, &cov, 0.2).unwrap();
    assert_eq!(rep.records.len(), cov.len());
    assert!(rep.max_defect < 1e-14, "{}", rep.max_defect);
}

#[test]
fn batch_matches_single() {
    let t2 = Manifold::torus(2).unwrap();
    let spec = eigenspace(&t2, 25).unwrap();
    let cov = Covering::build(&t2, 0.8).unwrap();
    let seed = SeedSpec::new(3);
    let bases: Vec<_> = (0..3).map(|i| random_basis(&spec, &seed, i)).collect();
    let batch = discrepancy_batch(&spec, &bases, &cov, 0.2).unwrap();
    for (b, rep) in bases.iter().zip(&batch) {
        assert_eq!(&discrepancy_sup(&spec, b, &cov, 0.2).unwrap(), rep);
    }
    let csv = batch[0].records[0].csv_row(&t2, 3);
    assert_eq!(csv.split(',').count(), RECORD_CSV_HEADER.split(',').count());
    assert!(csv.starts_with("torus2,25,12,0.2,"));
}
