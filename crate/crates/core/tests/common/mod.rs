//! Independent oracles shared by the integration tests. None of these call
//! the library routine they are used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Lattice points of energy E in dimension n by scanning the full box.
pub fn brute_lattice_count(n: usize, energy: i64) -> usize {
    let b = (energy as f64).sqrt().floor() as i64;
    let side = 2 * b + 1;
    let mut count = 0;
    for code in 0..side.pow(n as u32) {
        let mut c = code;
        let mut s = 0;
        for _ in 0..n {
            let v = c % side - b;
            c /= side;
            s += v * v;
        }
        if s == energy {
            count += 1;
        }
    }
    count
}

/// ∫_{|y|<r} e^(i ξ·y) dy in the plane by polar coordinates: composite
/// Simpson in ρ, trapezoid in θ (spectrally accurate for periodic integrands).
pub fn disk_fourier_numeric(xi: [f64; 2], r: f64) -> Complex64 {
    let nr = 2000;
    let nt = 256;
    let h = r / nr as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..=nr {
        let rho = i as f64 * h;
        let w = if i == 0 || i == nr { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let mut ring = Complex64::new(0.0, 0.0);
        for j in 0..nt {
            let th = 2.0 * PI * j as f64 / nt as f64;
            ring += Complex64::from_polar(1.0, rho * (xi[0] * th.cos() + xi[1] * th.sin()));
        }
        total += ring * (2.0 * PI / nt as f64) * rho * w;
    }
    total * (h / 3.0)
}

/// Torus Gram G[l, l'] = (2π)^(−2) ∫_B e^(i(l'−l)·y) dy by numerical integration.
pub fn torus2_gram_numeric(freqs: &[Vec<i32>], center: [f64; 2], r: f64) -> DMatrix<Complex64> {
    let m = freqs.len();
    let mut g = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let mut cache = std::collections::HashMap::new();
    for i in 0..m {
        for j in 0..m {
            let d = [freqs[j][0] - freqs[i][0], freqs[j][1] - freqs[i][1]];
            let base = *cache
                .entry(d)
                .or_insert_with(|| disk_fourier_numeric([d[0] as f64, d[1] as f64], r));
            let phase = d[0] as f64 * center[0] + d[1] as f64 * center[1];
            g[(i, j)] = base * Complex64::from_polar(1.0 / (4.0 * PI * PI), phase);
        }
    }
    g
}

/// Uniform unit vector in ℂ^m drawn directly from Gaussians.
pub fn gaussian_unit<R: Rng>(m: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..m)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Monte Carlo variance of Σ dᵢ|uᵢ|² for uniform u.
pub fn mc_diag_variance<R: Rng>(diag: &[f64], n: usize, rng: &mut R) -> f64 {
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            let u = gaussian_unit(diag.len(), rng);
            u.iter().zip(diag).map(|(z, d)| d * z.norm_sqr()).sum()
        })
        .collect();
    mean_var(&xs).1
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
