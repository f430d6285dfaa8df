//! The ball-mass functional F(u) = u*Gu on the unit sphere of an eigenspace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::randombasis::{random_unit_coeffs, SeedSpec};
use crate::spectral::BallGram;

/// Monte Carlo draws per RNG stream. Results are independent of thread count.
pub const BATCH: usize = 1024;
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
const BOOTSTRAP_TAG: u64 = 0xb007;
const LIPSCHITZ_TAG: u64 = 0x11b5;
/// F may leave [0, 1] by at most this much before it is an error.
pub const CLAMP_TOL: f64 = 1e-9;

/// Σ with pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// u*Gu with G column-major and no allocation beyond `scratch`.
pub(crate) fn hermitian_form(g: &DMatrix<Complex64>, u: &[Complex64], scratch: &mut Vec<Complex64>) -> f64 {
    let m = u.len();
    scratch.clear();
    scratch.resize(m, Complex64::new(0.0, 0.0));
    let data = g.as_slice();
    for (j, &uj) in u.iter().enumerate() {
        let col = &data[j * m..(j + 1) * m];
        for (acc, &gij) in scratch.iter_mut().zip(col) {
            *acc += gij * uj;
        }
    }
    u.iter().zip(scratch.iter()).map(|(ui, gi)| (ui.conj() * gi).re).sum()
}

fn clamp_mass(f: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&f) {
        Ok(f)
    } else if f > -CLAMP_TOL && f < 1.0 + CLAMP_TOL {
        Ok(f.clamp(0.0, 1.0))
    } else {
        Err(Error::InvalidInput(format!("ball mass {f} outside [0, 1]; Gram matrix is defective")))
    }
}

/// F(u) = ∫_B |u|² for a unit coefficient vector.
pub fn ball_mass(coeffs: &[Complex64], gram: &BallGram) -> Result<f64> {
    if coeffs.len() != gram.dim() {
        return Err(Error::DimensionMismatch {
            expected: gram.dim(),
            got: coeffs.len(),
        });
    }
    let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("coefficient vector has squared norm {norm}")));
    }
    clamp_mass(hermitian_form(&gram.matrix, coeffs, &mut Vec::new()))
}

/// N Monte Carlo masses; batch b draws from stream (stream, b).
pub fn sample_masses(gram: &BallGram, n: usize, seed: &SeedSpec, stream: u32) -> Result<Vec<f64>> {
    let m = gram.dim();
    let batches = n.div_ceil(BATCH);
    let per_batch: Vec<Result<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.rng(stream, b as u32);
            let count = BATCH.min(n - b * BATCH);
            let mut scratch = Vec::with_capacity(m);
            (0..count)
                .map(|_| clamp_mass(hermitian_form(&gram.matrix, &random_unit_coeffs(m, &mut rng), &mut scratch)))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for batch in per_batch {
        out.extend(batch?);
    }
    Ok(out)
}

/// Summary of sampled masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MassStats {
    pub mean: f64,
    pub median: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub sample_count: usize,
    /// (t, fraction of samples with |F − median| > t).
    pub tail_curve: Vec<(f64, f64)>,
    /// 95% percentile bootstrap interval for the median.
    pub bootstrap_ci_median: (f64, f64),
}

impl MassStats {
    pub fn std_error(&self) -> f64 {
        (self.variance / self.sample_count as f64).sqrt()
    }

    pub fn mean_median_gap(&self) -> f64 {
        (self.mean - self.median).abs()
    }

    pub fn from_samples(samples: &[f64], thresholds: &[f64], seed: &SeedSpec) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("samples"));
        }
        let n = samples.len();
        let mean = pairwise_sum(samples) / n as f64;
        let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = if n > 1 { pairwise_sum(&sq) / (n - 1) as f64 } else { 0.0 };
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = median_sorted(&sorted);
        let mut dev: Vec<f64> = samples.iter().map(|x| (x - median).abs()).collect();
        dev.sort_by(f64::total_cmp);
        let tail_curve = thresholds
            .iter()
            .map(|&t| {
                let at_most = dev.partition_point(|&d| d <= t);
                (t, (n - at_most) as f64 / n as f64)
            })
            .collect();
        Ok(Self {
            mean,
            median,
            variance,
            sample_count: n,
            tail_curve,
            bootstrap_ci_median: bootstrap_median_ci(samples, seed),
        })
    }
}

/// Midpoint of the two central order statistics for even length.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median_in_place(xs: &mut [f64]) -> f64 {
    let n = xs.len();
    let (_, &mut hi, _) = xs.select_nth_unstable_by(n / 2, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = xs[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

fn bootstrap_median_ci(samples: &[f64], seed: &SeedSpec) -> (f64, f64) {
    let boot = seed.derive(BOOTSTRAP_TAG);
    let mut medians: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map_init(
            || vec![0.0; samples.len()],
            |buf, r| {
                let mut rng = boot.rng(0, r as u32);
                for x in buf.iter_mut() {
                    *x = *samples.choose(&mut rng).expect("nonempty");
                }
                median_in_place(buf)
            },
        )
        .collect();
    medians.sort_by(f64::total_cmp);
    let q = |p: f64| medians[((p * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
    (q(0.025), q(0.975))
}

/// t = 0, 0.01, …, 0.30.
pub fn default_tail_grid() -> Vec<f64> {
    (0..=30).map(|i| i as f64 / 100.0).collect()
}

/// MassStats over N ≥ 100 uniform draws on the unit sphere of ℂ^m.
pub fn sample_stats(gram: &BallGram, n: usize, seed: &SeedSpec) -> Result<MassStats> {
    sample_stats_with(gram, n, seed, &default_tail_grid())
}

pub fn sample_stats_with(gram: &BallGram, n: usize, seed: &SeedSpec, thresholds: &[f64]) -> Result<MassStats> {
    if n < 100 {
        return Err(crate::error::out_of_range("sample count", n as f64, "N >= 100"));
    }
    let samples = sample_masses(gram, n, seed, gram.spec.index() as u32)?;
    MassStats::from_samples(&samples, thresholds, seed)
}

/// Var(u*Gu) for u uniform on the unit sphere of ℂ^m:
/// [m·tr(G²) − (tr G)²] / (m²(m+1)).
pub fn variance_oracle(g: &DMatrix<Complex64>, m: usize) -> f64 {
    assert_eq!(g.nrows(), m);
    let tr: f64 = g.diagonal().iter().map(|z| z.re).sum();
    let tr2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    let m = m as f64;
    ((m * tr2 - tr * tr) / (m * m * (m + 1.0))).max(0.0)
}

/// E[u*Gu] = tr(G)/m.
pub fn mean_oracle(g: &DMatrix<Complex64>) -> f64 {
    g.diagonal().iter().map(|z| z.re).sum::<f64>() / g.nrows() as f64
}

/// Geodesic distance on the realified unit sphere, arccos Re⟨u, v⟩,
/// in the cancellation-free form 2·asin(‖u − v‖/2).
pub fn sphere_geodesic(u: &[Complex64], v: &[Complex64]) -> f64 {
    let chord = u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

/// Largest |F(u) − F(v)| / d(u, v) over sampled pairs. Pairs cycle through
/// independent draws and perturbations v = normalize(u + δw), δ ∈ {1e-2, 1e-4}.
pub fn lipschitz_estimate(gram: &BallGram, num_pairs: usize, seed: &SeedSpec) -> Result<f64> {
    if num_pairs < 100 {
        return Err(crate::error::out_of_range("pair count", num_pairs as f64, ">= 100"));
    }
    let m = gram.dim();
    let s = seed.derive(LIPSCHITZ_TAG);
    let batches = num_pairs.div_ceil(BATCH);
    let best = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = s.rng(gram.spec.index() as u32, b as u32);
            let mut scratch = Vec::with_capacity(m);
            let mut best: f64 = 0.0;
            for i in b * BATCH..num_pairs.min((b + 1) * BATCH) {
                let u = random_unit_coeffs(m, &mut rng);
                let v = match i % 3 {
                    0 => random_unit_coeffs(m, &mut rng),
                    k => {
                        let delta = if k == 1 { 1e-2 } else { 1e-4 };
                        let w = random_unit_coeffs(m, &mut rng);
                        let mut v: Vec<Complex64> = u.iter().zip(&w).map(|(a, b)| a + b * delta).collect();
                        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        v.iter_mut().for_each(|z| *z /= n);
                        v
                    }
                };
                let d = sphere_geodesic(&u, &v);
                if d == 0.0 {
                    continue;
                }
                let fu = hermitian_form(&gram.matrix, &u, &mut scratch);
                let fv = hermitian_form(&gram.matrix, &v, &mut scratch);
                best = best.max((fu - fv).abs() / d);
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyRow {
    pub t: f64,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard error of `empirical`.
    pub se: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyReport {
    /// Real dimension d used in the bound.
    pub d: usize,
    pub lipschitz: f64,
    pub rows: Vec<LevyRow>,
}

impl LevyReport {
    pub fn violations(&self) -> Vec<&LevyRow> {
        self.rows.iter().filter(|r| r.violated).collect()
    }
}

/// Compares P(|F − Me| > t) with exp(−(d−1)t²/(2L²)), d = 2m − 1.
pub fn levy_tail_check(stats: &MassStats, lipschitz: f64, m: usize) -> LevyReport {
    levy_tail_check_dim(stats, lipschitz, 2 * m - 1)
}

/// Same check with an explicit real dimension d.
pub fn levy_tail_check_dim(stats: &MassStats, lipschitz: f64, d: usize) -> LevyReport {
    let n = stats.sample_count as f64;
    let rows = stats
        .tail_curve
        .iter()
        .map(|&(t, p)| {
            let bound = (-((d as f64 - 1.0) * t * t) / (2.0 * lipschitz * lipschitz)).exp();
            let se = (p * (1.0 - p) / n).sqrt();
            LevyRow {
                t,
                empirical: p,
                bound,
                se,
                violated: p > bound + 3.0 * se,
            }
        })
        .collect();
    LevyReport { d, lipschitz, rows }
}

/// Uniform draws mapped through `v ↦ Vv` before contraction (for invariance checks).
pub fn sample_masses_mixed(
    gram: &BallGram,
    mix: &DMatrix<Complex64>,
    n: usize,
    seed: &SeedSpec,
    stream: u32,
) -> Result<Vec<f64>> {
    let m = gram.dim();
    let conj = mix.adjoint() * &gram.matrix * mix;
    let mut rng = seed.rng(stream, u32::MAX);
    let mut scratch = Vec::with_capacity(m);
    (0..n)
        .map(|_| clamp_mass(hermitian_form(&conj, &random_unit_coeffs(m, &mut rng), &mut scratch)))
        .collect()
}
