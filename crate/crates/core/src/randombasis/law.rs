//! The exact law of |u(x)| for u uniform on the unit sphere of an eigenspace,
//! and Kolmogorov–Smirnov distances.

use crate::error::{Error, Result};
use crate::spectral::EigenspaceSpec;

/// P(|u(x)| > t) = (1 − Vol·t²/m)^(m−1) for t < √(m/Vol), else 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalLaw {
    pub m: usize,
    pub vol: f64,
}

impl SurvivalLaw {
    pub fn new(m: usize, vol: f64) -> Self {
        assert!(m >= 1 && vol > 0.0);
        Self { m, vol }
    }

    pub fn for_spec(spec: &EigenspaceSpec) -> Self {
        Self::new(spec.multiplicity(), spec.manifold().volume())
    }

    /// √(m/Vol); |u(x)| never exceeds it.
    pub fn cutoff(&self) -> f64 {
        (self.m as f64 / self.vol).sqrt()
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t >= self.cutoff() {
            return 0.0;
        }
        (1.0 - self.vol * t * t / self.m as f64).powi(self.m as i32 - 1)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }
}

pub fn survival_law(spec: &EigenspaceSpec, t: f64) -> f64 {
    SurvivalLaw::for_spec(spec).survival(t)
}

/// sup |F_N − F| against an arbitrary continuous CDF.
pub fn ks_distance_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    Ok(s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max))
}

pub fn ks_distance(samples: &[f64], law: &SurvivalLaw) -> Result<f64> {
    ks_distance_cdf(samples, |t| law.cdf(t))
}

/// Two-sample KS statistic sup |F_a − F_b|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
