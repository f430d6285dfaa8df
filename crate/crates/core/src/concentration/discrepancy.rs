//! Normalized equidistribution defects over coverings, experiment parameters
//! and log-log scaling fits.

use rayon::prelude::*;

use super::mass::hermitian_form;
use crate::error::{out_of_range, Error, Result};
use crate::manifold::{Covering, Manifold, Point};
use crate::randombasis::RandomBasisSample;
use crate::spectral::{ball_gram_at, EigenspaceSpec};

/// One (center, basis element) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRecord {
    pub k_or_e: u64,
    pub m: usize,
    pub alpha: f64,
    pub r: f64,
    pub center_index: usize,
    pub basis_index: usize,
    pub mass: f64,
    /// Vol(B)/Vol(M).
    pub expected: f64,
    /// |mass − expected| / rⁿ.
    pub defect_normalized: f64,
}

pub const RECORD_CSV_HEADER: &str =
    "manifold,k_or_E,m,alpha,r,center_index,basis_index,mass,expected,defect_normalized,seed";

impl DiscrepancyRecord {
    pub fn csv_row(&self, manifold: &Manifold, seed: u64) -> String {
        format!(
            "{},{},{},{:?},{:?},{},{},{:?},{:?},{:?},{}",
            manifold,
            self.k_or_e,
            self.m,
            self.alpha,
            self.r,
            self.center_index,
            self.basis_index,
            self.mass,
            self.expected,
            self.defect_normalized,
            seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub records: Vec<DiscrepancyRecord>,
    /// Max normalized defect over covering centers and basis elements.
    pub max_defect: f64,
    /// (center_index, basis_index) of the maximum.
    pub argmax: (usize, usize),
    /// Normalized bound on how much the defect can grow between a point and
    /// its nearest covering center: (m/Vol)·annulus(r, s)/rⁿ.
    pub center_term: f64,
}

/// r = m^(−α).
pub fn scale_radius(m: usize, alpha: f64) -> f64 {
    (m as f64).powf(-alpha)
}

/// Largest change of F(u) for unit u when the center of an r-ball moves by s:
/// (m/Vol)·Vol(B(r+s) \ B(r−s)), falling back to the outer ball when s > r.
pub fn center_perturbation_bound(spec: &EigenspaceSpec, r: f64, s: f64) -> Result<f64> {
    let man = spec.manifold();
    let density = spec.multiplicity() as f64 / man.volume();
    let outer = (r + s).min(std::f64::consts::PI);
    let vol = if s <= r && r + s <= std::f64::consts::PI {
        man.annulus_volume(r, s)?
    } else {
        man.ball_volume(outer)?
    };
    Ok(density * vol)
}

/// Defects of every column of every basis at every covering center. One
/// Gram matrix per center is shared by all bases.
pub fn discrepancy_batch(
    spec: &EigenspaceSpec,
    bases: &[RandomBasisSample],
    covering: &Covering,
    alpha: f64,
) -> Result<Vec<DiscrepancyReport>> {
    discrepancy_at_centers(spec, bases, covering.centers(), covering.radius(), alpha)
}

pub fn discrepancy_sup(
    spec: &EigenspaceSpec,
    basis: &RandomBasisSample,
    covering: &Covering,
    alpha: f64,
) -> Result<DiscrepancyReport> {
    Ok(discrepancy_batch(spec, std::slice::from_ref(basis), covering, alpha)?.remove(0))
}

/// As `discrepancy_batch` for an explicit center list; `s` is the covering
/// radius used for the center term.
pub fn discrepancy_at_centers(
    spec: &EigenspaceSpec,
    bases: &[RandomBasisSample],
    centers: &[Point],
    s: f64,
    alpha: f64,
) -> Result<Vec<DiscrepancyReport>> {
    let man = spec.manifold();
    let m = spec.multiplicity();
    if covering_mismatch(man, centers) {
        return Err(Error::InvalidInput("covering centers are not on the eigenspace's manifold".into()));
    }
    if let Some(b) = bases.iter().find(|b| b.dim() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.dim(),
        });
    }
    let r = scale_radius(m, alpha);
    if !(r < man.injectivity_radius()) {
        return Err(out_of_range("ball radius m^(-alpha)", r, "below the injectivity radius pi"));
    }
    let expected = man.ball_volume(r)? / man.volume();
    let rn = r.powi(man.dim() as i32);
    let center_term = center_perturbation_bound(spec, r, s)? / rn;
    // masses[p][b][i]
    let masses: Vec<Vec<Vec<f64>>> = centers
        .par_iter()
        .map(|c| -> Result<Vec<Vec<f64>>> {
            let g = ball_gram_at(spec, c, r)?;
            let mut scratch = Vec::with_capacity(m);
            Ok(bases
                .iter()
                .map(|b| {
                    (0..m)
                        .map(|i| {
                            let col = b.unitary.column(i);
                            hermitian_form(&g.matrix, col.as_slice(), &mut scratch)
                        })
                        .collect()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..bases.len())
        .map(|b| {
            let mut records = Vec::with_capacity(centers.len() * m);
            let (mut max_defect, mut argmax) = (f64::NEG_INFINITY, (0, 0));
            for (p, per_center) in masses.iter().enumerate() {
                for (i, &mass) in per_center[b].iter().enumerate() {
                    let defect = (mass - expected).abs() / rn;
                    if defect > max_defect {
                        max_defect = defect;
                        argmax = (p, i);
                    }
                    records.push(DiscrepancyRecord {
                        k_or_e: spec.index(),
                        m,
                        alpha,
                        r,
                        center_index: p,
                        basis_index: i,
                        mass,
                        expected,
                        defect_normalized: defect,
                    });
                }
            }
            DiscrepancyReport {
                records,
                max_defect,
                argmax,
                center_term,
            }
        })
        .collect())
}

fn covering_mismatch(man: &Manifold, centers: &[Point]) -> bool {
    centers.iter().any(|c| c.coords().len() != man.ambient_dim())
}

/// Least-squares line through (log m, log statistic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn scaling_fit(records: &[(f64, f64)]) -> Result<ScalingFit> {
    if records.len() < 2 {
        return Err(Error::DegenerateInput(format!("{} points; need at least 2", records.len())));
    }
    if let Some(&(m, s)) = records.iter().find(|&&(m, s)| !(m > 0.0 && s > 0.0)) {
        return Err(Error::DegenerateInput(format!("non-positive point ({m}, {s}) on a log scale")));
    }
    let xs: Vec<f64> = records.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateInput("all m values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Scale parameters of one equidistribution experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ExperimentConfig {
    /// Requires 0 ≤ α < 1/(2n) and αn < β < 1/2. β defaults to the midpoint
    /// (αn + 1/2)/2, γ to 2n − 1.
    pub fn new(m: &Manifold, alpha: f64, beta: Option<f64>, gamma: Option<f64>) -> Result<Self> {
        let n = m.dim() as f64;
        let alpha_max = 1.0 / (2.0 * n);
        if !(alpha >= 0.0 && alpha < alpha_max) {
            return Err(out_of_range("alpha", alpha, format!("0 <= alpha < 1/(2n) = {alpha_max}")));
        }
        let lo = alpha * n;
        let beta = beta.unwrap_or((lo + 0.5) / 2.0);
        if !(beta > lo && beta < 0.5) {
            return Err(out_of_range("beta", beta, format!("alpha*n = {lo} < beta < 1/2")));
        }
        let gamma = gamma.unwrap_or(2.0 * n - 1.0);
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(out_of_range("gamma", gamma, "gamma > 0"));
        }
        Ok(Self {
            dim: m.dim(),
            alpha,
            beta,
            gamma,
        })
    }

    pub fn radius(&self, m: usize) -> f64 {
        scale_radius(m, self.alpha)
    }

    /// t_l = l·m^(−β) for l = 1..=count.
    pub fn thresholds(&self, m: usize, count: usize) -> Vec<f64> {
        let step = (m as f64).powf(-self.beta);
        (1..=count).map(|l| l as f64 * step).collect()
    }

    /// Covering radius λ^(−γ), floored at `s_min`.
    pub fn covering_radius(&self, lambda: f64, s_min: f64) -> f64 {
        if lambda <= 0.0 {
            return s_min.max(1.0);
        }
        lambda.powf(-self.gamma).max(s_min)
    }

    /// Smallest l with t_l ≥ `deviation`.
    pub fn first_threshold_index(&self, m: usize, deviation: f64) -> usize {
        let step = (m as f64).powf(-self.beta);
        ((deviation / step).ceil() as usize).max(1)
    }
}
