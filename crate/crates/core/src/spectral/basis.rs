//! Evaluation of the canonical orthonormal basis of an eigenspace.
//!
//! Sphere: complex spherical harmonics Y_k^q (Condon–Shortley phase, unit L²
//! norm on S²) from fully normalized associated Legendre functions, propagated
//! by the three-term recurrence in the degree so nothing overflows at large k.
//!
//! Torus: plane waves (2π)^(−n/2)·e^(i l·x).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::eigenspace::EigenspaceSpec;
use crate::manifold::{ManifoldKind, Point, TWO_PI};

/// The tuple (e₁(x), …, e_m(x)).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEvaluation {
    pub values: Vec<Complex64>,
}

impl BasisEvaluation {
    /// Σ |eᵢ(x)|², compensated so the error stays O(ε) for large m.
    pub fn norm_sqr(&self) -> f64 {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for v in &self.values {
            let x = v.norm_sqr();
            let t = sum + x;
            comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
        }
        sum + comp
    }

    /// u(x) = Σ uᵢ eᵢ(x).
    pub fn contract(&self, coeffs: &[Complex64]) -> Complex64 {
        coeffs.iter().zip(&self.values).map(|(u, e)| u * e).sum()
    }
}

/// Precomputed recurrence tables for fast repeated evaluation.
#[derive(Debug, Clone)]
pub enum BasisEvaluator {
    Sphere(SphericalHarmonics),
    Torus {
        frequencies: Vec<Vec<i32>>,
        scale: f64,
    },
}

impl BasisEvaluator {
    pub fn new(spec: &EigenspaceSpec) -> Self {
        match spec.manifold().kind() {
            ManifoldKind::Sphere2 => BasisEvaluator::Sphere(SphericalHarmonics::new(spec.degree())),
            ManifoldKind::FlatTorus => BasisEvaluator::Torus {
                frequencies: spec.torus_frequencies().to_vec(),
                scale: TWO_PI.powf(-(spec.manifold().dim() as f64) / 2.0),
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            BasisEvaluator::Sphere(h) => 2 * h.degree + 1,
            BasisEvaluator::Torus { frequencies, .. } => frequencies.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes (e₁(x), …, e_m(x)) into `out`.
    pub fn eval_into(&self, coords: &[f64], out: &mut [Complex64]) {
        match self {
            BasisEvaluator::Sphere(h) => h.eval_into(&[coords[0], coords[1], coords[2]], out),
            BasisEvaluator::Torus { frequencies, scale } => {
                for (o, l) in out.iter_mut().zip(frequencies) {
                    let phase: f64 = l.iter().zip(coords).map(|(&li, &xi)| li as f64 * xi).sum();
                    *o = Complex64::from_polar(*scale, phase);
                }
            }
        }
    }

    pub fn eval(&self, x: &Point) -> BasisEvaluation {
        let mut values = vec![Complex64::new(0.0, 0.0); self.len()];
        self.eval_into(x.coords(), &mut values);
        BasisEvaluation { values }
    }
}

/// Y_k^q for all q = −k..=k at one degree k.
#[derive(Debug, Clone)]
pub struct SphericalHarmonics {
    degree: usize,
    /// √((2q+1)/(2q)) for the diagonal step P̄_q^q from P̄_(q−1)^(q−1).
    diag: Vec<f64>,
    /// Per order q, the (a, b) pairs for l = q+2..=k.
    recur: Vec<Vec<(f64, f64)>>,
}

impl SphericalHarmonics {
    pub fn new(degree: usize) -> Self {
        let k = degree;
        let diag = (0..=k)
            .map(|q| if q == 0 { 0.0 } else { ((2 * q + 1) as f64 / (2 * q) as f64).sqrt() })
            .collect();
        let recur = (0..=k)
            .map(|q| {
                ((q + 2)..=k)
                    .map(|l| {
                        let (lf, qf) = (l as f64, q as f64);
                        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - qf * qf)).sqrt();
                        let lm = lf - 1.0;
                        let b = ((lm * lm - qf * qf) / (4.0 * lm * lm - 1.0)).sqrt();
                        (a, b)
                    })
                    .collect()
            })
            .collect();
        Self { degree, diag, recur }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Values ordered q = −k..=k; `out.len()` must be 2k+1.
    pub fn eval_into(&self, x: &[f64; 3], out: &mut [Complex64]) {
        let k = self.degree;
        debug_assert_eq!(out.len(), 2 * k + 1);
        let z = x[2];
        let rho = x[0].hypot(x[1]);
        let eiphi = if rho > 0.0 {
            Complex64::new(x[0] / rho, x[1] / rho)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut pqq = 1.0 / (4.0 * PI).sqrt();
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 0..=k {
            if q > 0 {
                pqq *= -self.diag[q] * rho;
                phase *= eiphi;
            }
            let p = if q == k {
                pqq
            } else {
                let mut prev = pqq;
                let mut cur = ((2 * q + 3) as f64).sqrt() * z * pqq;
                for &(a, b) in &self.recur[q] {
                    let next = a * (z * cur - b * prev);
                    prev = cur;
                    cur = next;
                }
                cur
            };
            let y = phase * p;
            out[k + q] = y;
            if q > 0 {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                out[k - q] = y.conj() * sign;
            }
        }
    }
}

/// (e₁(x), …, e_m(x)) for the canonical basis.
pub fn eval_basis(spec: &EigenspaceSpec, x: &Point) -> BasisEvaluation {
    BasisEvaluator::new(spec).eval(x)
}

/// K_k(x, x) = Σ |eᵢ(x)|².
pub fn kernel_diag(spec: &EigenspaceSpec, x: &Point) -> f64 {
    eval_basis(spec, x).norm_sqr()
}

/// m / Vol(M), the constant value of the projector kernel diagonal.
pub fn kernel_constant(spec: &EigenspaceSpec) -> f64 {
    spec.multiplicity() as f64 / spec.manifold().volume()
}

/// |K(x,x) − m/Vol| / (m/Vol).
pub fn kernel_deviation(spec: &EigenspaceSpec, x: &Point) -> f64 {
    let c = kernel_constant(spec);
    (kernel_diag(spec, x) - c).abs() / c
}

/// (m/Vol)^(1/2): sup-norm bound for L²-normalized members of the eigenspace.
pub fn linf_bound(spec: &EigenspaceSpec) -> f64 {
    kernel_constant(spec).sqrt()
}
