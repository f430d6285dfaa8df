use std::fmt::Write as _;

use crate::error::{out_of_range, Error, Result};
use crate::manifold::{Manifold, ManifoldKind};

/// Largest sphere degree accepted.
pub const MAX_SPHERE_DEGREE: u64 = 400;

/// One Laplace eigenspace E_k.
///
/// On S² the index is the degree k: λ² = k(k+1), multiplicity 2k+1, basis
/// Y_k^q for q = −k..=k in that order. On Tⁿ the index is the energy E:
/// λ² = E, basis (2π)^(−n/2)·e^(i l·x) over the integer vectors |l|² = E in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenspaceSpec {
    manifold: Manifold,
    index: u64,
    eigenvalue_sq: f64,
    multiplicity: usize,
    frequencies: Vec<Vec<i32>>,
}

impl EigenspaceSpec {
    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    /// Sphere degree k or torus energy E.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn eigenvalue_sq(&self) -> f64 {
        self.eigenvalue_sq
    }

    /// Eigenfrequency λ.
    pub fn frequency(&self) -> f64 {
        self.eigenvalue_sq.sqrt()
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Torus lattice frequencies (empty on the sphere).
    pub fn torus_frequencies(&self) -> &[Vec<i32>] {
        &self.frequencies
    }

    /// Sphere degree; panics on a torus spec.
    pub fn degree(&self) -> usize {
        assert!(self.manifold.is_sphere(), "degree() on a torus eigenspace");
        self.index as usize
    }
}

/// Builds the eigenspace with sphere degree `k_or_energy` or torus energy.
pub fn eigenspace(m: &Manifold, k_or_energy: u64) -> Result<EigenspaceSpec> {
    match m.kind() {
        ManifoldKind::Sphere2 => {
            if k_or_energy > MAX_SPHERE_DEGREE {
                return Err(out_of_range(
                    "sphere degree",
                    k_or_energy as f64,
                    format!("k <= {MAX_SPHERE_DEGREE}"),
                ));
            }
            let k = k_or_energy;
            Ok(EigenspaceSpec {
                manifold: *m,
                index: k,
                eigenvalue_sq: (k * (k + 1)) as f64,
                multiplicity: 2 * k as usize + 1,
                frequencies: Vec::new(),
            })
        }
        ManifoldKind::FlatTorus => {
            let frequencies = lattice_points(m.dim(), k_or_energy);
            if frequencies.is_empty() {
                return Err(Error::EmptyEigenspace {
                    energy: k_or_energy,
                    dim: m.dim(),
                });
            }
            Ok(EigenspaceSpec {
                manifold: *m,
                index: k_or_energy,
                eigenvalue_sq: k_or_energy as f64,
                multiplicity: frequencies.len(),
                frequencies,
            })
        }
    }
}

/// All l ∈ ℤⁿ with |l|² = energy, lexicographically sorted.
pub fn lattice_points(dim: usize, energy: u64) -> Vec<Vec<i32>> {
    fn rec(dim: usize, remaining: u64, prefix: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if prefix.len() == dim - 1 {
            let r = isqrt(remaining);
            if r * r == remaining {
                let r = r as i32;
                prefix.push(-r);
                out.push(prefix.clone());
                prefix.pop();
                if r != 0 {
                    prefix.push(r);
                    out.push(prefix.clone());
                    prefix.pop();
                }
            }
            return;
        }
        let bound = isqrt(remaining) as i32;
        for l in -bound..=bound {
            prefix.push(l);
            rec(dim, remaining - (l as i64 * l as i64) as u64, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, energy, &mut Vec::with_capacity(dim), &mut out);
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Nonempty eigenspaces with λ² ≤ `max_eigenvalue_sq`, as (λ², multiplicity).
pub fn enumerate_energies(m: &Manifold, max_eigenvalue_sq: u64) -> Vec<(u64, usize)> {
    match m.kind() {
        ManifoldKind::Sphere2 => (0..)
            .take_while(|&k: &u64| k * (k + 1) <= max_eigenvalue_sq)
            .map(|k| (k * (k + 1), 2 * k as usize + 1))
            .collect(),
        ManifoldKind::FlatTorus => {
            // r_n by repeated convolution with r_1
            let emax = max_eigenvalue_sq as usize;
            let mut r1 = vec![0usize; emax + 1];
            let mut l = 0usize;
            while l * l <= emax {
                r1[l * l] += if l == 0 { 1 } else { 2 };
                l += 1;
            }
            let mut counts = r1.clone();
            for _ in 1..m.dim() {
                let mut next = vec![0usize; emax + 1];
                for (e, &c) in counts.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut l = 0usize;
                    while e + l * l <= emax {
                        next[e + l * l] += c * r1[l * l];
                        l += 1;
                    }
                }
                counts = next;
            }
            counts
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(e, c)| (e as u64, c))
                .collect()
        }
    }
}

/// Smallest C with m ≤ C·λ^(n−1) over the listed eigenspaces (λ > 0).
pub fn multiplicity_envelope(m: &Manifold, spectrum: &[(u64, usize)]) -> f64 {
    let p = m.dim() as f64 - 1.0;
    spectrum
        .iter()
        .filter_map(|&(e, mult)| {
            let lambda = (e as f64).sqrt();
            (lambda > 0.0).then(|| mult as f64 / lambda.powf(p))
        })
        .fold(0.0, f64::max)
}

/// CSV with columns `E,multiplicity`.
pub fn spectrum_csv(spectrum: &[(u64, usize)]) -> String {
    let mut out = String::from("E,multiplicity\n");
    for (e, m) in spectrum {
        let _ = writeln!(out, "{e},{m}");
    }
    out
}
