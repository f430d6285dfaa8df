use std::f64::consts::PI;

use super::gauss::gauss_legendre;
use crate::error::{out_of_range, Result};
use crate::manifold::Point;

/// Nodes and positive weights for integrating over a spherical cap.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Spherical-polynomial degree integrated exactly.
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.nodes.iter().map(|&v| Point::unit(v))
    }

    pub fn integrate(&self, f: impl Fn(&[f64; 3]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, &w)| w * f(x)).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,w\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push_str(&format!("{:?},{:?},{:?},{:?}\n", x[0], x[1], x[2], w));
        }
        out
    }
}

/// Product rule on the cap B(center, r), exact for spherical polynomials of
/// degree ≤ 2k: Gauss–Legendre with k+1 nodes in cos θ on [cos r, 1] times
/// 2k+2 equispaced azimuths, rotated from the north pole to `center`.
pub fn cap_rule(k: usize, r: f64, center: &Point) -> Result<QuadratureRule> {
    let mut rule = cap_rule_with(k + 1, 2 * k + 2, r, center)?;
    rule.exactness_degree = 2 * k;
    Ok(rule)
}

/// Cap product rule with explicit node counts. Exact degree is
/// min(2·n_polar − 1, n_azimuth − 1).
pub fn cap_rule_with(n_polar: usize, n_azimuth: usize, r: f64, center: &Point) -> Result<QuadratureRule> {
    if !(r > 0.0 && r <= PI) {
        return Err(out_of_range("cap radius", r, "0 < r <= pi"));
    }
    if n_azimuth == 0 {
        return Err(out_of_range("azimuthal node count", 0.0, ">= 1"));
    }
    let gl = gauss_legendre(n_polar, r.cos(), 1.0)?;
    let rot = rotation_to(center);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let azimuths: Vec<(f64, f64)> = (0..n_azimuth).map(|j| (j as f64 * dphi).sin_cos()).collect();
    let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    for (&t, &wt) in gl.nodes.iter().zip(&gl.weights) {
        let rho = (1.0 - t * t).max(0.0).sqrt();
        for &(sp, cp) in &azimuths {
            let local = [rho * cp, rho * sp, t];
            nodes.push(apply(&rot, &local));
            weights.push(wt * dphi);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness_degree: (2 * n_polar - 1).min(n_azimuth - 1),
    })
}

/// Orthogonal matrix (columns a, b, c) with c = `center`: sends the north
/// pole to `center`. a is the Gram–Schmidt completion of the coordinate axis
/// least aligned with `center` (first such axis on ties), b = c × a.
pub fn rotation_to(center: &Point) -> [[f64; 3]; 3] {
    let c = center.as_sphere();
    let mut j = 0;
    for i in 1..3 {
        if c[i].abs() < c[j].abs() {
            j = i;
        }
    }
    let mut a = [0.0; 3];
    a[j] = 1.0;
    let d = c[j];
    for i in 0..3 {
        a[i] -= d * c[i];
    }
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    for v in &mut a {
        *v /= na;
    }
    let b = [
        c[1] * a[2] - c[2] * a[1],
        c[2] * a[0] - c[0] * a[2],
        c[0] * a[1] - c[1] * a[0],
    ];
    // row-major, columns a, b, c
    [[a[0], b[0], c[0]], [a[1], b[1], c[1]], [a[2], b[2], c[2]]]
}

fn apply(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}
