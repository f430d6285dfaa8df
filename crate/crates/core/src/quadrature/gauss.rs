use std::f64::consts::PI;

use crate::error::{out_of_range, Result};

/// One-dimensional rule on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule with `n` nodes on [a, b], exact for polynomials of
/// degree ≤ 2n − 1. Nodes are roots of Pₙ found by Newton iteration on the
/// three-term recurrence, in increasing order.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Rule1d> {
    if n == 0 {
        return Err(out_of_range("node count", 0.0, "n >= 1"));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(out_of_range("interval start", a, format!("a < b = {b}")));
    }
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = mid + half * x;
        weights[n - 1 - i] = half * w;
        nodes[i] = mid - half * x;
        weights[i] = half * w;
    }
    Ok(Rule1d { nodes, weights })
}

/// (Pₙ(x), Pₙ'(x)).
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
