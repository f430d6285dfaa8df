//! Coverings of the manifold by geodesic balls of a common radius `s`.
//!
//! S²: greedy maximal separated set over a Fibonacci lattice of candidates.
//! Centers are kept at mutual distance ≥ s − h, where h bounds the covering
//! radius of the candidate lattice, so the balls B(x_p, (s−h)/2) are disjoint
//! and every candidate lies within s − h of a center. Every point of S² is
//! within h of a candidate, hence within s of a center.
//!
//! Tⁿ: the regular product grid with q points per axis, spacing 2π/q ≤ 2s/√n,
//! which covers exactly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{reduce_angle, sphere_distance, torus_distance, wrapped_delta, Manifold, ManifoldKind, Point, TWO_PI};
use crate::error::{out_of_range, Error, Result};
use crate::randombasis::SeedSpec;

/// Default cap on the number of centers a covering may have.
pub const DEFAULT_MAX_CENTERS: usize = 250_000;

/// Fine-lattice covering radius as a fraction of `s`.
const FINE_FRACTION: f64 = 1.0 / 20.0;

/// The Fibonacci lattice with M points has covering radius below
/// `FIBONACCI_COVERING / sqrt(M)` (sampled max ≈ 2.7/√M; see tests).
const FIBONACCI_COVERING: f64 = 3.2;

const VERIFY_CHUNK: usize = 4096;

/// Declared constant c₁ with N ≤ c₁·s⁻ⁿ for the coverings built here.
///
/// S²: 20. Disjoint caps of radius (s−h)/2 with h = s/20 give
/// N ≤ ⌊2/(1 − cos(0.475 s))⌋, which is ≤ 17.8 s⁻² for small s and keeps
/// N·s² < 20 up to s = π (where N ≤ 2).
/// Tⁿ: N = qⁿ with q ≤ π√n/s + 1 ≤ π(√n + 1)/s, so c₁ = (π(√n+1))ⁿ.
pub fn covering_constant(m: &Manifold) -> f64 {
    match m.kind() {
        ManifoldKind::Sphere2 => 20.0,
        ManifoldKind::FlatTorus => (PI * ((m.dim() as f64).sqrt() + 1.0)).powi(m.dim() as i32),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    manifold: Manifold,
    radius: f64,
    centers: Vec<Point>,
    /// Points per axis when the centers form the regular torus grid.
    grid_per_axis: Option<usize>,
}

impl Covering {
    /// Covering of `m` by balls of radius `s`, capped at [`DEFAULT_MAX_CENTERS`].
    pub fn build(m: &Manifold, s: f64) -> Result<Self> {
        Self::build_with_cap(m, s, DEFAULT_MAX_CENTERS)
    }

    pub fn build_with_cap(m: &Manifold, s: f64, max_centers: usize) -> Result<Self> {
        if !(s > 0.0 && s <= m.injectivity_radius()) {
            return Err(out_of_range("covering radius", s, "0 < s <= pi"));
        }
        let estimate = Self::estimate_count(m, s);
        if estimate > max_centers as f64 {
            return Err(Error::ResourceLimit {
                estimate,
                cap: max_centers,
            });
        }
        Ok(match m.kind() {
            ManifoldKind::Sphere2 => sphere_greedy(*m, s),
            ManifoldKind::FlatTorus => torus_grid(*m, s),
        })
    }

    /// Upper estimate of the number of centers `build` would produce.
    pub fn estimate_count(m: &Manifold, s: f64) -> f64 {
        match m.kind() {
            ManifoldKind::Sphere2 => {
                let sep = s * (1.0 - FINE_FRACTION);
                2.0 / (1.0 - (sep / 2.0).cos())
            }
            ManifoldKind::FlatTorus => (torus_points_per_axis(m.dim(), s) as f64).powi(m.dim() as i32),
        }
    }

    /// Wraps an arbitrary center list; coverage is not checked.
    pub fn from_centers(m: &Manifold, centers: Vec<Point>, s: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyInput("covering centers"));
        }
        if let Some(p) = centers.iter().find(|p| p.coords().len() != m.ambient_dim()) {
            return Err(Error::DimensionMismatch {
                expected: m.ambient_dim(),
                got: p.coords().len(),
            });
        }
        Ok(Self {
            manifold: *m,
            radius: s,
            centers,
            grid_per_axis: None,
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// N·sⁿ, to compare against [`covering_constant`].
    pub fn density(&self) -> f64 {
        self.len() as f64 * self.radius.powi(self.manifold.dim() as i32)
    }

    /// Largest distance from `num_samples` uniform points to their nearest
    /// center. The covering is accepted when this is ≤ `radius()`.
    pub fn verify(&self, num_samples: usize, seed: SeedSpec) -> f64 {
        let index = NearestIndex::new(self);
        let chunks = num_samples.div_ceil(VERIFY_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = seed.rng(0, c as u32);
                let n = VERIFY_CHUNK.min(num_samples - c * VERIFY_CHUNK);
                (0..n)
                    .map(|_| index.nearest_distance(&self.manifold.sample_uniform(&mut rng)))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Distance from `p` to the nearest center.
    pub fn nearest_distance(&self, p: &Point) -> f64 {
        NearestIndex::new(self).nearest_distance(p)
    }

    /// Index of the nearest center.
    pub fn nearest_center(&self, p: &Point) -> usize {
        self.centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, self.manifold.geodesic_distance(p, c)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// CSV with one row per center: coordinates, then the radius.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let d = self.manifold.ambient_dim();
        for i in 0..d {
            let _ = write!(out, "c{i},");
        }
        out.push_str("s\n");
        for c in &self.centers {
            for x in c.coords() {
                let _ = write!(out, "{x:?},");
            }
            let _ = writeln!(out, "{:?}", self.radius);
        }
        out
    }

    pub fn from_csv(m: &Manifold, text: &str) -> Result<Self> {
        let d = m.ambient_dim();
        let mut centers = Vec::new();
        let mut radius = None;
        for (lineno, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if vals.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 1,
                    d + 1,
                    vals.len()
                )));
            }
            centers.push(m.point(&vals[..d])?);
            radius = Some(vals[d]);
        }
        let radius = radius.ok_or(Error::EmptyInput("covering csv"))?;
        Self::from_centers(m, centers, radius)
    }
}

fn torus_points_per_axis(n: usize, s: f64) -> usize {
    let spacing = 2.0 * s / (n as f64).sqrt();
    (TWO_PI / spacing).ceil().max(1.0) as usize
}

fn torus_grid(m: Manifold, s: f64) -> Covering {
    let n = m.dim();
    let q = torus_points_per_axis(n, s);
    let h = TWO_PI / q as f64;
    let total = q.pow(n as u32);
    let mut centers = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let c: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        centers.push(Point::torus(&c));
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Covering {
        manifold: m,
        radius: s,
        centers,
        grid_per_axis: Some(q),
    }
}

/// i-th of `count` Fibonacci lattice points on S².
pub(crate) fn fibonacci_point(i: usize, count: usize) -> [f64; 3] {
    const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;
    let z = 1.0 - (2 * i + 1) as f64 / count as f64;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = TWO_PI * (i as f64 * INV_GOLDEN).fract();
    [rho * phi.cos(), rho * phi.sin(), z]
}

pub(crate) fn fibonacci_count_for(h: f64) -> usize {
    ((FIBONACCI_COVERING / h).powi(2)).ceil() as usize
}

fn sphere_greedy(m: Manifold, s: f64) -> Covering {
    let h = s * FINE_FRACTION;
    let sep = s - h;
    let count = fibonacci_count_for(h);
    let cos_sep = sep.cos();
    let cell = 2.0 * (sep / 2.0).sin();
    let key = |v: &[f64; 3]| -> [i32; 3] {
        [
            ((v[0] + 1.0) / cell).floor() as i32,
            ((v[1] + 1.0) / cell).floor() as i32,
            ((v[2] + 1.0) / cell).floor() as i32,
        ]
    };
    let mut grid: HashMap<[i32; 3], Vec<u32>> = HashMap::new();
    let mut centers: Vec<[f64; 3]> = Vec::new();
    for i in 0..count {
        let v = fibonacci_point(i, count);
        let k = key(&v);
        let mut free = true;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &j in list {
                            let c = &centers[j as usize];
                            if c[0] * v[0] + c[1] * v[1] + c[2] * v[2] > cos_sep {
                                free = false;
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        if free {
            grid.entry(k).or_default().push(centers.len() as u32);
            centers.push(v);
        }
    }
    Covering {
        manifold: m,
        radius: s,
        centers: centers.into_iter().map(Point::unit).collect(),
        grid_per_axis: None,
    }
}

/// Nearest-center lookup used by [`Covering::verify`].
enum NearestIndex<'a> {
    Brute(&'a Covering),
    TorusGrid { q: usize },
    SphereGrid {
        cell: f64,
        extent: i32,
        cells: HashMap<[i32; 3], Vec<[f64; 3]>>,
    },
}

impl<'a> NearestIndex<'a> {
    fn new(c: &'a Covering) -> Self {
        if let Some(q) = c.grid_per_axis {
            return NearestIndex::TorusGrid { q };
        }
        if c.manifold.is_sphere() && c.len() > 256 {
            // about one center per cell
            let cell = (4.0 * PI / c.len() as f64).sqrt().max(1e-3);
            let mut cells: HashMap<[i32; 3], Vec<[f64; 3]>> = HashMap::new();
            for p in &c.centers {
                let v = p.as_sphere();
                cells.entry(sphere_cell(&v, cell)).or_default().push(v);
            }
            let extent = (2.0 / cell).ceil() as i32 + 1;
            return NearestIndex::SphereGrid { cell, extent, cells };
        }
        NearestIndex::Brute(c)
    }

    fn nearest_distance(&self, p: &Point) -> f64 {
        match self {
            NearestIndex::Brute(c) => match c.manifold.kind() {
                ManifoldKind::Sphere2 => {
                    let v = p.as_sphere();
                    c.centers
                        .iter()
                        .map(|q| sphere_distance(v, q.as_sphere()))
                        .fold(f64::INFINITY, f64::min)
                }
                ManifoldKind::FlatTorus => c
                    .centers
                    .iter()
                    .map(|q| torus_distance(p.coords(), q.coords()))
                    .fold(f64::INFINITY, f64::min),
            },
            NearestIndex::TorusGrid { q } => {
                let h = TWO_PI / *q as f64;
                p.coords()
                    .iter()
                    .map(|&x| {
                        let j = (x / h).round();
                        let g = reduce_angle(j * h);
                        let d = wrapped_delta(x, g);
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            NearestIndex::SphereGrid { cell, extent, cells } => {
                let v = p.as_sphere();
                let k = sphere_cell(&v, *cell);
                let mut best_chord2 = f64::INFINITY;
                for ring in 0..=*extent {
                    visit_ring(ring, |d| {
                        if let Some(list) = cells.get(&[k[0] + d[0], k[1] + d[1], k[2] + d[2]]) {
                            for c in list {
                                let dx = c[0] - v[0];
                                let dy = c[1] - v[1];
                                let dz = c[2] - v[2];
                                best_chord2 = best_chord2.min(dx * dx + dy * dy + dz * dz);
                            }
                        }
                    });
                    // unvisited cells are at least ring·cell away
                    if best_chord2.sqrt() <= ring as f64 * cell {
                        break;
                    }
                }
                let chord = best_chord2.sqrt().min(2.0);
                2.0 * (chord / 2.0).asin()
            }
        }
    }
}

fn sphere_cell(v: &[f64; 3], cell: f64) -> [i32; 3] {
    [
        ((v[0] + 1.0) / cell).floor() as i32,
        ((v[1] + 1.0) / cell).floor() as i32,
        ((v[2] + 1.0) / cell).floor() as i32,
    ]
}

/// Calls `f` on every offset with Chebyshev norm exactly `ring`.
fn visit_ring(ring: i32, mut f: impl FnMut([i32; 3])) {
    if ring == 0 {
        f([0, 0, 0]);
        return;
    }
    for dx in -ring..=ring {
        for dy in -ring..=ring {
            if dx.abs() == ring || dy.abs() == ring {
                for dz in -ring..=ring {
                    f([dx, dy, dz]);
                }
            } else {
                f([dx, dy, -ring]);
                f([dx, dy, ring]);
            }
        }
    }
}
