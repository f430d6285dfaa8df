//! Geometry of the two manifold families: the unit sphere S² and the flat
//! torus Tⁿ = ℝⁿ/(2πℤ)ⁿ.
//!
//! Both have injectivity radius π. Balls of radius `r` are geodesic balls;
//! on the torus they are Euclidean balls as long as `r ≤ π`.

mod covering;

pub use covering::{covering_constant, Covering, DEFAULT_MAX_CENTERS};

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{out_of_range, Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Largest torus dimension supported.
pub const MAX_TORUS_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Sphere2,
    FlatTorus,
}

/// S² (unit radius) or Tⁿ with period 2π in every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Manifold {
    kind: ManifoldKind,
    dim: usize,
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ManifoldKind::Sphere2 => write!(f, "sphere2"),
            ManifoldKind::FlatTorus => write!(f, "torus{}", self.dim),
        }
    }
}

impl Manifold {
    pub const fn sphere2() -> Self {
        Self {
            kind: ManifoldKind::Sphere2,
            dim: 2,
        }
    }

    pub fn torus(dim: usize) -> Result<Self> {
        if !(2..=MAX_TORUS_DIM).contains(&dim) {
            return Err(out_of_range(
                "torus dimension",
                dim as f64,
                format!("2 <= n <= {MAX_TORUS_DIM}"),
            ));
        }
        Ok(Self {
            kind: ManifoldKind::FlatTorus,
            dim,
        })
    }

    pub const fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub const fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sphere(&self) -> bool {
        self.kind == ManifoldKind::Sphere2
    }

    /// Number of coordinates of a [`Point`] (3 for S², n for Tⁿ).
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere2 => 3,
            ManifoldKind::FlatTorus => self.dim,
        }
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere2 => 4.0 * PI,
            ManifoldKind::FlatTorus => TWO_PI.powi(self.dim as i32),
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        PI
    }

    /// Largest admissible geodesic-ball radius. The whole sphere is the
    /// closed ball of radius π; on the torus the flat-ball formula needs r < π.
    fn max_ball_radius(&self) -> f64 {
        PI
    }

    /// Validates coordinates as a point of this manifold. Sphere points must
    /// have unit norm within 1e-12; torus coordinates are reduced to [0, 2π).
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        match self.kind {
            ManifoldKind::Sphere2 => {
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(out_of_range("sphere point norm", norm, "|x| = 1 within 1e-12"));
                }
                Ok(Point::unit([coords[0], coords[1], coords[2]]))
            }
            ManifoldKind::FlatTorus => Ok(Point::torus(coords)),
        }
    }

    pub fn geodesic_distance(&self, p: &Point, q: &Point) -> f64 {
        match self.kind {
            ManifoldKind::Sphere2 => sphere_distance(p.as_sphere(), q.as_sphere()),
            ManifoldKind::FlatTorus => torus_distance(p.coords(), q.coords()),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.kind {
            ManifoldKind::Sphere2 => loop {
                let v: [f64; 3] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 1e-8 {
                    return Point::unit([v[0] / n, v[1] / n, v[2] / n]);
                }
            },
            ManifoldKind::FlatTorus => {
                let c: Vec<f64> = (0..self.dim).map(|_| rng.random::<f64>() * TWO_PI).collect();
                Point::torus(&c)
            }
        }
    }

    /// Volume of a geodesic ball of radius `r`; independent of the center.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= self.max_ball_radius()) {
            return Err(out_of_range("ball radius", r, "0 <= r <= pi"));
        }
        Ok(match self.kind {
            ManifoldKind::Sphere2 => sphere_cap_volume(2, r),
            ManifoldKind::FlatTorus => unit_ball_volume(self.dim) * r.powi(self.dim as i32),
        })
    }

    /// Vol(B(r+s)) − Vol(B(r−s)).
    pub fn annulus_volume(&self, r: f64, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s <= r) {
            return Err(out_of_range("annulus half-width", s, format!("0 <= s <= r = {r}")));
        }
        if !(r + s <= self.max_ball_radius()) {
            return Err(out_of_range("annulus outer radius", r + s, "r + s <= pi"));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(match self.kind {
            // 2π(cos(r−s) − cos(r+s)) without the cancellation
            ManifoldKind::Sphere2 => 4.0 * PI * r.sin() * s.sin(),
            ManifoldKind::FlatTorus => {
                let n = self.dim as i32;
                unit_ball_volume(self.dim) * ((r + s).powi(n) - (r - s).powi(n))
            }
        })
    }

    /// Constant C with `annulus_volume(r, s) ≤ C·s·r^(n−1)·(1 + s/r)^(n−1)`.
    ///
    /// S²: 4π sin r sin s ≤ 4π r s, so 8π holds with room to spare.
    /// Tⁿ: (r+s)ⁿ − (r−s)ⁿ ≤ 2s·n·(r+s)^(n−1), so C = 2n·vₙ.
    pub fn annulus_constant(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere2 => 8.0 * PI,
            ManifoldKind::FlatTorus => 2.0 * self.dim as f64 * unit_ball_volume(self.dim),
        }
    }

    pub fn ball(&self, center: Point, radius: f64) -> Result<GeodesicBall> {
        GeodesicBall::new(self, center, radius)
    }
}

/// Volume of the Euclidean unit ball in ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    // v_0 = 1, v_1 = 2, v_n = 2π/n · v_{n−2}
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => TWO_PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere Sⁿ ⊂ ℝⁿ⁺¹.
pub fn unit_sphere_area(n: usize) -> f64 {
    (n + 1) as f64 * unit_ball_volume(n + 1)
}

/// Volume of a geodesic cap of radius `r` on the unit sphere Sⁿ:
/// |S^(n−1)| ∫₀^r sin^(n−1) t dt.
pub fn sphere_cap_volume(n: usize, r: f64) -> f64 {
    assert!(n >= 1);
    // I_j = ∫₀^r sin^j t dt, I_j = −sin^(j−1) r cos r / j + (j−1)/j I_(j−2)
    let (s, c) = r.sin_cos();
    let mut i_prev = r; // I_0
    let mut i_cur = 1.0 - c; // I_1
    let j_target = n - 1;
    if j_target == 0 {
        return unit_sphere_area(0) * i_prev;
    }
    for j in 2..=j_target {
        let jf = j as f64;
        let next = -s.powi(j as i32 - 1) * c / jf + (jf - 1.0) / jf * i_prev;
        i_prev = i_cur;
        i_cur = next;
    }
    unit_sphere_area(n - 1) * i_cur
}

/// A point of S² (unit vector in ℝ³) or of Tⁿ (coordinates in [0, 2π)).
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub(crate) fn unit(v: [f64; 3]) -> Self {
        Self { coords: v.to_vec() }
    }

    /// Normalizes a nonzero vector of ℝ³ onto S².
    pub fn on_sphere(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(Self::unit([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// Sphere point from colatitude θ and longitude φ.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::unit([st * cp, st * sp, ct])
    }

    pub fn north_pole() -> Self {
        Self::unit([0.0, 0.0, 1.0])
    }

    pub fn south_pole() -> Self {
        Self::unit([0.0, 0.0, -1.0])
    }

    /// Torus point; coordinates are reduced into the fundamental domain.
    pub fn torus(coords: &[f64]) -> Self {
        Self {
            coords: coords.iter().map(|&c| reduce_angle(c)).collect(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn as_sphere(&self) -> [f64; 3] {
        [self.coords[0], self.coords[1], self.coords[2]]
    }
}

pub(crate) fn reduce_angle(c: f64) -> f64 {
    let r = c.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

pub(crate) fn sphere_distance(p: [f64; 3], q: [f64; 3]) -> f64 {
    // atan2 form is accurate for both nearby and antipodal points
    let dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    let cx = p[1] * q[2] - p[2] * q[1];
    let cy = p[2] * q[0] - p[0] * q[2];
    let cz = p[0] * q[1] - p[1] * q[0];
    let cross = (cx * cx + cy * cy + cz * cz).sqrt();
    cross.atan2(dot.clamp(-1.0, 1.0))
}

/// Per-coordinate wrapped difference in [0, π].
pub(crate) fn wrapped_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

pub(crate) fn torus_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = wrapped_delta(a, b);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Geodesic ball B(center, radius).
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicBall {
    pub center: Point,
    pub radius: f64,
}

impl GeodesicBall {
    /// Sphere balls admit `0 < r ≤ π` (r = π is the whole sphere); torus balls
    /// need `0 < r < π`.
    pub fn new(m: &Manifold, center: Point, radius: f64) -> Result<Self> {
        if center.coords.len() != m.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: m.ambient_dim(),
                got: center.coords.len(),
            });
        }
        let ok = match m.kind() {
            ManifoldKind::Sphere2 => radius > 0.0 && radius <= PI,
            ManifoldKind::FlatTorus => radius > 0.0 && radius < PI,
        };
        if !ok {
            return Err(out_of_range("ball radius", radius, "below the injectivity radius pi"));
        }
        Ok(Self { center, radius })
    }
}
