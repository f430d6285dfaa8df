//! Ball Gram matrices: F(u) = ∫_B |u|² = u*Gu for u = Σ uᵢ eᵢ.
//!
//! Convention: G_ij = ∫_B conj(eᵢ)·e_j, so F is the plain Hermitian form.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::BasisEvaluator;
use super::eigenspace::{eigenspace, EigenspaceSpec};
use crate::error::{out_of_range, Error, Result};
use crate::manifold::{unit_ball_volume, GeodesicBall, Manifold, ManifoldKind, Point, TWO_PI};
use crate::quadrature::{bessel_j, cap_rule, cap_rule_with, QuadratureRule};

pub const CLOSED_FORM: &str = "closed-form";

#[derive(Debug, Clone, PartialEq)]
pub struct BallGram {
    pub matrix: DMatrix<Complex64>,
    pub ball: GeodesicBall,
    pub spec: EigenspaceSpec,
    /// Rule description, or "closed-form".
    pub rule: String,
}

impl BallGram {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// m·Vol(B)/Vol(M).
    pub fn expected_trace(&self) -> f64 {
        let m = self.spec.manifold();
        let vol_b = m.ball_volume(self.ball.radius).expect("ball radius validated at construction");
        self.spec.multiplicity() as f64 * vol_b / m.volume()
    }

    /// max |G − G*| entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Ascending real eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// u*Gu (real part; the imaginary part vanishes for Hermitian G).
    pub fn quadratic_form(&self, u: &[Complex64]) -> Result<f64> {
        quadratic_form(&self.matrix, u)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# ballgram v1\n");
        let _ = writeln!(out, "manifold {}", self.spec.manifold());
        let _ = writeln!(out, "index {}", self.spec.index());
        let _ = writeln!(out, "multiplicity {}", self.dim());
        let c: Vec<String> = self.ball.center.coords().iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "center {}", c.join(" "));
        let _ = writeln!(out, "radius {:?}", self.ball.radius);
        let _ = writeln!(out, "rule {}", self.rule);
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.matrix[(i, j)];
                    format!("{:?} {:?}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("# ballgram v1") {
            return Err(Error::Parse("missing ballgram header".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {name}")))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("expected `{name}`, got `{line}`")))
        };
        let manifold = parse_manifold(&field("manifold")?)?;
        let index: u64 = parse(&field("index")?)?;
        let m: usize = parse(&field("multiplicity")?)?;
        let center: Vec<f64> = field("center")?.split_whitespace().map(parse).collect::<Result<_>>()?;
        let radius: f64 = parse(&field("radius")?)?;
        let rule = field("rule")?;
        let spec = eigenspace(&manifold, index)?;
        if spec.multiplicity() != m {
            return Err(Error::DimensionMismatch {
                expected: spec.multiplicity(),
                got: m,
            });
        }
        let ball = GeodesicBall::new(&manifold, manifold.point(&center)?, radius)?;
        let mut data = Vec::with_capacity(m * m);
        for line in lines.by_ref().take(m) {
            let nums: Vec<f64> = line.split_whitespace().map(parse).collect::<Result<_>>()?;
            if nums.len() != 2 * m {
                return Err(Error::DimensionMismatch {
                    expected: 2 * m,
                    got: nums.len(),
                });
            }
            data.extend(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        }
        if data.len() != m * m {
            return Err(Error::Parse("truncated ballgram matrix".into()));
        }
        Ok(Self {
            matrix: DMatrix::from_row_slice(m, m, &data),
            ball,
            spec,
            rule,
        })
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

fn parse_manifold(s: &str) -> Result<Manifold> {
    if s == "sphere2" {
        return Ok(Manifold::sphere2());
    }
    match s.strip_prefix("torus").map(parse::<usize>) {
        Some(Ok(n)) => Manifold::torus(n),
        _ => Err(Error::Parse(format!("unknown manifold `{s}`"))),
    }
}

/// u*Gu for an arbitrary Hermitian G.
pub fn quadratic_form(g: &DMatrix<Complex64>, u: &[Complex64]) -> Result<f64> {
    if u.len() != g.nrows() {
        return Err(Error::DimensionMismatch {
            expected: g.nrows(),
            got: u.len(),
        });
    }
    let u = DVector::from_column_slice(u);
    Ok((u.adjoint() * g * &u)[(0, 0)].re)
}

/// Closed form on the torus, exact cap quadrature on the sphere.
pub fn ball_gram(spec: &EigenspaceSpec, ball: &GeodesicBall) -> Result<BallGram> {
    match spec.manifold().kind() {
        ManifoldKind::Sphere2 => ball_gram_quadrature(spec, ball),
        ManifoldKind::FlatTorus => ball_gram_torus_exact(spec, ball),
    }
}

/// Sphere: the degree-2k exact cap rule. Torus: the closed form.
pub fn ball_gram_quadrature(spec: &EigenspaceSpec, ball: &GeodesicBall) -> Result<BallGram> {
    match spec.manifold().kind() {
        ManifoldKind::FlatTorus => ball_gram_torus_exact(spec, ball),
        ManifoldKind::Sphere2 => {
            check_ball(spec, ball)?;
            let rule = cap_rule(spec.degree(), ball.radius, &ball.center)?;
            let label = format!("cap-gauss {}x{}", spec.degree() + 1, 2 * spec.degree() + 2);
            Ok(gram_from_rule(spec, ball, &rule, label))
        }
    }
}

/// Sphere Gram with explicit polar × azimuth node counts.
pub fn ball_gram_quadrature_with(
    spec: &EigenspaceSpec,
    ball: &GeodesicBall,
    n_polar: usize,
    n_azimuth: usize,
) -> Result<BallGram> {
    if !spec.manifold().is_sphere() {
        return Err(Error::InvalidInput("cap quadrature needs a sphere eigenspace".into()));
    }
    check_ball(spec, ball)?;
    let rule = cap_rule_with(n_polar, n_azimuth, ball.radius, &ball.center)?;
    Ok(gram_from_rule(spec, ball, &rule, format!("cap-gauss {n_polar}x{n_azimuth}")))
}

fn check_ball(spec: &EigenspaceSpec, ball: &GeodesicBall) -> Result<()> {
    let m = spec.manifold();
    if ball.center.coords().len() != m.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.ambient_dim(),
            got: ball.center.coords().len(),
        });
    }
    let ok = match m.kind() {
        ManifoldKind::Sphere2 => ball.radius > 0.0 && ball.radius <= std::f64::consts::PI,
        ManifoldKind::FlatTorus => ball.radius > 0.0 && ball.radius < std::f64::consts::PI,
    };
    if ok {
        Ok(())
    } else {
        Err(out_of_range("ball radius", ball.radius, "below the injectivity radius pi"))
    }
}

/// Σ_p w_p conj(e_i(x_p)) e_j(x_p) as one real GEMM.
///
/// Rows of Y are √w_p·[Re e(x_p), Im e(x_p)]; with C = YᵀY split into m×m
/// blocks, Re G = C₁₁ + C₂₂ and Im G = C₁₂ − C₁₂ᵀ.
fn gram_from_rule(spec: &EigenspaceSpec, ball: &GeodesicBall, rule: &QuadratureRule, label: String) -> BallGram {
    let m = spec.multiplicity();
    let w2 = 2 * m;
    let n = rule.len();
    let eval = BasisEvaluator::new(spec);
    let mut y = vec![0.0f64; n * w2];
    y.par_chunks_mut(w2).zip(rule.nodes.par_iter().zip(rule.weights.par_iter())).for_each_init(
        || vec![Complex64::new(0.0, 0.0); m],
        |buf, (row, (x, &w))| {
            eval.eval_into(x, buf);
            let s = w.sqrt();
            for (i, v) in buf.iter().enumerate() {
                row[i] = s * v.re;
                row[m + i] = s * v.im;
            }
        },
    );
    let mut c = vec![0.0f64; w2 * w2];
    // SAFETY: slice lengths match the declared shapes and strides.
    unsafe {
        matrixmultiply::dgemm(
            w2, n, w2, 1.0,
            y.as_ptr(), 1, w2 as isize,
            y.as_ptr(), w2 as isize, 1,
            0.0,
            c.as_mut_ptr(), w2 as isize, 1,
        );
    }
    let at = |i: usize, j: usize| c[i * w2 + j];
    let matrix = DMatrix::from_fn(m, m, |i, j| {
        let re = 0.5 * (at(i, j) + at(j, i) + at(m + i, m + j) + at(m + j, m + i));
        let im = at(i, m + j) - at(j, m + i);
        Complex64::new(re, im)
    });
    BallGram {
        matrix,
        ball: ball.clone(),
        spec: spec.clone(),
        rule: label,
    }
}

/// Φₙ(r, ξ) = ∫_{|y|<r} e^(iξ·y) dy over the Euclidean n-ball.
pub fn euclidean_ball_fourier(n: usize, r: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        return unit_ball_volume(n) * r.powi(n as i32);
    }
    (TWO_PI * r / xi).powf(n as f64 / 2.0) * bessel_j(n as u32, r * xi)
}

/// G[l, l'] = (2π)^(−n)·e^(i(l'−l)·x)·Φₙ(r, |l'−l|).
pub fn ball_gram_torus_exact(spec: &EigenspaceSpec, ball: &GeodesicBall) -> Result<BallGram> {
    let man = spec.manifold();
    if man.is_sphere() {
        return Err(Error::InvalidInput("closed-form Gram needs a torus eigenspace".into()));
    }
    check_ball(spec, ball)?;
    let n = man.dim();
    let r = ball.radius;
    let freqs = spec.torus_frequencies();
    let x = ball.center.coords();
    let norm = TWO_PI.powi(-(n as i32));
    let mut phi: HashMap<u64, f64> = HashMap::new();
    let m = freqs.len();
    let mut matrix = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for i in 0..m {
        for j in i..m {
            let (mut d2, mut phase) = (0u64, 0.0);
            for ((&a, &b), &xc) in freqs[i].iter().zip(&freqs[j]).zip(x) {
                let d = (b - a) as i64;
                d2 += (d * d) as u64;
                phase += d as f64 * xc;
            }
            let f = *phi
                .entry(d2)
                .or_insert_with(|| euclidean_ball_fourier(n, r, (d2 as f64).sqrt()));
            let z = Complex64::from_polar(norm * f, phase);
            matrix[(i, j)] = z;
            matrix[(j, i)] = z.conj();
        }
    }
    Ok(BallGram {
        matrix,
        ball: ball.clone(),
        spec: spec.clone(),
        rule: CLOSED_FORM.to_string(),
    })
}

/// Gram of the ball B(center, r) on the eigenspace's manifold.
pub fn ball_gram_at(spec: &EigenspaceSpec, center: &Point, r: f64) -> Result<BallGram> {
    let ball = GeodesicBall::new(spec.manifold(), center.clone(), r)?;
    ball_gram(spec, &ball)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::randombasis::SeedSpec;
    use rand::Rng;

    fn s2() -> Manifold {
        Manifold::sphere2()
    }

    #[test]
    fn whole_sphere_is_identity() {
        for k in [0u64, 1, 5, 17, 30] {
            let spec = eigenspace(&s2(), k).unwrap();
            let g = ball_gram_at(&spec, &Point::from_angles(0.7, 1.9), PI).unwrap();
            let id = DMatrix::<Complex64>::identity(spec.multiplicity(), spec.multiplicity());
            let err = (&g.matrix - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "k={k} err={err}");
        }
    }

    #[test]
    fn sphere_trace() {
        let spec = eigenspace(&s2(), 25).unwrap();
        let g = ball_gram_at(&spec, &Point::from_angles(2.0, -1.0), 0.5).unwrap();
        let expect = 51.0 * 2.0 * PI * (1.0 - 0.5f64.cos()) / (4.0 * PI);
        assert!((g.trace() - expect).abs() < 1e-8);
        assert!((g.expected_trace() - expect).abs() < 1e-14);
        assert!(g.hermitian_defect() < 1e-12);
    }

    #[test]
    fn refinement_is_stable() {
        for k in [3u64, 12, 40] {
            let spec = eigenspace(&s2(), k).unwrap();
            let ball = GeodesicBall::new(&s2(), Point::from_angles(1.1, 0.4), 0.8).unwrap();
            let k = k as usize;
            let a = ball_gram_quadrature(&spec, &ball).unwrap();
            let b = ball_gram_quadrature_with(&spec, &ball, 2 * (k + 1), 2 * (2 * k + 2)).unwrap();
            let err = (&a.matrix - &b.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "k={k} err={err}");
        }
    }

    #[test]
    fn pointwise_sum_oracle() {
        // entry-by-entry complex sum over the same nodes
        let spec = eigenspace(&s2(), 4).unwrap();
        let center = Point::from_angles(0.3, 2.2);
        let g = ball_gram_at(&spec, &center, 1.3).unwrap();
        let rule = cap_rule(4, 1.3, &center).unwrap();
        let ev = BasisEvaluator::new(&spec);
        let mut naive = DMatrix::from_element(9, 9, Complex64::new(0.0, 0.0));
        for (x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let mut e = vec![Complex64::new(0.0, 0.0); 9];
            ev.eval_into(x, &mut e);
            for i in 0..9 {
                for j in 0..9 {
                    naive[(i, j)] += e[i].conj() * e[j] * w;
                }
            }
        }
        let err = (&g.matrix - naive).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn spectrum_in_unit_interval() {
        let spec = eigenspace(&s2(), 10).unwrap();
        let g = ball_gram_at(&spec, &Point::from_angles(1.0, 1.0), 0.9).unwrap();
        let ev = g.eigenvalues();
        assert!(ev[0] >= -1e-9 && *ev.last().unwrap() <= 1.0 + 1e-9);
        let mut rng = SeedSpec::new(1).rng(0, 0);
        for _ in 0..1000 {
            let mut u: Vec<Complex64> =
                (0..21).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let n = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            u.iter_mut().for_each(|z| *z /= n);
            let f = g.quadratic_form(&u).unwrap();
            assert!((-1e-12..=1.0 + 1e-9).contains(&f));
        }
    }

    #[test]
    fn torus_diagonal_and_trace() {
        let t3 = Manifold::torus(3).unwrap();
        let spec = eigenspace(&t3, 6).unwrap();
        let g = ball_gram_at(&spec, &Point::torus(&[1.0, 2.0, 3.0]), 0.7).unwrap();
        let d = unit_ball_volume(3) * 0.7f64.powi(3) / TWO_PI.powi(3);
        for i in 0..g.dim() {
            assert!((g.matrix[(i, i)].re - d).abs() < 1e-16);
        }
        assert!((g.trace() - g.expected_trace()).abs() < 1e-14);
        assert_eq!(g.hermitian_defect(), 0.0);
        assert_eq!(g.rule, CLOSED_FORM);
    }

    #[test]
    fn phi2_midpoint_oracle() {
        // ∫_{|y|<1} cos(y₁) dy by a 2-d midpoint rule
        let n = 4000;
        let h = 2.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let y1 = -1.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y2 = -1.0 + (j as f64 + 0.5) * h;
                if y1 * y1 + y2 * y2 < 1.0 {
                    s += y1.cos();
                }
            }
        }
        s *= h * h;
        assert!((euclidean_ball_fourier(2, 1.0, 1.0) - s).abs() < 1e-3);
        assert!((euclidean_ball_fourier(2, 1.0, 1.0) - TWO_PI * 0.440_050_585_744_933_5).abs() < 1e-14);
    }

    #[test]
    fn text_roundtrip() {
        let spec = eigenspace(&s2(), 3).unwrap();
        let g = ball_gram_at(&spec, &Point::from_angles(0.4, 0.2), 0.6).unwrap();
        let back = BallGram::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let t2 = Manifold::torus(2).unwrap();
        let spec = eigenspace(&t2, 5).unwrap();
        let g = ball_gram_at(&spec, &Point::torus(&[0.5, 6.0]), 0.3).unwrap();
        assert_eq!(BallGram::from_text(&g.to_text()).unwrap(), g);
        assert!(BallGram::from_text("nonsense").is_err());
    }

    #[test]
    fn bad_inputs() {
        let t2 = Manifold::torus(2).unwrap();
        let spec = eigenspace(&t2, 1).unwrap();
        let ball = GeodesicBall {
            center: Point::torus(&[0.0, 0.0]),
            radius: PI,
        };
        assert!(matches!(ball_gram_torus_exact(&spec, &ball), Err(Error::OutOfRange { .. })));
        let spec = eigenspace(&s2(), 2).unwrap();
        assert!(spec.manifold().is_sphere());
        assert!(quadratic_form(&DMatrix::identity(5, 5), &[Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn deterministic() {
        let spec = eigenspace(&s2(), 20).unwrap();
        let c = Point::from_angles(0.9, 0.1);
        let a = ball_gram_at(&spec, &c, 0.4).unwrap();
        let b = ball_gram_at(&spec, &c, 0.4).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }
}
