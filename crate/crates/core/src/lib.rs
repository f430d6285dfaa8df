//! Numerical laboratory for random orthonormal eigenbases on the round sphere
//! S² and on flat tori Tⁿ = ℝⁿ/(2πℤ)ⁿ.
//!
//! The crate builds eigenspaces of the Laplacian, samples Haar-random bases of
//! each eigenspace, and measures how evenly the L² mass of the sampled
//! eigenfunctions spreads over small geodesic balls.
//!
//! * [`manifold`]: points, geodesic distance, ball/annulus volumes, coverings.
//! * [`quadrature`]: Gauss–Legendre rules, spherical-cap product rules, Bessel J.
//! * [`spectral`]: eigenspaces, basis evaluation, projector kernel, ball Gram matrices.
//! * [`randombasis`]: seeded Haar unitaries, unit coefficient vectors, the
//!   pointwise value law and Kolmogorov–Smirnov distances.
//! * [`concentration`]: the ball-mass functional and its statistics, Lipschitz
//!   and Levy tail checks, discrepancy over coverings, scaling fits.

pub mod concentration;
pub mod error;
pub mod manifold;
pub mod quadrature;
pub mod randombasis;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
