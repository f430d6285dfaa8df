//! Laplace eigenspaces, their canonical bases, and ball Gram matrices.

mod basis;
mod eigenspace;
mod gram;

pub use basis::{
    eval_basis, kernel_constant, kernel_deviation, kernel_diag, linf_bound, BasisEvaluation, BasisEvaluator,
    SphericalHarmonics,
};
pub use eigenspace::{
    eigenspace, enumerate_energies, lattice_points, multiplicity_envelope, spectrum_csv, EigenspaceSpec,
    MAX_SPHERE_DEGREE,
};
pub use gram::{
    ball_gram, ball_gram_at, ball_gram_quadrature, ball_gram_quadrature_with, ball_gram_torus_exact,
    euclidean_ball_fourier, quadratic_form, BallGram, CLOSED_FORM,
};
