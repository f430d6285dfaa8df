//! Sampling from the product Haar model on eigenbases, and the exact
//! pointwise law of a random eigenfunction.

mod haar;
mod law;
mod seed;

pub use haar::{
    haar_unitary, haar_unitary_from_rng, random_basis, random_unit_coeffs, unitarity_defect, RandomBasisSample,
    SeedProvenance,
};
pub use law::{ks_distance, ks_distance_cdf, ks_two_sample, survival_law, SurvivalLaw};
pub use seed::SeedSpec;
#[cfg(test)]
pub(crate) use seed::splitmix64;
