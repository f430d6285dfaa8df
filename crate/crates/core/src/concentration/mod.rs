//! Concentration of the ball-mass functional and equidistribution defects.

mod discrepancy;
mod mass;

pub use discrepancy::{
    center_perturbation_bound, discrepancy_at_centers, discrepancy_batch, discrepancy_sup, scale_radius,
    scaling_fit, DiscrepancyRecord, DiscrepancyReport, ExperimentConfig, ScalingFit, RECORD_CSV_HEADER,
};
pub use mass::{
    ball_mass, default_tail_grid, levy_tail_check, levy_tail_check_dim, lipschitz_estimate, mean_oracle,
    median_sorted, pairwise_sum, sample_masses, sample_masses_mixed, sample_stats, sample_stats_with,
    sphere_geodesic, variance_oracle, LevyReport, LevyRow, MassStats, BATCH, BOOTSTRAP_RESAMPLES, CLAMP_TOL,
};

#[cfg(test)]
mod tests;
