//! Run configuration: TOML in, fully resolved values echoed back out.

use std::path::{Path, PathBuf};

use equidist::concentration::ExperimentConfig;
use equidist::manifold::{covering_constant, Manifold, MAX_TORUS_DIM};
use equidist::spectral::eigenspace;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub manifold: ManifoldSection,
    pub spectrum: SpectrumSection,
    pub experiment: ExperimentSection,
    pub kernel_check: KernelSection,
    pub law_check: LawSection,
    pub covering_check: CoveringSection,
    pub scaling: ScalingSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldName {
    Sphere2,
    Torus,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ManifoldSection {
    pub kind: ManifoldName,
    /// Torus dimension; ignored on the sphere.
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    /// Sphere degrees or torus energies.
    pub indices: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// Floor on the covering radius λ^(−γ).
    pub s_min: f64,
    /// Random bases per eigenspace.
    pub bases: u32,
    /// Monte Carlo draws for the mass statistics.
    pub samples: usize,
    pub mean_tolerance_se: f64,
    pub trace_tolerance: f64,
    /// Require the median max-defect to drop from the first to the last eigenspace.
    pub require_trend: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    /// Defaults to degrees 1..=20 on the sphere and the spectrum list on a torus.
    pub indices: Option<Vec<u64>>,
    pub points: usize,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LawSection {
    pub index: u64,
    pub samples: usize,
    pub points: usize,
    pub threshold: f64,
    /// Threshold is raised to this multiple of N^(−1/2) for small N.
    pub low_power_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CoveringSection {
    pub radii: Vec<f64>,
    pub samples: usize,
    pub max_centers: usize,
    /// Upper bound on N·sⁿ; defaults to the manifold's covering constant.
    pub max_density: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    /// Defaults to the spectrum list.
    pub indices: Option<Vec<u64>>,
    pub samples: usize,
    /// Admissible slope of log Var(F) against log m; defaults to
    /// −(1 + nα) ± 0.3.
    pub variance_slope: Option<[f64; 2]>,
    pub gap_slope_max: f64,
    pub lipschitz: f64,
    /// Replace measured statistics by m^(−1) to test the fitting path.
    pub synthetic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            manifold: ManifoldSection::default(),
            spectrum: SpectrumSection::default(),
            experiment: ExperimentSection::default(),
            kernel_check: KernelSection::default(),
            law_check: LawSection::default(),
            covering_check: CoveringSection::default(),
            scaling: ScalingSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for ManifoldSection {
    fn default() -> Self {
        Self {
            kind: ManifoldName::Sphere2,
            dim: 2,
        }
    }
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            indices: vec![8, 16, 32, 64, 96],
        }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            beta: None,
            gamma: None,
            s_min: 0.4,
            bases: 20,
            samples: 5000,
            mean_tolerance_se: 4.0,
            trace_tolerance: 1e-8,
            require_trend: true,
        }
    }
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            indices: None,
            points: 200,
            tolerance: None,
        }
    }
}

impl Default for LawSection {
    fn default() -> Self {
        Self {
            index: 10,
            samples: 100_000,
            points: 2,
            threshold: 0.01,
            low_power_factor: 1.5,
        }
    }
}

impl Default for CoveringSection {
    fn default() -> Self {
        Self {
            radii: vec![0.05, 0.1, 0.2, 0.4],
            samples: 100_000,
            max_centers: equidist::manifold::DEFAULT_MAX_CENTERS,
            max_density: None,
        }
    }
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            indices: None,
            samples: 10_000,
            variance_slope: None,
            gap_slope_max: -0.35,
            lipschitz: 2.0,
            synthetic: false,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("equidist-out") }
    }
}

/// Parses TOML, reporting the line of any syntax or type error.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        CliError::Config {
            field: line.map(|l| format!("line {l}")),
            message: e.message().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl RunConfig {
    pub fn manifold(&self) -> CliResult<Manifold> {
        match self.manifold.kind {
            ManifoldName::Sphere2 => Ok(Manifold::sphere2()),
            ManifoldName::Torus => Manifold::torus(self.manifold.dim)
                .map_err(|_| CliError::config("manifold.dim", format!("torus dimension must be 2..={MAX_TORUS_DIM}"))),
        }
    }

    pub fn experiment(&self) -> CliResult<ExperimentConfig> {
        let m = self.manifold()?;
        ExperimentConfig::new(&m, self.experiment.alpha, self.experiment.beta, self.experiment.gamma).map_err(|e| {
            let field = match &e {
                equidist::Error::OutOfRange { what, .. } => format!("experiment.{what}"),
                _ => "experiment".into(),
            };
            CliError::config(field, e.to_string())
        })
    }

    pub fn kernel_indices(&self) -> CliResult<Vec<u64>> {
        Ok(match (&self.kernel_check.indices, self.manifold()?.is_sphere()) {
            (Some(v), _) => v.clone(),
            (None, true) => (1..=20).collect(),
            (None, false) => self.spectrum.indices.clone(),
        })
    }

    pub fn kernel_tolerance(&self) -> CliResult<f64> {
        Ok(self
            .kernel_check
            .tolerance
            .unwrap_or(if self.manifold()?.is_sphere() { 1e-10 } else { 1e-14 }))
    }

    pub fn scaling_indices(&self) -> Vec<u64> {
        self.scaling.indices.clone().unwrap_or_else(|| self.spectrum.indices.clone())
    }

    pub fn max_density(&self) -> CliResult<f64> {
        Ok(self.covering_check.max_density.unwrap_or(covering_constant(&self.manifold()?)))
    }

    /// Checks every invariant and fills the derived defaults.
    pub fn resolve(mut self) -> CliResult<Self> {
        let m = self.manifold()?;
        let exp = self.experiment()?;
        self.experiment.beta = Some(exp.beta);
        self.experiment.gamma = Some(exp.gamma);
        if self.spectrum.indices.is_empty() {
            return Err(CliError::config("spectrum.indices", "at least one eigenspace is required"));
        }
        let mut all: Vec<(&str, u64)> = self.spectrum.indices.iter().map(|&k| ("spectrum.indices", k)).collect();
        let kernel = self.kernel_indices()?;
        let scaling = self.scaling_indices();
        all.extend(kernel.iter().map(|&k| ("kernel_check.indices", k)));
        all.extend(scaling.iter().map(|&k| ("scaling.indices", k)));
        all.push(("law_check.index", self.law_check.index));
        for (field, k) in all {
            eigenspace(&m, k).map_err(|e| CliError::config(field, e.to_string()))?;
        }
        let e = &self.experiment;
        if e.samples < 100 {
            return Err(CliError::config("experiment.samples", "N must be at least 100"));
        }
        if self.scaling.samples < 100 {
            return Err(CliError::config("scaling.samples", "N must be at least 100"));
        }
        if self.law_check.samples < 100 {
            return Err(CliError::config("law_check.samples", "N must be at least 100"));
        }
        if e.bases == 0 {
            return Err(CliError::config("experiment.bases", "need at least one basis"));
        }
        if !(e.s_min > 0.0) {
            return Err(CliError::config("experiment.s_min", "must be positive"));
        }
        if self.kernel_check.points == 0 {
            return Err(CliError::config("kernel_check.points", "must be positive"));
        }
        if self.law_check.points == 0 {
            return Err(CliError::config("law_check.points", "must be positive"));
        }
        if !(self.law_check.threshold > 0.0 && self.law_check.threshold < 1.0) {
            return Err(CliError::config("law_check.threshold", "must lie in (0, 1)"));
        }
        if self.covering_check.radii.iter().any(|&s| !(s > 0.0 && s < std::f64::consts::PI)) {
            return Err(CliError::config("covering_check.radii", "radii must lie in (0, pi)"));
        }
        if self.covering_check.samples == 0 {
            return Err(CliError::config("covering_check.samples", "must be positive"));
        }
        let centre = -(1.0 + m.dim() as f64 * exp.alpha);
        let [lo, hi] = *self.scaling.variance_slope.get_or_insert([centre - 0.3, centre + 0.3]);
        if !(lo < hi) {
            return Err(CliError::config("scaling.variance_slope", "expected [low, high] with low < high"));
        }
        if !(self.scaling.lipschitz > 0.0) {
            return Err(CliError::config("scaling.lipschitz", "must be positive"));
        }
        for k in &self.spectrum.indices {
            let spec = eigenspace(&m, *k)?;
            let r = exp.radius(spec.multiplicity());
            if !(r < m.injectivity_radius()) {
                return Err(CliError::config(
                    "experiment.alpha",
                    format!("ball radius m^(-alpha) = {r} is not below the injectivity radius for index {k}"),
                ));
            }
        }
        self.covering_check.max_density = Some(self.max_density()?);
        self.kernel_check.tolerance = Some(self.kernel_tolerance()?);
        self.kernel_check.indices = Some(kernel);
        self.scaling.indices = Some(scaling);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = RunConfig::default().resolve().unwrap();
        assert_eq!(c.experiment.beta, Some(0.45));
        assert_eq!(c.experiment.gamma, Some(3.0));
        assert_eq!(c.covering_check.max_density, Some(20.0));
        let [lo, hi] = c.scaling.variance_slope.unwrap();
        assert!((lo + 1.7).abs() < 1e-12 && (hi + 1.1).abs() < 1e-12);
    }

    #[test]
    fn negative_degree_reports_line() {
        let err = parse_config("seed = 1\n[spectrum]\nindices = [3, -1]\n").unwrap_err();
        match err {
            CliError::Config { field, .. } => assert_eq!(field.as_deref(), Some("line 3")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_alpha_names_field() {
        let c = parse_config("[experiment]\nalpha = 0.3\n").unwrap();
        match c.resolve().unwrap_err() {
            CliError::Config { field, .. } => assert_eq!(field.as_deref(), Some("experiment.alpha")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_torus_energy_rejected() {
        let c = parse_config("[manifold]\nkind = \"torus\"\ndim = 2\n[spectrum]\nindices = [3]\n").unwrap();
        assert_eq!(c.resolve().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("[experiment]\nalfa = 0.1\n").is_err());
    }
}
