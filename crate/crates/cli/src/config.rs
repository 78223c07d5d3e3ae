//! TOML experiment configuration. Unknown keys are rejected so a typo in a
//! sweep file fails fast instead of silently running the wrong physics.

use std::path::Path;

use serde::Deserialize;

use entsim_core::dynamics::PropagatorSource;
use entsim_core::model::PhysicalParams;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsSection,
    pub grid: GridSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub readout: Option<ReadoutSection>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    /// Molecular transition frequency in units of g.
    pub omega: f64,
    /// Cavity frequency in units of g; defaults to omega (resonance).
    #[serde(default)]
    pub omega0: Option<f64>,
    /// Molecules in ensemble 1.
    pub n1: u64,
    /// Molecules in ensemble 2; defaults to n1.
    #[serde(default)]
    pub n2: Option<u64>,
    /// Relative field phase in radians.
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub nbar_ensembles: f64,
    #[serde(default)]
    pub nbar_cavity: f64,
}

impl ParamsSection {
    pub fn to_params(&self) -> PhysicalParams {
        PhysicalParams {
            omega: self.omega,
            omega0: self.omega0.unwrap_or(self.omega),
            g: 1.0,
            n1: self.n1,
            n2: self.n2.unwrap_or(self.n1),
            phi: self.phi,
            nbar_ensembles: self.nbar_ensembles,
            nbar_cavity: self.nbar_cavity,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Start time (units of 1/g).
    pub start: f64,
    /// Stop time (units of 1/g).
    pub stop: f64,
    /// Number of grid points (>= 2).
    pub points: usize,
}

impl GridSection {
    pub fn times(&self) -> Vec<f64> {
        entsim_core::dynamics::linspace(self.start, self.stop, self.points)
    }
}

/// Parameter to sweep over; one curve per value.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Omega,
    NbarEnsembles,
    Phi,
    N,
}

impl SweepParameter {
    pub fn apply(&self, base: &PhysicalParams, value: f64) -> PhysicalParams {
        let mut p = base.clone();
        match self {
            SweepParameter::Omega => {
                // resonance is preserved when the base was resonant
                let resonant = base.omega == base.omega0;
                p.omega = value;
                if resonant {
                    p.omega0 = value;
                }
            }
            SweepParameter::NbarEnsembles => p.nbar_ensembles = value,
            SweepParameter::Phi => p.phi = value,
            SweepParameter::N => {
                p.n1 = value as u64;
                p.n2 = value as u64;
            }
        }
        p
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Omega => "omega",
            SweepParameter::NbarEnsembles => "nbar_ensembles",
            SweepParameter::Phi => "phi",
            SweepParameter::N => "n",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv: String,
    pub svg: String,
    pub summary: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            csv: "series.csv".into(),
            svg: "series.svg".into(),
            summary: "summary.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PropagatorChoice {
    NormalMode,
    Expm,
}

impl From<PropagatorChoice> for PropagatorSource {
    fn from(c: PropagatorChoice) -> Self {
        match c {
            PropagatorChoice::NormalMode => PropagatorSource::NormalMode,
            PropagatorChoice::Expm => PropagatorSource::MatrixExponential,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub propagator: PropagatorChoice,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            propagator: PropagatorChoice::NormalMode,
            seed: 1,
            format: OutputFormat::Csv,
        }
    }
}

/// Exact-oracle convergence options (the `oracle` verb).
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    /// Molecules per ensemble for the convergence ladder.
    pub n_ladder: Vec<u64>,
    /// Starting photon cutoff; doubled until moments converge.
    pub initial_photon_cutoff: u32,
    /// Dimensionless evolution time gt.
    pub gt: f64,
    /// Instability margin: the effective coupling is margin * critical at
    /// the largest ladder member.
    pub margin: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            n_ladder: vec![2, 4, 8],
            initial_photon_cutoff: 10,
            gt: 0.01,
            margin: 0.94,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutSection {
    pub eta1: f64,
    pub eta2: f64,
    pub samples_per_setting: usize,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        Self {
            eta1: 1.0,
            eta2: 1.0,
            samples_per_setting: 100_000,
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(toml::de::Error),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(ConfigError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.points < 2 {
            return Err(ConfigError::Invalid(format!(
                "grid.points must be >= 2, got {}",
                self.grid.points
            )));
        }
        if !(self.grid.stop > self.grid.start) || self.grid.start < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "grid must satisfy 0 <= start < stop, got [{}, {}]",
                self.grid.start, self.grid.stop
            )));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(ConfigError::Invalid("sweep.values is empty".into()));
            }
            if matches!(sweep.parameter, SweepParameter::N)
                && sweep.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0)
            {
                return Err(ConfigError::Invalid(
                    "sweep over n requires positive integer values".into(),
                ));
            }
        }
        self.params
            .to_params()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(r) = &self.readout {
            if !(0.0..=1.0).contains(&r.eta1) || !(0.0..=1.0).contains(&r.eta2) {
                return Err(ConfigError::Invalid(
                    "readout efficiencies must lie in [0, 1]".into(),
                ));
            }
            if r.samples_per_setting < 2 {
                return Err(ConfigError::Invalid(
                    "readout.samples_per_setting must be >= 2".into(),
                ));
            }
        }
        if let Some(o) = &self.oracle {
            if o.n_ladder.is_empty() {
                return Err(ConfigError::Invalid("oracle.n_ladder is empty".into()));
            }
            if !(o.margin > 0.0 && o.margin < 1.0) {
                return Err(ConfigError::Invalid(format!(
                    "oracle.margin must lie in (0, 1), got {}",
                    o.margin
                )));
            }
            if !(o.gt > 0.0) {
                return Err(ConfigError::Invalid("oracle.gt must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::from_toml_str(
            "[params]\nomega = 300.0\nn1 = 10000\n[grid]\nstart = 0.0\nstop = 0.1\npoints = 2001\n",
        )
        .unwrap();
        let p = cfg.params.to_params();
        assert_eq!(p.omega0, 300.0);
        assert_eq!(p.n2, 10_000);
        assert_eq!(cfg.run.seed, 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str(
            "[params]\nomega = 300.0\nn1 = 10000\nomga = 2.0\n[grid]\nstart = 0.0\nstop = 0.1\npoints = 3\n",
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn grid_validation_fails_fast() {
        let err = ExperimentConfig::from_toml_str(
            "[params]\nomega = 300.0\nn1 = 10000\n[grid]\nstart = 0.0\nstop = 0.1\npoints = 1\n",
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }

    #[test]
    fn sweep_requires_integer_n() {
        let err = ExperimentConfig::from_toml_str(
            "[params]\nomega = 300.0\nn1 = 100\n[grid]\nstart = 0.0\nstop = 0.1\npoints = 3\n\
             [sweep]\nparameter = \"n\"\nvalues = [10.5]\n",
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }
}
