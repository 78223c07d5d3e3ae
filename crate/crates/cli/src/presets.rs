//! Built-in experiment presets.

use crate::config::{
    ExperimentConfig, GridSection, OracleSection, OutputFormat, OutputSection, ParamsSection,
    PropagatorChoice, ReadoutSection, RunSection, SweepParameter, SweepSection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Three vacuum curves, omega/g in {300, 500, 2000}, N = 1e4.
    Fig2,
    /// Four thermal curves at omega = 300 g: nbar in {0, 0.05, 0.1, 0.2} on
    /// the ensembles, cavity in vacuum.
    Fig3,
    /// Exact-vs-Gaussian covariance convergence over N in {2, 4, 8}.
    OracleConvergence,
    /// Homodyne reconstruction of the omega = 300 g first-peak state.
    ReadoutDemo,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fig2" => Some(Self::Fig2),
            "fig3" => Some(Self::Fig3),
            "oracle-convergence" => Some(Self::OracleConvergence),
            "readout-demo" => Some(Self::ReadoutDemo),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 4] = ["fig2", "fig3", "oracle-convergence", "readout-demo"];

    pub fn config(&self) -> ExperimentConfig {
        let reference_params = ParamsSection {
            omega: 300.0,
            omega0: None,
            n1: 10_000,
            n2: None,
            phi: 0.0,
            nbar_ensembles: 0.0,
            nbar_cavity: 0.0,
        };
        let reference_grid = GridSection {
            start: 0.0,
            stop: 0.1,
            points: 2001,
        };
        let run = RunSection {
            propagator: PropagatorChoice::NormalMode,
            seed: 1,
            format: OutputFormat::Csv,
        };
        match self {
            Preset::Fig2 => ExperimentConfig {
                params: reference_params,
                grid: reference_grid,
                sweep: Some(SweepSection {
                    parameter: SweepParameter::Omega,
                    values: vec![300.0, 500.0, 2000.0],
                }),
                output: OutputSection {
                    csv: "fig2.csv".into(),
                    svg: "fig2.svg".into(),
                    summary: "fig2_summary.csv".into(),
                },
                run,
                oracle: None,
                readout: None,
            },
            Preset::Fig3 => ExperimentConfig {
                params: reference_params,
                grid: reference_grid,
                sweep: Some(SweepSection {
                    parameter: SweepParameter::NbarEnsembles,
                    values: vec![0.0, 0.05, 0.1, 0.2],
                }),
                output: OutputSection {
                    csv: "fig3.csv".into(),
                    svg: "fig3.svg".into(),
                    summary: "fig3_summary.csv".into(),
                },
                run,
                oracle: None,
                readout: None,
            },
            Preset::OracleConvergence => ExperimentConfig {
                params: reference_params,
                grid: reference_grid,
                sweep: None,
                output: OutputSection::default(),
                run,
                oracle: Some(OracleSection::default()),
                readout: None,
            },
            Preset::ReadoutDemo => ExperimentConfig {
                params: reference_params,
                grid: reference_grid,
                sweep: None,
                output: OutputSection::default(),
                run,
                oracle: None,
                readout: Some(ReadoutSection {
                    eta1: 0.8,
                    eta2: 0.8,
                    samples_per_setting: 100_000,
                }),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_preset_configs_validate() {
        for name in Preset::NAMES {
            let preset = Preset::parse(name).unwrap();
            preset.config().validate().unwrap();
        }
        assert!(Preset::parse("fig4").is_none());
    }
}
