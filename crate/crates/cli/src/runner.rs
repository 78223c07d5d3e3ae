//! Sweep execution and artifact writing.
//!
//! CSV is the authoritative output. Rows are ordered by (curve_id, gt) and
//! floats are printed with a fixed 12-digit scientific format, so reruns
//! with identical config and seed are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use entsim_core::dynamics::{PropagatorSource, SymplecticPropagator};
use entsim_core::entanglement::{entanglement_trajectory, first_peak, PEAK_THRESHOLD};
use entsim_core::model::{initial_state, PhysicalParams, QuadraticHamiltonian};
use entsim_core::model::{ENSEMBLE_1, ENSEMBLE_2};
use entsim_core::oracle;
use entsim_core::readout;
use entsim_core::symplectic::GaussianState;
use entsim_core::Error as CoreError;

use crate::config::{ExperimentConfig, OutputFormat, SweepParameter};
use crate::svg;

/// First-peak consistency window (units of 1/g): the detected t* of the
/// reference run is expected inside [1e-3, 5e-2].
pub const TSTAR_WINDOW: (f64, f64) = (1e-3, 5e-2);

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Physics(CoreError),
    Numerical(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Physics(e) => write!(f, "physics rejection: {e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    /// 2 = config, 3 = physics rejection, 4 = numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::UnstableRegime { .. } => CliError::Physics(e),
            CoreError::NumericalDegeneracy { .. }
            | CoreError::StepTooLarge(_)
            | CoreError::ConvergenceFailure(_)
            | CoreError::IllConditioned(_) => CliError::Numerical(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Fixed scientific float format shared by every artifact writer.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.12e}")
}

pub struct RunArtifacts {
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub summary_path: PathBuf,
}

struct CurveResult {
    curve_id: String,
    params: PhysicalParams,
    times: Vec<f64>,
    logneg: Vec<f64>,
    hp_ratio: Vec<f64>,
    residuals: Vec<f64>,
    hp_max: f64,
}

pub const SERIES_HEADER: &str =
    "curve_id,omega_over_g,N,nbar_ens,nbar_cav,phi,gt,logneg_bits,hp_ratio_max,symplectic_residual";

pub const SUMMARY_HEADER: &str = "curve_id,omega_over_g,N,nbar_ens,nbar_cav,phi,t_star,lnn_at_peak,\
max_lnn,onset_gt,hp_max_ratio,max_symplectic_residual,t_star_in_window";

/// Runs the (possibly swept) entanglement time series described by `cfg` and writes
/// the CSV/SVG/summary artifacts into `out_dir`.
pub fn run_series(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunArtifacts, CliError> {
    fs::create_dir_all(out_dir)?;
    let times = cfg.grid.times();
    let base = cfg.params.to_params();
    let source: PropagatorSource = cfg.run.propagator.into();

    let curve_params: Vec<(String, PhysicalParams)> = match &cfg.sweep {
        None => vec![(curve_label(None, &base), base.clone())],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| {
                let p = sweep.parameter.apply(&base, v);
                (curve_label(Some((sweep.parameter, v)), &p), p)
            })
            .collect(),
    };

    let mut curves = Vec::with_capacity(curve_params.len());
    for (curve_id, params) in curve_params {
        curves.push(run_curve(curve_id, params, &times, source)?);
    }

    let mut csv_path = None;
    let mut svg_path = None;
    if matches!(cfg.run.format, OutputFormat::Csv | OutputFormat::Both) {
        let path = out_dir.join(&cfg.output.csv);
        fs::write(&path, series_csv(&curves))?;
        csv_path = Some(path);
    }
    if matches!(cfg.run.format, OutputFormat::Svg | OutputFormat::Both) {
        let path = out_dir.join(&cfg.output.svg);
        let series: Vec<(&str, &[f64], &[f64])> = curves
            .iter()
            .map(|c| (c.curve_id.as_str(), c.times.as_slice(), c.logneg.as_slice()))
            .collect();
        fs::write(
            &path,
            svg::polyline_plot(&series, "gt", "logarithmic negativity (bits)"),
        )?;
        svg_path = Some(path);
    }
    let summary_path = out_dir.join(&cfg.output.summary);
    fs::write(&summary_path, summary_csv(&curves))?;
    Ok(RunArtifacts {
        csv_path,
        svg_path,
        summary_path,
    })
}

fn curve_label(sweep: Option<(SweepParameter, f64)>, params: &PhysicalParams) -> String {
    match sweep {
        Some((p, v)) => format!("{}={}", p.name(), trim_float(v)),
        None => format!("omega={}", trim_float(params.omega)),
    }
}

fn trim_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn run_curve(
    curve_id: String,
    params: PhysicalParams,
    times: &[f64],
    source: PropagatorSource,
) -> Result<CurveResult, CliError> {
    let h = QuadraticHamiltonian::new(&params)?;
    let state0 = initial_state(&params)?;
    let traj = entanglement_trajectory(&h, &state0, times, source)?;
    let logneg = traj.log_negativities();
    let hp_ratio: Vec<f64> = traj
        .hp_report
        .ratios
        .iter()
        .map(|r| r[0].max(r[1]))
        .collect();
    let residuals: Vec<f64> = times
        .iter()
        .map(|&t| {
            SymplecticPropagator::from_source(&h, t, source).map(|p| p.symplectic_residual())
        })
        .collect::<Result<_, _>>()?;
    Ok(CurveResult {
        curve_id,
        params,
        times: times.to_vec(),
        logneg,
        hp_ratio,
        residuals,
        hp_max: traj.hp_report.max_ratio,
    })
}

fn series_csv(curves: &[CurveResult]) -> String {
    let mut out = String::with_capacity(curves.len() * 80 * 2048);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for c in curves {
        for k in 0..c.times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.curve_id,
                fmt_f64(c.params.omega),
                c.params.n1,
                fmt_f64(c.params.nbar_ensembles),
                fmt_f64(c.params.nbar_cavity),
                fmt_f64(c.params.phi),
                fmt_f64(c.times[k]),
                fmt_f64(c.logneg[k]),
                fmt_f64(c.hp_ratio[k]),
                fmt_f64(c.residuals[k]),
            );
        }
    }
    out
}

fn summary_csv(curves: &[CurveResult]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for c in curves {
        let peak = first_peak(&c.times, &c.logneg);
        let max_lnn = c.logneg.iter().cloned().fold(0.0f64, f64::max);
        let onset = c
            .times
            .iter()
            .zip(&c.logneg)
            .find(|(_, &v)| v > PEAK_THRESHOLD)
            .map(|(&t, _)| t);
        let max_residual = c.residuals.iter().cloned().fold(0.0, f64::max);
        let (t_star, lnn_at_peak, in_window) = match peak {
            Some(p) => (
                fmt_f64(p.time),
                fmt_f64(p.log_negativity),
                (p.time >= TSTAR_WINDOW.0 && p.time <= TSTAR_WINDOW.1).to_string(),
            ),
            None => ("".into(), "".into(), "".into()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.curve_id,
            fmt_f64(c.params.omega),
            c.params.n1,
            fmt_f64(c.params.nbar_ensembles),
            fmt_f64(c.params.nbar_cavity),
            fmt_f64(c.params.phi),
            t_star,
            lnn_at_peak,
            fmt_f64(max_lnn),
            onset.map(fmt_f64).unwrap_or_default(),
            fmt_f64(c.hp_max),
            fmt_f64(max_residual),
            in_window,
        );
    }
    out
}

/// Exact-oracle convergence ladder: the effective coupling
/// G = 2 g sqrt(N omega omega0) is held fixed across the ladder by setting
/// omega_N = G / (2 sqrt(N)) at resonance, with the instability margin
/// binding at the largest ladder member.
pub struct OracleRow {
    pub n: u64,
    pub omega_over_g: f64,
    pub photon_cutoff: u32,
    pub cutoff_change: f64,
    pub max_abs_dev: f64,
}

pub struct OracleOutcome {
    pub rows: Vec<OracleRow>,
    pub monotone_decreasing: bool,
    pub csv_path: PathBuf,
}

pub fn oracle_ladder_params(n: u64, n_max: u64, margin: f64) -> PhysicalParams {
    // G = 4 sqrt(2) N_max / margin keeps sqrt(2) G = margin * omega^2 exactly
    // at N_max; smaller ladder members sit deeper inside the stable region.
    let g_eff = 4.0 * std::f64::consts::SQRT_2 * (n_max as f64) / margin;
    let omega = g_eff / (2.0 * (n as f64).sqrt());
    PhysicalParams::resonant(omega, n)
}

pub fn run_oracle(cfg: &ExperimentConfig, out_dir: &Path) -> Result<OracleOutcome, CliError> {
    fs::create_dir_all(out_dir)?;
    let opts = cfg.oracle.clone().unwrap_or_default();
    let n_max = *opts.n_ladder.iter().max().expect("validated non-empty");
    let mut rows = Vec::with_capacity(opts.n_ladder.len());
    for &n in &opts.n_ladder {
        let params = oracle_ladder_params(n, n_max, opts.margin);
        let h = QuadraticHamiltonian::new(&params)?;
        let state0 = initial_state(&params)?;
        let prop = SymplecticPropagator::normal_mode(&h, opts.gt)?;
        let gauss = entsim_core::dynamics::evolve(&state0, &prop)?;
        let converged =
            oracle::converged_moments(&params, opts.gt, opts.initial_photon_cutoff)?;
        let dev = two_ensemble_deviation(&converged.record, &gauss);
        rows.push(OracleRow {
            n,
            omega_over_g: params.omega,
            photon_cutoff: converged.photon_cutoff,
            cutoff_change: converged.cutoff_change,
            max_abs_dev: dev,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].max_abs_dev < w[0].max_abs_dev);
    let csv_path = out_dir.join("oracle_convergence.csv");
    let mut out = String::new();
    out.push_str("N,omega_over_g,gt,photon_cutoff,cutoff_change,max_abs_dev\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.omega_over_g),
            fmt_f64(opts.gt),
            r.photon_cutoff,
            fmt_f64(r.cutoff_change),
            fmt_f64(r.max_abs_dev),
        );
    }
    let _ = writeln!(out, "# monotone_decreasing,{monotone}");
    fs::write(&csv_path, out)?;
    Ok(OracleOutcome {
        rows,
        monotone_decreasing: monotone,
        csv_path,
    })
}

/// Max-abs deviation between the exact and Gaussian two-ensemble covariance
/// blocks (x1,p1,x2,p2).
pub fn two_ensemble_deviation(record: &oracle::MomentRecord, gauss: &GaussianState) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            dev = dev.max((record.cov[(i, j)] - gauss.cov()[(i, j)]).abs());
        }
    }
    dev
}

/// Homodyne readout demo on the first-peak state of the configured run.
pub struct ReadoutOutcome {
    pub true_log_negativity: f64,
    pub estimate: readout::LogNegativityEstimate,
    pub csv_path: PathBuf,
}

pub fn run_readout(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ReadoutOutcome, CliError> {
    fs::create_dir_all(out_dir)?;
    let opts = cfg.readout.clone().unwrap_or_default();
    let params = cfg.params.to_params();
    let state = first_peak_reduced_state(&params, &cfg.grid.times(), cfg.run.propagator.into())?;
    let truth = entsim_core::entanglement::log_negativity(&state, &[ENSEMBLE_1], &[ENSEMBLE_2])?
        .log_negativity;
    let dimensionless = state.to_dimensionless(&[params.omega, params.omega])?;
    let channel = readout::ReadoutChannel::new(opts.eta1, opts.eta2)?;
    let measured = readout::apply_readout_channel(&dimensionless, &channel)?;
    let record = readout::record_homodyne(&measured, opts.samples_per_setting, cfg.run.seed)?;
    let rec = readout::reconstruct_covariance(&record, &channel)?;
    let estimate = readout::estimate_log_negativity(&rec)?;

    let csv_path = out_dir.join("readout.csv");
    let mut out = String::new();
    out.push_str("quantity,value\n");
    let _ = writeln!(out, "true_logneg_bits,{}", fmt_f64(truth));
    let _ = writeln!(out, "estimated_logneg_bits,{}", fmt_f64(estimate.log_negativity));
    let _ = writeln!(out, "logneg_std_error,{}", fmt_f64(estimate.std_error));
    let _ = writeln!(out, "min_pt_symplectic,{}", fmt_f64(estimate.min_pt_symplectic));
    let _ = writeln!(out, "min_pt_std_error,{}", fmt_f64(estimate.min_pt_std_error));
    let _ = writeln!(out, "eta1,{}", fmt_f64(opts.eta1));
    let _ = writeln!(out, "eta2,{}", fmt_f64(opts.eta2));
    let _ = writeln!(out, "samples_per_setting,{}", opts.samples_per_setting);
    let _ = writeln!(out, "seed,{}", cfg.run.seed);
    let _ = writeln!(out, "entangled_at_3_sigma,{}", estimate.entangled_at_sigma(3.0));
    fs::write(&csv_path, out)?;
    Ok(ReadoutOutcome {
        true_log_negativity: truth,
        estimate,
        csv_path,
    })
}

/// Reduced two-ensemble state at the first entanglement peak of the run.
pub fn first_peak_reduced_state(
    params: &PhysicalParams,
    times: &[f64],
    source: PropagatorSource,
) -> Result<GaussianState, CliError> {
    let h = QuadraticHamiltonian::new(params)?;
    let state0 = initial_state(params)?;
    let traj = entanglement_trajectory(&h, &state0, times, source)?;
    let series = traj.log_negativities();
    let peak = first_peak(times, &series).ok_or_else(|| {
        CliError::Physics(CoreError::UnsupportedState(
            "the configured run never develops an entanglement peak".into(),
        ))
    })?;
    let prop = SymplecticPropagator::from_source(&h, peak.time, source)?;
    let evolved = entsim_core::dynamics::evolve(&state0, &prop)?;
    Ok(evolved.partial_trace(&[ENSEMBLE_1, ENSEMBLE_2])?)
}
