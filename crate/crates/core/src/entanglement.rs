//! Logarithmic negativity of the reduced two-ensemble state.
//!
//! lnN = -sum_j log2 min(1, |gamma~_j|), where gamma~_j are the symplectic
//! eigenvalues after partial transposition of one party. The value is in
//! bits; a nats display is a presentation choice left to callers.

use crate::dynamics::{trajectory, PropagatorSource};
use crate::error::{Error, Result};
use crate::model::{hp_validity, HpValidityReport, QuadraticHamiltonian};
use crate::model::{ENSEMBLE_1, ENSEMBLE_2};
use crate::symplectic::GaussianState;

/// Peaks below this value (in bits) are treated as noise.
pub const PEAK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct EntanglementResult {
    /// Logarithmic negativity in bits (base-2), non-negative.
    pub log_negativity: f64,
    /// Symplectic eigenvalues of the partially transposed covariance,
    /// sorted ascending.
    pub symplectic_spectrum_pt: Vec<f64>,
    /// Purity of the reduced state, 1/sqrt(det cov).
    pub reduced_purity: f64,
}

/// Logarithmic negativity across the (A|B) bipartition of `state`.
///
/// The partial transposition acts on every mode of B.
pub fn log_negativity(
    state: &GaussianState,
    part_a: &[&str],
    part_b: &[&str],
) -> Result<EntanglementResult> {
    if part_a.is_empty() || part_b.is_empty() {
        return Err(Error::InvalidParameter(
            "both partition sides must be non-empty".into(),
        ));
    }
    if part_a.iter().any(|a| part_b.contains(a)) {
        return Err(Error::InvalidParameter(
            "partition sides must be disjoint".into(),
        ));
    }
    for label in part_a.iter().chain(part_b) {
        state.layout().index_of(label)?;
    }
    let mut pt = state.clone();
    for label in part_b {
        pt = pt.partial_transpose(label)?;
    }
    let spectrum = pt.symplectic_spectrum()?;
    let log_negativity = -spectrum
        .values
        .iter()
        .map(|&g| g.abs().min(1.0).log2())
        .sum::<f64>();
    let det = state.cov().determinant();
    let reduced_purity = if det > 0.0 { 1.0 / det.sqrt() } else { f64::NAN };
    Ok(EntanglementResult {
        log_negativity,
        symplectic_spectrum_pt: spectrum.values,
        reduced_purity,
    })
}

/// Time series of the two-ensemble entanglement along a trajectory.
#[derive(Debug, Clone)]
pub struct EntanglementTrajectory {
    pub times: Vec<f64>,
    pub results: Vec<EntanglementResult>,
    pub hp_report: HpValidityReport,
}

impl EntanglementTrajectory {
    pub fn log_negativities(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.log_negativity).collect()
    }
}

/// Evolves the initial state over `t_grid`, traces out the cavity and
/// evaluates the logarithmic negativity between the ensembles at each point.
pub fn entanglement_trajectory(
    h: &QuadraticHamiltonian,
    state0: &GaussianState,
    t_grid: &[f64],
    source: PropagatorSource,
) -> Result<EntanglementTrajectory> {
    let states = trajectory(h, state0, t_grid, source)?;
    let hp_report = hp_validity(&states, h.params())?;
    let results = states
        .iter()
        .map(|st| {
            let reduced = st.partial_trace(&[ENSEMBLE_1, ENSEMBLE_2])?;
            log_negativity(&reduced, &[ENSEMBLE_1], &[ENSEMBLE_2])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementTrajectory {
        times: t_grid.to_vec(),
        results,
        hp_report,
    })
}

/// Location and height of the first entanglement maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPeak {
    pub time: f64,
    pub log_negativity: f64,
}

/// First local maximum above [`PEAK_THRESHOLD`], refined by a parabola
/// through the three bracketing points. `None` when the series never peaks
/// (legitimate for decoupled evolution).
pub fn first_peak(times: &[f64], series: &[f64]) -> Option<FirstPeak> {
    assert_eq!(times.len(), series.len(), "times and series must align");
    for i in 1..series.len().saturating_sub(1) {
        let (y0, y1, y2) = (series[i - 1], series[i], series[i + 1]);
        if y1 > PEAK_THRESHOLD && y1 >= y0 && y1 > y2 {
            let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
            return Some(refine_parabolic(t0, t1, t2, y0, y1, y2));
        }
    }
    None
}

fn refine_parabolic(t0: f64, t1: f64, t2: f64, y0: f64, y1: f64, y2: f64) -> FirstPeak {
    // Lagrange quadratic through the three points; vertex of the parabola.
    let d0 = (t1 - t0) * (t2 - t0);
    let d1 = (t1 - t0) * (t2 - t1);
    let d2 = (t2 - t0) * (t2 - t1);
    let a = y0 / d0 - y1 / d1 + y2 / d2;
    let b = -y0 * (t1 + t2) / d0 + y1 * (t0 + t2) / d1 - y2 * (t0 + t1) / d2;
    if a >= 0.0 {
        // degenerate stencil; keep the grid point
        return FirstPeak {
            time: t1,
            log_negativity: y1,
        };
    }
    let tv = -b / (2.0 * a);
    let c = y1 - a * t1 * t1 - b * t1;
    FirstPeak {
        time: tv,
        log_negativity: a * tv * tv + b * tv + c,
    }
}
