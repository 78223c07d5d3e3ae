//! Physical parameters of the two-ensemble/cavity system and their harmonic
//! (lowest-order Holstein-Primakoff) quadratic Hamiltonian.
//!
//! The collective transition of ensemble i maps to a bosonic mode at the
//! molecular frequency omega; the coupling enters the position block as
//! kappa_i = 2 g_i sqrt(N_i omega omega0) on the (x_i, x_c) entries. The
//! relative propagation phase phi is modeled as g2 = g cos(phi), which is
//! exact at phi in {0, pi}.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symplectic::{GaussianState, ModeLayout};

pub const ENSEMBLE_1: &str = "ensemble-1";
pub const ENSEMBLE_2: &str = "ensemble-2";
pub const CAVITY: &str = "cavity";

/// Warning threshold on the Holstein-Primakoff depletion ratio
/// <p^2 + omega^2 x^2> / (2 omega N).
pub const HP_RATIO_THRESHOLD: f64 = 0.01;

/// System parameters, nondimensionalized by the Rabi coupling g
/// (frequencies in units of g, times in 1/g).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Molecular transition frequency (units of g).
    pub omega: f64,
    /// Cavity frequency (units of g).
    pub omega0: f64,
    /// Rabi coupling; 1 by construction, kept as an explicit scaling knob.
    pub g: f64,
    /// Molecules in ensemble 1.
    pub n1: u64,
    /// Molecules in ensemble 2.
    pub n2: u64,
    /// Relative field phase 2 pi omega d / c between the ensembles.
    pub phi: f64,
    /// Mean thermal occupation of each ensemble mode.
    pub nbar_ensembles: f64,
    /// Mean thermal occupation of the cavity mode.
    pub nbar_cavity: f64,
}

impl PhysicalParams {
    /// Resonant (omega0 = omega), equal-size, zero-phase, zero-temperature
    /// parameter set; the configuration used throughout the reference runs.
    pub fn resonant(omega: f64, n: u64) -> Self {
        Self {
            omega,
            omega0: omega,
            g: 1.0,
            n1: n,
            n2: n,
            phi: 0.0,
            nbar_ensembles: 0.0,
            nbar_cavity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g must be non-negative, got {}",
                self.g
            )));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidParameter(
                "ensemble sizes must be at least 1".into(),
            ));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter("phi must be finite".into()));
        }
        if !(self.nbar_ensembles >= 0.0) || !(self.nbar_cavity >= 0.0) {
            return Err(Error::InvalidParameter(
                "thermal occupations must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Per-ensemble Rabi couplings [g1, g2] = [g, g cos(phi)].
    pub fn coupling_strengths(&self) -> [f64; 2] {
        [self.g, self.g * self.phi.cos()]
    }

    /// Collective coupling kappa_i = 2 g_i sqrt(N_i omega omega0) entering
    /// the position block.
    pub fn collective_couplings(&self) -> [f64; 2] {
        let [g1, g2] = self.coupling_strengths();
        let root = (self.omega * self.omega0).sqrt();
        [
            2.0 * g1 * (self.n1 as f64).sqrt() * root,
            2.0 * g2 * (self.n2 as f64).sqrt() * root,
        ]
    }

    /// The fixed three-mode layout (ensemble-1, ensemble-2, cavity).
    pub fn layout() -> ModeLayout {
        ModeLayout::new([ENSEMBLE_1, ENSEMBLE_2, CAVITY]).expect("static labels are unique")
    }

    pub fn mode_frequencies(&self) -> [f64; 3] {
        [self.omega, self.omega, self.omega0]
    }
}

/// Critical molecular frequency for the resonant equal-N configuration:
/// the harmonic model is stable iff omega > 2 sqrt(2) g sqrt(N).
pub fn critical_omega(g: f64, n: u64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * g * (n as f64).sqrt()
}

/// Mean thermal occupation at temperature ratio tau = k_B T / (hbar omega).
pub fn thermal_occupation(temperature_ratio: f64) -> f64 {
    if temperature_ratio <= 0.0 {
        return 0.0;
    }
    1.0 / ((1.0 / temperature_ratio).exp() - 1.0)
}

/// Inverse of [`thermal_occupation`]: k_B T / (hbar omega) = 1 / ln(1 + 1/nbar).
pub fn temperature_ratio(nbar: f64) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    1.0 / (1.0 + 1.0 / nbar).ln()
}

/// The quadratic form H = 1/2 X^T M X over (x1,p1,x2,p2,xc,pc), together
/// with its position block V and normal-mode frequencies sqrt(eig V).
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    params: PhysicalParams,
    layout: ModeLayout,
    m: DMatrix<f64>,
    v: DMatrix<f64>,
    normal_freqs: [f64; 3],
}

impl QuadraticHamiltonian {
    /// Builds the quadratic form; fails with an unstable-regime error when
    /// the position block is not positive definite, i.e. when
    /// sqrt(kappa1^2 + kappa2^2) >= omega * omega0.
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        let [k1, k2] = params.collective_couplings();
        let (w2, w02) = (params.omega * params.omega, params.omega0 * params.omega0);
        let v = DMatrix::from_row_slice(3, 3, &[
            w2, 0.0, k1, //
            0.0, w2, k2, //
            k1, k2, w02,
        ]);
        let eig = v.clone().symmetric_eigen();
        let mut squared: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        squared.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        if squared[0] <= 0.0 {
            let coupling = (k1 * k1 + k2 * k2).sqrt();
            let critical = params.omega * params.omega0;
            let detail = if params.omega == params.omega0 && params.n1 == params.n2 {
                format!(
                    "resonant equal-N boundary: omega must exceed 2*sqrt(2)*g*sqrt(N) = {:.6}",
                    critical_omega(params.g, params.n1)
                )
            } else {
                format!("softest squared normal frequency = {:.6e}", squared[0])
            };
            return Err(Error::UnstableRegime {
                coupling,
                critical,
                detail,
            });
        }
        let normal_freqs = [squared[0].sqrt(), squared[1].sqrt(), squared[2].sqrt()];
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                m[(2 * i, 2 * j)] = v[(i, j)];
            }
            m[(2 * i + 1, 2 * i + 1)] = 1.0;
        }
        Ok(Self {
            params: params.clone(),
            layout: PhysicalParams::layout(),
            m,
            v,
            normal_freqs,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    /// The full 6x6 matrix M.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// The 3x3 position block V.
    pub fn position_block(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Normal-mode frequencies nu_j, sorted ascending.
    pub fn normal_frequencies(&self) -> [f64; 3] {
        self.normal_freqs
    }

    /// <H> = 1/4 tr(M sigma) + 1/2 mu^T M mu.
    pub fn mean_energy(&self, state: &GaussianState) -> f64 {
        0.25 * (&self.m * state.cov()).trace() + 0.5 * (state.mean().transpose() * &self.m * state.mean())[(0, 0)]
    }
}

/// Product initial state: ensemble modes thermal at frequency omega with
/// nbar_ensembles, cavity mode thermal at omega0 with nbar_cavity; zero mean.
pub fn initial_state(params: &PhysicalParams) -> Result<GaussianState> {
    params.validate()?;
    GaussianState::thermal(
        PhysicalParams::layout(),
        &params.mode_frequencies(),
        &[
            params.nbar_ensembles,
            params.nbar_ensembles,
            params.nbar_cavity,
        ],
    )
}

/// Holstein-Primakoff depletion monitor over a trajectory.
#[derive(Debug, Clone)]
pub struct HpValidityReport {
    /// Per state, the ratio r_i = <p_i^2 + omega^2 x_i^2> / (2 omega N_i)
    /// for each ensemble.
    pub ratios: Vec<[f64; 2]>,
    /// Maximum ratio over both ensembles and the whole grid.
    pub max_ratio: f64,
    /// True when the maximum exceeds [`HP_RATIO_THRESHOLD`].
    pub exceeds_threshold: bool,
}

/// Depletion ratios of a single three-mode state (zero mean required).
pub fn hp_ratio(state: &GaussianState, params: &PhysicalParams) -> Result<[f64; 2]> {
    if state.layout() != &PhysicalParams::layout() {
        return Err(Error::DimensionMismatch(
            "expected the (ensemble-1, ensemble-2, cavity) layout".into(),
        ));
    }
    if state.mean().amax() > 1e-9 {
        return Err(Error::UnsupportedState(
            "depletion monitor assumes zero-mean states".into(),
        ));
    }
    let omega = params.omega;
    let mut out = [0.0; 2];
    for (i, n) in [params.n1, params.n2].into_iter().enumerate() {
        let (xi, pi) = (2 * i, 2 * i + 1);
        // <A^2> = sigma_AA / 2 for zero-mean states
        let energy = 0.5 * state.cov()[(pi, pi)] + 0.5 * omega * omega * state.cov()[(xi, xi)];
        out[i] = energy / (2.0 * omega * n as f64);
    }
    Ok(out)
}

/// Evaluates the depletion ratio over a trajectory and flags threshold
/// violations.
pub fn hp_validity(states: &[GaussianState], params: &PhysicalParams) -> Result<HpValidityReport> {
    let mut ratios = Vec::with_capacity(states.len());
    let mut max_ratio: f64 = 0.0;
    for state in states {
        let r = hp_ratio(state, params)?;
        max_ratio = max_ratio.max(r[0]).max(r[1]);
        ratios.push(r);
    }
    Ok(HpValidityReport {
        ratios,
        max_ratio,
        exceeds_threshold: max_ratio > HP_RATIO_THRESHOLD,
    })
}
