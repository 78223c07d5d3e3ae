//! Simulated anti-Stokes homodyne readout of the two-ensemble state.
//!
//! The Raman read channel is the single-parameter efficiency map
//! a_out = sqrt(eta) c + sqrt(1 - eta) a_in with a_in in vacuum. Everything
//! here operates in dimensionless quadratures (vacuum covariance = identity,
//! see [`GaussianState::to_dimensionless`]); that local rescaling leaves the
//! logarithmic negativity unchanged, so reconstruction and entanglement
//! quantification commute with the convention change.
//!
//! Homodyne settings: each target mode (the two ensembles plus the sum and
//! difference ports of a 50:50 beam splitter) is probed at LO phases
//! {0, pi/4, pi/2}. The pi/4 setting supplies the x-p cross moment through
//! 2 Var(X_{pi/4}) = (sigma_xx + sigma_pp)/2 + sigma_xp. The twelve settings
//! identify the local blocks and the symmetric part of the cross block,
//! which is the full cross block for exchange-symmetric preparations (the
//! case of interest here).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::entanglement;
use crate::error::{Error, Result};
use crate::symplectic::{GaussianState, ModeLayout};

/// Efficiencies below this make the channel inversion amplify sampling noise
/// beyond usefulness; reconstruction refuses rather than silently returning.
pub const ETA_FLOOR: f64 = 0.05;

/// Transmission efficiencies of the two read channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutChannel {
    pub eta1: f64,
    pub eta2: f64,
}

impl ReadoutChannel {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        for eta in [eta1, eta2] {
            if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "transmission efficiency must lie in [0, 1], got {eta}"
                )));
            }
        }
        Ok(Self { eta1, eta2 })
    }

    pub fn ideal() -> Self {
        Self {
            eta1: 1.0,
            eta2: 1.0,
        }
    }
}

/// a_out = sqrt(eta) c + sqrt(1-eta) a_vac per mode:
/// local blocks -> eta * block + (1 - eta) * I, cross block -> sqrt(eta1 eta2),
/// mean -> sqrt(eta) * mean. Requires a 2-mode state in the dimensionless
/// convention.
pub fn apply_readout_channel(state: &GaussianState, ch: &ReadoutChannel) -> Result<GaussianState> {
    require_two_modes(state)?;
    let mut cov = state.cov().clone();
    let mut mean = state.mean().clone();
    let etas = [ch.eta1, ch.eta2];
    for (m, &eta) in etas.iter().enumerate() {
        for k in 0..2 {
            mean[2 * m + k] *= eta.sqrt();
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            let (mi, mj) = (i / 2, j / 2);
            if mi == mj {
                cov[(i, j)] *= etas[mi];
                if i == j {
                    cov[(i, j)] += 1.0 - etas[mi];
                }
            } else {
                cov[(i, j)] *= (etas[0] * etas[1]).sqrt();
            }
        }
    }
    GaussianState::new(state.layout().clone(), mean, cov)
}

/// 50:50 beam splitter, rotation convention:
/// out1 = (mode1 + mode2)/sqrt(2), out2 = (mode2 - mode1)/sqrt(2),
/// applied identically to x and p. Applying it twice swaps the modes up to
/// a reflection.
pub fn beam_splitter(state: &GaussianState) -> Result<GaussianState> {
    require_two_modes(state)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = DMatrix::zeros(4, 4);
    for k in 0..2 {
        b[(k, k)] = r; // out1 <- mode1
        b[(k, 2 + k)] = r; // out1 <- mode2
        b[(2 + k, k)] = -r; // out2 <- -mode1
        b[(2 + k, 2 + k)] = r; // out2 <- mode2
    }
    let mean = &b * state.mean();
    let cov = &b * state.cov() * b.transpose();
    let layout = ModeLayout::new(["bs-sum", "bs-difference"])?;
    GaussianState::new(layout, mean, cov)
}

fn require_two_modes(state: &GaussianState) -> Result<()> {
    if state.layout().n_modes() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "readout operates on 2-mode states, got {} modes",
            state.layout().n_modes()
        )));
    }
    Ok(())
}

/// Homodyne target: a bare mode or a beam-splitter output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Mode1,
    Mode2,
    BsSum,
    BsDifference,
}

impl Target {
    pub const ALL: [Target; 4] = [
        Target::Mode1,
        Target::Mode2,
        Target::BsSum,
        Target::BsDifference,
    ];
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Mode1 => write!(f, "mode-1"),
            Target::Mode2 => write!(f, "mode-2"),
            Target::BsSum => write!(f, "bs-sum"),
            Target::BsDifference => write!(f, "bs-difference"),
        }
    }
}

/// Local-oscillator phases probing x, the x-p cross moment, and p.
pub const LO_PHASES: [f64; 3] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
];

/// One measurement setting: target port and LO phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub target: Target,
    pub phase: f64,
}

/// The twelve settings required by [`reconstruct_covariance`], in fixed order.
pub fn required_settings() -> Vec<Setting> {
    let mut out = Vec::with_capacity(12);
    for target in Target::ALL {
        for phase in LO_PHASES {
            out.push(Setting { target, phase });
        }
    }
    out
}

/// Variance of X_phi = x cos(phi) + p sin(phi) on mode `mode` of `state`:
/// Var = sigma_{phi phi} / 2 in the doubled covariance convention.
pub fn quadrature_variance(state: &GaussianState, mode: usize, phase: f64) -> f64 {
    let (c, s) = (phase.cos(), phase.sin());
    let (xi, pi) = (2 * mode, 2 * mode + 1);
    let cov = state.cov();
    0.5 * (cov[(xi, xi)] * c * c + cov[(pi, pi)] * s * s + 2.0 * cov[(xi, pi)] * s * c)
}

fn quadrature_mean(state: &GaussianState, mode: usize, phase: f64) -> f64 {
    state.mean()[2 * mode] * phase.cos() + state.mean()[2 * mode + 1] * phase.sin()
}

/// Draws `count` i.i.d. homodyne samples of the selected quadrature.
/// Beam-splitter targets mix the modes before sampling. Reproducible for a
/// fixed seed.
pub fn sample_quadrature(
    state: &GaussianState,
    target: Target,
    phase: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    require_two_modes(state)?;
    let (source, mode) = match target {
        Target::Mode1 => (state.clone(), 0),
        Target::Mode2 => (state.clone(), 1),
        Target::BsSum => (beam_splitter(state)?, 0),
        Target::BsDifference => (beam_splitter(state)?, 1),
    };
    let var = quadrature_variance(&source, mode, phase);
    if var < 0.0 {
        return Err(Error::UnsupportedState(format!(
            "negative quadrature variance {var:.3e}; state is not physical"
        )));
    }
    let mu = quadrature_mean(&source, mode, phase);
    let sd = var.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| mu + sd * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// A full homodyne data set over the twelve required settings.
#[derive(Debug, Clone)]
pub struct HomodyneRecord {
    pub settings: Vec<(Setting, Vec<f64>)>,
    pub seed: u64,
}

/// Samples every required setting with per-setting derived seeds, so the
/// result does not depend on evaluation order.
pub fn record_homodyne(
    state: &GaussianState,
    samples_per_setting: usize,
    seed: u64,
) -> Result<HomodyneRecord> {
    if samples_per_setting < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 samples per setting".into(),
        ));
    }
    let mut settings = Vec::with_capacity(12);
    for (k, setting) in required_settings().into_iter().enumerate() {
        // fixed odd stride keeps the per-setting streams distinct
        let derived = seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(k as u64 + 1);
        let samples =
            sample_quadrature(state, setting.target, setting.phase, samples_per_setting, derived)?;
        settings.push((setting, samples));
    }
    Ok(HomodyneRecord {
        settings,
        seed,
    })
}

/// Covariance estimate with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct ReconstructedState {
    /// Estimated 4x4 covariance of the pre-channel two-mode state.
    pub cov: DMatrix<f64>,
    /// Per-entry one-sigma standard errors.
    pub std_errors: DMatrix<f64>,
    /// True when a non-unit channel was inverted.
    pub bias_corrected: bool,
    channel: ReadoutChannel,
    /// Per-setting (variance estimate, sample count), in required-settings order.
    setting_stats: Vec<(f64, usize)>,
}

/// Inverts the channel and assembles the covariance from the twelve
/// per-setting sample variances. Sample means are estimated and subtracted.
pub fn reconstruct_covariance(
    record: &HomodyneRecord,
    ch: &ReadoutChannel,
) -> Result<ReconstructedState> {
    ReadoutChannel::new(ch.eta1, ch.eta2)?;
    if ch.eta1 < ETA_FLOOR || ch.eta2 < ETA_FLOOR {
        return Err(Error::IllConditioned(format!(
            "channel inversion with eta = ({}, {}) amplifies noise beyond the \
             conditioning floor {ETA_FLOOR}",
            ch.eta1, ch.eta2
        )));
    }
    let mut stats = Vec::with_capacity(12);
    for wanted in required_settings() {
        let found = record.settings.iter().find(|(s, _)| {
            s.target == wanted.target && (s.phase - wanted.phase).abs() < 1e-12
        });
        let Some((_, samples)) = found else {
            return Err(Error::MissingSetting(format!(
                "target {} at LO phase {:.4}",
                wanted.target, wanted.phase
            )));
        };
        if samples.len() < 2 {
            return Err(Error::MissingSetting(format!(
                "target {} at LO phase {:.4} has fewer than 2 samples",
                wanted.target, wanted.phase
            )));
        }
        stats.push((sample_variance(samples), samples.len()));
    }
    let vars: Vec<f64> = stats.iter().map(|&(v, _)| v).collect();
    let cov = assemble_covariance(&vars, ch);
    let std_errors = propagate_entry_errors(&stats, ch);
    Ok(ReconstructedState {
        cov,
        std_errors,
        bias_corrected: ch.eta1 < 1.0 || ch.eta2 < 1.0,
        channel: *ch,
        setting_stats: stats,
    })
}

fn sample_variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Measured-block reconstruction from the three phases of one target:
/// sigma_xx = 2 v(0), sigma_pp = 2 v(pi/2), sigma_xp = 2 v(pi/4) - v(0) - v(pi/2).
fn block_from_vars(v0: f64, v45: f64, v90: f64) -> (f64, f64, f64) {
    (2.0 * v0, 2.0 * v90, 2.0 * v45 - v0 - v90)
}

fn assemble_covariance(vars: &[f64], ch: &ReadoutChannel) -> DMatrix<f64> {
    let (m1_xx, m1_pp, m1_xp) = block_from_vars(vars[0], vars[1], vars[2]);
    let (m2_xx, m2_pp, m2_xp) = block_from_vars(vars[3], vars[4], vars[5]);
    let (s_xx, s_pp, s_xp) = block_from_vars(vars[6], vars[7], vars[8]);
    let (d_xx, d_pp, d_xp) = block_from_vars(vars[9], vars[10], vars[11]);
    // cross block from the sum/difference ports:
    // sigma^sum = (sigma^1 + sigma^2)/2 + C, sigma^diff = (...)/2 - C
    let c_xx = 0.5 * (s_xx - d_xx);
    let c_pp = 0.5 * (s_pp - d_pp);
    let c_xp = 0.5 * (s_xp - d_xp);
    // channel inversion
    let local = |xx: f64, pp: f64, xp: f64, eta: f64| {
        (
            (xx - (1.0 - eta)) / eta,
            (pp - (1.0 - eta)) / eta,
            xp / eta,
        )
    };
    let (a_xx, a_pp, a_xp) = local(m1_xx, m1_pp, m1_xp, ch.eta1);
    let (b_xx, b_pp, b_xp) = local(m2_xx, m2_pp, m2_xp, ch.eta2);
    let cross_scale = (ch.eta1 * ch.eta2).sqrt();
    let (c_xx, c_pp, c_xp) = (c_xx / cross_scale, c_pp / cross_scale, c_xp / cross_scale);
    DMatrix::from_row_slice(4, 4, &[
        a_xx, a_xp, c_xx, c_xp, //
        a_xp, a_pp, c_xp, c_pp, //
        c_xx, c_xp, b_xx, b_xp, //
        c_xp, c_pp, b_xp, b_pp,
    ])
}

/// Gaussian variance-of-sample-variance: Var(v) = 2 v^2 / (n - 1).
fn variance_std_error(v: f64, n: usize) -> f64 {
    v * (2.0 / (n as f64 - 1.0)).sqrt()
}

fn propagate_entry_errors(stats: &[(f64, usize)], ch: &ReadoutChannel) -> DMatrix<f64> {
    let se: Vec<f64> = stats.iter().map(|&(v, n)| variance_std_error(v, n)).collect();
    // block entry errors from the linear maps above, combined in quadrature
    let block_se = |s: &[f64]| {
        let xx = 2.0 * s[0];
        let pp = 2.0 * s[2];
        let xp = (4.0 * s[1] * s[1] + s[0] * s[0] + s[2] * s[2]).sqrt();
        (xx, pp, xp)
    };
    let (a_xx, a_pp, a_xp) = block_se(&se[0..3]);
    let (b_xx, b_pp, b_xp) = block_se(&se[3..6]);
    let (s_xx, s_pp, s_xp) = block_se(&se[6..9]);
    let (d_xx, d_pp, d_xp) = block_se(&se[9..12]);
    let c_xx = 0.5 * (s_xx * s_xx + d_xx * d_xx).sqrt();
    let c_pp = 0.5 * (s_pp * s_pp + d_pp * d_pp).sqrt();
    let c_xp = 0.5 * (s_xp * s_xp + d_xp * d_xp).sqrt();
    let cross_scale = (ch.eta1 * ch.eta2).sqrt();
    let (e1, e2) = (ch.eta1, ch.eta2);
    DMatrix::from_row_slice(4, 4, &[
        a_xx / e1,
        a_xp / e1,
        c_xx / cross_scale,
        c_xp / cross_scale,
        a_xp / e1,
        a_pp / e1,
        c_xp / cross_scale,
        c_pp / cross_scale,
        c_xx / cross_scale,
        c_xp / cross_scale,
        b_xx / e2,
        b_xp / e2,
        c_xx / cross_scale,
        c_pp / cross_scale,
        b_xp / e2,
        b_pp / e2,
    ])
}

/// Entanglement estimate with statistical errors propagated from the
/// per-setting sample variances.
#[derive(Debug, Clone, Copy)]
pub struct LogNegativityEstimate {
    /// Estimated logarithmic negativity (bits).
    pub log_negativity: f64,
    /// One-sigma error of the estimate (first-order propagation).
    pub std_error: f64,
    /// Smallest partially transposed symplectic eigenvalue.
    pub min_pt_symplectic: f64,
    /// One-sigma error of that eigenvalue.
    pub min_pt_std_error: f64,
}

impl LogNegativityEstimate {
    /// Entanglement verdict at `k` standard deviations: the smallest PT
    /// symplectic eigenvalue sits below 1 by more than k sigma.
    pub fn entangled_at_sigma(&self, k: f64) -> bool {
        1.0 - self.min_pt_symplectic > k * self.min_pt_std_error
    }
}

fn lnn_and_gamma_from_vars(vars: &[f64], ch: &ReadoutChannel) -> Result<(f64, f64)> {
    let cov = assemble_covariance(vars, ch);
    let layout = ModeLayout::new(["mode-1", "mode-2"])?;
    let state = GaussianState::new(layout, DVector::zeros(4), cov)?;
    let result = entanglement::log_negativity(&state, &["mode-1"], &["mode-2"])?;
    Ok((
        result.log_negativity,
        result.symplectic_spectrum_pt[0],
    ))
}

/// Point estimate and propagated standard errors for the logarithmic
/// negativity of a reconstruction. The gradient with respect to the twelve
/// independent sample variances is taken by central differences.
pub fn estimate_log_negativity(rec: &ReconstructedState) -> Result<LogNegativityEstimate> {
    let vars: Vec<f64> = rec.setting_stats.iter().map(|&(v, _)| v).collect();
    let (value, gamma) = lnn_and_gamma_from_vars(&vars, &rec.channel)?;
    let mut var_ln = 0.0;
    let mut var_gamma = 0.0;
    for (k, &(v, n)) in rec.setting_stats.iter().enumerate() {
        let h = (v.abs() * 1e-4).max(1e-12);
        let mut up = vars.clone();
        up[k] = v + h;
        let mut dn = vars.clone();
        dn[k] = v - h;
        let (ln_up, g_up) = lnn_and_gamma_from_vars(&up, &rec.channel)?;
        let (ln_dn, g_dn) = lnn_and_gamma_from_vars(&dn, &rec.channel)?;
        let se_v = variance_std_error(v, n);
        var_ln += ((ln_up - ln_dn) / (2.0 * h) * se_v).powi(2);
        var_gamma += ((g_up - g_dn) / (2.0 * h) * se_v).powi(2);
    }
    Ok(LogNegativityEstimate {
        log_negativity: value,
        std_error: var_ln.sqrt(),
        min_pt_symplectic: gamma,
        min_pt_std_error: var_gamma.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_mode_layout() -> ModeLayout {
        ModeLayout::new(["mode-1", "mode-2"]).unwrap()
    }

    fn correlated_state() -> GaussianState {
        // two-mode squeezed covariance, dimensionless convention (physical)
        let r = 0.6f64;
        let c2 = (2.0 * r).cosh();
        let s2 = (2.0 * r).sinh();
        let cov = DMatrix::from_row_slice(4, 4, &[
            c2, 0.0, s2, 0.0, //
            0.0, c2, 0.0, -s2, //
            s2, 0.0, c2, 0.0, //
            0.0, -s2, 0.0, c2,
        ]);
        GaussianState::new(two_mode_layout(), DVector::zeros(4), cov).unwrap()
    }

    #[test]
    fn channel_identity_at_full_transmission() {
        let st = correlated_state();
        let out = apply_readout_channel(&st, &ReadoutChannel::ideal()).unwrap();
        assert_relative_eq!(out.cov(), st.cov(), epsilon = 1e-14);
    }

    #[test]
    fn channel_zero_transmission_gives_vacuum() {
        let st = correlated_state();
        let out = apply_readout_channel(&st, &ReadoutChannel::new(0.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(out.cov(), &DMatrix::identity(4, 4), epsilon = 1e-14);
        let r = entanglement::log_negativity(&out, &["mode-1"], &["mode-2"]).unwrap();
        assert_relative_eq!(r.log_negativity, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn channel_preserves_physicality_across_eta() {
        let st = correlated_state();
        for eta in [0.0, 0.1, 0.3, 0.5, 0.8, 1.0] {
            let out = apply_readout_channel(&st, &ReadoutChannel::new(eta, eta).unwrap()).unwrap();
            assert!(out.is_physical(), "eta = {eta}");
        }
    }

    #[test]
    fn channel_rejects_bad_eta() {
        assert!(ReadoutChannel::new(-0.1, 0.5).is_err());
        assert!(ReadoutChannel::new(0.5, 1.2).is_err());
    }

    #[test]
    fn beam_splitter_fixes_symmetric_thermal_product() {
        let st = GaussianState::thermal(two_mode_layout(), &[1.0, 1.0], &[0.3, 0.3]).unwrap();
        let out = beam_splitter(&st).unwrap();
        assert_relative_eq!(out.cov(), st.cov(), epsilon = 1e-14);
    }

    #[test]
    fn beam_splitter_twice_swaps_modes_up_to_reflection() {
        let st = correlated_state();
        let twice = beam_splitter(&beam_splitter(&st).unwrap()).unwrap();
        // B^2 maps (x1,p1,x2,p2) -> (x2,p2,-x1,-p1); covariances see the swap
        let c = st.cov();
        let d = twice.cov();
        assert_relative_eq!(d[(0, 0)], c[(2, 2)], epsilon = 1e-12);
        assert_relative_eq!(d[(2, 2)], c[(0, 0)], epsilon = 1e-12);
        assert_relative_eq!(d[(0, 2)], -c[(2, 0)], epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_difference_port_recovers_cross_covariance() {
        let st = correlated_state();
        let bs = beam_splitter(&st).unwrap();
        // Var(X_sum) - Var(X_diff) = 2 sigma_x1x2 in the doubled convention:
        // sigma_sum_xx - sigma_diff_xx = 2 sigma_x1x2
        let got = 0.5 * (bs.cov()[(0, 0)] - bs.cov()[(2, 2)]);
        assert_relative_eq!(got, st.cov()[(0, 2)], epsilon = 1e-12);
    }

    #[test]
    fn vacuum_sample_variance_approaches_half() {
        let st = GaussianState::vacuum(two_mode_layout(), &[1.0, 1.0]).unwrap();
        let samples = sample_quadrature(&st, Target::Mode1, 0.7, 200_000, 42).unwrap();
        let v = sample_variance(&samples);
        assert_relative_eq!(v, 0.5, max_relative = 0.02);
    }

    #[test]
    fn samples_reproducible_for_fixed_seed() {
        let st = correlated_state();
        let a = sample_quadrature(&st, Target::BsSum, LO_PHASES[1], 64, 7).unwrap();
        let b = sample_quadrature(&st, Target::BsSum, LO_PHASES[1], 64, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_quadrature(&st, Target::BsSum, LO_PHASES[1], 64, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uncertainty_product_respected_on_squeezed_state() {
        let st = correlated_state();
        let red = st.partial_trace(&["mode-1"]).unwrap();
        let v0 = quadrature_variance(&red, 0, 0.0);
        let v90 = quadrature_variance(&red, 0, std::f64::consts::FRAC_PI_2);
        assert!(v0 * v90 >= 0.25 - 1e-12);
    }

    #[test]
    fn noiseless_reconstruction_is_exact() {
        // feed analytic variances directly: the estimator inverts exactly
        let st = correlated_state();
        let ch = ReadoutChannel::new(0.8, 0.8).unwrap();
        let measured = apply_readout_channel(&st, &ch).unwrap();
        let bs = beam_splitter(&measured).unwrap();
        let mut vars = Vec::new();
        for target in Target::ALL {
            let (source, mode) = match target {
                Target::Mode1 => (&measured, 0),
                Target::Mode2 => (&measured, 1),
                Target::BsSum => (&bs, 0),
                Target::BsDifference => (&bs, 1),
            };
            for phase in LO_PHASES {
                vars.push(quadrature_variance(source, mode, phase));
            }
        }
        let cov = assemble_covariance(&vars, &ch);
        assert_relative_eq!(&cov, st.cov(), epsilon = 1e-10);
    }

    #[test]
    fn reconstruction_errors_on_missing_setting() {
        let st = correlated_state();
        let mut record = record_homodyne(&st, 100, 3).unwrap();
        record.settings.remove(5);
        match reconstruct_covariance(&record, &ReadoutChannel::ideal()) {
            Err(Error::MissingSetting(_)) => {}
            other => panic!("expected missing-setting error, got {other:?}"),
        }
    }

    #[test]
    fn reconstruction_refuses_tiny_eta() {
        let st = correlated_state();
        let record = record_homodyne(&st, 100, 3).unwrap();
        let ch = ReadoutChannel::new(0.01, 0.5).unwrap();
        match reconstruct_covariance(&record, &ch) {
            Err(Error::IllConditioned(_)) => {}
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn vacuum_reconstruction_consistent_with_zero_lnn() {
        let st = GaussianState::vacuum(two_mode_layout(), &[1.0, 1.0]).unwrap();
        let record = record_homodyne(&st, 10_000, 11).unwrap();
        let rec = reconstruct_covariance(&record, &ReadoutChannel::ideal()).unwrap();
        let est = estimate_log_negativity(&rec).unwrap();
        // gamma_min should sit within a few sigma of 1
        assert!(
            (est.min_pt_symplectic - 1.0).abs() < 4.0 * est.min_pt_std_error,
            "gamma = {} +- {}",
            est.min_pt_symplectic,
            est.min_pt_std_error
        );
        assert!(!est.entangled_at_sigma(3.0));
    }

    #[test]
    fn estimator_converges_with_sample_count() {
        let st = correlated_state();
        let truth = entanglement::log_negativity(&st, &["mode-1"], &["mode-2"])
            .unwrap()
            .log_negativity;
        let mut errors = Vec::new();
        for (samples, seed) in [(1_000, 1u64), (10_000, 2), (100_000, 3)] {
            let record = record_homodyne(&st, samples, seed).unwrap();
            let rec = reconstruct_covariance(&record, &ReadoutChannel::ideal()).unwrap();
            let est = estimate_log_negativity(&rec).unwrap();
            errors.push((est.log_negativity - truth).abs());
        }
        assert!(
            errors[2] < errors[0],
            "errors did not shrink: {errors:?}"
        );
    }
}
