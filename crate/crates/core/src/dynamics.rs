//! Exact symplectic time evolution under the time-independent quadratic
//! Hamiltonian, with two independent propagator constructions.
//!
//! The Heisenberg flow of the quadratures is Xdot = Omega M X, so
//! S(t) = exp(Omega M t). The normal-mode construction diagonalizes the
//! position block and rotates each normal mode analytically; the
//! matrix-exponential construction evaluates exp(Omega M t) directly. Both
//! are exact for this Hamiltonian; shipping both gives a mutual check
//! without an external reference.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::model::QuadraticHamiltonian;
use crate::symplectic::{symplectic_form, GaussianState};

/// Largest admissible |t| * nu_max before the caller must subdivide.
pub const MAX_PHASE: f64 = 1e6;

/// Symplectic-residual bound factor: ||S Omega S^T - Omega||_max must stay
/// below 1e-10 * max(1, ||S||_max^2).
pub const RESIDUAL_FACTOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorSource {
    MatrixExponential,
    NormalMode,
}

impl std::fmt::Display for PropagatorSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MatrixExponential => write!(f, "expm"),
            Self::NormalMode => write!(f, "normal-mode"),
        }
    }
}

/// The matrix S(t) with S Omega S^T = Omega advancing means and covariances.
#[derive(Debug, Clone)]
pub struct SymplecticPropagator {
    s: DMatrix<f64>,
    t: f64,
    source: PropagatorSource,
}

impl SymplecticPropagator {
    /// S(t) = exp(Omega M t) via balanced Pade scaling-and-squaring.
    pub fn matrix_exponential(h: &QuadraticHamiltonian, t: f64) -> Result<Self> {
        check_time(h, t)?;
        let omega = symplectic_form(3);
        let generator = omega * h.matrix() * t;
        Ok(Self {
            s: expm(&generator),
            t,
            source: PropagatorSource::MatrixExponential,
        })
    }

    /// Analytic construction: diagonalize V = R diag(nu^2) R^T and rotate
    /// each normal mode by [[cos nu t, sin(nu t)/nu], [-nu sin nu t, cos nu t]].
    pub fn normal_mode(h: &QuadraticHamiltonian, t: f64) -> Result<Self> {
        check_time(h, t)?;
        let eig = h.position_block().clone().symmetric_eigen();
        let r = &eig.eigenvectors;
        let nus: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.sqrt()).collect();
        let n = nus.len();
        let f_cos = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (l.sqrt() * t).cos()));
        let f_sin_over =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (l.sqrt() * t).sin() / l.sqrt()));
        let f_nu_sin =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|l| -l.sqrt() * (l.sqrt() * t).sin()));
        let cxx = r * f_cos * r.transpose();
        let cxp = r * f_sin_over * r.transpose();
        let cpx = r * f_nu_sin * r.transpose();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                s[(2 * i, 2 * j)] = cxx[(i, j)];
                s[(2 * i, 2 * j + 1)] = cxp[(i, j)];
                s[(2 * i + 1, 2 * j)] = cpx[(i, j)];
                s[(2 * i + 1, 2 * j + 1)] = cxx[(i, j)];
            }
        }
        Ok(Self {
            s,
            t,
            source: PropagatorSource::NormalMode,
        })
    }

    pub fn from_source(
        h: &QuadraticHamiltonian,
        t: f64,
        source: PropagatorSource,
    ) -> Result<Self> {
        match source {
            PropagatorSource::MatrixExponential => Self::matrix_exponential(h, t),
            PropagatorSource::NormalMode => Self::normal_mode(h, t),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn source(&self) -> PropagatorSource {
        self.source
    }

    /// ||S Omega S^T - Omega||_max.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.s.nrows() / 2;
        let omega = symplectic_form(n);
        (&self.s * &omega * self.s.transpose() - omega).amax()
    }

    /// The bound the residual must satisfy, 1e-10 * max(1, ||S||_max^2).
    pub fn residual_bound(&self) -> f64 {
        let smax = self.s.amax();
        RESIDUAL_FACTOR * (smax * smax).max(1.0)
    }
}

fn check_time(h: &QuadraticHamiltonian, t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    let nu_max = h.normal_frequencies()[2];
    let phase = t.abs() * nu_max;
    if phase > MAX_PHASE {
        return Err(Error::StepTooLarge(phase));
    }
    Ok(())
}

/// mean -> S mean, cov -> S cov S^T.
pub fn evolve(state: &GaussianState, prop: &SymplecticPropagator) -> Result<GaussianState> {
    if state.layout().dim() != prop.s.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match propagator dimension {}",
            state.layout().dim(),
            prop.s.nrows()
        )));
    }
    let mean = &prop.s * state.mean();
    let cov = &prop.s * state.cov() * prop.s.transpose();
    GaussianState::new(state.layout().clone(), mean, cov)
}

/// States at each grid point, each computed by a single propagator from the
/// initial state (no step-to-step error accumulation).
pub fn trajectory(
    h: &QuadraticHamiltonian,
    state0: &GaussianState,
    t_grid: &[f64],
    source: PropagatorSource,
) -> Result<Vec<GaussianState>> {
    validate_grid(t_grid)?;
    t_grid
        .iter()
        .map(|&t| {
            let prop = SymplecticPropagator::from_source(h, t, source)?;
            evolve(state0, &prop)
        })
        .collect()
}

pub(crate) fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "time grid must start at t >= 0".into(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Uniform grid helper with `points >= 2` entries spanning [start, stop].
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "need at least two grid points");
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|i| start + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalParams;
    use approx::assert_relative_eq;

    fn reference_h() -> QuadraticHamiltonian {
        QuadraticHamiltonian::new(&PhysicalParams::resonant(300.0, 10_000)).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = reference_h();
        for source in [PropagatorSource::MatrixExponential, PropagatorSource::NormalMode] {
            let p = SymplecticPropagator::from_source(&h, 0.0, source).unwrap();
            assert_relative_eq!(p.matrix(), &DMatrix::identity(6, 6), epsilon = 1e-14);
        }
    }

    #[test]
    fn decoupled_mode_rotates_at_bare_frequency() {
        let mut params = PhysicalParams::resonant(5.0, 1);
        params.g = 0.0;
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let t = 0.37;
        let p = SymplecticPropagator::normal_mode(&h, t).unwrap();
        let nu = 5.0f64;
        // per-mode block [[cos, sin/nu], [-nu sin, cos]]
        assert_relative_eq!(p.matrix()[(0, 0)], (nu * t).cos(), epsilon = 1e-12);
        assert_relative_eq!(p.matrix()[(0, 1)], (nu * t).sin() / nu, epsilon = 1e-12);
        assert_relative_eq!(p.matrix()[(1, 0)], -nu * (nu * t).sin(), epsilon = 1e-12);
        let pe = SymplecticPropagator::matrix_exponential(&h, t).unwrap();
        assert_relative_eq!(p.matrix(), pe.matrix(), epsilon = 1e-10);
    }

    #[test]
    fn full_period_returns_to_identity() {
        let mut params = PhysicalParams::resonant(5.0, 1);
        params.g = 0.0;
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let t = 2.0 * std::f64::consts::PI / 5.0;
        let p = SymplecticPropagator::normal_mode(&h, t).unwrap();
        assert_relative_eq!(p.matrix(), &DMatrix::identity(6, 6), epsilon = 1e-10);
    }

    #[test]
    fn propagator_sources_agree() {
        let h = reference_h();
        for t in [0.001, 0.005, 0.01, 0.1, 1.0] {
            let pn = SymplecticPropagator::normal_mode(&h, t).unwrap();
            let pe = SymplecticPropagator::matrix_exponential(&h, t).unwrap();
            let diff = (pn.matrix() - pe.matrix()).amax();
            assert!(diff < 1e-8, "t={t}: |dS|_max = {diff:.3e}");
        }
    }

    #[test]
    fn symplectic_residual_within_bound() {
        let h = reference_h();
        for t in [0.001, 0.01, 0.1, 1.0] {
            for source in [PropagatorSource::MatrixExponential, PropagatorSource::NormalMode] {
                let p = SymplecticPropagator::from_source(&h, t, source).unwrap();
                assert!(
                    p.symplectic_residual() < p.residual_bound(),
                    "{source} at t={t}: residual {:.3e} vs bound {:.3e}",
                    p.symplectic_residual(),
                    p.residual_bound()
                );
            }
        }
    }

    #[test]
    fn composition_property() {
        let h = reference_h();
        let (t1, t2) = (0.013, 0.029);
        let p1 = SymplecticPropagator::normal_mode(&h, t1).unwrap();
        let p2 = SymplecticPropagator::normal_mode(&h, t2).unwrap();
        let p12 = SymplecticPropagator::normal_mode(&h, t1 + t2).unwrap();
        let composed = p1.matrix() * p2.matrix();
        assert!((composed - p12.matrix()).amax() < 1e-10);
    }

    #[test]
    fn backward_evolution_inverts_forward() {
        let h = reference_h();
        let p = SymplecticPropagator::matrix_exponential(&h, 0.02).unwrap();
        let pinv = SymplecticPropagator::matrix_exponential(&h, -0.02).unwrap();
        assert!((p.matrix() * pinv.matrix() - DMatrix::identity(6, 6)).amax() < 1e-10);
    }

    #[test]
    fn antisymmetric_ensemble_mode_stays_bare() {
        // (1,-1,0)/sqrt(2) is an eigenvector of V with eigenvalue omega^2
        let h = reference_h();
        let v = h.position_block();
        let dir = nalgebra::DVector::from_vec(vec![1.0, -1.0, 0.0]);
        let out = v * &dir;
        assert_relative_eq!(out[0], 300.0 * 300.0, max_relative = 1e-12);
        assert_relative_eq!(out[1], -300.0 * 300.0, max_relative = 1e-12);
        assert_relative_eq!(out[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_normal_modes_are_basis_independent() {
        // g = 0 at resonance gives a triply degenerate position block, so the
        // eigenbasis is arbitrary; the propagator must not depend on it
        let mut params = PhysicalParams::resonant(7.0, 5);
        params.g = 0.0;
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let t = 0.83;
        let pn = SymplecticPropagator::normal_mode(&h, t).unwrap();
        let pe = SymplecticPropagator::matrix_exponential(&h, t).unwrap();
        assert!((pn.matrix() - pe.matrix()).amax() < 1e-10);
        // nearly degenerate: two ensembles against a slightly detuned cavity
        let mut params = PhysicalParams::resonant(50.0, 2);
        params.omega0 = 50.0 * (1.0 + 1e-12);
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let pn = SymplecticPropagator::normal_mode(&h, t).unwrap();
        let pe = SymplecticPropagator::matrix_exponential(&h, t).unwrap();
        assert!((pn.matrix() - pe.matrix()).amax() < 1e-8);
    }

    #[test]
    fn vacuum_invariant_under_decoupled_flow() {
        let mut params = PhysicalParams::resonant(7.0, 3);
        params.g = 0.0;
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let st = crate::model::initial_state(&params).unwrap();
        for t in [0.3, 1.7] {
            let p = SymplecticPropagator::normal_mode(&h, t).unwrap();
            let evolved = evolve(&st, &p).unwrap();
            assert_relative_eq!(evolved.cov(), st.cov(), epsilon = 1e-10);
        }
    }

    #[test]
    fn thermal_spectrum_preserved_under_evolution() {
        let mut params = PhysicalParams::resonant(300.0, 10_000);
        params.nbar_ensembles = 0.1;
        params.nbar_cavity = 0.05;
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let st = crate::model::initial_state(&params).unwrap();
        let p = SymplecticPropagator::normal_mode(&h, 0.02).unwrap();
        let evolved = evolve(&st, &p).unwrap();
        let spec = evolved.symplectic_spectrum().unwrap();
        let mut expected = vec![1.2, 1.2, 1.1];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in spec.values.iter().zip(&expected) {
            assert_relative_eq!(g, e, epsilon = 1e-8);
        }
    }

    #[test]
    fn energy_conserved_along_trajectory() {
        let params = PhysicalParams::resonant(300.0, 10_000);
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let st = crate::model::initial_state(&params).unwrap();
        let grid = linspace(0.0, 0.1, 11);
        let states = trajectory(&h, &st, &grid, PropagatorSource::NormalMode).unwrap();
        let e0 = h.mean_energy(&states[0]);
        for s in &states {
            let e = h.mean_energy(s);
            assert_relative_eq!(e, e0, max_relative = 1e-9);
        }
    }

    #[test]
    fn trajectory_points_match_individual_propagation() {
        let params = PhysicalParams::resonant(300.0, 10_000);
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let st = crate::model::initial_state(&params).unwrap();
        let grid = [0.0, 0.004, 0.009];
        let states = trajectory(&h, &st, &grid, PropagatorSource::NormalMode).unwrap();
        for (t, s) in grid.iter().zip(&states) {
            let p = SymplecticPropagator::normal_mode(&h, *t).unwrap();
            let direct = evolve(&st, &p).unwrap();
            assert_eq!(s.cov(), direct.cov(), "bit-identical stateless construction");
        }
    }

    #[test]
    fn grid_validation() {
        let params = PhysicalParams::resonant(300.0, 10_000);
        let h = QuadraticHamiltonian::new(&params).unwrap();
        let st = crate::model::initial_state(&params).unwrap();
        assert!(trajectory(&h, &st, &[0.1, 0.05], PropagatorSource::NormalMode).is_err());
        assert!(trajectory(&h, &st, &[-0.1, 0.05], PropagatorSource::NormalMode).is_err());
        assert!(trajectory(&h, &st, &[], PropagatorSource::NormalMode).is_err());
        let single = trajectory(&h, &st, &[0.0], PropagatorSource::NormalMode).unwrap();
        assert_eq!(single.len(), 1);
        assert_relative_eq!(single[0].cov(), st.cov(), epsilon = 1e-9);
    }

    #[test]
    fn step_too_large_is_rejected() {
        let h = reference_h();
        // nu_max ~ 418, so t = 1e5 pushes |t| nu_max over 1e6
        match SymplecticPropagator::matrix_exponential(&h, 1e5) {
            Err(Error::StepTooLarge(_)) => {}
            other => panic!("expected step-too-large, got {other:?}"),
        }
    }
}
