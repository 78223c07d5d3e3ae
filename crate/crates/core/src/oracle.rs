//! Brute-force validation of the harmonic pipeline: exact unitary dynamics
//! of the untruncated spin-boson Hamiltonian
//!
//!   H = omega0 a^dag a + omega (Jz1 + Jz2)
//!       + (a + a^dag) [ g1 (J+1 + J-1) + g2 (J+2 + J-2) ]
//!
//! on the symmetric Dicke sector (j_i = N_i / 2) with a truncated photon
//! space. All four products of (a + a^dag)(J+ + J-) are kept; nothing is
//! rotating-wave approximated.
//!
//! Basis ordering is spin-1 x spin-2 x Fock, lexicographic:
//! index = ((i1 * d2) + i2) * (n_max + 1) + n with m_i = i_i - j_i.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Hard cap on the truncated Hilbert-space dimension.
pub const DIMENSION_CAP: usize = 200_000;

/// Dense reduced-density-matrix cap for the exact negativity.
pub const SPIN_DM_CAP: usize = 100;

/// Symmetric Dicke sector of two ensembles plus a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    /// 2*j1 = N1 (number of molecules in ensemble 1).
    two_j1: u32,
    /// 2*j2 = N2.
    two_j2: u32,
    /// Largest retained Fock number.
    photon_cutoff: u32,
}

impl TruncatedSpace {
    pub fn new(n1: u64, n2: u64, photon_cutoff: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidParameter(
                "ensemble sizes must be at least 1".into(),
            ));
        }
        if n1 > u32::MAX as u64 || n2 > u32::MAX as u64 {
            return Err(Error::DimensionCap("ensemble size overflows the basis index".into()));
        }
        let space = Self {
            two_j1: n1 as u32,
            two_j2: n2 as u32,
            photon_cutoff,
        };
        if space.dim() > DIMENSION_CAP {
            return Err(Error::DimensionCap(format!(
                "truncated dimension {} exceeds the cap {DIMENSION_CAP}",
                space.dim()
            )));
        }
        Ok(space)
    }

    /// (2j1+1, 2j2+1, n_max+1).
    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.two_j1 as usize + 1,
            self.two_j2 as usize + 1,
            self.photon_cutoff as usize + 1,
        )
    }

    pub fn dim(&self) -> usize {
        let (d1, d2, dn) = self.dims();
        d1 * d2 * dn
    }

    pub fn photon_cutoff(&self) -> u32 {
        self.photon_cutoff
    }

    pub fn with_photon_cutoff(&self, photon_cutoff: u32) -> Result<Self> {
        Self::new(self.two_j1 as u64, self.two_j2 as u64, photon_cutoff)
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, n: usize) -> usize {
        let (_, d2, dn) = self.dims();
        (i1 * d2 + i2) * dn + n
    }

    #[inline]
    fn unpack(&self, idx: usize) -> (usize, usize, usize) {
        let (_, d2, dn) = self.dims();
        let n = idx % dn;
        let rest = idx / dn;
        (rest / d2, rest % d2, n)
    }
}

/// J+ matrix element <j, m+1| J+ |j, m> with i = m + j.
#[inline]
fn ladder_up(two_j: u32, i: usize) -> f64 {
    // sqrt((j - m)(j + m + 1)) = sqrt((2j - i)(i + 1))
    ((two_j as f64 - i as f64) * (i as f64 + 1.0)).sqrt()
}

/// Sparse symmetric Hamiltonian in CSR form.
#[derive(Debug, Clone)]
pub struct ExactHamiltonian {
    space: TruncatedSpace,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    gershgorin: f64,
}

impl ExactHamiltonian {
    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Upper bound on the spectral radius (max Gershgorin row sum).
    pub fn norm_bound(&self) -> f64 {
        self.gershgorin
    }

    /// y = H x.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// <psi| H |psi> (real for Hermitian H and normalized psi).
    pub fn expectation(&self, psi: &ExactState) -> f64 {
        let mut buf = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(&psi.amplitudes, &mut buf);
        psi.amplitudes
            .iter()
            .zip(&buf)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Assembles the exact Hamiltonian on the truncated space.
pub fn build_exact_hamiltonian(
    params: &PhysicalParams,
    space: &TruncatedSpace,
) -> Result<ExactHamiltonian> {
    params.validate()?;
    if space.two_j1 as u64 != params.n1 || space.two_j2 as u64 != params.n2 {
        return Err(Error::DimensionMismatch(format!(
            "space is sized for N = ({}, {}) but params have N = ({}, {})",
            space.two_j1, space.two_j2, params.n1, params.n2
        )));
    }
    let dim = space.dim();
    let (d1, d2, dn) = space.dims();
    let (j1, j2) = (space.two_j1 as f64 / 2.0, space.two_j2 as f64 / 2.0);
    let [g1, g2] = params.coupling_strengths();

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    let mut gershgorin: f64 = 0.0;
    row_ptr.push(0);
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(9);
    for row in 0..dim {
        let (i1, i2, n) = space.unpack(row);
        entries.clear();
        // diagonal: omega0 n + omega (m1 + m2)
        let m1 = i1 as f64 - j1;
        let m2 = i2 as f64 - j2;
        entries.push((row, params.omega0 * n as f64 + params.omega * (m1 + m2)));
        // g_i (a + a^dag)(J+_i + J-_i): every spin flip pairs with a photon
        // shift of +/- 1 (the n -> n+1 branches are the counter-rotating ones)
        let mut couple = |gi: f64, up_i: Option<(usize, f64)>, down_i: Option<(usize, f64)>,
                          make: &dyn Fn(usize) -> usize| {
            for (spin_target, spin_amp) in [up_i, down_i].into_iter().flatten() {
                if n + 1 < dn {
                    let c = space_index_spin(space, make(spin_target), n + 1);
                    entries.push((c, gi * spin_amp * ((n + 1) as f64).sqrt()));
                }
                if n > 0 {
                    let c = space_index_spin(space, make(spin_target), n - 1);
                    entries.push((c, gi * spin_amp * (n as f64).sqrt()));
                }
            }
        };
        // spin composite index: for ensemble 1 moves, spin index = i1' * d2 + i2
        let up1 = (i1 + 1 < d1).then(|| (i1 + 1, ladder_up(space.two_j1, i1)));
        let down1 = (i1 > 0).then(|| (i1 - 1, ladder_up(space.two_j1, i1 - 1)));
        couple(g1, up1, down1, &|i1p| i1p * d2 + i2);
        let up2 = (i2 + 1 < d2).then(|| (i2 + 1, ladder_up(space.two_j2, i2)));
        let down2 = (i2 > 0).then(|| (i2 - 1, ladder_up(space.two_j2, i2 - 1)));
        couple(g2, up2, down2, &|i2p| i1 * d2 + i2p);

        entries.sort_unstable_by_key(|&(c, _)| c);
        let row_sum: f64 = entries.iter().map(|&(_, v)| v.abs()).sum();
        gershgorin = gershgorin.max(row_sum);
        for &(c, v) in &entries {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(ExactHamiltonian {
        space: *space,
        row_ptr,
        col_idx,
        values,
        gershgorin,
    })
}

#[inline]
fn space_index_spin(space: &TruncatedSpace, spin_composite: usize, n: usize) -> usize {
    let (_, _, dn) = space.dims();
    spin_composite * dn + n
}

/// Normalized state vector over a [`TruncatedSpace`].
#[derive(Debug, Clone)]
pub struct ExactState {
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl ExactState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Product ground state of the decoupled system: |m1 = -j1> |m2 = -j2> |0>.
pub fn ground_state(space: &TruncatedSpace) -> ExactState {
    let mut amplitudes = vec![C64::new(0.0, 0.0); space.dim()];
    amplitudes[space.index(0, 0, 0)] = C64::new(1.0, 0.0);
    ExactState {
        amplitudes,
        time: 0.0,
    }
}

/// psi(t) = exp(-i H t) psi0 via a stepped Lanczos (Krylov) propagator with
/// full reorthogonalization. Norm is preserved to ~1e-12 per step.
pub fn evolve_exact(h: &ExactHamiltonian, psi0: &ExactState, t: f64) -> Result<ExactState> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be non-negative and finite, got {t}"
        )));
    }
    let dim = h.dim();
    if psi0.amplitudes.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state length {} does not match space dimension {dim}",
            psi0.amplitudes.len()
        )));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    // step so that ||H|| dt stays well inside the Krylov convergence radius
    let n_steps = ((t * h.norm_bound() / 8.0).ceil() as usize).max(1);
    let dt = t / n_steps as f64;
    let mut psi = psi0.amplitudes.clone();
    for _ in 0..n_steps {
        psi = lanczos_step(h, &psi, dt)?;
    }
    Ok(ExactState {
        amplitudes: psi,
        time: psi0.time + t,
    })
}

const LANCZOS_MAX: usize = 48;
const LANCZOS_TOL: f64 = 1e-12;

fn lanczos_step(h: &ExactHamiltonian, psi: &[C64], dt: f64) -> Result<Vec<C64>> {
    let dim = h.dim();
    let beta0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return Ok(psi.to_vec());
    }
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(LANCZOS_MAX + 1);
    basis.push(psi.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut breakdown = false;
    for m in 1..=LANCZOS_MAX {
        let j = m - 1;
        h.apply(&basis[j], &mut w);
        let alpha: f64 = basis[j]
            .iter()
            .zip(&w)
            .map(|(v, wv)| (v.conj() * wv).re)
            .sum();
        alphas.push(alpha);
        for (wv, v) in w.iter_mut().zip(&basis[j]) {
            *wv -= alpha * v;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wv, v) in w.iter_mut().zip(&basis[j - 1]) {
                *wv -= beta_prev * v;
            }
        }
        // full reorthogonalization keeps the small basis clean
        for v in &basis {
            let overlap: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wv, a) in w.iter_mut().zip(v) {
                *wv -= overlap * a;
            }
        }
        let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        // converged or invariant subspace found?
        if let Some(coeffs) = krylov_exp(&alphas, &betas, dt) {
            let err = if beta == 0.0 {
                0.0
            } else {
                beta * coeffs.last().map(|c| c.norm()).unwrap_or(1.0) * dt.abs()
            };
            if err < LANCZOS_TOL || beta < 1e-14 || m == LANCZOS_MAX {
                if err >= LANCZOS_TOL && !(beta < 1e-14) {
                    return Err(Error::ConvergenceFailure(format!(
                        "Lanczos residual {err:.3e} after {m} iterations (dt = {dt:.3e})"
                    )));
                }
                let mut out = vec![C64::new(0.0, 0.0); dim];
                for (c, v) in coeffs.iter().zip(&basis) {
                    for (o, a) in out.iter_mut().zip(v) {
                        *o += c * a * beta0;
                    }
                }
                return Ok(out);
            }
        }
        if beta < 1e-14 {
            breakdown = true;
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|a| a / beta).collect());
    }
    if breakdown {
        // invariant subspace: exact within the current basis
        if let Some(coeffs) = krylov_exp(&alphas, &betas, dt) {
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for (c, v) in coeffs.iter().zip(&basis) {
                for (o, a) in out.iter_mut().zip(v) {
                    *o += c * a * beta0;
                }
            }
            return Ok(out);
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "Lanczos failed to converge within {LANCZOS_MAX} iterations (dt = {dt:.3e})"
    )))
}

/// exp(-i T dt) e_1 for the real symmetric tridiagonal T = (alphas, betas).
fn krylov_exp(alphas: &[f64], betas: &[f64], dt: f64) -> Option<Vec<C64>> {
    let m = alphas.len();
    if m == 0 {
        return None;
    }
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    let u = &eig.eigenvectors;
    let mut coeffs = vec![C64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = C64::from_polar(1.0, -eig.eigenvalues[k] * dt);
        let weight = phase * u[(0, k)];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c += weight * u[(i, k)];
        }
    }
    Some(coeffs)
}

/// First and second moments of the collective spins and the photon mode,
/// mapped onto the quadrature convention of the harmonic model:
/// x_i = sqrt(2/(omega N_i)) Jx_i, p_i = -sqrt(2 omega / N_i) Jy_i,
/// x_c = (a + a^dag)/sqrt(2 omega0), p_c = i sqrt(omega0/2)(a^dag - a).
#[derive(Debug, Clone)]
pub struct MomentRecord {
    /// Quadrature means over (x1,p1,x2,p2,xc,pc).
    pub mean: DVector<f64>,
    /// Quadrature covariance, sigma_jk = <OjOk + OkOj> - 2<Oj><Ok>.
    pub cov: DMatrix<f64>,
    /// <Jz_i> per ensemble.
    pub jz: [f64; 2],
    /// <a^dag a>.
    pub mean_photons: f64,
}

enum QuadOp {
    Jx { ensemble: usize, scale: f64 },
    Jy { ensemble: usize, scale: f64 },
    Xc { scale: f64 },
    Pc { scale: f64 },
}

fn apply_quad_op(space: &TruncatedSpace, op: &QuadOp, psi: &[C64]) -> Vec<C64> {
    let dim = space.dim();
    let (d1, d2, _) = space.dims();
    let mut out = vec![C64::new(0.0, 0.0); dim];
    match *op {
        QuadOp::Jx { ensemble, scale } | QuadOp::Jy { ensemble, scale } => {
            let is_jy = matches!(op, QuadOp::Jy { .. });
            let two_j = if ensemble == 0 {
                space.two_j1
            } else {
                space.two_j2
            };
            let d_e = if ensemble == 0 { d1 } else { d2 };
            for (idx, amp) in psi.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let (i1, i2, n) = space.unpack(idx);
                let i_e = if ensemble == 0 { i1 } else { i2 };
                // J+ |m> -> |m+1>, J- |m> -> |m-1>; Jx = (J+ + J-)/2,
                // Jy = (J+ - J-)/(2i)
                if i_e + 1 < d_e {
                    let amp_up = ladder_up(two_j, i_e) / 2.0;
                    let target = if ensemble == 0 {
                        space.index(i1 + 1, i2, n)
                    } else {
                        space.index(i1, i2 + 1, n)
                    };
                    let factor = if is_jy {
                        C64::new(0.0, -1.0) * amp_up
                    } else {
                        C64::new(amp_up, 0.0)
                    };
                    out[target] += scale * factor * amp;
                }
                if i_e > 0 {
                    let amp_down = ladder_up(two_j, i_e - 1) / 2.0;
                    let target = if ensemble == 0 {
                        space.index(i1 - 1, i2, n)
                    } else {
                        space.index(i1, i2 - 1, n)
                    };
                    let factor = if is_jy {
                        C64::new(0.0, 1.0) * amp_down
                    } else {
                        C64::new(amp_down, 0.0)
                    };
                    out[target] += scale * factor * amp;
                }
            }
        }
        QuadOp::Xc { scale } | QuadOp::Pc { scale } => {
            let is_pc = matches!(op, QuadOp::Pc { .. });
            let (_, _, dn) = space.dims();
            for (idx, amp) in psi.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let (_, _, n) = space.unpack(idx);
                // a^dag |n> = sqrt(n+1)|n+1>, a |n> = sqrt(n)|n-1>;
                // x_c ~ (a + a^dag), p_c ~ i (a^dag - a)
                if n + 1 < dn {
                    let f = ((n + 1) as f64).sqrt();
                    let factor = if is_pc {
                        C64::new(0.0, 1.0) * f
                    } else {
                        C64::new(f, 0.0)
                    };
                    out[idx + 1] += scale * factor * amp;
                }
                if n > 0 {
                    let f = (n as f64).sqrt();
                    let factor = if is_pc {
                        C64::new(0.0, -1.0) * f
                    } else {
                        C64::new(f, 0.0)
                    };
                    out[idx - 1] += scale * factor * amp;
                }
            }
        }
    }
    out
}

/// Spin/photon moments of `psi`, in the harmonic model's units.
pub fn exact_moments(
    psi: &ExactState,
    space: &TruncatedSpace,
    params: &PhysicalParams,
) -> MomentRecord {
    let (omega, omega0) = (params.omega, params.omega0);
    let (n1, n2) = (params.n1 as f64, params.n2 as f64);
    let ops = [
        QuadOp::Jx {
            ensemble: 0,
            scale: (2.0 / (omega * n1)).sqrt(),
        },
        QuadOp::Jy {
            ensemble: 0,
            scale: -(2.0 * omega / n1).sqrt(),
        },
        QuadOp::Jx {
            ensemble: 1,
            scale: (2.0 / (omega * n2)).sqrt(),
        },
        QuadOp::Jy {
            ensemble: 1,
            scale: -(2.0 * omega / n2).sqrt(),
        },
        QuadOp::Xc {
            scale: 1.0 / (2.0 * omega0).sqrt(),
        },
        QuadOp::Pc {
            scale: (omega0 / 2.0).sqrt(),
        },
    ];
    let applied: Vec<Vec<C64>> = ops
        .iter()
        .map(|op| apply_quad_op(space, op, &psi.amplitudes))
        .collect();
    let mut mean = DVector::zeros(6);
    for (k, w) in applied.iter().enumerate() {
        mean[k] = psi
            .amplitudes
            .iter()
            .zip(w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
    }
    let mut cov = DMatrix::zeros(6, 6);
    for j in 0..6 {
        for k in j..6 {
            let corr: C64 = applied[j]
                .iter()
                .zip(&applied[k])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let sym = 2.0 * corr.re - 2.0 * mean[j] * mean[k];
            cov[(j, k)] = sym;
            cov[(k, j)] = sym;
        }
    }
    // diagonal observables straight from the amplitudes
    let (j1, j2) = (space.two_j1 as f64 / 2.0, space.two_j2 as f64 / 2.0);
    let mut jz = [0.0; 2];
    let mut mean_photons = 0.0;
    for (idx, amp) in psi.amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let (i1, i2, n) = space.unpack(idx);
        jz[0] += p * (i1 as f64 - j1);
        jz[1] += p * (i2 as f64 - j2);
        mean_photons += p * n as f64;
    }
    MomentRecord {
        mean,
        cov,
        jz,
        mean_photons,
    }
}

/// log2 of the trace norm of the partial transpose of the reduced two-spin
/// density matrix (photons traced out). Positive values certify
/// entanglement between the ensembles.
pub fn exact_log_negativity(psi: &ExactState, space: &TruncatedSpace) -> Result<f64> {
    let (d1, d2, dn) = space.dims();
    let d_spin = d1 * d2;
    if d_spin > SPIN_DM_CAP {
        return Err(Error::DimensionCap(format!(
            "spin density matrix dimension {d_spin} exceeds the cap {SPIN_DM_CAP}"
        )));
    }
    // rho[(i1,i2),(i1',i2')] = sum_n psi[i1,i2,n] conj(psi[i1',i2',n])
    let mut rho = DMatrix::<Complex<f64>>::zeros(d_spin, d_spin);
    for r in 0..d_spin {
        for c in 0..d_spin {
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..dn {
                acc += psi.amplitudes[r * dn + n] * psi.amplitudes[c * dn + n].conj();
            }
            rho[(r, c)] = Complex::new(acc.re, acc.im);
        }
    }
    // partial transpose on ensemble 2: swap i2 <-> i2'
    let mut rho_pt = DMatrix::<Complex<f64>>::zeros(d_spin, d_spin);
    for i1 in 0..d1 {
        for i2 in 0..d2 {
            for k1 in 0..d1 {
                for k2 in 0..d2 {
                    rho_pt[(i1 * d2 + i2, k1 * d2 + k2)] = rho[(i1 * d2 + k2, k1 * d2 + i2)];
                }
            }
        }
    }
    let eig = rho_pt.symmetric_eigen();
    let trace_norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    Ok(trace_norm.log2())
}

/// Moments at time `t` with the photon cutoff doubled until they change by
/// less than `tol` (max-abs over mean and covariance).
#[derive(Debug, Clone)]
pub struct ConvergedMoments {
    pub record: MomentRecord,
    pub photon_cutoff: u32,
    /// Moment change produced by the final cutoff doubling.
    pub cutoff_change: f64,
}

pub const CUTOFF_TOL: f64 = 1e-6;

pub fn converged_moments(
    params: &PhysicalParams,
    t: f64,
    start_cutoff: u32,
) -> Result<ConvergedMoments> {
    let mut cutoff = start_cutoff.max(1);
    let mut previous: Option<(MomentRecord, u32)> = None;
    loop {
        let space = TruncatedSpace::new(params.n1, params.n2, cutoff)?;
        let h = build_exact_hamiltonian(params, &space)?;
        let psi = evolve_exact(&h, &ground_state(&space), t)?;
        let record = exact_moments(&psi, &space, params);
        if let Some((prev, prev_cutoff)) = previous {
            let change = moment_change(&prev, &record);
            if change < CUTOFF_TOL {
                return Ok(ConvergedMoments {
                    record,
                    photon_cutoff: prev_cutoff,
                    cutoff_change: change,
                });
            }
        }
        previous = Some((record, cutoff));
        cutoff = cutoff.checked_mul(2).ok_or_else(|| {
            Error::ConvergenceFailure("photon cutoff overflowed while doubling".into())
        })?;
    }
}

fn moment_change(a: &MomentRecord, b: &MomentRecord) -> f64 {
    let dm = (&a.mean - &b.mean).amax();
    let dc = (&a.cov - &b.cov).amax();
    dm.max(dc)
}
