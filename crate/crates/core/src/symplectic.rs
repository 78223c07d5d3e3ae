//! Continuous-variable foundation: mode layouts, the symplectic form,
//! Gaussian states, partial trace/transpose and symplectic eigenvalues.
//!
//! Quadratures are interleaved as (x1, p1, x2, p2, ...). The covariance
//! convention is the doubled symmetrized one,
//! sigma_jk = <XjXk + XkXj> - 2<Xj><Xk>, so a vacuum mode of frequency nu
//! carries the block diag(1/nu, nu) and has symplectic eigenvalue exactly 1.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Physicality tolerance on the eigenvalues of cov + i*Omega.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Relative tolerance factor for the +/- imaginary pairing of eig(Omega*cov).
pub const PAIRING_TOL_FACTOR: f64 = 1e-8;

/// Ordered set of mode labels; quadrature vectors have dimension 2*n_modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLayout {
    labels: Vec<String>,
}

impl ModeLayout {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter(
                "mode layout needs at least one mode".into(),
            ));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate mode label {label:?}"
                )));
            }
        }
        Ok(Self { labels })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    /// Quadrature-vector dimension, 2*n_modes.
    pub fn dim(&self) -> usize {
        2 * self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mode label {label:?}")))
    }

    pub fn x_index(&self, mode: usize) -> usize {
        2 * mode
    }

    pub fn p_index(&self, mode: usize) -> usize {
        2 * mode + 1
    }
}

/// Block-diagonal symplectic form: [[0, 1], [-1, 0]] per mode.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a symmetric matrix, with the pairing residual.
#[derive(Debug, Clone)]
pub struct SymplecticSpectrum {
    /// The n values gamma_j, sorted ascending.
    pub values: Vec<f64>,
    /// max |Re lambda| over the eigenvalues of Omega*cov.
    pub residual: f64,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }
}

/// Computes {gamma_j} with spectrum(Omega*cov) = {+/- i gamma_j}.
///
/// The complex spectrum is paired explicitly; the residual max|Re| must stay
/// below `PAIRING_TOL_FACTOR * ||cov||_F` or a degeneracy error is returned.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let dim = cov.nrows();
    if cov.ncols() != dim || dim % 2 != 0 || dim == 0 {
        return Err(Error::DimensionMismatch(format!(
            "covariance must be square with even dimension, got {}x{}",
            dim,
            cov.ncols()
        )));
    }
    let asym = (cov - cov.transpose()).amax();
    if asym > 1e-9 * cov.amax().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "covariance is not symmetric (asymmetry {asym:.3e})"
        )));
    }
    let n = dim / 2;
    let product = symplectic_form(n) * cov;
    let eigs = product.complex_eigenvalues();

    let tol = PAIRING_TOL_FACTOR * cov.norm();
    let residual = eigs.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NumericalDegeneracy { residual, tol });
    }

    let mut magnitudes: Vec<f64> = eigs.iter().map(|z| z.im.abs()).collect();
    magnitudes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let (lo, hi) = (magnitudes[2 * j], magnitudes[2 * j + 1]);
        if hi - lo > tol.max(1e-12) {
            return Err(Error::NumericalDegeneracy {
                residual: hi - lo,
                tol: tol.max(1e-12),
            });
        }
        values.push(0.5 * (lo + hi));
    }
    Ok(SymplecticSpectrum { values, residual })
}

/// Gaussian state: mean vector and symmetrized covariance over a mode layout.
#[derive(Debug, Clone)]
pub struct GaussianState {
    layout: ModeLayout,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Wraps a mean/covariance pair. The covariance must be symmetric up to
    /// roundoff; the stored matrix is exactly symmetrized.
    pub fn new(layout: ModeLayout, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = layout.dim();
        if mean.len() != dim || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected dimension {dim}, got mean {} and cov {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-9 * cov.amax().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "covariance is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let cov = 0.5 * (&cov + cov.transpose());
        Ok(Self { layout, mean, cov })
    }

    /// Ground state of decoupled oscillators with the given frequencies.
    pub fn vacuum(layout: ModeLayout, freqs: &[f64]) -> Result<Self> {
        let nbars = vec![0.0; layout.n_modes()];
        Self::thermal(layout, freqs, &nbars)
    }

    /// Product of single-mode thermal states; mode j carries the block
    /// (2*nbar_j + 1) * diag(1/nu_j, nu_j) and symplectic eigenvalue 2*nbar_j + 1.
    pub fn thermal(layout: ModeLayout, freqs: &[f64], nbars: &[f64]) -> Result<Self> {
        let n = layout.n_modes();
        if freqs.len() != n || nbars.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} frequencies and occupations, got {} and {}",
                freqs.len(),
                nbars.len()
            )));
        }
        for &nu in freqs {
            if !(nu > 0.0) || !nu.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mode frequency must be positive and finite, got {nu}"
                )));
            }
        }
        for &nb in nbars {
            if !(nb >= 0.0) || !nb.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mean occupation must be non-negative and finite, got {nb}"
                )));
            }
        }
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (k, (&nu, &nb)) in freqs.iter().zip(nbars).enumerate() {
            let scale = 2.0 * nb + 1.0;
            cov[(2 * k, 2 * k)] = scale / nu;
            cov[(2 * k + 1, 2 * k + 1)] = scale * nu;
        }
        let mean = DVector::zeros(2 * n);
        Ok(Self { layout, mean, cov })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Restriction to the listed modes (original mode order is kept).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one mode".into(),
            ));
        }
        let mut kept_modes: Vec<usize> = Vec::with_capacity(keep.len());
        for label in keep {
            let idx = self.layout.index_of(label)?;
            if !kept_modes.contains(&idx) {
                kept_modes.push(idx);
            }
        }
        kept_modes.sort_unstable();
        let rows: Vec<usize> = kept_modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let dim = rows.len();
        let mut mean = DVector::zeros(dim);
        let mut cov = DMatrix::zeros(dim, dim);
        for (i, &ri) in rows.iter().enumerate() {
            mean[i] = self.mean[ri];
            for (j, &rj) in rows.iter().enumerate() {
                cov[(i, j)] = self.cov[(ri, rj)];
            }
        }
        let layout = ModeLayout::new(
            kept_modes
                .iter()
                .map(|&m| self.layout.labels()[m].clone()),
        )?;
        Ok(Self { layout, mean, cov })
    }

    /// Partial transposition of the named mode: its momentum row/column (and
    /// mean entry) change sign. The result need not be physical.
    pub fn partial_transpose(&self, transposed_mode: &str) -> Result<Self> {
        if self.layout.n_modes() < 2 {
            return Err(Error::InvalidParameter(
                "partial transpose needs at least two modes".into(),
            ));
        }
        let mode = self.layout.index_of(transposed_mode)?;
        let p = self.layout.p_index(mode);
        let mut mean = self.mean.clone();
        let mut cov = self.cov.clone();
        mean[p] = -mean[p];
        for k in 0..self.layout.dim() {
            cov[(p, k)] = -cov[(p, k)];
            cov[(k, p)] = -cov[(k, p)];
        }
        Ok(Self {
            layout: self.layout.clone(),
            mean,
            cov,
        })
    }

    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        symplectic_eigenvalues(&self.cov)
    }

    /// Smallest eigenvalue of the Hermitian matrix cov + i*Omega; physical
    /// states satisfy >= -PHYSICALITY_TOL.
    pub fn min_physicality_eigenvalue(&self) -> f64 {
        let dim = self.layout.dim();
        let omega = symplectic_form(self.layout.n_modes());
        let herm = DMatrix::from_fn(dim, dim, |i, j| Complex::new(self.cov[(i, j)], omega[(i, j)]));
        let eig = herm.symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_physical(&self) -> bool {
        self.min_physicality_eigenvalue() >= -PHYSICALITY_TOL
    }

    /// Local single-mode scaling (x_j, p_j) -> (s_j x_j, p_j / s_j). This is
    /// symplectic, so all symplectic invariants are unchanged.
    pub fn rescale_modes(&self, scales: &[f64]) -> Result<Self> {
        let n = self.layout.n_modes();
        if scales.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} scales, got {}",
                scales.len()
            )));
        }
        for &s in scales {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mode scale must be positive and finite, got {s}"
                )));
            }
        }
        let mut diag = DVector::zeros(2 * n);
        for (k, &s) in scales.iter().enumerate() {
            diag[2 * k] = s;
            diag[2 * k + 1] = 1.0 / s;
        }
        let d = DMatrix::from_diagonal(&diag);
        let mean = &d * &self.mean;
        let cov = &d * &self.cov * &d;
        Ok(Self {
            layout: self.layout.clone(),
            mean,
            cov,
        })
    }

    /// Rescales each mode by sqrt(nu) so that a vacuum mode of frequency nu
    /// gets the identity covariance (the convention used by the readout).
    pub fn to_dimensionless(&self, freqs: &[f64]) -> Result<Self> {
        let scales: Vec<f64> = freqs
            .iter()
            .map(|&nu| {
                if nu > 0.0 {
                    Ok(nu.sqrt())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "mode frequency must be positive, got {nu}"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        self.rescale_modes(&scales)
    }
}
