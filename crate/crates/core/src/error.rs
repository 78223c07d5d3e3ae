use thiserror::Error;

/// Errors shared across the simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The quadratic form has a non-positive normal mode; the harmonic
    /// treatment breaks down at this coupling.
    #[error(
        "unstable regime: effective coupling {coupling:.6e} reaches the critical value \
         {critical:.6e} (stability requires sqrt(k1^2+k2^2) < omega*omega0); {detail}"
    )]
    UnstableRegime {
        coupling: f64,
        critical: f64,
        detail: String,
    },

    /// Eigenvalues of Omega*cov failed to split into clean +/- imaginary pairs.
    #[error(
        "numerical degeneracy: symplectic pairing residual {residual:.3e} exceeds \
         tolerance {tol:.3e}"
    )]
    NumericalDegeneracy { residual: f64, tol: f64 },

    #[error("step too large: |t|*nu_max = {0:.3e} exceeds 1e6; subdivide the interval")]
    StepTooLarge(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("missing measurement setting: {0}")]
    MissingSetting(String),

    #[error("ill-conditioned reconstruction: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;
