use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Validation failures (bad parameters, malformed input files) are kept apart
/// from numerical failures so the CLI can map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("spectrum has no modes")]
    EmptySpectrum,

    #[error("malformed spectrum file at line {line}: {reason}")]
    SpectrumFormat { line: usize, reason: String },

    #[error("intermediate map is singular at t_m = {t_m}: |x(t_m)| = {modulus:e} <= {tol:e}")]
    SingularIntermediate { t_m: f64, modulus: f64, tol: f64 },

    #[error("matrix is not Hermitian (max |D - D^dagger| = {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("trace has no revival: the echo minimum sits at the last grid point t = {t_min}")]
    NoRevival { t_min: f64 },

    #[error("need at least {needed} points with eta < 0 for a fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("eta = {eta} at L = {size} is not negative; ln(-eta) is undefined")]
    NonNegativeEta { size: usize, eta: f64 },

    #[error("traces live on different time grids")]
    GridMismatch,

    #[error("echo traces never separate by more than {eps}")]
    NoOnset { eps: f64 },

    #[error("lattice size {size} exceeds the dense-oracle limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("lowest even-parity level is degenerate (splitting {splitting:e}); ground state is ill-defined")]
    ParityAmbiguity { splitting: f64 },

    #[error("product formula deviates from the dense oracle by {deviation:e} > {tol:e}")]
    OracleMismatch { deviation: f64, tol: f64 },

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::SpectrumFormat { .. }
                | Error::GridMismatch
                | Error::SizeLimit { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
