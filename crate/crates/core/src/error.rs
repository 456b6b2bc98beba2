use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value for `{0}`")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("step size {dt:.3e} too large (limit {limit:.3e})")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("CFL condition violated: dt = {dt} > 0.5 * dx = {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("fluxon stalled: reached x = {position:.3} of {length} by t = {time:.1}")]
    Stalled { position: f64, length: f64, time: f64 },

    #[error("implicit step failed to converge at t = {time:.4} (residual {residual:.3e} after {iterations} iterations)")]
    NonConvergent { time: f64, residual: f64, iterations: usize },

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("missing fixed parameter `{0}`")]
    MissingParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(name))
    }
}

pub(crate) fn non_negative(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidParameter {
            name: name.to_string(),
            reason: format!("must be finite and >= 0, got {v}"),
        });
    }
    Ok(v)
}

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}
