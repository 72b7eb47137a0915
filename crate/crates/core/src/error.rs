//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Hyperspherical angles are undefined for the zero vector (a sensor at
    /// the target location has no bearing).
    #[error("zero vector: hyperspherical angles are undefined at the origin")]
    ZeroVector,

    #[error("unsupported dimension d={0}")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Matern II thinning saturates at `1/V_d(rho_c)`; densities at or above
    /// that cannot be matched by any parent intensity.
    #[error(
        "target intensity {target} is infeasible for Matern II with this hardcore \
         radius (saturation bound {saturation})"
    )]
    InfeasibleDensity { target: f64, saturation: f64 },

    #[error("singular fit: need at least two distinct range values")]
    SingularFit,

    #[error("calibration failed: fitted slope {gamma_hat} is not negative")]
    CalibrationFailed { gamma_hat: f64 },

    #[error("no sensors: cannot fuse an empty set of estimates")]
    NoSensors,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
