use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// The tridiagonal QL iteration did not converge for the eigenvalue at `index`.
    NoConvergence { index: usize, iterations: usize },
    /// No qualifying maximum of the stored energy inside the search window.
    NoMaximum { window: f64 },
    /// The power-law fit is ill-posed.
    Fit(String),
    /// The requested full-space problem exceeds the memory guard.
    Resource { spins: u32, limit: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoConvergence { index, iterations } => write!(
                f,
                "tridiagonal QL failed to converge for eigenvalue {index} after {iterations} iterations"
            ),
            Error::NoMaximum { window } => write!(
                f,
                "no qualifying maximum of the stored energy in (0, {window}]; try a larger window"
            ),
            Error::Fit(msg) => write!(f, "fit error: {msg}"),
            Error::Resource { spins, limit } => write!(
                f,
                "full-space oracle limited to {limit} spins, requested {spins}"
            ),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
