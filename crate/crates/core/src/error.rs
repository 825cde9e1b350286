use std::path::PathBuf;

/// Errors raised by the library. Numeric errors carry the name of the
/// operation that raised them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error(
        "{op}: quadrature did not converge (error estimate {estimate:.3e}, target {target:.3e}, {subdivisions} subdivisions)"
    )]
    Quadrature {
        op: &'static str,
        estimate: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("{op}: finite-difference error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Gradient {
        op: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("fit_lorentzian: {msg} (iterations: {iterations}, residual norm: {residual:.3e})")]
    Fit {
        msg: String,
        iterations: usize,
        residual: f64,
    },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    /// True for errors caused by invalid user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Config { .. } | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
