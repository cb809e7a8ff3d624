use thiserror::Error;

/// Errors raised by the numerical and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{what} did not converge: achieved {achieved:.3e}, target {target:.3e}")]
    NotConverged { what: &'static str, achieved: f64, target: f64 },
    #[error("non-finite {what} value near {at}")]
    NonFinite { what: &'static str, at: f64 },
    #[error("Laplace inversion methods disagree: {primary} vs {secondary}")]
    InversionDisagreement { primary: f64, secondary: f64 },
    #[error("contour derivative unstable after {halvings} radius halvings (last change {change:.3e})")]
    DerivativeUnstable { halvings: u32, change: f64 },
    #[error("{0} is not supported")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::NonFinite { .. }
                | Error::InversionDisagreement { .. }
                | Error::DerivativeUnstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
