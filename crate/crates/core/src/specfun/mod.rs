//! Special functions and quadrature.
//!
//! Submodules:
//! * [`bessel`] — Bessel `J_n` batches via Miller's downward recurrence and the
//!   modified Bessel `I_nu` by its ascending series, plus a scaled
//!   `J_n(2 sqrt(u)) / u^{n/2}` evaluator that is regular at the origin;
//! * [`gamma`] — Lanczos log-gamma and the log-binomial built on it;
//! * [`lambert`] — principal branch `W_0` by Halley iteration;
//! * [`quad`] — adaptive Gauss-Kronrod quadrature on finite and semi-infinite
//!   intervals.

use std::fmt;

pub mod bessel;
pub mod gamma;
pub mod lambert;
pub mod quad;

pub use bessel::{bessel_i, bessel_i_log, bessel_j_batch, bessel_j_scaled, bessel_j_scaled_log};
pub use gamma::{ln_gamma, log_binomial};
pub use lambert::lambert_w0;
pub use quad::{integrate, QuadratureResult};

/// Errors from special-function evaluation and quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// Argument outside the supported domain.
    Domain { what: &'static str, value: f64 },
    /// Result would overflow the double range.
    Overflow { what: &'static str, value: f64 },
    /// Iteration failed to reach the requested residual.
    NoConvergence { what: &'static str },
    /// Quadrature hit the subdivision limit; the best estimate is reported.
    QuadratureNoConvergence {
        value: f64,
        abs_error_estimate: f64,
        evaluations: u64,
    },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Domain { what, value } => {
                write!(f, "{what}: argument {value} outside domain")
            }
            SpecFunError::Overflow { what, value } => {
                write!(f, "{what}: result overflows for argument {value}")
            }
            SpecFunError::NoConvergence { what } => write!(f, "{what}: iteration did not converge"),
            SpecFunError::QuadratureNoConvergence {
                value,
                abs_error_estimate,
                evaluations,
            } => write!(
                f,
                "quadrature did not converge: best estimate {value} +/- {abs_error_estimate} after {evaluations} evaluations"
            ),
        }
    }
}

impl std::error::Error for SpecFunError {}

pub type SpecFunResult<T> = Result<T, SpecFunError>;
