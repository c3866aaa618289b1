//! Comparison helpers shared by tests and the runtime verification suite.
//!
//! Coefficients and probabilities in this crate span many orders of magnitude,
//! so a single convention is used throughout: values are compared relatively
//! when they are large enough for a relative error to be meaningful, and
//! absolutely below that floor.

/// Magnitude below which comparisons switch from relative to absolute.
pub const REL_FLOOR: f64 = 1e-8;

/// Mixed relative/absolute deviation of `a` from `b`.
///
/// Returns `|a - b| / max(|a|, |b|)` when either magnitude exceeds
/// [`REL_FLOOR`], and the plain `|a - b|` otherwise.
pub fn dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    let diff = (a - b).abs();
    if scale > REL_FLOOR {
        diff / scale
    } else {
        diff
    }
}

/// True when [`dev`] is within `tol`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    dev(a, b) <= tol
}

/// Plain relative deviation `|a - b| / |b|`; `b` must be nonzero.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
