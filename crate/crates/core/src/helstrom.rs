//! Minimum-error discrimination of a coherent state against the vacuum.
//!
//! For a binary alphabet {vacuum, state} with prior weights `xi0`, `xi1`,
//! the optimal (Helstrom) error probability for pure states depends only on
//! the squared overlap `|<0|state>|^2`:
//!
//! ```text
//! P_H = (1 - sqrt(1 - 4 xi0 xi1 overlap_sq)) / 2
//! ```
//!
//! (C. W. Helstrom, *Quantum Detection and Estimation Theory*, Academic
//! Press, 1976). For the state families in this crate the vacuum overlap is
//! `h_0(u)^2` at the intensity realizing a prescribed mean count, which makes
//! the bound directly comparable across families at equal `nbar`. The
//! comparator `delta = h_0(u(nbar))^2 - e^{-nbar}` measures the gap to the
//! Glauber-Sudarshan reference: negative values mean a lower error bound
//! than standard coherent states at the same mean count.
//!
//! Detector losses enter through the efficiency `eta`: Bernoulli thinning of
//! the counts rescales every mean to `eta * nbar`, so the lossy bound is the
//! lossless one evaluated at the effective mean — which is why the sign
//! pattern of `delta` is efficiency-independent.

use crate::an_core::{AnError, AnFamily};
use std::fmt;

/// Default prior weight for the vacuum hypothesis (even odds).
pub const DEFAULT_XI0: f64 = 0.5;

/// Deviations within this band count as zero when classifying `delta` signs.
const SIGN_TOL: f64 = 1e-12;

/// Errors from Helstrom-bound evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum HelstromError {
    /// Squared overlap outside `[0, 1]`.
    InvalidOverlap(f64),
    /// Prior weight outside the open interval `(0, 1)`.
    InvalidPrior(f64),
    /// Detection efficiency outside `(0, 1]`.
    InvalidEta(f64),
    /// Empty or non-finite evaluation grid.
    InvalidGrid,
    /// Failure in the underlying family evaluation (range, convergence).
    Family(AnError),
}

impl fmt::Display for HelstromError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HelstromError::InvalidOverlap(v) => {
                write!(f, "squared overlap {v} outside [0, 1]")
            }
            HelstromError::InvalidPrior(v) => write!(f, "prior weight {v} outside (0, 1)"),
            HelstromError::InvalidEta(v) => write!(f, "efficiency {v} outside (0, 1]"),
            HelstromError::InvalidGrid => write!(f, "evaluation grid is empty or non-finite"),
            HelstromError::Family(e) => write!(f, "family evaluation failed: {e}"),
        }
    }
}

impl std::error::Error for HelstromError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            HelstromError::Family(e) => Some(e),
            _ => None,
        }
    }
}

impl From<AnError> for HelstromError {
    fn from(e: AnError) -> Self {
        HelstromError::Family(e)
    }
}

pub type HelstromResult<T> = Result<T, HelstromError>;

/// One evaluated point of the discrimination bound, carrying both the
/// overlap and the bound so downstream consumers need no recomputation.
#[derive(Debug, Clone, PartialEq)]
pub struct HelstromRecord {
    /// Mean count of the signal state (before detector losses).
    pub nbar: f64,
    /// Detection efficiency.
    pub eta: f64,
    /// Prior weight of the vacuum hypothesis.
    pub xi0: f64,
    /// Squared vacuum overlap `h_0(u(eta * nbar))^2`.
    pub overlap_sq: f64,
    /// The Helstrom bound.
    pub p_h: f64,
    /// Gap to the Glauber-Sudarshan reference: `overlap_sq - e^{-eta nbar}`.
    pub delta: f64,
}

fn check_xi0(xi0: f64) -> HelstromResult<f64> {
    if !(xi0 > 0.0 && xi0 < 1.0) {
        return Err(HelstromError::InvalidPrior(xi0));
    }
    Ok(xi0)
}

fn check_eta(eta: f64) -> HelstromResult<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(HelstromError::InvalidEta(eta));
    }
    Ok(eta)
}

/// The pure-state Helstrom bound from the squared overlap and the vacuum
/// prior `xi0` (the state prior is `1 - xi0`).
///
/// Returns 0 exactly for orthogonal states (`overlap_sq = 0`); the radicand
/// is clamped at 0 so that `overlap_sq = 1` with even priors yields exactly
/// `1/2` rather than a NaN from rounding.
pub fn helstrom_pure(overlap_sq: f64, xi0: f64) -> HelstromResult<f64> {
    if !(0.0..=1.0).contains(&overlap_sq) || !overlap_sq.is_finite() {
        return Err(HelstromError::InvalidOverlap(overlap_sq));
    }
    check_xi0(xi0)?;
    if overlap_sq == 0.0 {
        return Ok(0.0);
    }
    let radicand = (1.0 - 4.0 * xi0 * (1.0 - xi0) * overlap_sq).max(0.0);
    Ok(0.5 * (1.0 - radicand.sqrt()))
}

/// Evaluates the bound for one family at mean count `nbar`, detector
/// efficiency `eta`, and vacuum prior `xi0`.
///
/// The intensity is found by inverting the mean at the effective count
/// `eta * nbar`; the overlap is the squared vacuum amplitude there.
pub fn helstrom_of_nbar(
    fam: &AnFamily,
    nbar: f64,
    xi0: f64,
    eta: f64,
) -> HelstromResult<HelstromRecord> {
    check_xi0(xi0)?;
    check_eta(eta)?;
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(HelstromError::Family(AnError::DomainNbar { nbar }));
    }
    let effective = eta * nbar;
    let u = fam.invert_nbar(effective)?;
    // At zero intensity normalization forces h_0(0)^2 = 1 for every family;
    // taking it exactly keeps P_H(nbar = 0) = 1/2 free of sqrt-magnified
    // rounding.
    let overlap_sq = if u == 0.0 {
        1.0
    } else {
        let h0 = fam.amplitude(0, u);
        (2.0 * h0.ln_abs).exp()
    };
    let overlap_sq = overlap_sq.min(1.0);
    let p_h = helstrom_pure(overlap_sq, xi0)?;
    Ok(HelstromRecord {
        nbar,
        eta,
        xi0,
        overlap_sq,
        p_h,
        delta: overlap_sq - (-effective).exp(),
    })
}

/// Sign pattern of `delta` over a grid of mean counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    /// Every value within the zero band.
    AllZero,
    /// No value above the zero band.
    AllNonpositive,
    /// No value below the zero band.
    AllNonnegative,
    /// Genuine values on both sides.
    Mixed,
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SignClass::AllZero => "all_zero",
            SignClass::AllNonpositive => "all_nonpositive",
            SignClass::AllNonnegative => "all_nonnegative",
            SignClass::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Classification of the Glauber-Sudarshan gap over a grid, with extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSummary {
    pub classification: SignClass,
    pub min_delta: f64,
    /// `nbar` where the minimum occurs.
    pub min_at: f64,
    pub max_delta: f64,
    /// `nbar` where the maximum occurs.
    pub max_at: f64,
}

/// Classifies the sign of `delta` over `nbar_grid` at efficiency `eta`.
///
/// Because losses only rescale the effective mean, the classification at
/// `eta < 1` over a grid equals the perfect-detection classification over
/// the grid of effective means — lossy detection never flips which family
/// discriminates better.
pub fn sign_summary(fam: &AnFamily, nbar_grid: &[f64], eta: f64) -> HelstromResult<SignSummary> {
    if nbar_grid.is_empty() || nbar_grid.iter().any(|v| !v.is_finite()) {
        return Err(HelstromError::InvalidGrid);
    }
    let mut min_delta = f64::INFINITY;
    let mut max_delta = f64::NEG_INFINITY;
    let (mut min_at, mut max_at) = (f64::NAN, f64::NAN);
    for &nbar in nbar_grid {
        let rec = helstrom_of_nbar(fam, nbar, DEFAULT_XI0, eta)?;
        if rec.delta < min_delta {
            min_delta = rec.delta;
            min_at = nbar;
        }
        if rec.delta > max_delta {
            max_delta = rec.delta;
            max_at = nbar;
        }
    }
    let classification = match (min_delta < -SIGN_TOL, max_delta > SIGN_TOL) {
        (false, false) => SignClass::AllZero,
        (true, false) => SignClass::AllNonpositive,
        (false, true) => SignClass::AllNonnegative,
        (true, true) => SignClass::Mixed,
    };
    Ok(SignSummary {
        classification,
        min_delta,
        min_at,
        max_delta,
        max_at,
    })
}

/// Finds every mean count in `[nbar_lo, nbar_hi]` where the vacuum overlap
/// (hence the Helstrom bound) vanishes.
///
/// Intended for the oscillatory families, whose vacuum amplitude changes
/// sign at the roots of `J_1(2 sqrt(u))`; the scan brackets sign changes of
/// the *signed* amplitude `h_0` (the squared overlap has only tangential
/// zeros) and bisects each bracket to within `1e-10` in `nbar`. Families
/// with single-signed `h_0` yield an empty list.
pub fn find_hb_zeros(fam: &AnFamily, nbar_lo: f64, nbar_hi: f64) -> HelstromResult<Vec<f64>> {
    if !(nbar_lo >= 0.0) || !(nbar_hi > nbar_lo) || !nbar_hi.is_finite() {
        return Err(HelstromError::InvalidGrid);
    }
    let h0_at = |nbar: f64| -> HelstromResult<f64> {
        let u = fam.invert_nbar(nbar)?;
        Ok(fam.h(0, u))
    };
    let steps = (16.0 * (nbar_hi - nbar_lo)).ceil().max(256.0) as usize;
    let dx = (nbar_hi - nbar_lo) / steps as f64;
    let mut zeros = Vec::new();
    let mut prev_x = nbar_lo;
    let mut prev_h = h0_at(prev_x)?;
    for i in 1..=steps {
        let x = nbar_lo + i as f64 * dx;
        let h = h0_at(x)?;
        if prev_h == 0.0 {
            zeros.push(prev_x);
        } else if h != 0.0 && (prev_h < 0.0) != (h < 0.0) {
            let (mut lo, mut hi) = (prev_x, x);
            let mut f_lo = prev_h;
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let f_mid = h0_at(mid)?;
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if (f_mid < 0.0) == (f_lo < 0.0) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_h = h;
    }
    if prev_h == 0.0 {
        zeros.push(prev_x);
    }
    Ok(zeros)
}
