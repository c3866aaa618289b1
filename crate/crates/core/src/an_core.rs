//! Family-generic photon statistics engine.
//!
//! A family is described by the signed amplitude functions `h_n(u)` on a
//! domain `0 <= u < R^2`, normalized so that `P_n(u) = u^n h_n(u)^2` is a
//! probability distribution for every admissible `u`, with strictly
//! increasing mean `nbar(u)`. Everything else — moments, Mandel parameter,
//! inversion of the mean, detector-loss transforms, phase-space embedding —
//! is generic over that contract and implemented here. Families may attach
//! closed-form evaluators; the series path is always available and serves as
//! the reference implementation the closed forms are tested against.

use crate::specfun::SpecFunError;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// A signed amplitude held as `sign * exp(ln_abs)`.
///
/// Amplitudes like `h_n(u)` routinely underflow the double range while the
/// probabilities built from them (`u^n h_n^2`) are perfectly representable,
/// so families evaluate in log scale and reconstruction happens as late as
/// possible. `sign` is -1, 0, or +1; exact zeros carry `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub sign: f64,
    pub ln_abs: f64,
}

impl Amplitude {
    pub fn zero() -> Self {
        Amplitude {
            sign: 0.0,
            ln_abs: f64::NEG_INFINITY,
        }
    }

    /// Wraps an already-computed value (adequate when no underflow risk).
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Amplitude::zero()
        } else {
            Amplitude {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    /// The plain value; may underflow to signed zero.
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Log-scale amplitude evaluator `(n, u) -> h_n(u)`.
pub type AmplitudeFn = Arc<dyn Fn(usize, f64) -> Amplitude + Send + Sync>;
/// Scalar closed-form evaluator.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Optional closed-form evaluators attached to a family.
///
/// Every field may be absent; the generic series machinery fills the gaps.
/// Present fields are trusted for speed but are cross-checked against the
/// series path by the verification suite.
#[derive(Clone, Default)]
pub struct ClosedForms {
    /// `u -> ln N(u)`, log of the normalization function.
    pub ln_norm: Option<ScalarFn>,
    /// `u -> nbar(u)`, mean photon number.
    pub nbar: Option<ScalarFn>,
    /// `u -> <n^2>(u)`, second moment (only when not derivable from `mandel_q`).
    pub n2bar: Option<ScalarFn>,
    /// `nbar -> u`, inverse of the mean.
    pub u_of_nbar: Option<ScalarFn>,
    /// `u -> Q_M(u)`, Mandel parameter.
    pub mandel_q: Option<ScalarFn>,
    /// `nbar -> h_0(u(nbar))^2 - e^{-nbar}`, the vacuum-overlap excess.
    pub delta: Option<ScalarFn>,
    /// `u -> w(u)`, weight of the resolution-of-identity measure.
    pub weight: Option<ScalarFn>,
}

/// A coherent-state family: named parameters, domain, amplitudes, and
/// whatever closed forms it brings along. Immutable after construction; all
/// operations are pure, so values can be shared freely across threads.
#[derive(Clone)]
pub struct AnFamily {
    name: String,
    params: Vec<(String, f64)>,
    radius_sq: f64,
    support_max: Option<usize>,
    h: AmplitudeFn,
    closed: ClosedForms,
}

/// Photon-number distribution at a fixed `u`, truncated with a certified
/// tail bound: `|1 - sum(probs)| <= tail_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    /// The point the distribution was evaluated at.
    pub u: f64,
    /// `probs[n] = P_n(u)`.
    pub probs: Vec<f64>,
    /// Bound on the truncated mass plus summation round-off.
    pub tail_bound: f64,
}

/// First two moments of the photon number together with the Mandel parameter
/// `Q_M = (<n^2> - nbar^2)/nbar - 1` (0 at `nbar = 0` by continuity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub nbar: f64,
    pub n2bar: f64,
    pub mandel_q: f64,
}

/// Errors from family-level operations.
#[derive(Debug, Clone, PartialEq)]
pub enum AnError {
    /// `u` negative or at/beyond the domain radius.
    DomainU { u: f64, radius_sq: f64 },
    /// Requested mean outside the range of `nbar(.)`.
    DomainNbar { nbar: f64 },
    /// Detection efficiency outside `[0, 1]`.
    DomainEta { eta: f64 },
    /// A special-function evaluation failed.
    SpecFun(SpecFunError),
    /// An iteration (truncation scan, bracketing, bisection) hit its limit.
    NoConvergence { what: &'static str },
}

impl fmt::Display for AnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnError::DomainU { u, radius_sq } => {
                write!(f, "u = {u} outside the family domain [0, {radius_sq})")
            }
            AnError::DomainNbar { nbar } => {
                write!(f, "mean photon number {nbar} not attainable by this family")
            }
            AnError::DomainEta { eta } => write!(f, "efficiency {eta} outside [0, 1]"),
            AnError::SpecFun(e) => write!(f, "special function failure: {e}"),
            AnError::NoConvergence { what } => write!(f, "{what} did not converge"),
        }
    }
}

impl std::error::Error for AnError {}

impl From<SpecFunError> for AnError {
    fn from(e: SpecFunError) -> Self {
        AnError::SpecFun(e)
    }
}

pub type AnResult<T> = Result<T, AnError>;

/// Largest number of distribution terms the truncation scan will produce.
const MAX_TERMS: usize = 2_000_000;
/// A term is tail-like once it drops below this fraction of the running peak.
const SMALL_FRACTION: f64 = 1e-16;
/// Consecutive tail-like terms required before the geometric bound is taken.
const SMALL_RUN: usize = 10;
/// Target for the geometric part of the tail bound.
const TAIL_TARGET: f64 = 2.5e-13;
/// Allowance for per-term and summation round-off in `tail_bound`.
const ROUNDING_ALLOWANCE: f64 = 5e-13;

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

impl AnFamily {
    /// Assembles a family from its parts. `radius_sq` may be infinite;
    /// `support_max` is `Some(n)` for distributions supported on `0..=n`.
    pub fn new(
        name: impl Into<String>,
        params: Vec<(String, f64)>,
        radius_sq: f64,
        support_max: Option<usize>,
        h: AmplitudeFn,
        closed: ClosedForms,
    ) -> Self {
        AnFamily {
            name: name.into(),
            params,
            radius_sq,
            support_max,
            h,
            closed,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn radius_sq(&self) -> f64 {
        self.radius_sq
    }

    pub fn support_max(&self) -> Option<usize> {
        self.support_max
    }

    pub fn closed_forms(&self) -> &ClosedForms {
        &self.closed
    }

    /// Signed amplitude `h_n(u)` in log scale. The sign matters: vacuum
    /// overlap zeros are located by sign changes of `h_0`.
    pub fn amplitude(&self, n: usize, u: f64) -> Amplitude {
        (self.h)(n, u)
    }

    /// Plain-value amplitude; underflows to 0 where `ln|h|` is very negative.
    pub fn h(&self, n: usize, u: f64) -> f64 {
        self.amplitude(n, u).value()
    }

    fn check_u(&self, u: f64) -> AnResult<()> {
        if u.is_finite() && u >= 0.0 && u < self.radius_sq {
            Ok(())
        } else {
            Err(AnError::DomainU {
                u,
                radius_sq: self.radius_sq,
            })
        }
    }

    /// Probability of `n` counts at the point `u`, formed in log scale so
    /// large `n` and small amplitudes cannot underflow intermediates.
    fn prob(&self, n: usize, u: f64) -> f64 {
        if let Some(cap) = self.support_max {
            if n > cap {
                return 0.0;
            }
        }
        let amp = self.amplitude(n, u);
        if amp.sign == 0.0 {
            return 0.0;
        }
        if n == 0 {
            return (2.0 * amp.ln_abs).exp();
        }
        if u == 0.0 {
            return 0.0;
        }
        (n as f64 * u.ln() + 2.0 * amp.ln_abs).exp()
    }

    /// Photon-number distribution truncated so that the reported
    /// `tail_bound` is at most 1e-12 (0 beyond finite support).
    pub fn distribution(&self, u: f64) -> AnResult<PhotonDistribution> {
        self.check_u(u)?;
        if u == 0.0 {
            return Ok(PhotonDistribution {
                u,
                probs: vec![1.0],
                tail_bound: 0.0,
            });
        }
        if let Some(cap) = self.support_max {
            let probs: Vec<f64> = (0..=cap).map(|n| self.prob(n, u)).collect();
            let tail_bound = ROUNDING_ALLOWANCE;
            return Ok(PhotonDistribution {
                u,
                probs,
                tail_bound,
            });
        }

        let mut probs: Vec<f64> = Vec::with_capacity(64);
        let mut peak = 0.0f64;
        let mut run = 0usize;
        let mut geo_tail;
        loop {
            let n = probs.len();
            if n >= MAX_TERMS {
                return Err(AnError::NoConvergence {
                    what: "distribution truncation",
                });
            }
            let p = self.prob(n, u);
            probs.push(p);
            peak = peak.max(p);
            if peak > 0.0 && p < SMALL_FRACTION * peak {
                run += 1;
            } else {
                run = 0;
            }
            if run < SMALL_RUN {
                continue;
            }
            // Estimate the decay ratio from the observed tail terms. Taking
            // the maximum ratio over the run makes the bound conservative
            // even across an oscillation (single ratios clamp at 0.999,
            // which still leaves the bound below the target because every
            // term in the run already sits 16 orders below the peak).
            let last = probs[probs.len() - SMALL_RUN..].to_vec();
            let mut r: f64 = 0.0;
            for w in last.windows(2) {
                if w[0] > 0.0 && w[1] > 0.0 {
                    r = r.max(w[1] / w[0]);
                }
            }
            let p_end = *probs.last().expect("nonempty");
            if p_end == 0.0 {
                geo_tail = 0.0;
                break;
            }
            let r = r.min(0.999);
            geo_tail = p_end * r / (1.0 - r);
            if geo_tail <= TAIL_TARGET {
                break;
            }
        }
        Ok(PhotonDistribution {
            u,
            probs,
            tail_bound: geo_tail + ROUNDING_ALLOWANCE,
        })
    }

    /// Moments via the truncated series; the reference path for the closed
    /// forms and the only path for families without them.
    pub fn moments_series(&self, u: f64) -> AnResult<MomentSet> {
        let dist = self.distribution(u)?;
        let nbar = kahan_sum(
            dist.probs
                .iter()
                .enumerate()
                .map(|(n, p)| n as f64 * p),
        );
        let n2bar = kahan_sum(
            dist.probs
                .iter()
                .enumerate()
                .map(|(n, p)| (n as f64) * (n as f64) * p),
        );
        let mandel_q = if nbar > 0.0 {
            (n2bar - nbar * nbar) / nbar - 1.0
        } else {
            0.0
        };
        Ok(MomentSet {
            nbar,
            n2bar,
            mandel_q,
        })
    }

    /// Moments, preferring closed forms where the family provides them.
    ///
    /// At `u = 0` the Mandel parameter is the continuity limit: the closed
    /// form evaluated at 0 when present, otherwise a one-sided value taken
    /// at `u = 1e-8`.
    pub fn moments(&self, u: f64) -> AnResult<MomentSet> {
        self.check_u(u)?;
        let nbar = match &self.closed.nbar {
            Some(f) => f(u),
            None => {
                let mut m = self.moments_series(u)?;
                if u == 0.0 && self.closed.mandel_q.is_none() {
                    m.mandel_q = self.moments_series(1e-8)?.mandel_q;
                }
                return Ok(m);
            }
        };
        let mandel_closed = self.closed.mandel_q.as_ref().map(|f| f(u));
        let n2bar = if let Some(f) = &self.closed.n2bar {
            f(u)
        } else if let Some(q) = mandel_closed {
            nbar * (q + 1.0) + nbar * nbar
        } else {
            self.moments_series(u)?.n2bar
        };
        let mandel_q = match mandel_closed {
            Some(q) => q,
            None if nbar > 0.0 => (n2bar - nbar * nbar) / nbar - 1.0,
            None => 0.0,
        };
        Ok(MomentSet {
            nbar,
            n2bar,
            mandel_q,
        })
    }

    fn nbar_at(&self, u: f64) -> AnResult<f64> {
        match &self.closed.nbar {
            Some(f) => Ok(f(u)),
            None => Ok(self.moments_series(u)?.nbar),
        }
    }

    /// Inverts the strictly increasing mean: returns `u` with
    /// `|nbar(u) - nbar| <= 1e-12 * nbar`.
    ///
    /// Uses the family's closed inverse when available; otherwise brackets
    /// (doubling from `u = 1` on unbounded domains) and bisects.
    pub fn invert_nbar(&self, nbar: f64) -> AnResult<f64> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(AnError::DomainNbar { nbar });
        }
        if nbar == 0.0 {
            return Ok(0.0);
        }
        if let Some(max_n) = self.support_max {
            if nbar >= max_n as f64 {
                return Err(AnError::DomainNbar { nbar });
            }
        }
        if let Some(f) = &self.closed.u_of_nbar {
            let u = f(nbar);
            if u.is_finite() && u >= 0.0 && u < self.radius_sq {
                return Ok(u);
            }
            return Err(AnError::DomainNbar { nbar });
        }

        let mut lo = 0.0f64;
        let mut hi;
        if self.radius_sq.is_finite() {
            hi = self.radius_sq * (1.0 - 1e-12);
            if self.nbar_at(hi)? < nbar {
                return Err(AnError::DomainNbar { nbar });
            }
        } else {
            hi = 1.0;
            let mut doublings = 0;
            while self.nbar_at(hi)? < nbar {
                lo = hi;
                hi *= 2.0;
                doublings += 1;
                if doublings > 1024 {
                    return Err(AnError::NoConvergence {
                        what: "mean inversion bracketing",
                    });
                }
            }
        }

        let tol = 1e-12 * nbar;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let val = self.nbar_at(mid)?;
            if (val - nbar).abs() <= 0.25 * tol {
                return Ok(mid);
            }
            if val < nbar {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = 0.5 * (lo + hi);
        if (self.nbar_at(u)? - nbar).abs() <= tol {
            Ok(u)
        } else {
            Err(AnError::NoConvergence {
                what: "mean inversion bisection",
            })
        }
    }

    /// Embeds `alpha` into the family's phase space:
    /// `zeta = sqrt(nbar(|alpha|^2)) * exp(i arg alpha)`.
    pub fn phase_space_point(&self, alpha: Complex64) -> AnResult<Complex64> {
        let u = alpha.norm_sqr();
        self.check_u(u)?;
        if u == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let r = self.nbar_at(u)?.sqrt();
        Ok(Complex64::from_polar(r, alpha.arg()))
    }
}

/// Photon distribution after detection with efficiency `eta` (each photon
/// independently seen with probability `eta`):
/// `P'_n = sum_{m >= n} C(m, n) eta^n (1-eta)^{m-n} P_m`.
///
/// The output keeps the source's `u` as a record of where it came from; the
/// transformed distribution generally belongs to no family. Its tail bound
/// doubles the input's: mass can only move downward, but the truncated input
/// tail could have landed anywhere.
pub fn bernoulli_transform(dist: &PhotonDistribution, eta: f64) -> AnResult<PhotonDistribution> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(AnError::DomainEta { eta });
    }
    if eta == 1.0 {
        return Ok(PhotonDistribution {
            u: dist.u,
            probs: dist.probs.clone(),
            tail_bound: dist.tail_bound,
        });
    }
    let len = dist.probs.len();
    if eta == 0.0 {
        return Ok(PhotonDistribution {
            u: dist.u,
            probs: vec![kahan_sum(dist.probs.iter().copied())],
            tail_bound: 2.0 * dist.tail_bound.max(1e-15),
        });
    }
    let ln_eta = eta.ln();
    let ln_keep = (1.0 - eta).ln();
    let mut probs = vec![0.0f64; len];
    for (n, out) in probs.iter_mut().enumerate() {
        let terms = (n..len).map(|m| {
            let lw = crate::specfun::log_binomial(m as f64, n as f64)
                .expect("m >= n >= 0 by construction")
                + n as f64 * ln_eta
                + (m - n) as f64 * ln_keep;
            lw.exp() * dist.probs[m]
        });
        *out = kahan_sum(terms);
    }
    Ok(PhotonDistribution {
        u: dist.u,
        probs,
        tail_bound: 2.0 * dist.tail_bound.max(1e-15),
    })
}
