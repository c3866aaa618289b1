//! Deformed binomial distributions and their polynomial generators.
//!
//! A positive sequence `x_1, x_2, ...` (with `x_0 = 0`) deforms the binomial
//! coefficients through its generalized factorials `x_n! = x_1 x_2 ... x_n`.
//! Two constructions are provided:
//!
//! * the asymmetric deformation
//!   `p_k^(n)(eta) = (x_n!/(x_{n-k}! x_k!)) eta^k p_{n-k}(eta)`, whose
//!   polynomials `p_s` are generated by `N(u)/N(eta u)`;
//! * the symmetric deformation
//!   `p_k^(n)(eta) = (x_n!/(x_{n-k}! x_k!)) q_k(eta) q_{n-k}(1-eta)`, whose
//!   polynomials `q_n` are generated by `N(u)^eta`;
//!
//! where `N(u) = sum_n u^n/x_n!` is the deformed exponential of the sequence.
//! Both reduce to the ordinary binomial pmf for `x_n = n`.
//!
//! The module also classifies sequences by positivity (the deformed
//! exponentials `N = e^F` with `F_1 > 0`, `F_n >= 0` are exactly those whose
//! polynomials stay nonnegative on `[0,1]`), applies the deformed Bernoulli
//! transform, and exposes runnable versions of the two structural
//! propositions: such count states are always super-Poissonian, and their
//! vacuum overlap always exceeds the exponential benchmark.

use crate::an_core::{Amplitude, AmplitudeFn, AnFamily, ClosedForms};
use crate::families::{abel_log_xfact, hermite_log_inv_xfact};
use crate::power_series::{SeriesError, TruncatedSeries};
use crate::specfun::ln_gamma;
use std::fmt;
use std::sync::Arc;

/// Errors from sequence construction and deformation arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum DeformError {
    /// A sequence entry violates `x_0 = 0`, `x_n > 0`.
    InvalidSequence { index: usize, value: f64 },
    /// A constructor parameter out of range.
    InvalidParam { name: &'static str, value: f64 },
    /// Detection efficiency outside `[0, 1]`.
    InvalidEta { eta: f64 },
    /// An operation needs more sequence terms than were generated.
    OrderTooSmall { needed: usize, n_max: usize },
    /// Series arithmetic failure.
    Series(SeriesError),
    /// A sum did not settle within the available terms.
    NoConvergence { what: &'static str },
}

impl fmt::Display for DeformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformError::InvalidSequence { index, value } => {
                write!(f, "sequence entry x_{index} = {value} is invalid")
            }
            DeformError::InvalidParam { name, value } => {
                write!(f, "parameter {name} = {value} out of range")
            }
            DeformError::InvalidEta { eta } => write!(f, "eta = {eta} outside [0, 1]"),
            DeformError::OrderTooSmall { needed, n_max } => {
                write!(f, "needs sequence terms up to {needed}, have {n_max}")
            }
            DeformError::Series(e) => write!(f, "series arithmetic failed: {e}"),
            DeformError::NoConvergence { what } => write!(f, "{what} did not converge"),
        }
    }
}

impl std::error::Error for DeformError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            DeformError::Series(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SeriesError> for DeformError {
    fn from(e: SeriesError) -> Self {
        DeformError::Series(e)
    }
}

pub type DeformResult<T> = Result<T, DeformError>;

/// The highest order to which log-norm coefficients are recovered by series
/// arithmetic when a sequence is given by raw values only: past this the raw
/// coefficients `1/x_n!` of rapidly growing sequences leave the f64 range.
const GENERIC_F_ORDER: usize = 170;

/// A positive deformation sequence with its generalized log-factorials and
/// the Taylor coefficients of `ln N`.
///
/// Only positivity is enforced (`x_0 = 0`, `x_n > 0` for `n >= 1`): the
/// implemented examples include non-monotone sequences (the Hermite-type
/// sequence dips below `x_1` for `a > 1`, the Abel-type one decays toward
/// `beta/e`).
#[derive(Debug, Clone)]
pub struct DeformedSequence {
    name: String,
    x: Vec<f64>,
    log_xfact: Vec<f64>,
    f_coeffs: Vec<f64>,
}

impl DeformedSequence {
    /// Builds a sequence from explicit values `x_0 = 0, x_1, ..., x_n_max`.
    ///
    /// The log-norm coefficients are recovered by series arithmetic, which is
    /// possible only while `1/x_n!` stays representable; generator orders are
    /// therefore capped at `min(n_max, 170)` for sequences built this way.
    /// The named constructors carry exact coefficients to their full order.
    pub fn new(name: &str, x: Vec<f64>) -> DeformResult<Self> {
        if x.is_empty() || x[0] != 0.0 {
            return Err(DeformError::InvalidSequence {
                index: 0,
                value: x.first().copied().unwrap_or(f64::NAN),
            });
        }
        for (index, &value) in x.iter().enumerate().skip(1) {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DeformError::InvalidSequence { index, value });
            }
        }
        let mut log_xfact = vec![0.0; x.len()];
        for n in 1..x.len() {
            log_xfact[n] = log_xfact[n - 1] + x[n].ln();
        }
        let f_order = (x.len() - 1).min(GENERIC_F_ORDER);
        let coeffs: Vec<f64> = log_xfact[..=f_order].iter().map(|&l| (-l).exp()).collect();
        let f = TruncatedSeries::new(coeffs)?.log()?;
        Ok(DeformedSequence {
            name: name.to_string(),
            x,
            log_xfact,
            f_coeffs: f.coeffs().to_vec(),
        })
    }

    /// Builds from closed-form log-factorials and log-norm coefficients.
    fn from_closed_forms(name: &str, mut log_xfact: Vec<f64>, f_coeffs: Vec<f64>) -> Self {
        // The empty product: exactly zero even when the generating closed
        // form evaluates to zero only up to roundoff.
        log_xfact[0] = 0.0;
        let mut x = vec![0.0; log_xfact.len()];
        for n in 1..log_xfact.len() {
            x[n] = (log_xfact[n] - log_xfact[n - 1]).exp();
        }
        DeformedSequence {
            name: name.to_string(),
            x,
            log_xfact,
            f_coeffs,
        }
    }

    /// The undeformed sequence `x_n = n` (ordinary factorials, `ln N = u`).
    pub fn gs(n_max: usize) -> Self {
        let log_xfact = (0..=n_max)
            .map(|n| ln_gamma(n as f64 + 1.0).expect("n + 1 > 0"))
            .collect();
        let mut f = vec![0.0; n_max + 1];
        if n_max >= 1 {
            f[1] = 1.0;
        }
        Self::from_closed_forms("gs", log_xfact, f)
    }

    /// The negative-binomial-type sequence `x_n = n s/(n + s - 1)` generated
    /// by `N(u) = (1 - u/s)^{-s}`, `s > 0`, with `ln N` coefficients
    /// `s^{1-k}/k`.
    pub fn perelomov_type(s: f64, n_max: usize) -> DeformResult<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(DeformError::InvalidParam { name: "s", value: s });
        }
        let ls = ln_gamma(s).expect("s > 0");
        let log_xfact = (0..=n_max)
            .map(|n| {
                let nf = n as f64;
                ln_gamma(nf + 1.0).expect("n + 1 > 0") + nf * s.ln() + ls
                    - ln_gamma(s + nf).expect("s + n > 0")
            })
            .collect();
        let f = (0..=n_max)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    ((1.0 - k as f64) * s.ln()).exp() / k as f64
                }
            })
            .collect();
        Ok(Self::from_closed_forms("perelomov_type", log_xfact, f))
    }

    /// The sequence generated by `N(u) = exp(u + a u^2/2)`, `a > 0`.
    pub fn hermite(a: f64, n_max: usize) -> DeformResult<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(DeformError::InvalidParam { name: "a", value: a });
        }
        let log_xfact = (0..=n_max).map(|n| -hermite_log_inv_xfact(a, n)).collect();
        let mut f = vec![0.0; n_max + 1];
        if n_max >= 1 {
            f[1] = 1.0;
        }
        if n_max >= 2 {
            f[2] = a / 2.0;
        }
        Ok(Self::from_closed_forms("hermite", log_xfact, f))
    }

    /// The sequence generated by `N(u) = exp(-beta W(-u/beta))`, `beta > 0`,
    /// whose log-norm is the tree function with coefficients
    /// `k^{k-1}/(beta^{k-1} k!)`.
    pub fn abel(beta: f64, n_max: usize) -> DeformResult<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(DeformError::InvalidParam {
                name: "beta",
                value: beta,
            });
        }
        let log_xfact = (0..=n_max).map(|n| abel_log_xfact(beta, n)).collect();
        let f = (0..=n_max)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    let kf = k as f64;
                    ((kf - 1.0) * (kf.ln() - beta.ln()) - ln_gamma(kf + 1.0).expect("k + 1 > 0"))
                        .exp()
                }
            })
            .collect();
        Ok(Self::from_closed_forms("abel", log_xfact, f))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Highest generated index.
    pub fn n_max(&self) -> usize {
        self.x.len() - 1
    }

    /// The sequence values `x_0 = 0, x_1, ...`.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// `ln x_n!` for `n = 0..=n_max`.
    pub fn log_xfact(&self) -> &[f64] {
        &self.log_xfact
    }

    /// Taylor coefficients of `ln N(u)` (index = power of `u`).
    pub fn log_norm_coeffs(&self) -> &[f64] {
        &self.f_coeffs
    }

    fn require(&self, needed: usize) -> DeformResult<()> {
        if needed > self.n_max() {
            return Err(DeformError::OrderTooSmall {
                needed,
                n_max: self.n_max(),
            });
        }
        Ok(())
    }

    fn require_f(&self, needed: usize) -> DeformResult<()> {
        if needed >= self.f_coeffs.len() {
            return Err(DeformError::OrderTooSmall {
                needed,
                n_max: self.f_coeffs.len() - 1,
            });
        }
        Ok(())
    }

    /// The deformed exponential `N(u) = sum u^n/x_n!` as a truncated series.
    ///
    /// Raw coefficients `1/x_n!` underflow for rapidly growing factorials
    /// (around order 170 for the undeformed sequence); the polynomial
    /// generators below therefore work in a rescaled basis and use this
    /// series form only where the orders involved are moderate.
    pub fn norm_series(&self, order: usize) -> DeformResult<TruncatedSeries> {
        self.require(order)?;
        let coeffs = self.log_xfact[..=order]
            .iter()
            .map(|&l| (-l).exp())
            .collect();
        Ok(TruncatedSeries::new(coeffs)?)
    }

    /// Best-effort `ln N(u)` from all generated terms (log-sum-exp).
    fn log_norm_raw(&self, u: f64) -> (f64, bool) {
        if u == 0.0 {
            return (0.0, true);
        }
        let lu = u.ln();
        let mut max_lt = f64::NEG_INFINITY;
        let lts: Vec<f64> = self
            .log_xfact
            .iter()
            .enumerate()
            .map(|(m, &l)| {
                let lt = m as f64 * lu - l;
                max_lt = max_lt.max(lt);
                lt
            })
            .collect();
        let mut total = 0.0;
        let mut last = 0.0;
        for &lt in &lts {
            last = (lt - max_lt).exp();
            total += last;
        }
        (max_lt + total.ln(), last <= 1e-14 * total)
    }

    /// `ln N(u)` by direct summation of the positive series; errors if the
    /// generated terms do not reach the regime where the series has settled.
    pub fn log_norm(&self, u: f64) -> DeformResult<f64> {
        if !(u >= 0.0) {
            return Err(DeformError::InvalidParam { name: "u", value: u });
        }
        let (value, settled) = self.log_norm_raw(u);
        if !settled {
            return Err(DeformError::NoConvergence {
                what: "deformed exponential series",
            });
        }
        Ok(value)
    }

    /// Whether the complete-statistical-type bound `x_n <= n x_1` holds for
    /// every generated term (allowing roundoff slack).
    pub fn cst_bound_holds(&self) -> bool {
        let x1 = self.x.get(1).copied().unwrap_or(0.0);
        self.x
            .iter()
            .enumerate()
            .skip(1)
            .all(|(n, &xn)| xn <= n as f64 * x1 * (1.0 + 1e-12))
    }
}

/// Checks `eta` is a probability and returns it.
fn check_eta(eta: f64) -> DeformResult<f64> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(DeformError::InvalidEta { eta });
    }
    Ok(eta)
}

/// Exponentiates `sum_k phi_k u^k` (with `phi_0 = 0`) in the factorial-scaled
/// basis: returns `r_m = x_m! [u^m] exp(Phi)` for `m = 0..=order` via the
/// recurrence `r_m = (1/m) sum_j j phi_j (x_m!/x_{m-j}!) r_{m-j}`.
///
/// Every quantity is kept at the scale of the results themselves (which the
/// positivity theory bounds by 1 for deformed exponentials), so this neither
/// underflows at orders where the raw coefficients `r_m/x_m!` vanish in f64,
/// nor suffers the `(1+eta)^s` error growth of the subtractive normalization
/// recurrence. The factorial ratios are formed in log scale.
fn scaled_exp_series(phi: &[f64], log_xfact: &[f64], order: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(order + 1);
    r.push(1.0);
    for m in 1..=order {
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        for (j, &p) in phi.iter().enumerate().take(m + 1).skip(1) {
            if p == 0.0 || r[m - j] == 0.0 {
                continue;
            }
            let ln_mag = p.abs().ln() + (j as f64).ln() + log_xfact[m] - log_xfact[m - j];
            let term = p.signum() * ln_mag.exp() * r[m - j];
            let y = term - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        r.push(acc / m as f64);
    }
    r
}

/// Generator polynomials `p_0(eta), ..., p_S(eta)` of the asymmetric
/// deformation, from `N(u)/N(eta u) = sum_s p_s(eta) u^s/x_s!`.
///
/// The quotient of deformed exponentials is evaluated as
/// `exp(F(u) - F(eta u))` with `F = ln N`, whose coefficients
/// `F_k (1 - eta^k)` are nonnegative for every positive-type sequence: the
/// resulting sums are subtraction-free and stay accurate at orders in the
/// hundreds, where both the raw quotient coefficients (underflow) and the
/// direct normalization recurrence (error growth like `(1+eta)^s`) fail.
pub fn asym_polynomials(
    seq: &DeformedSequence,
    eta: f64,
    order: usize,
) -> DeformResult<Vec<f64>> {
    check_eta(eta)?;
    seq.require(order)?;
    if eta == 0.0 {
        // N(u)/N(0): p_s = x_s! * (1/x_s!) exactly.
        return Ok(vec![1.0; order + 1]);
    }
    seq.require_f(order)?;
    let phi: Vec<f64> = seq
        .f_coeffs
        .iter()
        .enumerate()
        .take(order + 1)
        .map(|(k, &f)| f * (1.0 - eta.powi(k as i32)))
        .collect();
    Ok(scaled_exp_series(&phi, &seq.log_xfact, order))
}

/// Generator polynomials `q_0(eta), ..., q_S(eta)` of the symmetric
/// deformation, from `N(u)^eta = sum_n q_n(eta) u^n/x_n!`, evaluated as
/// `exp(eta F)` in the same subtraction-free scaled basis.
pub fn sym_polynomials(
    seq: &DeformedSequence,
    eta: f64,
    order: usize,
) -> DeformResult<Vec<f64>> {
    check_eta(eta)?;
    seq.require(order)?;
    seq.require_f(order)?;
    let phi: Vec<f64> = seq
        .f_coeffs
        .iter()
        .take(order + 1)
        .map(|&f| eta * f)
        .collect();
    Ok(scaled_exp_series(&phi, &seq.log_xfact, order))
}

/// Which deformation produced a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Asymmetric,
    Symmetric,
}

/// A deformed binomial pmf over `k = 0..=n` at efficiency `eta`.
#[derive(Debug, Clone)]
pub struct DeformedBinomialDist {
    pub n: usize,
    pub eta: f64,
    pub probs: Vec<f64>,
    /// Per-string probabilities (asymmetric flavor only): the chance of one
    /// *given* arrangement of `k` wins among `n` trials, i.e. the pmf value
    /// divided by the number of arrangements.
    pub per_string: Option<Vec<f64>>,
    pub flavor: Flavor,
}

impl DeformedBinomialDist {
    /// Mean of the win count.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| k as f64 * p)
            .sum()
    }

    /// Standard deviation of the win count.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let m2: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, &p)| (k * k) as f64 * p)
            .sum();
        (m2 - m * m).max(0.0).sqrt()
    }
}

/// The asymmetric deformed binomial pmf
/// `p_k^(n)(eta) = (x_n!/(x_{n-k}! x_k!)) eta^k p_{n-k}(eta)`.
///
/// `polys` must come from [`asym_polynomials`] at the same `eta` with order
/// at least `n`. The per-string probabilities use the reduced sequence
/// `y_n = x_n/n` (so that the multinomial weight `C(n,k)` factors out); the
/// empty product `y_0!` is taken as 1, matching the `x_0!` convention.
pub fn asym_distribution(
    seq: &DeformedSequence,
    polys: &[f64],
    n: usize,
    eta: f64,
) -> DeformResult<DeformedBinomialDist> {
    check_eta(eta)?;
    seq.require(n)?;
    if polys.len() <= n {
        return Err(DeformError::OrderTooSmall {
            needed: n,
            n_max: polys.len().saturating_sub(1),
        });
    }
    let lxf = seq.log_xfact();
    // ln y_n! = ln x_n! - ln n!.
    let lyf: Vec<f64> = (0..=n)
        .map(|m| lxf[m] - ln_gamma(m as f64 + 1.0).expect("m + 1 > 0"))
        .collect();
    let mut probs = Vec::with_capacity(n + 1);
    let mut per_string = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if eta == 0.0 && k > 0 {
            probs.push(0.0);
            per_string.push(0.0);
            continue;
        }
        let le = if k == 0 { 0.0 } else { k as f64 * eta.ln() };
        probs.push((lxf[n] - lxf[n - k] - lxf[k] + le).exp() * polys[n - k]);
        per_string.push((lyf[n] - lyf[n - k] - lyf[k] + le).exp() * polys[n - k]);
    }
    Ok(DeformedBinomialDist {
        n,
        eta,
        probs,
        per_string: Some(per_string),
        flavor: Flavor::Asymmetric,
    })
}

/// The symmetric deformed binomial pmf
/// `p_k^(n)(eta) = (x_n!/(x_{n-k}! x_k!)) q_k(eta) q_{n-k}(1-eta)`.
///
/// `q_eta` and `q_comp` must come from [`sym_polynomials`] at `eta` and
/// `1 - eta` respectively, with order at least `n`.
pub fn sym_distribution(
    seq: &DeformedSequence,
    q_eta: &[f64],
    q_comp: &[f64],
    n: usize,
    eta: f64,
) -> DeformResult<DeformedBinomialDist> {
    check_eta(eta)?;
    seq.require(n)?;
    if q_eta.len() <= n || q_comp.len() <= n {
        return Err(DeformError::OrderTooSmall {
            needed: n,
            n_max: q_eta.len().min(q_comp.len()).saturating_sub(1),
        });
    }
    let lxf = seq.log_xfact();
    let probs = (0..=n)
        .map(|k| (lxf[n] - lxf[n - k] - lxf[k]).exp() * q_eta[k] * q_comp[n - k])
        .collect();
    Ok(DeformedBinomialDist {
        n,
        eta,
        probs,
        per_string: None,
        flavor: Flavor::Symmetric,
    })
}

/// Double-double (compensated) arithmetic for the positivity cross-check.
///
/// Recovering `log N` from raw series coefficients and re-exponentiating
/// amplifies coefficient-level roundoff by roughly the number of
/// compositions of the order, so a plain f64 probe at order 25 carries noise
/// near 1e-9 — above the positivity tolerance. Carrying the two short
/// recurrences in ~1e-32 precision keeps the witness meaningful. Error-free
/// transforms follow Dekker and Knuth; see also Corless et al.,
/// "A Graduate Introduction to Numerical Methods" §4.
mod dd {
    #[derive(Debug, Clone, Copy)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    /// Error-free sum: `a + b = s + err` exactly.
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - bb) + (b - (s - bb)))
    }

    /// Error-free product via fused multiply-add.
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl Dd {
        pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
        pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

        pub fn from_f64(v: f64) -> Dd {
            Dd { hi: v, lo: 0.0 }
        }

        pub fn hi(self) -> f64 {
            self.hi
        }

        fn renorm(hi: f64, lo: f64) -> Dd {
            let (s, e) = two_sum(hi, lo);
            Dd { hi: s, lo: e }
        }

        pub fn add(self, other: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, other.hi);
            Dd::renorm(s, e + self.lo + other.lo)
        }

        pub fn sub(self, other: Dd) -> Dd {
            self.add(Dd {
                hi: -other.hi,
                lo: -other.lo,
            })
        }

        pub fn mul(self, other: Dd) -> Dd {
            let (p, e) = two_prod(self.hi, other.hi);
            Dd::renorm(p, e + self.hi * other.lo + self.lo * other.hi)
        }

        pub fn mul_f64(self, c: f64) -> Dd {
            let (p, e) = two_prod(self.hi, c);
            Dd::renorm(p, e + self.lo * c)
        }

        pub fn div_f64(self, c: f64) -> Dd {
            let q = self.hi / c;
            let (p, e) = two_prod(q, c);
            Dd::renorm(q, (((self.hi - p) - e) + self.lo) / c)
        }
    }
}

/// Outcome of the complete-statistical-type test on a deformed exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct CstReport {
    /// Whether `log N` has `F_1 > 0` and `F_n >= 0` (up to roundoff slack)
    /// for all retained orders — the positivity characterization.
    pub in_sigma_plus: bool,
    /// Smallest generator-polynomial value `p_s(eta)` found on the probe
    /// grid; a genuinely negative value here witnesses non-membership.
    pub min_poly_value: f64,
}

/// Classifies a deformed exponential `N` (given as a series with `N(0) = 1`
/// and nonnegative coefficients) by positivity of its asymmetric generator
/// polynomials.
///
/// Membership is decided from the sign pattern of `F = log N`; the
/// polynomial values on `eta_grid`, rebuilt from `F` as
/// `exp(F(u) - F(eta u))`, provide an independent numeric witness. Where `N`
/// has a vanishing coefficient the polynomial `p_s` is not defined (the
/// sequence value `x_s` degenerates), so the raw quotient coefficient is
/// probed in its place — its sign carries the same information.
///
/// The witness rescales coefficient `s` of the quotient by `1/a_s`, which
/// also rescales whatever rounding the input coefficients carry; for
/// factorially decaying coefficients in double precision the probe resolves
/// the positivity tolerance up to orders around 16–20. Genuine violations
/// appear at low order with order-one magnitude (the first negative
/// generator coefficient is a polynomial in `eta` with coefficients from
/// `F`), so the depth limit does not affect detection.
pub fn cst_check(n: &TruncatedSeries, s_max: usize, eta_grid: &[f64]) -> DeformResult<CstReport> {
    use dd::Dd;
    let order = s_max.min(n.order());
    let f = n.log()?;
    let mut in_sigma_plus = f.coeff(1) > 0.0;
    for k in 2..=order {
        if f.coeff(k) < -1e-14 {
            in_sigma_plus = false;
        }
    }
    // Recompute F = log N in compensated arithmetic: the probe below divides
    // high-order coefficients back out, which amplifies plain-f64 noise past
    // the positivity tolerance.
    let a0 = n.coeff(0);
    let a: Vec<f64> = (0..=order).map(|k| n.coeff(k) / a0).collect();
    let mut l = vec![Dd::ZERO; order + 1];
    for m in 1..=order {
        let mut acc = Dd::ZERO;
        for j in 1..m {
            acc = acc.add(l[m - j].mul_f64((m - j) as f64 * a[j]));
        }
        l[m] = Dd::from_f64(a[m]).sub(acc.div_f64(m as f64));
    }
    let mut min_poly_value = f64::INFINITY;
    for &eta in eta_grid {
        check_eta(eta)?;
        let phi: Vec<Dd> = (0..=order)
            .map(|k| l[k].mul_f64(1.0 - eta.powi(k as i32)))
            .collect();
        let mut g = vec![Dd::ZERO; order + 1];
        g[0] = Dd::ONE;
        for m in 1..=order {
            let mut acc = Dd::ZERO;
            for j in 1..=m {
                acc = acc.add(phi[j].mul(g[m - j]).mul_f64(j as f64));
            }
            g[m] = acc.div_f64(m as f64);
        }
        for s in 1..=order {
            let probe = if a[s] > 0.0 {
                g[s].hi() / a[s]
            } else {
                g[s].hi()
            };
            min_poly_value = min_poly_value.min(probe);
        }
    }
    Ok(CstReport {
        in_sigma_plus,
        min_poly_value,
    })
}

/// Applies the deformed Bernoulli transform to the count distribution of the
/// sequence's coherent states:
/// `sum_{m>=n} (x_m!/(x_{m-n}! x_n!)) eta^n p_{m-n}(eta) P_m(u)`.
///
/// For efficiency `eta` this reproduces the perfect-detection distribution
/// at the attenuated intensity, `(eta u)^n / (N(eta u) x_n!)` — losses act
/// on these states exactly like an intensity rescaling.
///
/// The sum is extended until 10 consecutive terms each contribute less than
/// `1e-16` of the accumulated value; running out of generated sequence terms
/// first is reported as a convergence failure.
pub fn deformed_bernoulli(
    seq: &DeformedSequence,
    u: f64,
    eta: f64,
    n: usize,
) -> DeformResult<f64> {
    check_eta(eta)?;
    seq.require(n)?;
    if !(u >= 0.0) || !u.is_finite() {
        return Err(DeformError::InvalidParam { name: "u", value: u });
    }
    if u == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if eta == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let polys = asym_polynomials(seq, eta, seq.n_max() - n)?;
    let log_norm = seq.log_norm(u)?;
    let lxf = seq.log_xfact();
    let lu = u.ln();
    let le = n as f64 * eta.ln();
    let mut total = 0.0f64;
    let mut small_run = 0usize;
    for m in n..=seq.n_max() {
        // (x_m!/(x_{m-n}! x_n!)) eta^n p_{m-n}(eta) * u^m/(N(u) x_m!)
        let term = (le + m as f64 * lu - log_norm - lxf[m - n] - lxf[n]).exp() * polys[m - n];
        total += term;
        if term.abs() <= 1e-16 * total.abs() {
            small_run += 1;
            if small_run >= 10 {
                return Ok(total);
            }
        } else {
            small_run = 0;
        }
    }
    Err(DeformError::NoConvergence {
        what: "deformed Bernoulli transform",
    })
}

/// The closed form the transform must reproduce:
/// `(eta u)^n / (N(eta u) x_n!)`.
pub fn bernoulli_reference(
    seq: &DeformedSequence,
    u: f64,
    eta: f64,
    n: usize,
) -> DeformResult<f64> {
    check_eta(eta)?;
    seq.require(n)?;
    let v = eta * u;
    if v == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((n as f64 * v.ln() - seq.log_norm(v)? - seq.log_xfact[n]).exp())
}

/// Terminating Gauss hypergeometric sum for the generator polynomials of the
/// negative-binomial-type sequence: `p_k(s; eta) = 2F1(-s, -k; 1-k-s; eta)`.
///
/// Since `-k` is a nonpositive integer the series has `k + 1` terms; the
/// third parameter never vanishes within that range for `s > 0`.
pub fn hypergeom_poly(s: f64, k: usize, eta: f64) -> f64 {
    let mut term = 1.0f64;
    let mut total = 1.0f64;
    let (a, b, c) = (-s, -(k as f64), 1.0 - k as f64 - s);
    for j in 0..k {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * eta;
        total += term;
    }
    total
}

/// Wraps a deformed sequence as a coherent-state family with amplitudes
/// `h_n(u) = 1/sqrt(N(u) x_n!)`, enabling the generic count-statistics
/// machinery (moments, mean inversion, vacuum overlap).
///
/// `radius_sq` is the convergence radius of `N` in the intensity variable
/// (`f64::INFINITY` when entire). The norm is summed from the generated
/// terms, so evaluations lose accuracy at intensities whose series tail
/// extends past `n_max`; the count-distribution machinery reports its own
/// truncation failure there.
pub fn nl_family(seq: &DeformedSequence, radius_sq: f64) -> AnFamily {
    let name = format!("nl[{}]", seq.name());
    let lxf: Arc<[f64]> = seq.log_xfact().into();
    let seq_for_h = seq.clone();
    let h: AmplitudeFn = Arc::new(move |n, u| {
        if n >= lxf.len() {
            return Amplitude::zero();
        }
        let (log_norm, _) = seq_for_h.log_norm_raw(u);
        Amplitude {
            sign: 1.0,
            ln_abs: -0.5 * (log_norm + lxf[n]),
        }
    });
    let seq_for_norm = seq.clone();
    let closed = ClosedForms {
        ln_norm: Some(Arc::new(move |u| seq_for_norm.log_norm_raw(u).0)),
        ..ClosedForms::default()
    };
    AnFamily::new(&name, vec![], radius_sq, None, h, closed)
}

/// `sum_k w(k) F_k u^k` with each term's magnitude assembled in log scale.
/// Zero coefficients are skipped outright, so a vanishing `F_k` against an
/// overflowing power of `u` cannot turn into `0 * inf = NaN`.
fn weighted_coeff_sum(f: &[f64], u: f64, skip: usize, weight: impl Fn(usize) -> f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let ln_u = u.ln();
    let mut acc = 0.0f64;
    for (k, &fk) in f.iter().enumerate().skip(skip) {
        if fk == 0.0 {
            continue;
        }
        acc += weight(k) * fk.signum() * (fk.abs().ln() + k as f64 * ln_u).exp();
    }
    acc
}

/// One evaluation point of the super-Poissonian identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Point {
    pub u: f64,
    /// `<n^2> - <n>^2 - <n>` from the count moments.
    pub lhs: f64,
    /// `sum_k (k^2 - k) F_k u^k` from the log-norm coefficients.
    pub rhs: f64,
    pub mandel_q: f64,
}

/// Result of checking that a positive deformation yields super-Poissonian
/// counts: the variance excess equals a manifestly nonnegative series.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report {
    pub points: Vec<Prop1Point>,
    /// Largest relative deviation between the two sides.
    pub max_dev: f64,
    /// Whether the Mandel parameter was nonnegative at every point.
    pub all_super_poissonian: bool,
    pub pass: bool,
}

/// Verifies `<n^2> - <n>^2 - <n> = sum_k (k^2 - k) F_k u^k >= 0` (with
/// `F = ln N`) on a grid of intensities, with the left side from the generic
/// moment machinery and the right side from the series coefficients.
pub fn prop1_check(
    seq: &DeformedSequence,
    radius_sq: f64,
    u_grid: &[f64],
) -> DeformResult<Prop1Report> {
    let fam = nl_family(seq, radius_sq);
    let f = &seq.f_coeffs;
    let mut points = Vec::with_capacity(u_grid.len());
    let mut max_dev = 0.0f64;
    let mut all_super = true;
    for &u in u_grid {
        let m = fam
            .moments_series(u)
            .map_err(|_| DeformError::NoConvergence {
                what: "count moments",
            })?;
        let lhs = m.n2bar - m.nbar * m.nbar - m.nbar;
        let rhs = weighted_coeff_sum(f, u, 2, |k| (k * k - k) as f64);
        max_dev = max_dev.max(crate::tol::dev(lhs, rhs));
        if m.mandel_q < -1e-12 {
            all_super = false;
        }
        points.push(Prop1Point {
            u,
            lhs,
            rhs,
            mandel_q: m.mandel_q,
        });
    }
    let pass = max_dev <= 1e-10
        && all_super
        && points.iter().all(|p| p.rhs >= -1e-12 && p.lhs >= -1e-10);
    Ok(Prop1Report {
        points,
        max_dev,
        all_super_poissonian: all_super,
        pass,
    })
}

/// One evaluation point of the vacuum-overlap comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Point {
    pub nbar: f64,
    pub u: f64,
    /// `ln N(u)` at the inverted intensity.
    pub log_norm: f64,
    /// `u (ln N)'(u)` from the series derivative — equals `nbar`.
    pub u_dlog_norm: f64,
    /// Vacuum-overlap excess `h_0(u(nbar))^2 - e^{-nbar}`.
    pub delta: f64,
}

/// Result of checking that a positive deformation cannot beat the
/// exponential vacuum overlap: `ln N(u) < u (ln N)'(u)`, equivalently
/// `Delta(nbar) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Report {
    pub points: Vec<Prop2Point>,
    /// Whether the inequality was strict at every point (the undeformed
    /// sequence sits exactly on the boundary).
    pub strict: bool,
    pub pass: bool,
}

/// Verifies `ln N(u) < u d/du ln N(u)` and `Delta(nbar) > 0` on a grid of
/// mean counts. The mean `nbar(u) = u (ln N)'(u) = sum_k k F_k u^k` is a
/// series with nonnegative coefficients, so it is inverted by direct
/// bisection on the coefficient sum (probing points that approach a finite
/// radius geometrically), independent of the count-distribution machinery.
pub fn prop2_check(
    seq: &DeformedSequence,
    radius_sq: f64,
    nbar_grid: &[f64],
) -> DeformResult<Prop2Report> {
    let f = &seq.f_coeffs;
    let mean_at = |u: f64| -> f64 { weighted_coeff_sum(f, u, 1, |k| k as f64) };
    let mut points = Vec::with_capacity(nbar_grid.len());
    let mut strict = true;
    let mut pass = true;
    for &nbar in nbar_grid {
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(DeformError::InvalidParam {
                name: "nbar",
                value: nbar,
            });
        }
        let mut lo = 0.0f64;
        let mut hi = if radius_sq.is_finite() { radius_sq } else { 1.0 };
        if radius_sq.is_finite() {
            // Approach the boundary geometrically; the mean blows up or
            // attains its supremum there.
            let mut t = 1;
            while mean_at(radius_sq * (1.0 - 0.5f64.powi(t))) < nbar {
                t += 1;
                if t > 48 {
                    return Err(DeformError::NoConvergence {
                        what: "mean inversion bracketing",
                    });
                }
            }
            hi = radius_sq * (1.0 - 0.5f64.powi(t));
        } else {
            let mut doublings = 0;
            while mean_at(hi) < nbar {
                lo = hi;
                hi *= 2.0;
                doublings += 1;
                if doublings > 200 {
                    return Err(DeformError::NoConvergence {
                        what: "mean inversion bracketing",
                    });
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mean_at(mid) < nbar {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = 0.5 * (lo + hi);
        let log_norm = seq.log_norm(u)?;
        let u_dlog_norm = mean_at(u);
        let delta = (-log_norm).exp() - (-nbar).exp();
        let gap = u_dlog_norm - log_norm;
        if gap <= 1e-13 * log_norm.abs().max(1.0) || delta <= 1e-15 {
            strict = false;
        }
        if gap < -1e-10 * log_norm.abs().max(1.0) || delta < -1e-12 {
            pass = false;
        }
        points.push(Prop2Point {
            nbar,
            u,
            log_norm,
            u_dlog_norm,
            delta,
        });
    }
    Ok(Prop2Report {
        points,
        strict,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::log_binomial;
    use crate::tol;

    const ETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

    fn test_sequences() -> Vec<(DeformedSequence, f64)> {
        vec![
            (DeformedSequence::gs(80), f64::INFINITY),
            (DeformedSequence::perelomov_type(3.0, 80).unwrap(), 3.0),
            (DeformedSequence::hermite(1.0, 80).unwrap(), f64::INFINITY),
            (
                DeformedSequence::abel(2.0, 80).unwrap(),
                2.0 / std::f64::consts::E,
            ),
        ]
    }

    #[test]
    fn sequence_construction_and_validation() {
        assert!(DeformedSequence::new("bad", vec![1.0, 2.0]).is_err());
        assert!(DeformedSequence::new("bad", vec![0.0, -1.0]).is_err());
        assert!(DeformedSequence::new("ok", vec![0.0, 2.0, 1.0]).is_ok());
        assert!(DeformedSequence::perelomov_type(0.0, 5).is_err());
        assert!(DeformedSequence::hermite(-1.0, 5).is_err());
        assert!(DeformedSequence::abel(0.0, 5).is_err());

        let gs = DeformedSequence::gs(10);
        for n in 1..=10 {
            assert!(tol::close(gs.x()[n], n as f64, 1e-13));
        }
        let per = DeformedSequence::perelomov_type(2.0, 10).unwrap();
        for n in 1..=10 {
            assert!(tol::close(per.x()[n], 2.0 * n as f64 / (n as f64 + 1.0), 1e-12));
        }
        let herm = DeformedSequence::hermite(0.5, 10).unwrap();
        assert!(tol::close(herm.x()[1], 1.0, 1e-13));
        assert!(tol::close(herm.x()[2], 2.0 / 1.5, 1e-12));
        let abel = DeformedSequence::abel(2.0, 10).unwrap();
        assert!(tol::close(
            abel.x()[3],
            crate::families::abel_x(2.0, 3),
            1e-12
        ));
    }

    #[test]
    fn generic_construction_recovers_log_norm_coefficients() {
        // A sequence given by raw values should agree with its closed-form
        // sibling, including the recovered ln N coefficients.
        let closed = DeformedSequence::abel(2.0, 40).unwrap();
        let generic = DeformedSequence::new("raw", closed.x().to_vec()).unwrap();
        for k in 0..=40 {
            assert!(
                (generic.log_norm_coeffs()[k] - closed.log_norm_coeffs()[k]).abs()
                    < 1e-10 * closed.log_norm_coeffs()[k].max(1.0),
                "k={k}"
            );
        }
        let p_closed = asym_polynomials(&closed, 0.6, 25).unwrap();
        let p_generic = asym_polynomials(&generic, 0.6, 25).unwrap();
        for s in 0..=25 {
            assert!((p_closed[s] - p_generic[s]).abs() < 1e-10, "s={s}");
        }
    }

    #[test]
    fn cst_bound_for_positive_type_sequences() {
        for seq in [
            DeformedSequence::gs(200),
            DeformedSequence::perelomov_type(3.0, 200).unwrap(),
            DeformedSequence::hermite(1.0, 200).unwrap(),
            DeformedSequence::hermite(0.3, 200).unwrap(),
            DeformedSequence::abel(2.0, 200).unwrap(),
        ] {
            assert!(seq.cst_bound_holds(), "{} violates x_n <= n x_1", seq.name());
        }
    }

    #[test]
    fn asym_polynomials_reference_values() {
        for (seq, _) in test_sequences() {
            for &eta in &[0.2, 0.5, 0.9] {
                let p = asym_polynomials(&seq, eta, 20).unwrap();
                assert_eq!(p[0], 1.0);
                assert!(
                    tol::close(p[1], 1.0 - eta, 1e-13),
                    "{}: p_1({eta}) = {}",
                    seq.name(),
                    p[1]
                );
                assert!(
                    p.iter().all(|&v| v >= 0.0),
                    "{}: negative generator value",
                    seq.name()
                );
            }
            // eta = 1 gives exact zeros beyond p_0; eta = 0 gives all ones.
            let p1 = asym_polynomials(&seq, 1.0, 20).unwrap();
            for s in 1..=20 {
                assert_eq!(p1[s], 0.0, "{}: p_{s}(1)", seq.name());
            }
            let p0 = asym_polynomials(&seq, 0.0, 20).unwrap();
            assert!(p0.iter().all(|&v| v == 1.0));
        }
        // Undeformed case: p_s(eta) = (1-eta)^s.
        let gs = DeformedSequence::gs(30);
        let p = asym_polynomials(&gs, 0.35, 30).unwrap();
        for s in 0..=30 {
            assert!(tol::close(p[s], 0.65f64.powi(s as i32), 1e-11), "s={s}");
        }
    }

    #[test]
    fn asym_polynomials_match_raw_series_division() {
        // The scaled exponential route must agree with direct series
        // division of N(u) by N(eta u); the raw quotient recurrence carries
        // absolute noise at the machine scale amplified by its own partial
        // sums, so the comparison is absolute.
        for (seq, _) in test_sequences() {
            let order = 25;
            let n = seq.norm_series(order).unwrap();
            for &eta in &[0.3f64, 0.7] {
                let scaled = TruncatedSeries::new(
                    (0..=order)
                        .map(|k| n.coeff(k) * eta.powi(k as i32))
                        .collect(),
                )
                .unwrap();
                let g = n.div(&scaled).unwrap();
                let p = asym_polynomials(&seq, eta, order).unwrap();
                for s in 0..=order {
                    let raw = g.coeff(s) * seq.log_xfact()[s].exp();
                    assert!(
                        (p[s] - raw).abs() <= 1e-9,
                        "{} s={s}: {} vs {}",
                        seq.name(),
                        p[s],
                        raw
                    );
                }
            }
        }
    }

    #[test]
    fn hypergeometric_form_matches_division() {
        for &s in &[1.5, 3.0, 10.0] {
            let seq = DeformedSequence::perelomov_type(s, 40).unwrap();
            for &eta in &[0.2, 0.5, 0.8] {
                let p = asym_polynomials(&seq, eta, 14).unwrap();
                for k in 0..=14 {
                    let hyp = hypergeom_poly(s, k, eta);
                    assert!(
                        tol::close(p[k], hyp, 1e-11),
                        "s={s} k={k} eta={eta}: {} vs {hyp}",
                        p[k]
                    );
                }
            }
        }
    }

    #[test]
    fn asym_distributions_normalize_and_specialize() {
        for (seq, _) in test_sequences() {
            for &eta in &ETAS {
                let polys = asym_polynomials(&seq, eta, 30).unwrap();
                for n in [0usize, 1, 5, 17, 30] {
                    let d = asym_distribution(&seq, &polys, n, eta).unwrap();
                    let total: f64 = d.probs.iter().sum();
                    assert!(
                        (total - 1.0).abs() < 1e-10,
                        "{} n={n} eta={eta}: sum {total}",
                        seq.name()
                    );
                    // Per-string values recombine with the multinomial weight.
                    let pi = d.per_string.as_ref().unwrap();
                    for k in 0..=n {
                        let weight = log_binomial(n as f64, k as f64).unwrap().exp();
                        assert!(
                            (pi[k] * weight - d.probs[k]).abs() < 1e-12,
                            "{} n={n} k={k}",
                            seq.name()
                        );
                    }
                }
            }
            // eta = 0: all losses.
            let polys = asym_polynomials(&seq, 0.0, 10).unwrap();
            let d = asym_distribution(&seq, &polys, 7, 0.0).unwrap();
            assert_eq!(d.probs[0], 1.0);
            assert!(d.probs[1..].iter().all(|&p| p == 0.0));
        }
        // Undeformed sequence gives the binomial pmf.
        let gs = DeformedSequence::gs(20);
        let eta = 0.3;
        let polys = asym_polynomials(&gs, eta, 20).unwrap();
        let d = asym_distribution(&gs, &polys, 12, eta).unwrap();
        for k in 0..=12 {
            let b = (log_binomial(12.0, k as f64).unwrap()
                + k as f64 * eta.ln()
                + (12 - k) as f64 * (1.0 - eta).ln())
            .exp();
            assert!(tol::close(d.probs[k], b, 1e-12), "k={k}");
        }
    }

    #[test]
    fn asymmetry_witness_two_trials() {
        // For the negative-binomial-type sequence at eta = 1/2, two wins stay
        // at the binomial value 1/4 but two losses are more likely: the
        // deformation biases toward losses even at even odds.
        let seq = DeformedSequence::perelomov_type(2.0, 10).unwrap();
        let polys = asym_polynomials(&seq, 0.5, 10).unwrap();
        let d = asym_distribution(&seq, &polys, 2, 0.5).unwrap();
        let total: f64 = d.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(tol::close(d.probs[2], 0.25, 1e-13));
        assert!(
            d.probs[0] > d.probs[2] + 1e-3,
            "expected loss bias: {:?}",
            d.probs
        );
    }

    #[test]
    fn sym_polynomials_reference_values() {
        let gs = DeformedSequence::gs(25);
        for &eta in &[0.25, 0.6] {
            let q = sym_polynomials(&gs, eta, 25).unwrap();
            for n in 0..=25 {
                assert!(tol::close(q[n], eta.powi(n as i32), 1e-12), "n={n}");
            }
        }
        // Negative-binomial type: ratio of Pochhammer symbols.
        for &s in &[2.0, 5.0] {
            let seq = DeformedSequence::perelomov_type(s, 30).unwrap();
            for &eta in &[0.3, 0.8] {
                let q = sym_polynomials(&seq, eta, 30).unwrap();
                for n in 0..=30 {
                    let nf = n as f64;
                    let expected = (ln_gamma(s * eta + nf).unwrap() - ln_gamma(s * eta).unwrap()
                        + ln_gamma(s).unwrap()
                        - ln_gamma(s + nf).unwrap())
                    .exp();
                    assert!(
                        tol::close(q[n], expected, 1e-10),
                        "s={s} eta={eta} n={n}: {} vs {expected}",
                        q[n]
                    );
                }
            }
        }
        // Abel type: q_n(eta) = eta (eta + n/beta)^{n-1} / (1 + n/beta)^{n-1}.
        let beta = 2.0;
        let seq = DeformedSequence::abel(beta, 30).unwrap();
        for &eta in &[0.2, 0.5, 0.9] {
            let q = sym_polynomials(&seq, eta, 30).unwrap();
            assert_eq!(q[0], 1.0);
            assert!(tol::close(q[1], eta, 1e-12));
            for n in 1..=30 {
                let nf = n as f64;
                let expected =
                    eta * ((eta + nf / beta) / (1.0 + nf / beta)).powi(n as i32 - 1);
                assert!(
                    tol::close(q[n], expected, 1e-10),
                    "eta={eta} n={n}: {} vs {expected}",
                    q[n]
                );
            }
        }
    }

    #[test]
    fn sym_distributions_normalize_and_balance() {
        for (seq, _) in test_sequences() {
            for &eta in &ETAS {
                let q_eta = sym_polynomials(&seq, eta, 30).unwrap();
                let q_comp = sym_polynomials(&seq, 1.0 - eta, 30).unwrap();
                for n in [0usize, 1, 6, 30] {
                    let d = sym_distribution(&seq, &q_eta, &q_comp, n, eta).unwrap();
                    let total: f64 = d.probs.iter().sum();
                    assert!(
                        (total - 1.0).abs() < 1e-10,
                        "{} n={n} eta={eta}: sum {total}",
                        seq.name()
                    );
                    // Mirror symmetry: p_k(eta) = p_{n-k}(1-eta).
                    let mirrored = sym_distribution(&seq, &q_comp, &q_eta, n, 1.0 - eta).unwrap();
                    for k in 0..=n {
                        assert!(
                            (d.probs[k] - mirrored.probs[n - k]).abs() < 1e-12,
                            "{} n={n} k={k}",
                            seq.name()
                        );
                    }
                    // Mean is eta * n, as in the undeformed case.
                    assert!(
                        (d.mean() - eta * n as f64).abs() < 1e-10,
                        "{} n={n} eta={eta}: mean {}",
                        seq.name(),
                        d.mean()
                    );
                }
            }
        }
    }

    #[test]
    fn sym_abel_closed_form_pmf() {
        let beta = 2.0;
        let seq = DeformedSequence::abel(beta, 10).unwrap();
        let eta = 0.35;
        let q_eta = sym_polynomials(&seq, eta, 10).unwrap();
        let q_comp = sym_polynomials(&seq, 1.0 - eta, 10).unwrap();
        let n = 3usize;
        let d = sym_distribution(&seq, &q_eta, &q_comp, n, eta).unwrap();
        for k in 0..=n {
            let (kf, nf) = (k as f64, n as f64);
            let closed = log_binomial(nf, kf).unwrap().exp()
                * eta
                * (1.0 - eta)
                * (eta + kf / beta).powi(k as i32 - 1)
                * (1.0 - eta + (nf - kf) / beta).powi((n - k) as i32 - 1)
                / (1.0 + nf / beta).powi(n as i32 - 1);
            assert!(
                tol::close(d.probs[k], closed, 1e-11),
                "k={k}: {} vs {closed}",
                d.probs[k]
            );
        }
    }

    #[test]
    fn sym_perelomov_type_standard_deviation() {
        // (sigma_k)_n = n sqrt(eta(1-eta)) sqrt((1+s/n)/(1+s)).
        let s = 4.0;
        let seq = DeformedSequence::perelomov_type(s, 60).unwrap();
        for &eta in &[0.25, 0.5, 0.8] {
            let q_eta = sym_polynomials(&seq, eta, 60).unwrap();
            let q_comp = sym_polynomials(&seq, 1.0 - eta, 60).unwrap();
            for n in [5usize, 20, 50] {
                let d = sym_distribution(&seq, &q_eta, &q_comp, n, eta).unwrap();
                let nf = n as f64;
                let expected =
                    nf * (eta * (1.0 - eta)).sqrt() * ((1.0 + s / nf) / (1.0 + s)).sqrt();
                assert!(
                    (d.std_dev() - expected).abs() < 1e-10,
                    "eta={eta} n={n}: {} vs {expected}",
                    d.std_dev()
                );
            }
        }
    }

    #[test]
    fn cst_classification() {
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        // Plain exponential: F = u.
        let mut exp_coeffs = vec![1.0f64];
        for k in 1..=16 {
            exp_coeffs.push(exp_coeffs[k - 1] / k as f64);
        }
        let n = TruncatedSeries::new(exp_coeffs).unwrap();
        let r = cst_check(&n, 16, &grid).unwrap();
        assert!(r.in_sigma_plus);
        assert!(r.min_poly_value >= -1e-10, "min = {}", r.min_poly_value);
        // F = u + a u^2 / 2 with a > 0.
        let mut f_coeffs = vec![0.0; 17];
        f_coeffs[1] = 1.0;
        f_coeffs[2] = 0.5;
        let n = TruncatedSeries::new(f_coeffs).unwrap().exp().unwrap();
        let r = cst_check(&n, 16, &grid).unwrap();
        assert!(r.in_sigma_plus);
        assert!(r.min_poly_value >= -1e-10, "min = {}", r.min_poly_value);
        // 1 + u + u^3/6 has log-coefficient F_2 = -1/2 < 0, and its second
        // generator coefficient -eta(1-eta) goes genuinely negative.
        let mut coeffs = vec![0.0; 16];
        coeffs[0] = 1.0;
        coeffs[1] = 1.0;
        coeffs[3] = 1.0 / 6.0;
        let n = TruncatedSeries::new(coeffs).unwrap();
        assert!(tol::close(n.log().unwrap().coeff(2), -0.5, 1e-13));
        let r = cst_check(&n, 15, &grid).unwrap();
        assert!(!r.in_sigma_plus);
        assert!(r.min_poly_value < -0.2);
    }

    #[test]
    fn bernoulli_transform_reproduces_attenuation() {
        for (seq, radius) in test_sequences() {
            let u = if radius.is_finite() { 0.3 * radius } else { 1.5 };
            for &eta in &[0.4, 0.7, 1.0] {
                for n in [0usize, 1, 2, 5] {
                    let lhs = deformed_bernoulli(&seq, u, eta, n).unwrap();
                    let rhs = bernoulli_reference(&seq, u, eta, n).unwrap();
                    assert!(
                        tol::close(lhs, rhs, 1e-9),
                        "{} u={u} eta={eta} n={n}: {lhs} vs {rhs}",
                        seq.name()
                    );
                }
            }
            // eta = 1 is the identity on the count distribution.
            let direct = (2.0f64 * u.ln() - seq.log_norm(u).unwrap()
                - seq.log_xfact()[2])
            .exp();
            assert!(tol::close(
                deformed_bernoulli(&seq, u, 1.0, 2).unwrap(),
                direct,
                1e-12
            ));
        }
        // Hitting the end of the generated sequence is reported, not hidden.
        let short = DeformedSequence::gs(12);
        assert!(matches!(
            deformed_bernoulli(&short, 30.0, 0.5, 2),
            Err(DeformError::NoConvergence { .. })
        ));
    }

    #[test]
    fn poisson_like_limit_of_win_counts() {
        // With eta = u/x_n, the win count at large n approaches the coherent
        // count distribution u^k/(N(u) x_k!); undeformed case at n = 500.
        let seq = DeformedSequence::gs(500);
        let u = 1.0;
        let n = 500;
        let eta = u / seq.x()[n];
        let polys = asym_polynomials(&seq, eta, n).unwrap();
        let d = asym_distribution(&seq, &polys, n, eta).unwrap();
        for k in 0..=6 {
            let limit = (k as f64 * u.ln() - u - seq.log_xfact()[k]).exp();
            assert!(
                (d.probs[k] - limit).abs() < 1e-2,
                "k={k}: {} vs {limit}",
                d.probs[k]
            );
        }
    }

    #[test]
    fn prop1_super_poissonian_identity() {
        // Undeformed: both sides vanish identically.
        let gs = DeformedSequence::gs(120);
        let r = prop1_check(&gs, f64::INFINITY, &[0.1, 1.0, 5.0]).unwrap();
        assert!(r.pass, "max_dev = {}", r.max_dev);
        for p in &r.points {
            assert!(p.lhs.abs() < 1e-10 && p.rhs.abs() < 1e-14);
        }
        // Quadratic log-norm: rhs = 2 (a/2) u^2 = a u^2; at a=1, u=2 it is 4.
        let herm = DeformedSequence::hermite(1.0, 120).unwrap();
        let r = prop1_check(&herm, f64::INFINITY, &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.pass, "max_dev = {}", r.max_dev);
        assert!(r.all_super_poissonian);
        let at2 = r.points.iter().find(|p| p.u == 2.0).unwrap();
        assert!(tol::close(at2.rhs, 4.0, 1e-12), "rhs = {}", at2.rhs);
        // Lambert-type sequence on part of its domain.
        let abel = DeformedSequence::abel(2.0, 150).unwrap();
        let r = prop1_check(&abel, 2.0 / std::f64::consts::E, &[0.1, 0.3, 0.5]).unwrap();
        assert!(r.pass, "max_dev = {}", r.max_dev);
        assert!(r.points.iter().all(|p| p.lhs > 0.0));
        // Negative-binomial type.
        let per = DeformedSequence::perelomov_type(3.0, 150).unwrap();
        let r = prop1_check(&per, 3.0, &[0.2, 0.8, 1.5]).unwrap();
        assert!(r.pass, "max_dev = {}", r.max_dev);
    }

    #[test]
    fn prop2_vacuum_overlap_excess() {
        let herm = DeformedSequence::hermite(1.0, 150).unwrap();
        let r = prop2_check(&herm, f64::INFINITY, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(r.pass && r.strict);
        let at2 = r.points.iter().find(|p| p.nbar == 2.0).unwrap();
        let expected = (-1.5f64).exp() - (-2.0f64).exp();
        assert!(
            tol::close(at2.delta, expected, 1e-9),
            "delta = {} vs {expected}",
            at2.delta
        );
        // Consistency with the mean inversion: u(2) = (sqrt(1+4a*2)-1)/(2a).
        assert!(tol::close(at2.u, 0.5 * (3.0 - 1.0), 1e-9));
        let abel = DeformedSequence::abel(2.0, 150).unwrap();
        let r = prop2_check(&abel, 2.0 / std::f64::consts::E, &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.pass && r.strict);
        assert!(r.points.iter().all(|p| p.delta > 0.0));
        // The undeformed sequence sits exactly on the boundary.
        let gs = DeformedSequence::gs(150);
        let r = prop2_check(&gs, f64::INFINITY, &[0.5, 2.0, 5.0]).unwrap();
        assert!(r.pass && !r.strict);
        for p in &r.points {
            assert!(p.delta.abs() < 1e-10, "delta = {}", p.delta);
            assert!(tol::dev(p.log_norm, p.u_dlog_norm) < 1e-10);
        }
    }

    #[test]
    fn nl_family_wraps_sequence_consistently() {
        let seq = DeformedSequence::hermite(0.7, 200).unwrap();
        let wrapped = nl_family(&seq, f64::INFINITY);
        let direct = crate::families::make_family(&crate::families::FamilySpec::Hermite {
            a: 0.7,
        })
        .unwrap();
        for &u in &[0.1, 1.0, 4.0] {
            let a = wrapped.moments_series(u).unwrap();
            let b = direct.moments(u).unwrap();
            assert!(tol::rel_dev(a.nbar, b.nbar) < 1e-10, "u={u}");
            assert!(tol::dev(a.mandel_q, b.mandel_q) < 1e-10, "u={u}");
        }
    }
}
