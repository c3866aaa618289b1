//! Log-gamma and log-binomial helpers.
//!
//! The Lanczos approximation with `g = 7` and nine coefficients gives
//! `ln Gamma` to close to machine precision for positive arguments, which is
//! all this crate needs (factorials and binomials of nonnegative reals).

use super::{SpecFunError, SpecFunResult};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> SpecFunResult<f64> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain {
            what: "ln_gamma",
            value: x,
        });
    }
    // Lanczos formula for Gamma(x) = Gamma((x-1) + 1).
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok(half_ln_2pi + (z + 0.5) * t.ln() - t + acc.ln())
}

/// `ln C(n, k)` for real `n >= k >= 0`.
pub fn log_binomial(n: f64, k: f64) -> SpecFunResult<f64> {
    if !(k >= 0.0) || !(n >= k) {
        return Err(SpecFunError::Domain {
            what: "log_binomial",
            value: if k < 0.0 { k } else { n },
        });
    }
    if k == 0.0 || k == n {
        return Ok(0.0);
    }
    Ok(ln_gamma(n + 1.0)? - ln_gamma(k + 1.0)? - ln_gamma(n - k + 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn matches_integer_factorials() {
        let mut lf = 0.0f64;
        for n in 1..=170u32 {
            lf += (n as f64).ln();
            assert!(
                tol::close(ln_gamma(n as f64 + 1.0).unwrap(), lf, 1e-13),
                "n={n}"
            );
        }
    }

    #[test]
    fn half_integer_values() {
        // Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2.
        let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
        assert!((ln_gamma(0.5).unwrap() - half_ln_pi).abs() < 1e-14);
        assert!((ln_gamma(1.5).unwrap() - (half_ln_pi - 2.0f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds() {
        // ln Gamma(x+1) = ln Gamma(x) + ln x across magnitudes. The right side
        // cancels badly for small x, so the bound scales with its terms.
        for &x in &[1e-3, 0.2, 1.7, 12.34, 456.7, 1e6] {
            let lg = ln_gamma(x).unwrap();
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = lg + x.ln();
            let bound = 1e-12 * (1.0 + lg.abs() + x.ln().abs());
            assert!((lhs - rhs).abs() <= bound, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn binomial_table() {
        assert!((log_binomial(5.0, 2.0).unwrap() - 10.0f64.ln()).abs() < 1e-13);
        assert!((log_binomial(10.0, 5.0).unwrap() - 252.0f64.ln()).abs() < 1e-13);
        assert_eq!(log_binomial(7.0, 0.0).unwrap(), 0.0);
        assert_eq!(log_binomial(7.0, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
        assert!(log_binomial(3.0, 4.0).is_err());
        assert!(log_binomial(3.0, -1.0).is_err());
    }
}
