//! Principal branch of the Lambert W function.
//!
//! `W_0(x)` solves `w e^w = x` for `x >= -1/e`, with `W_0(-1/e) = -1`. Halley
//! iteration converges in a handful of steps from a decent starting guess; the
//! only delicate region is the branch point `x = -1/e`, where the inverse has
//! a square-root singularity and the series in `p = sqrt(2(1 + e x))` is used
//! to start (Corless et al., "On the Lambert W function", 1996).

use super::{SpecFunError, SpecFunResult};

/// `W_0(x)` for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> SpecFunResult<f64> {
    if !x.is_finite() {
        return Err(SpecFunError::Domain {
            what: "lambert_w0",
            value: x,
        });
    }
    let min_x = -(-1.0f64).exp();
    if x < min_x {
        // Allow round-off level undershoot at the branch point.
        if x > min_x * (1.0 + 1e-12) {
            return Ok(-1.0);
        }
        return Err(SpecFunError::Domain {
            what: "lambert_w0",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = if x < -0.25 {
        // Branch-point series: W = -1 + p - p^2/3 + 11 p^3 / 72 - ...
        let p = (2.0 * (1.0 + std::f64::consts::E * x)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else if x < std::f64::consts::E {
        // Series about 0 truncated to two terms for the left half; ln(1+x)
        // tracks W_0 well enough on [0, e) to start the iteration.
        if x < 0.0 {
            x * (1.0 - x)
        } else {
            x.ln_1p()
        }
    } else {
        // Asymptotic start: ln x - ln ln x.
        let lx = x.ln();
        lx - lx.ln()
    };

    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        // Halley step.
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1e-300) {
            break;
        }
    }

    let residual = w * w.exp() - x;
    if residual.abs() > 1e-14 * x.abs().max(1.0) {
        return Err(SpecFunError::NoConvergence { what: "lambert_w0" });
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn defining_relation_roundtrip() {
        // For w in the range of W_0, W_0(w e^w) = w.
        for i in 0..400 {
            let w = -1.0 + i as f64 * 0.02;
            let x = w * w.exp();
            let back = lambert_w0(x).unwrap();
            assert!(tol::close(back, w, 1e-11), "w={w}: got {back}");
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-14);
        // Omega constant: W_0(1) = 0.567143290409783873...
        assert!((lambert_w0(1.0).unwrap() - 0.5671432904097838).abs() < 1e-14);
        assert!((lambert_w0(-(-1.0f64).exp()).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn near_branch_point() {
        let e = std::f64::consts::E;
        for &eps in &[1e-3, 1e-6, 1e-9, 1e-12] {
            let x = -1.0 / e + eps;
            let w = lambert_w0(x).unwrap();
            let res = w * w.exp() - x;
            assert!(res.abs() <= 1e-14, "eps={eps}: residual {res}");
        }
    }

    #[test]
    fn large_argument() {
        let x = 1e12f64;
        let w = lambert_w0(x).unwrap();
        assert!(tol::rel_dev(w * w.exp(), x) < 1e-13);
    }

    #[test]
    fn out_of_domain() {
        assert!(lambert_w0(-1.0).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }
}
