//! Bessel functions of integer order (first kind) and real order (modified).
//!
//! `J_0..J_{n_max}` are generated together by Miller's downward recurrence:
//! the three-term relation `J_{k-1} = (2k/z) J_k - J_{k+1}` is stable downward,
//! so an unnormalized trial solution started high above `n_max` converges to
//! the true ratios and is fixed up with the normalization
//! `J_0 + 2 J_2 + 2 J_4 + ... = 1` (Abramowitz & Stegun 9.1.46). The starting
//! order adds a safety margin that grows like `z^{1/3}`, matching the width of
//! the turning-point region.

use super::{SpecFunError, SpecFunResult};
use crate::specfun::gamma::ln_gamma;

/// Values `J_0(z), ..., J_{n_max}(z)` for `z >= 0`.
pub fn bessel_j_batch(n_max: usize, z: f64) -> SpecFunResult<Vec<f64>> {
    if !(z >= 0.0) {
        return Err(SpecFunError::Domain {
            what: "bessel_j_batch",
            value: z,
        });
    }
    if z == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if z <= 0.5 {
        // Ascending series, term ratio -(z^2/4)/((m+1)(n+m+1)): no cancellation
        // at this size, and the log-scale prefactor underflows gracefully where
        // the recurrence below would need rescaling by huge 2k/z factors.
        let q = z * z / 4.0;
        let lhalf = (z / 2.0).ln();
        let mut out = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            for m in 0..40 {
                term *= -q / ((m as f64 + 1.0) * (n as f64 + m as f64 + 1.0));
                sum += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            let lead = n as f64 * lhalf - ln_gamma(n as f64 + 1.0)?;
            out.push(lead.exp() * sum);
        }
        return Ok(out);
    }

    let start = n_max + z.ceil() as usize + 15 + (2.0 * z.cbrt()).ceil() as usize;
    let mut out = vec![0.0; n_max + 1];
    // Unnormalized downward pass. `scale` tracks rescalings applied to avoid
    // overflow of the trial solution at small z.
    let mut above = 0.0f64; // trial J_{k+1}
    let mut here = 1e-30f64; // trial J_k
    let mut norm = 0.0f64; // accumulates J_0 + 2 sum J_{2m}
    for k in (0..=start).rev() {
        let below = (2.0 * (k as f64 + 1.0) / z) * here - above;
        above = here;
        here = below;
        // `here` now holds the trial value of J_k.
        if k <= n_max {
            out[k] = here;
        }
        if k % 2 == 0 {
            norm += if k == 0 { here } else { 2.0 * here };
        }
        if here.abs() > 1e250 {
            here *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            for v in &mut out {
                *v *= 1e-250;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    Ok(out)
}

/// Scaled Bessel value `J_n(2 sqrt(u)) / u^{n/2}` in log form: `(sign, ln|.|)`.
///
/// The scaled function is entire in `u` with value `1/n!` at the origin, so it
/// stays meaningful where `J_n` underflows and `u^{-n/2}` overflows. For small
/// `u` it is summed directly from the ascending series
/// `sum_m (-1)^m u^m / (m! (n+m)!)` (no cancellation there); otherwise it is
/// assembled from [`bessel_j_batch`] in log scale.
pub fn bessel_j_scaled_log(n: usize, u: f64) -> SpecFunResult<(f64, f64)> {
    if !(u >= 0.0) {
        return Err(SpecFunError::Domain {
            what: "bessel_j_scaled",
            value: u,
        });
    }
    if u <= 0.25 {
        // Leading 1/n! in log scale; successive terms by their ratio
        // -u / ((m+1)(n+m+1)), which decays immediately for u <= 1/4.
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for m in 0..60 {
            term *= -u / ((m as f64 + 1.0) * (n as f64 + m as f64 + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        if sum == 0.0 {
            return Ok((0.0, f64::NEG_INFINITY));
        }
        return Ok((sum.signum(), sum.abs().ln() - ln_gamma(n as f64 + 1.0)?));
    }
    let z = 2.0 * u.sqrt();
    let j = bessel_j_batch(n, z)?[n];
    if j == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    Ok((j.signum(), j.abs().ln() - 0.5 * n as f64 * u.ln()))
}

/// Plain-value counterpart of [`bessel_j_scaled_log`].
pub fn bessel_j_scaled(n: usize, u: f64) -> SpecFunResult<f64> {
    let (sign, ln_abs) = bessel_j_scaled_log(n, u)?;
    Ok(sign * ln_abs.exp())
}

/// `ln I_nu(z)` for `nu >= 0`, `z > 0`.
///
/// The ascending series has positive terms only, so its log is computed by
/// log-sum-exp around the largest term. Usable far beyond where `I_nu`
/// itself overflows.
pub fn bessel_i_log(nu: f64, z: f64) -> SpecFunResult<f64> {
    if !(nu >= 0.0) || !(z > 0.0) {
        return Err(SpecFunError::Domain {
            what: "bessel_i_log",
            value: if nu < 0.0 { nu } else { z },
        });
    }
    let lhalf = (z / 2.0).ln();
    // Index of the largest series term, from d(lt)/dm = 0.
    let peak = 0.5 * ((nu + 1.0).mul_add(nu + 1.0, z * z).sqrt() - (nu + 1.0));
    let m_stop = (peak as usize + 2) * 3 + 60;
    let lt =
        |m: f64| -> SpecFunResult<f64> { Ok((2.0 * m + nu) * lhalf - ln_gamma(m + 1.0)? - ln_gamma(m + nu + 1.0)?) };
    let lt_peak = lt(peak.floor().max(0.0))?;
    let mut sum = 0.0f64;
    for m in 0..=m_stop {
        let t = (lt(m as f64)? - lt_peak).exp();
        sum += t;
        if m as f64 > peak && t < sum * 1e-17 {
            break;
        }
    }
    Ok(lt_peak + sum.ln())
}

/// Modified Bessel function `I_nu(z)` for `nu >= 0`, `z >= 0`; reports
/// overflow where the value leaves the double range.
pub fn bessel_i(nu: f64, z: f64) -> SpecFunResult<f64> {
    if z == 0.0 {
        if !(nu >= 0.0) {
            return Err(SpecFunError::Domain {
                what: "bessel_i",
                value: nu,
            });
        }
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let lv = bessel_i_log(nu, z)?;
    if lv > 709.0 {
        return Err(SpecFunError::Overflow {
            what: "bessel_i",
            value: z,
        });
    }
    Ok(lv.exp())
}
