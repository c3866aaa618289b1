//! The concrete coherent-state families.
//!
//! Eight families are provided, each wired into the generic [`AnFamily`]
//! machinery with whatever closed forms it admits:
//!
//! * `gs` — the exponential (Glauber-Sudarshan) family, Poisson counts;
//! * `spin` — binomial counts on finite support `0..=n_j`;
//! * `perelomov` — negative-binomial counts on the disk `u < 1`;
//! * `barut_girardello` — lowering-operator eigenstates, modified-Bessel
//!   normalization;
//! * `hermite` — normalization `exp(u + a u^2/2)`;
//! * `abel` — normalization `exp(-beta W(-u/beta))` on `u < beta/e`;
//! * `sg` — Bessel-amplitude states with oscillating `h_n`, series moments;
//! * `sgm` — their normalized modification, with closed mean and second
//!   moment.
//!
//! All amplitudes are produced in log scale (see [`Amplitude`]) so that
//! distributions stay accurate far into their tails.

use crate::an_core::{AmplitudeFn, Amplitude, AnFamily, ClosedForms};
use crate::specfun::{bessel_i_log, bessel_j_batch, bessel_j_scaled_log, lambert_w0, ln_gamma, log_binomial};
use std::fmt;
use std::sync::Arc;

/// Parameterized family selector; validation happens in [`FamilySpec::parse`]
/// or [`FamilySpec::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    /// Exponential family, no parameters.
    Gs,
    /// Binomial family with top level `n_j >= 1`.
    Spin { n_j: usize },
    /// Negative-binomial family, `kappa > 1/2`.
    Perelomov { kappa: f64 },
    /// Lowering-operator eigenstates, `kappa >= 1/2`.
    BarutGirardello { kappa: f64 },
    /// Normalization `exp(u + a u^2/2)`, `a > 0`.
    Hermite { a: f64 },
    /// Normalization from the Lambert W function, `beta > 0`.
    Abel { beta: f64 },
    /// Bessel-amplitude states, series moments only.
    Sg,
    /// Modified Bessel-amplitude states with closed moments.
    Sgm,
}

/// Errors from spec parsing/validation.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyError {
    UnknownKind(String),
    UnknownParam { kind: &'static str, name: String },
    MissingParam { kind: &'static str, name: &'static str },
    InvalidParam {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::UnknownKind(k) => write!(
                f,
                "unknown family kind '{k}' (expected gs, spin, perelomov, barut_girardello, hermite, abel, sg, sgm)"
            ),
            FamilyError::UnknownParam { kind, name } => {
                write!(f, "family '{kind}' takes no parameter '{name}'")
            }
            FamilyError::MissingParam { kind, name } => {
                write!(f, "family '{kind}' requires parameter '{name}'")
            }
            FamilyError::InvalidParam {
                name,
                value,
                requirement,
            } => write!(f, "parameter {name} = {value} invalid: requires {requirement}"),
        }
    }
}

impl std::error::Error for FamilyError {}

impl FamilySpec {
    /// Builds a spec from a kind name and `name=value` parameter pairs, as
    /// collected from CLI flags or a config file.
    pub fn parse(kind: &str, params: &[(String, f64)]) -> Result<FamilySpec, FamilyError> {
        fn only(
            kind: &'static str,
            params: &[(String, f64)],
            name: &'static str,
        ) -> Result<f64, FamilyError> {
            let mut found = None;
            for (k, v) in params {
                if k == name {
                    found = Some(*v);
                } else {
                    return Err(FamilyError::UnknownParam {
                        kind,
                        name: k.clone(),
                    });
                }
            }
            found.ok_or(FamilyError::MissingParam { kind, name })
        }
        fn none(kind: &'static str, params: &[(String, f64)]) -> Result<(), FamilyError> {
            match params.first() {
                None => Ok(()),
                Some((k, _)) => Err(FamilyError::UnknownParam {
                    kind,
                    name: k.clone(),
                }),
            }
        }
        let spec = match kind {
            "gs" => {
                none("gs", params)?;
                FamilySpec::Gs
            }
            "spin" => {
                let v = only("spin", params, "n_j")?;
                if !(v.fract() == 0.0 && (1.0..=1e9).contains(&v)) {
                    return Err(FamilyError::InvalidParam {
                        name: "n_j",
                        value: v,
                        requirement: "a positive integer",
                    });
                }
                FamilySpec::Spin { n_j: v as usize }
            }
            "perelomov" => FamilySpec::Perelomov {
                kappa: only("perelomov", params, "kappa")?,
            },
            "barut_girardello" => FamilySpec::BarutGirardello {
                kappa: only("barut_girardello", params, "kappa")?,
            },
            "hermite" => FamilySpec::Hermite {
                a: only("hermite", params, "a")?,
            },
            "abel" => FamilySpec::Abel {
                beta: only("abel", params, "beta")?,
            },
            "sg" => {
                none("sg", params)?;
                FamilySpec::Sg
            }
            "sgm" => {
                none("sgm", params)?;
                FamilySpec::Sgm
            }
            other => return Err(FamilyError::UnknownKind(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Enforces the parameter-range constraints.
    pub fn validate(&self) -> Result<(), FamilyError> {
        match *self {
            FamilySpec::Gs | FamilySpec::Sg | FamilySpec::Sgm => Ok(()),
            FamilySpec::Spin { n_j } => {
                if n_j >= 1 {
                    Ok(())
                } else {
                    Err(FamilyError::InvalidParam {
                        name: "n_j",
                        value: n_j as f64,
                        requirement: "n_j >= 1",
                    })
                }
            }
            FamilySpec::Perelomov { kappa } => {
                if kappa > 0.5 && kappa.is_finite() {
                    Ok(())
                } else {
                    Err(FamilyError::InvalidParam {
                        name: "kappa",
                        value: kappa,
                        requirement: "kappa > 1/2",
                    })
                }
            }
            // The closed forms below stay valid at kappa = 1/2 (where
            // x_n = n^2), so the boundary is allowed here.
            FamilySpec::BarutGirardello { kappa } => {
                if kappa >= 0.5 && kappa.is_finite() {
                    Ok(())
                } else {
                    Err(FamilyError::InvalidParam {
                        name: "kappa",
                        value: kappa,
                        requirement: "kappa >= 1/2",
                    })
                }
            }
            FamilySpec::Hermite { a } => {
                if a > 0.0 && a.is_finite() {
                    Ok(())
                } else {
                    Err(FamilyError::InvalidParam {
                        name: "a",
                        value: a,
                        requirement: "a > 0",
                    })
                }
            }
            FamilySpec::Abel { beta } => {
                if beta > 0.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(FamilyError::InvalidParam {
                        name: "beta",
                        value: beta,
                        requirement: "beta > 0",
                    })
                }
            }
        }
    }

    /// Kind name as used on the command line.
    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::Gs => "gs",
            FamilySpec::Spin { .. } => "spin",
            FamilySpec::Perelomov { .. } => "perelomov",
            FamilySpec::BarutGirardello { .. } => "barut_girardello",
            FamilySpec::Hermite { .. } => "hermite",
            FamilySpec::Abel { .. } => "abel",
            FamilySpec::Sg => "sg",
            FamilySpec::Sgm => "sgm",
        }
    }

    fn param_list(&self) -> Vec<(String, f64)> {
        match *self {
            FamilySpec::Spin { n_j } => vec![("n_j".to_string(), n_j as f64)],
            FamilySpec::Perelomov { kappa } | FamilySpec::BarutGirardello { kappa } => {
                vec![("kappa".to_string(), kappa)]
            }
            FamilySpec::Hermite { a } => vec![("a".to_string(), a)],
            FamilySpec::Abel { beta } => vec![("beta".to_string(), beta)],
            _ => vec![],
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind_name())?;
        let params = self.param_list();
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", body.join(", "))?;
        }
        Ok(())
    }
}

/// `ln x_n!` for the lowering-operator family: `x_n = n (2 kappa + n - 1)`.
fn bg_log_xfact(kappa: f64, n: usize) -> f64 {
    let n = n as f64;
    ln_gamma(n + 1.0).expect("n + 1 > 0")
        + ln_gamma(2.0 * kappa + n).expect("2 kappa + n > 0")
        - ln_gamma(2.0 * kappa).expect("2 kappa > 0")
}

/// `ln(1/x_n!)` for the Hermite-type family, from the explicit inner sum
/// `1/x_n! = sum_{m <= n/2} (a/2)^m / (m! (n-2m)!)`, evaluated by
/// log-sum-exp (terms are positive for `a > 0`).
pub fn hermite_log_inv_xfact(a: f64, n: usize) -> f64 {
    let lha = (a / 2.0).ln();
    let mut lts = Vec::with_capacity(n / 2 + 1);
    let mut max_lt = f64::NEG_INFINITY;
    for m in 0..=(n / 2) {
        let lt = m as f64 * lha
            - ln_gamma(m as f64 + 1.0).expect("m + 1 > 0")
            - ln_gamma((n - 2 * m) as f64 + 1.0).expect("n - 2m + 1 > 0");
        max_lt = max_lt.max(lt);
        lts.push(lt);
    }
    let sum: f64 = lts.iter().map(|lt| (lt - max_lt).exp()).sum();
    max_lt + sum.ln()
}

/// `ln x_n!` for the Abel-type family: `x_n! = n! beta^{n-1} / (n+beta)^{n-1}`.
pub fn abel_log_xfact(beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    ln_gamma(nf + 1.0).expect("n + 1 > 0") + (nf - 1.0) * (beta.ln() - (nf + beta).ln())
}

/// `x_n` for the Abel-type family (plain value, for inspection and limits).
pub fn abel_x(beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (abel_log_xfact(beta, n) - abel_log_xfact(beta, n - 1)).exp()
}

/// Normalization `N(u)` of the modified Bessel-amplitude family.
///
/// The closed form `[2u(J_0^2 + J_1^2) - sqrt(u) J_0 J_1]/u` (arguments
/// `2 sqrt(u)`) is a 0/0 at the origin, so below `u = 1e-6` the defining
/// series `sum_n (n+1) u^n (J_{n+1}(2 sqrt u)/u^{(n+1)/2})^2` is used
/// instead; it converges in a handful of terms there.
pub fn sgm_norm(u: f64) -> f64 {
    assert!(u >= 0.0, "sgm_norm: u = {u} negative");
    if u <= 1e-6 {
        let mut total = 0.0f64;
        let mut upow = 1.0f64;
        for n in 0..20 {
            let (_, ln_abs) = bessel_j_scaled_log(n + 1, u).expect("u >= 0");
            let term = (n + 1) as f64 * upow * (2.0 * ln_abs).exp();
            total += term;
            upow *= u;
            if term < 1e-20 * total {
                break;
            }
        }
        return total;
    }
    let z = 2.0 * u.sqrt();
    let j = bessel_j_batch(1, z).expect("z >= 0");
    let (j0, j1) = (j[0], j[1]);
    (2.0 * u * (j0 * j0 + j1 * j1) - u.sqrt() * j0 * j1) / u
}

/// Below this `u`, the closed moment expressions of the modified
/// Bessel-amplitude family are sums of O(1) terms cancelling down to O(u),
/// so the defining series (whose terms are positive) is used instead.
const SGM_MOMENT_SERIES_CUTOFF: f64 = 2.0;

/// First and second moments of the modified Bessel-amplitude counts by
/// direct summation of `n^k P_n`.
fn sgm_moments_by_series(u: f64) -> (f64, f64) {
    if u == 0.0 {
        return (0.0, 0.0);
    }
    let norm = sgm_norm(u);
    let mut m1 = 0.0f64;
    let mut m2 = 0.0f64;
    for n in 1..200usize {
        let (_, ln_abs) = bessel_j_scaled_log(n + 1, u).expect("u >= 0");
        let p = (n + 1) as f64 * (n as f64 * u.ln() + 2.0 * ln_abs).exp();
        m1 += n as f64 * p;
        m2 += (n * n) as f64 * p;
        if n as f64 > 4.0 * u.sqrt() + 8.0 && (n * n) as f64 * p < 1e-18 * (m2 + 1e-300) {
            break;
        }
    }
    (m1 / norm, m2 / norm)
}

/// Mean count of the modified Bessel-amplitude family, `1/N(u) - 1`.
fn sgm_nbar(u: f64) -> f64 {
    if u <= SGM_MOMENT_SERIES_CUTOFF {
        return sgm_moments_by_series(u).0;
    }
    1.0 / sgm_norm(u) - 1.0
}

/// Second moment `<n^2>(u)` of the modified Bessel-amplitude family.
///
/// Derived from the closed sums of `m^2 J_m^2` and `m^3 J_m^2`; the sign in
/// front of the last bracket differs from some printed versions of the
/// formula, and the verification suite pins this one against the series.
fn sgm_n2bar(u: f64) -> f64 {
    if u <= SGM_MOMENT_SERIES_CUTOFF {
        return sgm_moments_by_series(u).1;
    }
    let n = sgm_norm(u);
    let z = 2.0 * u.sqrt();
    let j = bessel_j_batch(1, z).expect("z >= 0");
    let (j0, j1) = (j[0], j[1]);
    -2.0 / n + (4.0 / 3.0) * (2.0 * u + 1.0)
        + (u * j0 * j0 - u * j1 * j1 + u.sqrt() * j0 * j1) / (3.0 * u * n)
}

/// Instantiates the family described by `spec`.
pub fn make_family(spec: &FamilySpec) -> Result<AnFamily, FamilyError> {
    spec.validate()?;
    let params = spec.param_list();
    let name = spec.kind_name();
    let fam = match *spec {
        FamilySpec::Gs => {
            let h: AmplitudeFn = Arc::new(|n, u| Amplitude {
                sign: 1.0,
                ln_abs: -u / 2.0 - 0.5 * ln_gamma(n as f64 + 1.0).expect("n + 1 > 0"),
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(|u| u)),
                nbar: Some(Arc::new(|u| u)),
                u_of_nbar: Some(Arc::new(|nbar| nbar)),
                mandel_q: Some(Arc::new(|_| 0.0)),
                delta: Some(Arc::new(|_| 0.0)),
                weight: Some(Arc::new(|_| 1.0)),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, f64::INFINITY, None, h, closed)
        }
        FamilySpec::Spin { n_j } => {
            let njf = n_j as f64;
            let h: AmplitudeFn = Arc::new(move |n, u| {
                if n > n_j {
                    return Amplitude::zero();
                }
                Amplitude {
                    sign: 1.0,
                    ln_abs: 0.5 * log_binomial(njf, n as f64).expect("0 <= n <= n_j")
                        - 0.5 * njf * u.ln_1p(),
                }
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(move |u| njf * u.ln_1p())),
                nbar: Some(Arc::new(move |u| njf * u / (1.0 + u))),
                u_of_nbar: Some(Arc::new(move |nbar| {
                    let f = nbar / njf;
                    f / (1.0 - f)
                })),
                mandel_q: Some(Arc::new(|u| -u / (1.0 + u))),
                delta: Some(Arc::new(move |nbar| {
                    (1.0 - nbar / njf).powf(njf) - (-nbar).exp()
                })),
                weight: Some(Arc::new(move |u| (njf + 1.0) / ((1.0 + u) * (1.0 + u)))),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, f64::INFINITY, Some(n_j), h, closed)
        }
        FamilySpec::Perelomov { kappa } => {
            let k2 = 2.0 * kappa;
            let h: AmplitudeFn = Arc::new(move |n, u| Amplitude {
                sign: 1.0,
                ln_abs: 0.5 * log_binomial(k2 - 1.0 + n as f64, n as f64).expect("2k-1 > 0")
                    + kappa * (1.0 - u).ln(),
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(move |u| -k2 * (1.0 - u).ln())),
                nbar: Some(Arc::new(move |u| k2 * u / (1.0 - u))),
                u_of_nbar: Some(Arc::new(move |nbar| {
                    let f = nbar / k2;
                    f / (1.0 + f)
                })),
                mandel_q: Some(Arc::new(|u| u / (1.0 - u))),
                delta: Some(Arc::new(move |nbar| {
                    (1.0 + nbar / k2).powf(-k2) - (-nbar).exp()
                })),
                weight: Some(Arc::new(move |u| (k2 - 1.0) / ((1.0 - u) * (1.0 - u)))),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, 1.0, None, h, closed)
        }
        FamilySpec::BarutGirardello { kappa } => {
            let ln_norm = move |u: f64| -> f64 {
                if u == 0.0 {
                    return 0.0;
                }
                if u <= 1.0 {
                    // Defining series sum_n u^n/x_n!: positive terms, no
                    // cancellation, converges fast at small u.
                    let mut total = 0.0f64;
                    for n in 0..60 {
                        let lt = n as f64 * u.ln() - bg_log_xfact(kappa, n);
                        total += lt.exp();
                        if n > 2 && lt.exp() < 1e-18 * total {
                            break;
                        }
                    }
                    return total.ln();
                }
                ln_gamma(2.0 * kappa).expect("2 kappa > 0") + (0.5 - kappa) * u.ln()
                    + bessel_i_log(2.0 * kappa - 1.0, 2.0 * u.sqrt()).expect("u > 0")
            };
            let h: AmplitudeFn = Arc::new(move |n, u| Amplitude {
                sign: 1.0,
                ln_abs: -0.5 * (ln_norm(u) + bg_log_xfact(kappa, n)),
            });
            // Moment closed forms are ratios of contiguous modified Bessel
            // functions, formed in log scale.
            let iratio = move |lo: f64, u: f64| -> f64 {
                let z = 2.0 * u.sqrt();
                (bessel_i_log(lo + 1.0, z).expect("u > 0")
                    - bessel_i_log(lo, z).expect("u > 0"))
                .exp()
            };
            let nu = 2.0 * kappa - 1.0;
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(ln_norm)),
                nbar: Some(Arc::new(move |u| {
                    if u == 0.0 {
                        0.0
                    } else {
                        u.sqrt() * iratio(nu, u)
                    }
                })),
                n2bar: Some(Arc::new(move |u| {
                    if u == 0.0 {
                        0.0
                    } else {
                        u.sqrt() * iratio(nu, u) + u * iratio(nu + 1.0, u) * iratio(nu, u)
                    }
                })),
                mandel_q: Some(Arc::new(move |u| {
                    if u == 0.0 {
                        0.0
                    } else {
                        u.sqrt() * (iratio(nu + 1.0, u) - iratio(nu, u))
                    }
                })),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, f64::INFINITY, None, h, closed)
        }
        FamilySpec::Hermite { a } => {
            let h: AmplitudeFn = Arc::new(move |n, u| Amplitude {
                sign: 1.0,
                ln_abs: 0.5 * hermite_log_inv_xfact(a, n) - 0.5 * (u + a * u * u / 2.0),
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(move |u| u + a * u * u / 2.0)),
                nbar: Some(Arc::new(move |u| u * (1.0 + a * u))),
                u_of_nbar: Some(Arc::new(move |nbar| {
                    ((1.0 + 4.0 * a * nbar).sqrt() - 1.0) / (2.0 * a)
                })),
                mandel_q: Some(Arc::new(move |u| a * u / (1.0 + a * u))),
                delta: Some(Arc::new(move |nbar| {
                    let s = (1.0 + 4.0 * a * nbar).sqrt();
                    (1.0 / (4.0 * a) - nbar / 2.0 - s / (4.0 * a)).exp() - (-nbar).exp()
                })),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, f64::INFINITY, None, h, closed)
        }
        FamilySpec::Abel { beta } => {
            let w_at = move |u: f64| lambert_w0(-u / beta).unwrap_or(-1.0);
            let h: AmplitudeFn = Arc::new(move |n, u| Amplitude {
                sign: 1.0,
                ln_abs: 0.5 * beta * w_at(u) - 0.5 * abel_log_xfact(beta, n),
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(move |u| -beta * w_at(u))),
                nbar: Some(Arc::new(move |u| {
                    let w = w_at(u);
                    -beta * w / (1.0 + w)
                })),
                u_of_nbar: Some(Arc::new(move |nbar| {
                    // nbar = -beta W/(1+W) inverts to W = -nbar/(beta+nbar),
                    // and u = -beta W e^W.
                    let w = -nbar / (beta + nbar);
                    -beta * w * w.exp()
                })),
                mandel_q: Some(Arc::new(move |u| {
                    let w1 = 1.0 + w_at(u);
                    1.0 / (w1 * w1) - 1.0
                })),
                delta: Some(Arc::new(move |nbar| {
                    (-beta * nbar / (beta + nbar)).exp() - (-nbar).exp()
                })),
                ..ClosedForms::default()
            };
            AnFamily::new(
                name,
                params,
                beta / std::f64::consts::E,
                None,
                h,
                closed,
            )
        }
        FamilySpec::Sg => {
            let h: AmplitudeFn = Arc::new(|n, u| {
                let (sign, ln_abs) = bessel_j_scaled_log(n + 1, u).expect("u >= 0");
                Amplitude {
                    sign,
                    ln_abs: ((n + 1) as f64).ln() + ln_abs,
                }
            });
            AnFamily::new(name, params, f64::INFINITY, None, h, ClosedForms::default())
        }
        FamilySpec::Sgm => {
            let h: AmplitudeFn = Arc::new(|n, u| {
                let (sign, ln_abs) = bessel_j_scaled_log(n + 1, u).expect("u >= 0");
                Amplitude {
                    sign,
                    ln_abs: 0.5 * ((n + 1) as f64).ln() - 0.5 * sgm_norm(u).ln() + ln_abs,
                }
            });
            let closed = ClosedForms {
                ln_norm: Some(Arc::new(|u| sgm_norm(u).ln())),
                nbar: Some(Arc::new(sgm_nbar)),
                n2bar: Some(Arc::new(sgm_n2bar)),
                weight: Some(Arc::new(sgm_norm)),
                ..ClosedForms::default()
            };
            AnFamily::new(name, params, f64::INFINITY, None, h, closed)
        }
    };
    Ok(fam)
}

/// One limiting-behavior evaluation: the measured deviation of the family at
/// its given parameters from the analytic limit law.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    /// What was compared.
    pub name: String,
    /// Measured deviation (metric named in `name`).
    pub deviation: f64,
    /// Deviation considered passing for parameters at least as extreme as
    /// the documented reference points (n_j = 1000, kappa = 0.5001, beta = 1e6).
    pub tolerance: f64,
    pub pass: bool,
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut tv = 0.0;
    for i in 0..len {
        let a = p.get(i).copied().unwrap_or(0.0);
        let b = q.get(i).copied().unwrap_or(0.0);
        tv += (a - b).abs();
    }
    tv / 2.0
}

/// Evaluates the documented limiting behaviors for the given spec.
///
/// * spin: the distribution at `u = 1/n_j` (the `alpha -> alpha/sqrt(n_j)`
///   rescaling) against Poisson with the same `u`;
/// * perelomov: the distribution at the `u` giving scaled mean 1 against the
///   geometric distribution with mean 1;
/// * abel: `x_5` against its large-`beta` limit 5.
///
/// Families without a stated limit return an empty list.
pub fn limit_checks(spec: &FamilySpec) -> Result<Vec<LimitCheck>, FamilyError> {
    spec.validate()?;
    let mut out = Vec::new();
    match *spec {
        FamilySpec::Spin { n_j } => {
            // Under the contraction u -> u/n_j the counts tend to Poisson
            // with mean n_j * (u/n_j); probe at scaled mean 1.
            let fam = make_family(spec)?;
            let u = 1.0 / n_j as f64;
            let dist = fam.distribution(u).expect("u inside domain");
            let gs = make_family(&FamilySpec::Gs)?;
            let pois = gs.distribution(n_j as f64 * u).expect("u inside domain");
            let tv = total_variation(&dist.probs, &pois.probs);
            out.push(LimitCheck {
                name: format!("spin(n_j={n_j}) at u=1/n_j vs Poisson, total variation"),
                deviation: tv,
                tolerance: 1e-2,
                pass: tv < 1e-2,
            });
        }
        FamilySpec::Perelomov { kappa } => {
            let fam = make_family(spec)?;
            // Scaled mean 1 corresponds to u = 1/2 regardless of kappa.
            let dist = fam.distribution(0.5).expect("u inside domain");
            let geo: Vec<f64> = (0..dist.probs.len())
                .map(|n| 0.5f64.powi(n as i32 + 1))
                .collect();
            let tv = total_variation(&dist.probs, &geo);
            out.push(LimitCheck {
                name: format!(
                    "perelomov(kappa={kappa}) at scaled mean 1 vs geometric, total variation"
                ),
                deviation: tv,
                tolerance: 1e-3,
                pass: tv < 1e-3,
            });
        }
        FamilySpec::Abel { beta } => {
            let dev = (abel_x(beta, 5) / 5.0 - 1.0).abs();
            out.push(LimitCheck {
                name: format!("abel(beta={beta}) x_5 vs limit 5, relative"),
                deviation: dev,
                tolerance: 1e-4,
                pass: dev < 1e-4,
            });
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_series::TruncatedSeries;
    use crate::tol;

    fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!(FamilySpec::parse("gs", &[]).unwrap(), FamilySpec::Gs);
        assert_eq!(
            FamilySpec::parse("spin", &[("n_j".into(), 4.0)]).unwrap(),
            FamilySpec::Spin { n_j: 4 }
        );
        assert!(FamilySpec::parse("spin", &[("n_j".into(), 2.5)]).is_err());
        assert!(FamilySpec::parse("spin", &[]).is_err());
        assert!(FamilySpec::parse("perelomov", &[("kappa".into(), 0.5)]).is_err());
        assert!(FamilySpec::parse("barut_girardello", &[("kappa".into(), 0.5)]).is_ok());
        assert!(FamilySpec::parse("barut_girardello", &[("kappa".into(), 0.49)]).is_err());
        assert!(FamilySpec::parse("hermite", &[("a".into(), 0.0)]).is_err());
        assert!(FamilySpec::parse("abel", &[("beta".into(), -1.0)]).is_err());
        assert!(FamilySpec::parse("gs", &[("x".into(), 1.0)]).is_err());
        assert!(FamilySpec::parse("bogus", &[]).is_err());
        assert_eq!(
            FamilySpec::Spin { n_j: 4 }.to_string(),
            "spin(n_j=4)"
        );
    }

    #[test]
    fn all_families_normalize_on_log_grids() {
        let specs = [
            FamilySpec::Gs,
            FamilySpec::Spin { n_j: 7 },
            FamilySpec::Perelomov { kappa: 2.0 },
            FamilySpec::BarutGirardello { kappa: 2.0 },
            FamilySpec::Hermite { a: 1.0 },
            FamilySpec::Abel { beta: 2.0 },
            FamilySpec::Sg,
            FamilySpec::Sgm,
        ];
        for spec in &specs {
            let fam = make_family(spec).unwrap();
            let hi = if fam.radius_sq().is_finite() {
                fam.radius_sq() * 0.99
            } else {
                50.0
            };
            for i in 0..=24 {
                let u = hi * (1e-6f64).powf(1.0 - i as f64 / 24.0);
                let d = fam.distribution(u).unwrap();
                let total: f64 = d.probs.iter().sum();
                assert!(
                    (1.0 - total).abs() <= 1e-10,
                    "{spec}: u={u}: sum defect {}",
                    (1.0 - total).abs()
                );
                assert!(
                    (1.0 - total).abs() <= d.tail_bound,
                    "{spec}: u={u}: defect exceeds own bound"
                );
            }
        }
    }

    #[test]
    fn closed_moments_match_series_everywhere() {
        let specs = [
            FamilySpec::Spin { n_j: 9 },
            FamilySpec::Perelomov { kappa: 1.3 },
            FamilySpec::BarutGirardello { kappa: 0.8 },
            FamilySpec::Hermite { a: 0.7 },
            FamilySpec::Abel { beta: 2.0 },
            FamilySpec::Sgm,
        ];
        for spec in &specs {
            let fam = make_family(spec).unwrap();
            let hi = if fam.radius_sq().is_finite() {
                fam.radius_sq() * 0.95
            } else {
                30.0
            };
            for &frac in &[1e-4, 0.01, 0.1, 0.35, 0.7, 1.0] {
                let u = hi * frac;
                let closed = fam.moments(u).unwrap();
                let series = fam.moments_series(u).unwrap();
                assert!(
                    tol::rel_dev(closed.nbar, series.nbar.max(1e-300)) <= 1e-9,
                    "{spec} u={u}: nbar {} vs {}",
                    closed.nbar,
                    series.nbar
                );
                assert!(
                    tol::rel_dev(closed.n2bar, series.n2bar.max(1e-300)) <= 1e-9,
                    "{spec} u={u}: n2bar {} vs {}",
                    closed.n2bar,
                    series.n2bar
                );
                assert!(
                    tol::dev(closed.mandel_q, series.mandel_q) <= 1e-9,
                    "{spec} u={u}: Q {} vs {}",
                    closed.mandel_q,
                    series.mandel_q
                );
            }
        }
    }

    #[test]
    fn nbar_strictly_increasing() {
        let specs = [
            FamilySpec::Gs,
            FamilySpec::Spin { n_j: 5 },
            FamilySpec::Perelomov { kappa: 2.0 },
            FamilySpec::BarutGirardello { kappa: 1.0 },
            FamilySpec::Hermite { a: 2.0 },
            FamilySpec::Abel { beta: 3.0 },
            FamilySpec::Sgm,
        ];
        for spec in &specs {
            let fam = make_family(spec).unwrap();
            let hi = if fam.radius_sq().is_finite() {
                fam.radius_sq() * (1.0 - 1e-9)
            } else {
                40.0
            };
            let mut prev = -1.0;
            for u in grid(0.0, hi, 1000) {
                let nbar = fam.moments(u).unwrap().nbar;
                assert!(nbar > prev, "{spec}: nbar({u}) = {nbar} <= {prev}");
                prev = nbar;
            }
        }
    }

    #[test]
    fn sg_mean_strictly_increasing_series_path() {
        // The oscillatory family has no closed mean; a coarser grid keeps the
        // series path affordable.
        let fam = make_family(&FamilySpec::Sg).unwrap();
        let mut prev = -1.0;
        for u in grid(0.0, 40.0, 200) {
            let nbar = fam.moments(u).unwrap().nbar;
            assert!(nbar > prev, "nbar({u}) = {nbar} <= {prev}");
            prev = nbar;
        }
    }

    #[test]
    fn inversion_roundtrips() {
        let specs = [
            FamilySpec::Gs,
            FamilySpec::Spin { n_j: 6 },
            FamilySpec::Perelomov { kappa: 2.0 },
            FamilySpec::BarutGirardello { kappa: 2.0 },
            FamilySpec::Hermite { a: 1.0 },
            FamilySpec::Abel { beta: 2.0 },
            FamilySpec::Sg,
            FamilySpec::Sgm,
        ];
        for spec in &specs {
            let fam = make_family(spec).unwrap();
            let max_nbar = fam.support_max().map(|m| 0.98 * m as f64).unwrap_or(8.0);
            for &nbar in &[1e-3, 0.7, max_nbar / 2.0, max_nbar] {
                let u = fam.invert_nbar(nbar).unwrap();
                let back = fam.moments(u).unwrap().nbar;
                assert!(
                    tol::rel_dev(back, nbar) <= 1e-9,
                    "{spec}: nbar={nbar} -> u={u} -> {back}"
                );
            }
        }
    }

    #[test]
    fn spin_matches_binomial_at_unit_u() {
        let fam = make_family(&FamilySpec::Spin { n_j: 4 }).unwrap();
        let d = fam.distribution(1.0).unwrap();
        let expected = [1.0, 4.0, 6.0, 4.0, 1.0];
        assert_eq!(d.probs.len(), 5);
        for (n, &c) in expected.iter().enumerate() {
            assert!(
                tol::close(d.probs[n], c / 16.0, 1e-13),
                "P_{n} = {}",
                d.probs[n]
            );
        }
        assert_eq!(fam.h(5, 1.0), 0.0);
        assert_eq!(fam.h(17, 0.3), 0.0);
        let m = fam.moments(1.0).unwrap();
        assert!(tol::close(m.nbar, 2.0, 1e-14));
        assert!(tol::close(fam.invert_nbar(2.0).unwrap(), 1.0, 1e-12));
        assert!(fam.invert_nbar(4.0).is_err());
        // Sub-Poissonian scaled Mandel parameter: -nbar/n_j.
        for &nbar in &[0.5, 1.5, 3.0, 3.9] {
            let u = fam.invert_nbar(nbar).unwrap();
            let q = fam.moments(u).unwrap().mandel_q;
            assert!(tol::close(q, -nbar / 4.0, 1e-12), "nbar={nbar}: {q}");
        }
    }

    #[test]
    fn perelomov_reference_point() {
        let fam = make_family(&FamilySpec::Perelomov { kappa: 2.0 }).unwrap();
        let m = fam.moments(0.5).unwrap();
        assert!(tol::close(m.nbar, 4.0, 1e-13));
        assert!(tol::close(m.mandel_q, 1.0, 1e-13));
        assert!(fam.distribution(1.0).is_err());
        // Scaled Mandel parameter nbar/(2 kappa) is positive.
        for &nbar in &[0.5, 2.0, 9.0] {
            let u = fam.invert_nbar(nbar).unwrap();
            let q = fam.moments(u).unwrap().mandel_q;
            assert!(tol::close(q, nbar / 4.0, 1e-12), "nbar={nbar}: {q}");
        }
    }

    #[test]
    fn bg_small_u_expansions() {
        // Two-term small-u behavior of mean, second moment, and Mandel
        // parameter; the mean's leading term alone is u/(2 kappa).
        for &kappa in &[0.5, 2.0, 5.0] {
            let fam = make_family(&FamilySpec::BarutGirardello { kappa }).unwrap();
            let u = 1e-4;
            let m = fam.moments_series(u).unwrap();
            let k2 = 2.0 * kappa;
            let nbar_exp = u / k2 * (1.0 - u / (k2 * (1.0 + k2)));
            let n2_exp = u / k2 * (1.0 - (1.0 - k2) * u / (k2 * (1.0 + k2)));
            let q_exp = -u / (k2 * (1.0 + k2));
            assert!(
                tol::rel_dev(m.nbar, nbar_exp) < 1e-6,
                "kappa={kappa}: nbar {} vs {}",
                m.nbar,
                nbar_exp
            );
            assert!(
                tol::rel_dev(m.n2bar, n2_exp) < 1e-6,
                "kappa={kappa}: n2 {} vs {}",
                m.n2bar,
                n2_exp
            );
            assert!(
                (m.mandel_q - q_exp).abs() < 1e-6 && tol::rel_dev(m.mandel_q, q_exp) < 2e-4,
                "kappa={kappa}: Q {} vs {}",
                m.mandel_q,
                q_exp
            );
            if kappa == 2.0 {
                assert!(tol::rel_dev(m.nbar, u / 4.0) < 1e-5);
            }
        }
    }

    #[test]
    fn bg_large_u_behavior() {
        // As u grows the Mandel parameter approaches -1/2 like
        // (4 kappa - 1)/(8 sqrt u), and the variance approaches sqrt(u)/2.
        let u = 1e4;
        for &kappa in &[0.5, 2.0, 5.0] {
            let fam = make_family(&FamilySpec::BarutGirardello { kappa }).unwrap();
            let m = fam.moments(u).unwrap();
            let q_asym = -0.5 + (4.0 * kappa - 1.0) / (8.0 * u.sqrt());
            assert!(
                (m.mandel_q - q_asym).abs() < 1e-3,
                "kappa={kappa}: Q {} vs {}",
                m.mandel_q,
                q_asym
            );
            let var = m.n2bar - m.nbar * m.nbar;
            assert!(
                tol::rel_dev(var, u.sqrt() / 2.0) < 0.02,
                "kappa={kappa}: var {}",
                var
            );
            assert!(m.mandel_q < 0.0);
        }
    }

    #[test]
    fn hermite_coefficients_match_series_exponential() {
        // 1/x_n! are the Taylor coefficients of exp(u + a u^2/2).
        for &a in &[0.5, 1.0, 2.0] {
            let f = TruncatedSeries::new({
                let mut c = vec![0.0; 21];
                c[1] = 1.0;
                c[2] = a / 2.0;
                c
            })
            .unwrap();
            let n = f.exp().unwrap();
            for k in 0..=20 {
                let explicit = hermite_log_inv_xfact(a, k).exp();
                assert!(
                    (n.coeff(k) - explicit).abs() <= 1e-12 * explicit.max(1.0),
                    "a={a} k={k}: {} vs {}",
                    n.coeff(k),
                    explicit
                );
            }
            // x_2 = 2/(1+a) in particular.
            let x2 = (hermite_log_inv_xfact(a, 1) - hermite_log_inv_xfact(a, 2)).exp();
            assert!(tol::close(x2, 2.0 / (1.0 + a), 1e-12));
        }
    }

    #[test]
    fn hermite_reference_points() {
        let fam = make_family(&FamilySpec::Hermite { a: 1.0 }).unwrap();
        assert!(tol::close(fam.invert_nbar(2.0).unwrap(), 1.0, 1e-12));
        for &nbar in &[0.5, 2.0, 7.0] {
            let u = fam.invert_nbar(nbar).unwrap();
            let q = fam.moments(u).unwrap().mandel_q;
            let s = (1.0 + 4.0 * nbar).sqrt();
            assert!(tol::close(q, (s - 1.0) / (s + 1.0), 1e-10), "nbar={nbar}");
            let delta = fam.closed_forms().delta.as_ref().unwrap()(nbar);
            assert!(delta > 0.0);
        }
        // Delta(2) = e^{1/4 - 1 - 3/4} - e^{-2} for a = 1.
        let delta = fam.closed_forms().delta.as_ref().unwrap()(2.0);
        assert!(tol::close(delta, (-1.5f64).exp() - (-2.0f64).exp(), 1e-13));
    }

    #[test]
    fn abel_factorials_match_tree_series() {
        // F(u) = -beta W(-u/beta) has the tree-function coefficients
        // a_k = k^{k-1}/(beta^{k-1} k!), so exp(F) generates 1/x_n!.
        let beta = 2.0f64;
        let mut c = vec![0.0f64; 16];
        for k in 1..16 {
            let lk = (k as f64).ln();
            c[k] = ((k as f64 - 1.0) * lk
                - (k as f64 - 1.0) * beta.ln()
                - ln_gamma(k as f64 + 1.0).unwrap())
            .exp();
        }
        let n = TruncatedSeries::new(c).unwrap().exp().unwrap();
        for k in 0..=15 {
            let explicit = (-abel_log_xfact(beta, k)).exp();
            assert!(
                tol::rel_dev(n.coeff(k), explicit) <= 1e-10,
                "k={k}: {} vs {}",
                n.coeff(k),
                explicit
            );
        }
    }

    #[test]
    fn abel_sequence_limits_and_domain() {
        let beta = 2.0f64;
        let floor = beta / std::f64::consts::E;
        // x_1 = 1; the sequence decreases toward beta/e from above.
        assert!(tol::close(abel_x(beta, 1), 1.0, 1e-14));
        let mut prev = f64::INFINITY;
        for n in 2..=200 {
            let x = abel_x(beta, n);
            assert!(x >= floor, "n={n}: x={x} below beta/e");
            assert!(x <= prev + 1e-12, "n={n}: not decreasing");
            prev = x;
        }
        assert!(tol::rel_dev(abel_x(beta, 200), floor) < 1e-2);
        // Domain ends at beta/e; approaching it stays computable (the count
        // tail thins like (u e/beta)^n, so stop short enough to truncate).
        let fam = make_family(&FamilySpec::Abel { beta }).unwrap();
        assert!(fam.distribution(floor).is_err());
        assert!(fam.distribution(floor * (1.0 - 1e-4)).is_ok());
        // Super-Poissonian everywhere.
        for &u in &[0.1, 0.4, 0.7] {
            assert!(fam.moments(u).unwrap().mandel_q > 0.0);
        }
    }

    #[test]
    fn sgm_norm_branches_agree() {
        // Closed form vs defining series on both sides of the switch point.
        for &u in &[1e-7, 5e-7, 2e-6, 1e-4, 0.3, 3.67, 20.0, 50.0] {
            let closed = if u > 1e-6 {
                sgm_norm(u)
            } else {
                let z = 2.0 * u.sqrt();
                let j = bessel_j_batch(1, z).unwrap();
                (2.0 * u * (j[0] * j[0] + j[1] * j[1]) - u.sqrt() * j[0] * j[1]) / u
            };
            let series: f64 = (0..60)
                .map(|n| {
                    let (_, ln_abs) = bessel_j_scaled_log(n + 1, u).unwrap();
                    (n + 1) as f64 * (n as f64 * u.ln() + 2.0 * ln_abs).exp()
                })
                .sum();
            assert!(
                tol::rel_dev(closed, series) < 1e-9,
                "u={u}: {closed} vs {series}"
            );
        }
    }

    #[test]
    fn sgm_reference_behavior() {
        let fam = make_family(&FamilySpec::Sgm).unwrap();
        assert_eq!(fam.moments(0.0).unwrap().nbar, 0.0);
        // Mean is 1/N - 1 and the corrected second moment tracks the series.
        for &u in &[0.05, 1.0, 3.6704, 12.0, 35.0] {
            let closed = fam.moments(u).unwrap();
            let series = fam.moments_series(u).unwrap();
            assert!(tol::rel_dev(closed.nbar, series.nbar) < 1e-9, "u={u}");
            assert!(tol::rel_dev(closed.n2bar, series.n2bar) < 1e-9, "u={u}");
        }
    }

    #[test]
    fn sg_amplitude_signs_oscillate() {
        let fam = make_family(&FamilySpec::Sg).unwrap();
        // First root of J_1 is at 3.8317...: h_0 changes sign at
        // u = (3.8317/2)^2 = 3.6704...
        assert!(fam.h(0, 3.5) > 0.0);
        assert!(fam.h(0, 3.8) < 0.0);
        let d = fam.distribution(3.7).unwrap();
        assert!(d.probs[0] > 0.0, "squared amplitude stays nonnegative");
    }

    #[test]
    fn contraction_limits() {
        let spin = limit_checks(&FamilySpec::Spin { n_j: 1000 }).unwrap();
        assert_eq!(spin.len(), 1);
        assert!(spin[0].pass, "{}: {}", spin[0].name, spin[0].deviation);
        assert!(spin[0].deviation < 1e-2);

        let per = limit_checks(&FamilySpec::Perelomov { kappa: 0.5001 }).unwrap();
        assert!(per[0].pass, "{}: {}", per[0].name, per[0].deviation);
        assert!(per[0].deviation < 1e-3);

        let abel = limit_checks(&FamilySpec::Abel { beta: 1e6 }).unwrap();
        assert!(abel[0].pass, "{}: {}", abel[0].name, abel[0].deviation);
        assert!(abel[0].deviation < 1e-4);

        assert!(limit_checks(&FamilySpec::Gs).unwrap().is_empty());
    }

    #[test]
    fn weights_resolve_identity_for_low_moments() {
        // Pointwise spot check of the measure weights via the n = 1 moment
        // integral; the full grid lives in the verification suite.
        use crate::specfun::quad;
        for spec in &[
            FamilySpec::Gs,
            FamilySpec::Spin { n_j: 4 },
            FamilySpec::Perelomov { kappa: 2.0 },
        ] {
            let fam = make_family(spec).unwrap();
            let w = fam.closed_forms().weight.clone().unwrap();
            let f = {
                let fam = fam.clone();
                move |u: f64| {
                    let amp = fam.amplitude(1, u);
                    w(u) * u * (2.0 * amp.ln_abs).exp()
                }
            };
            let r = if fam.radius_sq().is_finite() {
                quad::integrate(f, 0.0, fam.radius_sq(), 1e-10).unwrap()
            } else {
                quad::integrate_semi_infinite(f, 0.0, 1e-10).unwrap()
            };
            assert!(
                (r.value - 1.0).abs() < 1e-8,
                "{spec}: integral {}",
                r.value
            );
        }
    }
}
