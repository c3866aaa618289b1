//! Truncated power-series arithmetic over `f64` coefficients.
//!
//! A [`TruncatedSeries`] holds the coefficients `c[0..=order]` of a formal
//! power series in the monomial basis. All binary operations require both
//! operands to share the same order and truncate the result consistently at
//! that order, so a chain of operations stays inside one fixed jet space.
//!
//! Division, logarithm, and exponential use the standard recurrences obtained
//! by differentiating the defining relation once and matching coefficients;
//! real powers go through `exp(t * log(a))`.

use std::fmt;

/// Formal power series truncated at a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

/// Errors from series construction and arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesError {
    /// Binary operation on operands of different truncation orders.
    OrderMismatch { left: usize, right: usize },
    /// Division by a series with vanishing constant term.
    ZeroConstantDivisor,
    /// Logarithm or real power of a series whose constant term is not positive.
    NonPositiveConstant(f64),
    /// A coefficient is NaN or infinite.
    NonFiniteCoefficient { index: usize, value: f64 },
    /// Empty coefficient list.
    Empty,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::OrderMismatch { left, right } => {
                write!(f, "series orders differ: {left} vs {right}")
            }
            SeriesError::ZeroConstantDivisor => {
                write!(f, "division requires a nonzero constant term")
            }
            SeriesError::NonPositiveConstant(c) => {
                write!(f, "operation requires a positive constant term, got {c}")
            }
            SeriesError::NonFiniteCoefficient { index, value } => {
                write!(f, "coefficient {index} is not finite: {value}")
            }
            SeriesError::Empty => write!(f, "series needs at least a constant term"),
        }
    }
}

impl std::error::Error for SeriesError {}

pub type SeriesResult<T> = Result<T, SeriesError>;

impl TruncatedSeries {
    /// Builds a series from coefficients `c_0, c_1, ..., c_order`.
    pub fn new(coeffs: Vec<f64>) -> SeriesResult<Self> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (index, &value) in coeffs.iter().enumerate() {
            if !value.is_finite() {
                return Err(SeriesError::NonFiniteCoefficient { index, value });
            }
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// The constant series `c` at the given order.
    pub fn constant(c: f64, order: usize) -> SeriesResult<Self> {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        TruncatedSeries::new(coeffs)
    }

    /// Truncation order (the highest retained power).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `u^k`, or 0 beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// All coefficients, constant term first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates the truncated polynomial at `u` by Horner's rule.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    fn check_same_order(&self, other: &Self) -> SeriesResult<()> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> SeriesResult<Self> {
        self.check_same_order(other)?;
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries::new(out)
    }

    /// Quotient `self / other`; `other` must have a nonzero constant term.
    ///
    /// Coefficients follow the recurrence
    /// `q_n = (a_n - sum_{k=1..n} b_k q_{n-k}) / b_0`.
    pub fn div(&self, other: &Self) -> SeriesResult<Self> {
        self.check_same_order(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(SeriesError::ZeroConstantDivisor);
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n];
        for m in 0..n {
            let mut acc = self.coeffs[m];
            for k in 1..=m {
                acc -= other.coeffs[k] * q[m - k];
            }
            q[m] = acc / b0;
        }
        TruncatedSeries::new(q)
    }

    /// Logarithm of a series with positive constant term.
    ///
    /// From `a L' = a'`: `L_m = a_m/a_0 - (1/m) sum_{j=1..m-1} (m-j) a_j L_{m-j} / a_0`,
    /// seeded with `L_0 = ln a_0`.
    pub fn log(&self) -> SeriesResult<Self> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(SeriesError::NonPositiveConstant(a0));
        }
        let n = self.coeffs.len();
        let mut l = vec![0.0; n];
        l[0] = a0.ln();
        for m in 1..n {
            let mut acc = self.coeffs[m];
            for j in 1..m {
                acc -= (m - j) as f64 / m as f64 * self.coeffs[j] * l[m - j];
            }
            l[m] = acc / a0;
        }
        TruncatedSeries::new(l)
    }

    /// Exponential of the series.
    ///
    /// From `E' = b' E`: `E_m = (1/m) sum_{j=1..m} j b_j E_{m-j}`, seeded with
    /// `E_0 = exp(b_0)`.
    pub fn exp(&self) -> SeriesResult<Self> {
        let n = self.coeffs.len();
        let mut e = vec![0.0; n];
        e[0] = self.coeffs[0].exp();
        for m in 1..n {
            let mut acc = 0.0;
            for j in 1..=m {
                acc += j as f64 * self.coeffs[j] * e[m - j];
            }
            e[m] = acc / m as f64;
        }
        TruncatedSeries::new(e)
    }

    /// Real power `self^t` via `exp(t * log(self))`; requires a positive
    /// constant term.
    pub fn pow(&self, t: f64) -> SeriesResult<Self> {
        let mut l = self.log()?;
        for c in &mut l.coeffs {
            *c *= t;
        }
        l.exp()
    }
}
