//! Truncated power series and exact multivariate polynomials.
//!
//! [`TruncatedSeries`] is a dense one-variable power series cut off at a
//! fixed order. It is generic over its coefficient ring so the same
//! arithmetic serves three purposes: fast `f64` coefficients for ODE
//! right-hand sides, exact rational-complex coefficients for identity
//! checks, and polynomial coefficients for fully symbolic expansions such
//! as the Schwarzian derivative of a generic normalized function.
//!
//! [`MultiPoly`] (in [`poly`]) is the sparse multivariate polynomial with
//! exact coefficients used by the Kirillov fields, differential forms, and
//! Neretin polynomials.

mod poly;

pub use poly::{render_exact, Monomial, MultiPoly};

use num::complex::Complex;
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use thiserror::Error;

/// Complex floating-point scalar used by the integrators.
pub type C64 = Complex<f64>;

/// Exact complex scalar: a pair of arbitrary-precision rationals.
pub type Exact = Complex<BigRational>;

/// Builds an exact scalar from integer real and imaginary parts.
pub fn exact_int(re: i64, im: i64) -> Exact {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

/// Builds an exact real scalar `num/den`.
pub fn exact_ratio(num: i64, den: i64) -> Exact {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

/// Coefficient ring for [`TruncatedSeries`].
///
/// `inverse` is partial because polynomial coefficients are only invertible
/// when they are nonzero constants; series division reports an error instead
/// of panicking when a leading coefficient is not a unit.
pub trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Multiplicative inverse, if this element is a unit.
    fn inverse(&self) -> Option<Self>;
}

impl Scalar for C64 {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }
    fn inverse(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex::new(1.0, 0.0) / self)
        }
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn from_int(n: i64) -> Self {
        exact_int(n, 0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        exact_ratio(num, den)
    }
    fn inverse(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            let d = self.norm_sqr();
            Some(Complex::new(
                self.re.clone() / d.clone(),
                -self.im.clone() / d,
            ))
        }
    }
}

/// Errors from series arithmetic.
#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("inner series of a composition must have zero constant term")]
    NonzeroConstantTerm,
    #[error("leading coefficient is not invertible")]
    NonInvertibleLeading,
    #[error("series order {order} too small, need at least {needed}")]
    OrderTooSmall { order: usize, needed: usize },
    #[error("series is not normalized (f(0) = 0, f'(0) invertible required)")]
    NotNormalized,
}

/// One-variable power series truncated at a fixed order.
///
/// `coeffs[k]` is the coefficient of `z^k`; the truncation order is
/// `coeffs.len() - 1`. Arithmetic between series of different orders
/// truncates to the shorter operand, so precision never silently inflates.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// Zero series of the given truncation order.
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![S::zero(); order + 1],
        }
    }

    /// Constant series `1` of the given order.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = S::one();
        s
    }

    /// The identity series `z`.
    pub fn var(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = S::one();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least order 0");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, value: S) {
        assert!(k < self.coeffs.len());
        self.coeffs[k] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    /// Truncates to a lower order (no-op when `order` is not lower).
    pub fn truncated(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self {
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// Zero-pads up to `order`.
    ///
    /// Only sound when the caller knows the true tail coefficients vanish;
    /// ordinary arithmetic should rely on min-order truncation instead.
    pub fn zero_extended(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, S::zero());
        Self { coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Self {
            coeffs: (0..n).map(|k| self.coeffs[k].add(&rhs.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Self {
            coeffs: (0..n).map(|k| self.coeffs[k].sub(&rhs.coeffs[k])).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(S::neg).collect(),
        }
    }

    /// Cauchy product truncated at the shorter operand's order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self { coeffs: out }
    }

    /// Termwise derivative; drops one order.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..self.coeffs.len())
                .map(|k| self.coeffs[k].mul(&S::from_int(k as i64)))
                .collect(),
        }
    }

    /// Substitutes `inner` for the variable. `inner` must kill the constant
    /// term, otherwise infinitely many terms would feed each coefficient.
    ///
    /// Powers of `inner` are accumulated iteratively; the result is
    /// truncated at the shorter of the two orders.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order().min(inner.order());
        let outer = self.truncated(order);
        let inner = inner.truncated(order);
        let mut result = Self::zero(order);
        result.coeffs[0] = outer.coeffs[0].clone();
        let mut power = Self::one(order);
        for k in 1..=order {
            power = power.mul(&inner);
            if outer.coeffs[k].is_zero() {
                continue;
            }
            result = result.add(&power.scale(&outer.coeffs[k]));
        }
        Ok(result)
    }

    /// Series division `self / rhs`; requires an invertible constant term in
    /// `rhs`. Truncates at the shorter order.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        let lead = rhs.coeffs[0]
            .inverse()
            .ok_or(SeriesError::NonInvertibleLeading)?;
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut q = vec![S::zero(); n];
        for k in 0..n {
            let mut acc = self.coeffs[k].clone();
            for i in 0..k {
                acc = acc.sub(&q[i].mul(&rhs.coeffs[k - i]));
            }
            q[k] = acc.mul(&lead);
        }
        Ok(Self { coeffs: q })
    }

    /// Horner evaluation at a point of the coefficient ring.
    pub fn eval(&self, z: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Schwarzian derivative `S_f = f'''/f' - (3/2)(f''/f')^2` as a series.
    ///
    /// Requires `f(0) = 0` and an invertible `f'(0)`; the result is
    /// truncated at `order - 3` since three derivatives are consumed.
    pub fn schwarzian(&self) -> Result<Self, SeriesError> {
        if self.order() < 3 {
            return Err(SeriesError::OrderTooSmall {
                order: self.order(),
                needed: 3,
            });
        }
        if !self.coeffs[0].is_zero() || self.coeffs[1].inverse().is_none() {
            return Err(SeriesError::NotNormalized);
        }
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let q3 = d3.div(&d1)?;
        let q2 = d2.div(&d1)?;
        let three_halves = S::from_ratio(3, 2);
        Ok(q3.sub(&q2.mul(&q2).scale(&three_halves)))
    }
}

impl TruncatedSeries<C64> {
    /// Maximum absolute difference of coefficients up to the shorter order.
    pub fn max_coeff_distance(&self, rhs: &Self) -> f64 {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        (0..n)
            .map(|k| (self.coeffs[k] - rhs.coeffs[k]).norm())
            .fold(0.0, f64::max)
    }
}
