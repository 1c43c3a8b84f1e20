//! Polynomial kernel.
//!
//! - [`UniPoly`]: dense real univariate polynomials with interval root finding
//!   and exact integration of `|p|`.
//! - [`MultiPoly`]: sparse multivariate polynomials over `BigRational`.
//! - [`series_exp`]: truncated `exp(-sum lambda(k)/k tau^k)`.
//! - [`hankel_det`]: Hankel determinants over any [`Determinant`] ring.

mod hankel;
mod multi;
mod series;
mod uni;

pub use hankel::{hankel_det, Determinant};
pub use multi::{Monomial, MultiPoly, TermJson};
pub use series::{series_exp, series_log, SeriesCoeffs};
pub use uni::{integrate_abs, real_roots_all, real_roots_in, Root, RootSet, UniPoly};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{ReachError, Result};

/// Arithmetic needed by the series and determinant code.
///
/// Constants are built from an existing value (`zero_like`, `one_like`) so that
/// coefficient types carrying context, like a variable list, work too.
pub trait Coefficient: Clone + std::fmt::Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn div_int(&self, n: i64) -> Self;
    fn mul_int(&self, n: i64) -> Self;
}

/// Rings with exact division, as needed by fraction-free elimination.
pub trait ExactRing: Coefficient {
    fn exact_div(&self, divisor: &Self) -> Result<Self>;
}

impl Coefficient for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_zero_value(&self) -> bool {
        *self == 0.0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_int(&self, n: i64) -> Self {
        self / n as f64
    }
    fn mul_int(&self, n: i64) -> Self {
        self * n as f64
    }
}

impl Coefficient for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_int(&self, n: i64) -> Self {
        self / BigRational::from_integer(n.into())
    }
    fn mul_int(&self, n: i64) -> Self {
        self * BigRational::from_integer(n.into())
    }
}

impl ExactRing for BigRational {
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        if divisor.is_zero() {
            return Err(ReachError::InexactDivision);
        }
        Ok(self / divisor)
    }
}

/// `n!` as f64.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
