//! Scalar arithmetic behind every mass, weight, and gain in the crate.
//!
//! Two implementations of [`Mass`] exist: `f64` for speed, and
//! [`num::BigRational`] for exact runs where every comparison is a theorem
//! rather than a tolerance check. All float tolerances used anywhere in the
//! crate are pinned here as associated constants of the `f64` impl so there is
//! a single place to audit them.

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Absolute tolerance for gain/weight comparisons in float mode.
///
/// Weights are polynomials in probability masses bounded by 1, so an absolute
/// threshold is meaningful: anything at or below it counts as zero.
pub const FLOAT_EPS: f64 = 1e-9;

/// Safety margin added to stale lazy-greedy bounds in float mode, covering
/// rounding drift between a bound computed at an ancestor state and the fresh
/// value at the current one.
pub const LAZY_SLACK: f64 = 1e-12;

/// Relative tolerance for the polynomial recurrence self-check.
pub const RECURRENCE_EPS: f64 = 1e-12;

/// Nonnegative scalar with the handful of operations the solver needs.
///
/// Everything is by-reference so the arbitrary-precision implementation does
/// not clone on every multiply.
pub trait Mass: Clone + PartialEq + PartialOrd + std::fmt::Debug + Send + Sync + 'static {
    /// True when comparisons are exact and tolerances must be zero.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;

    /// Embed a count exactly.
    fn from_count(n: usize) -> Self;

    /// Embed a float weight. Exact implementations embed the binary value of
    /// `w` itself, not a decimal approximation.
    fn from_weight(w: f64) -> Result<Self>;

    fn to_f64(&self) -> f64;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;

    fn add_assign(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }

    fn is_zero(&self) -> bool;

    /// Threshold at or below which a gain or residual weight counts as zero.
    fn gain_floor() -> Self;

    /// Margin added to stale upper bounds when deciding whether the lazy
    /// greedy scan may stop.
    fn lazy_slack() -> Self;

    /// True when `self` is negative beyond what rounding can explain; callers
    /// treat that as an arithmetic bug rather than clamping silently.
    fn is_negative_beyond_tolerance(&self) -> bool;

    /// Clamp a tiny negative rounding artifact to zero. Exact mode returns the
    /// value unchanged (it errors earlier if genuinely negative).
    fn clamp_rounding(self) -> Self;
}

impl Mass for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn from_weight(w: f64) -> Result<Self> {
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::UnrepresentableWeight(w))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
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

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn gain_floor() -> Self {
        FLOAT_EPS
    }

    fn lazy_slack() -> Self {
        LAZY_SLACK
    }

    fn is_negative_beyond_tolerance(&self) -> bool {
        *self < -FLOAT_EPS
    }

    fn clamp_rounding(self) -> Self {
        if self < 0.0 {
            0.0
        } else {
            self
        }
    }
}

impl Mass for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_count(n: usize) -> Self {
        BigRational::from_integer(n.into())
    }

    fn from_weight(w: f64) -> Result<Self> {
        BigRational::from_float(w).ok_or(Error::UnrepresentableWeight(w))
    }

    fn to_f64(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
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

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn gain_floor() -> Self {
        Zero::zero()
    }

    fn lazy_slack() -> Self {
        Zero::zero()
    }

    fn is_negative_beyond_tolerance(&self) -> bool {
        self.is_negative()
    }

    fn clamp_rounding(self) -> Self {
        self
    }
}

/// Sum a slice of masses in index order.
pub fn mass_sum<M: Mass>(values: &[M]) -> M {
    let mut acc = M::zero();
    for v in values {
        acc.add_assign(v);
    }
    acc
}
