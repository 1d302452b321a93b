//! Scalar field used throughout the crate.
//!
//! Every algorithm is generic over [`Scalar`], with two implementations:
//! [`Rational`] (exact, zero tolerance) and `f64` (tolerance `1e-9`).

use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::BigRational;

use num::traits::{Num, ToPrimitive};
pub use num::traits::{One, Signed, Zero};

pub use crate::rational::Rational;

/// Tolerance applied to feasibility and sign tests in floating-point mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Num
    + Signed
    + Clone
    + Debug
    + PartialOrd
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact.
    const EXACT: bool;

    /// Absolute slack granted to sign and equality tests (zero when exact).
    fn tolerance() -> Self;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Text form used in JSON and TSPLIB output; `parse_scalar` reads it back unchanged.
    fn render(&self) -> String;

    /// Accepts integers, `p/q` fractions, and decimal literals.
    fn parse_scalar(s: &str) -> Option<Self>;

    /// `self -= factor * x`
    fn sub_mul_assign(&mut self, factor: &Self, x: &Self) {
        let mut t = factor.clone();
        t *= x;
        *self -= &t;
    }

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    /// `self < -tol`
    fn is_neg_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    /// `self > tol`
    fn is_pos_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    /// `|self - other| <= tol`
    fn approx_eq(&self, other: &Self) -> bool {
        let mut d = self.clone();
        d -= other;
        d.abs() <= Self::tolerance()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(numer, denom)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.starts_with('-');
            let digits = int_part.trim_start_matches(['-', '+']);
            if !frac_part.chars().all(|c| c.is_ascii_digit())
                || !digits.chars().all(|c| c.is_ascii_digit())
                || (digits.is_empty() && frac_part.is_empty())
            {
                return None;
            }
            let whole = format!("{digits}{frac_part}");
            let numer = BigInt::from_str(if whole.is_empty() { "0" } else { &whole }).ok()?;
            let denom = num::pow(BigInt::from(10), frac_part.len());
            let r = Rational::from_big(BigRational::new(numer, denom));
            return Some(if negative { -r } else { r });
        }
        let r = Rational::from_str(s).ok()?;
        Some(r)
    }

    fn sub_mul_assign(&mut self, factor: &Self, x: &Self) {
        if !factor.is_zero() && !x.is_zero() {
            *self -= &(factor * x);
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return (q != 0.0).then(|| p / q);
        }
        s.parse().ok().filter(|v: &f64| v.is_finite())
    }

    fn sub_mul_assign(&mut self, factor: &Self, x: &Self) {
        *self -= factor * x;
    }
}

/// Sum of a sequence of scalars.
pub fn sum<'a, S: Scalar>(items: impl IntoIterator<Item = &'a S>) -> S {
    let mut acc = S::zero();
    for v in items {
        acc += v;
    }
    acc
}
