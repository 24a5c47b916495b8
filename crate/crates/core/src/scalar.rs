//! The exact scalar abstraction shared by every algorithm in the crate.
//!
//! All geometry is decided exactly, so the scalar type must be an ordered
//! field without rounding. [`num::BigRational`] is the default; bounded
//! rationals such as `Ratio<i64>` also satisfy the bound and are handy for
//! small tests, at the price of possible overflow.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num::{BigInt, BigRational, FromPrimitive, Signed};

use crate::error::{Error, Result};

/// An exact ordered field.
pub trait Scalar:
    num::traits::NumRef
    + Signed
    + Ord
    + Clone
    + Debug
    + Display
    + FromStr
    + FromPrimitive
    + num::traits::ToPrimitive
    + std::hash::Hash
    + Send
    + Sync
    + 'static
{
    /// Builds `num / den`.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer conversion") / Self::from_i64(den).expect("integer conversion")
    }

    fn int(v: i64) -> Self {
        Self::from_i64(v).expect("integer conversion")
    }
}

impl<T> Scalar for T where
    T: num::traits::NumRef
        + Signed
        + Ord
        + Clone
        + Debug
        + Display
        + FromStr
        + FromPrimitive
        + num::traits::ToPrimitive
        + std::hash::Hash
        + Send
        + Sync
        + 'static
{
}

/// Parses `"p/q"`, `"p"`, or a terminating decimal such as `"-0.25"`.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    let t = text.trim();
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if t.contains('/') {
            return Err(Error::Parse(format!("malformed rational '{text}'")));
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let den = format!("1{}", "0".repeat(frac_part.len()));
        let body = format!("{}{}/{}", if negative { "-" } else { "" }, digits, den);
        return S::from_str(&body).map_err(|_| Error::Parse(format!("malformed rational '{text}'")));
    }
    S::from_str(t).map_err(|_| Error::Parse(format!("malformed rational '{text}'")))
}

/// Parses a comma separated list of rationals.
pub fn parse_vector<S: Scalar>(text: &str) -> Result<Vec<S>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_scalar).collect()
}

pub fn format_vector<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn to_strings<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn from_strings<S: Scalar>(v: &[String]) -> Result<Vec<S>> {
    v.iter().map(|x| parse_scalar(x)).collect()
}

/// Convenience constructor for the default scalar.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y)
}

pub fn is_zero_vec<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero())
}
