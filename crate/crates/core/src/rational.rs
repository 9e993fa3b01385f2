// SPDX-License-Identifier: Apache-2.0

//! Exact rational helpers shared by the chain, circle and interval code.
//!
//! Rationals travel through every text format as `"p/q"` strings; an integer
//! may also be written without a denominator.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::ParseError;

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(value: i64) -> Q {
    Q::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"`. Whitespace around the parts is ignored.
pub fn parse_q(text: &str) -> Result<Q, ParseError> {
    let text = text.trim();
    let bad = || ParseError::Rational(text.to_string());
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(numer, denom))
}

/// Formats as `"p/q"` in lowest terms, always with a denominator.
pub fn format_q(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Q) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Outside f64 range after rounding: fall back to sign-aware infinity.
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite double.
pub fn from_f64(value: f64) -> Option<Q> {
    Q::from_float(value)
}

/// Representative of `value mod 1` in `[0, 1)`.
pub fn frac(value: &Q) -> Q {
    value - value.floor()
}

/// Representative of `value mod modulus` in `[0, modulus)`; `modulus > 0`.
pub fn rem_euclid(value: &Q, modulus: &Q) -> Q {
    let k = (value / modulus).floor();
    value - k * modulus
}

pub fn is_integer(value: &Q) -> bool {
    value.denom().is_one()
}

pub fn serialize_q<S: Serializer>(value: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(value))
}

pub fn deserialize_q<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
    let text = String::deserialize(d)?;
    parse_q(&text).map_err(serde::de::Error::custom)
}
