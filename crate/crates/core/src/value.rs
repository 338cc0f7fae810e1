//! Exact rational data values.
//!
//! Every data value handled by the built-in theory is an arbitrary precision
//! rational. Decimal literals such as `0.5` are read exactly, and values print
//! as integers, terminating decimals, or `n/d` otherwise.

use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A data value of the built-in rational theory.
pub type Value = BigRational;

pub fn int(n: i64) -> Value {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Value {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `12`, `-3`, `0.5`, `-1/3`, and `+2` style literals.
pub fn parse_value(text: &str) -> Option<Value> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return None;
        }
        num / den
    } else {
        parse_decimal(body)?
    };
    Some(if negative { -value } else { value })
}

fn parse_decimal(text: &str) -> Option<Value> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numerator: BigInt = digits.parse().ok()?;
    let denominator = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(numerator, denominator))
}

/// Renders a value so that [`parse_value`] reads it back unchanged.
pub fn format_value(value: &Value) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    if let Some(decimal) = terminating_decimal(value) {
        return decimal;
    }
    format!("{}/{}", value.numer(), value.denom())
}

fn terminating_decimal(value: &Value) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = value.abs() * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = digits.split_at(digits.len() - places);
    let mut out = String::new();
    if value.is_negative() {
        out.push('-');
    }
    let _ = write!(out, "{whole}.{frac}");
    Some(out)
}

/// Lossy conversion used only for diagnostics.
pub fn approx(value: &Value) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
