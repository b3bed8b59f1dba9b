//! Exact rational values and their text forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn from_i128(v: i128) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"n/d"`, an integer, or a plain decimal such as `"-0.125"`.
///
/// Decimals are converted exactly (`0.1` is `1/10`). Exponents are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = parse_int(num)?;
        let den: BigInt = parse_int(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(num, den);
    Some(if negative { -value } else { value })
}

fn parse_int(text: &str) -> Option<BigInt> {
    let text = text.trim();
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Canonical `"num/den"` form, always in lowest terms with a positive denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Rational) -> f64 {
    match (value.numer().to_f64(), value.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both sides into range before dividing.
            let bits = value.denom().bits().max(value.numer().bits()) as i64 - 900;
            let shift = bits.max(0) as usize;
            let n = (value.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (value.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Rounds `value` to `places` decimals with ties to even and renders it.
pub fn format_decimal(value: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = value * Rational::from_integer(scale.clone());
    let rounded = round_half_even(&scaled);
    let negative = rounded.is_negative();
    let abs = rounded.abs();
    let (int_part, frac_part) = abs.div_rem(&scale);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if places > 0 {
        out.push('.');
        out.push_str(&format!(
            "{:0>width$}",
            frac_part.to_string(),
            width = places
        ));
    }
    out
}

pub fn round_half_even(value: &Rational) -> BigInt {
    let floor = value.floor().to_integer();
    let frac = value - Rational::from_integer(floor.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    }
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
