//! Exact rational scalars shared by every module.
//!
//! All payoff, payment, and probability arithmetic in this crate is exact:
//! values are [`BigRational`]s parsed from integer, decimal, or `p/q`
//! literals and never touch floating point. Weak-dominance comparisons are
//! discontinuous, so a single rounded bit could flip a verdict.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every payoff, payment, and probability.
pub type Rat = BigRational;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The fraction `n / d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an integer literal, a decimal literal, or a `p/q` fraction into an
/// exact rational. Decimal digits are scaled by powers of ten, never rounded.
pub fn parse_rational(text: &str) -> Result<Rat, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((p, q)) = s.split_once('/') {
        let numer: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in `{s}`"))?;
        let denom: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in `{s}`"))?;
        if denom.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rat::new(numer, denom));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("no digits in `{s}`"));
    }
    let all_digits = |part: &str| part.chars().all(|c| c.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(format!(
            "`{s}` is not an integer, decimal, or p/q literal"
        ));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().expect("digit string");
    if negative {
        numer = -numer;
    }
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Rat::new(numer, denom))
}

/// Formats a rational as an integer when the denominator is 1, as a finite
/// decimal when the denominator divides a power of ten, and as `p/q`
/// otherwise. The output parses back to the identical value.
pub fn format_rational(value: &Rat) -> String {
    if value.denom().is_one() {
        return value.numer().to_string();
    }
    let mut reduced = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&reduced % &two).is_zero() {
        reduced /= &two;
        twos += 1;
    }
    while (&reduced % &five).is_zero() {
        reduced /= &five;
        fives += 1;
    }
    if !reduced.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scale = BigInt::from(10u32).pow(places) / value.denom();
    let scaled = value.numer() * scale;
    let digits = scaled.abs().to_string();
    let places = places as usize;
    let padded = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = padded.len() - places;
    let sign = if scaled.is_negative() { "-" } else { "" };
    format!("{sign}{}.{}", &padded[..split], &padded[split..])
}

/// Truncating conversion to `f64`, for report rendering only.
pub fn to_f64(value: &Rat) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_decimals_exactly() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational("-12").unwrap(), rat(-12));
        assert_eq!(parse_rational("0.75").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("1.1").unwrap(), ratio(11, 10));
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_rational("4/5").unwrap(), ratio(4, 5));
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for text in ["0", "3", "-12", "0.75", "1.1", "-0.125", "1/3", "-7/13"] {
            let value = parse_rational(text).unwrap();
            assert_eq!(parse_rational(&format_rational(&value)).unwrap(), value);
        }
        assert_eq!(format_rational(&ratio(3, 4)), "0.75");
        assert_eq!(format_rational(&ratio(11, 10)), "1.1");
        assert_eq!(format_rational(&ratio(1, 3)), "1/3");
        assert_eq!(format_rational(&rat(-2)), "-2");
    }
}
