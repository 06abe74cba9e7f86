//! Exact rational numbers: parsing and the canonical `"p/q"` rendering.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Longest accepted numeric literal; keeps `1e999999999` from allocating a
/// gigabyte-sized integer.
const MAX_LITERAL_LEN: usize = 4096;
const MAX_DECIMAL_EXPONENT: i64 = 4096;

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses a number given in any exact syntax: integer (`42`), fraction
/// (`7/10`), decimal (`0.125`) or scientific (`1.7e12`, `1e-12`).
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty number"));
    }
    if s.len() > MAX_LITERAL_LEN {
        return Err(Error::parse("numeric literal too long"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num)?;
        let den = parse_integer(den)?;
        if den.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s)
}

/// Parses a fraction string `p/q` (or a bare integer) strictly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::parse(format!("expected p/q, got {s:?}")));
    }
    parse_exact(s)
}

/// Parses a non-negative integer that may be written in exact scientific
/// form (`1e13`, `1.7e12`). Non-integral values are rejected.
pub fn parse_u64(s: &str) -> Result<u64> {
    let r = parse_exact(s)?;
    if !r.is_integer() || r.is_negative() {
        return Err(Error::parse(format!("expected a non-negative integer, got {s:?}")));
    }
    r.to_integer()
        .to_u64()
        .ok_or_else(|| Error::parse(format!("{s:?} does not fit in 64 bits")))
}

fn parse_integer(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("invalid integer {s:?}")));
    }
    let v: BigUint = digits
        .parse()
        .map_err(|_| Error::parse(format!("invalid integer {s:?}")))?;
    let v = BigInt::from(v);
    Ok(if neg { -v } else { v })
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::parse(format!("invalid exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    if exponent.abs() > MAX_DECIMAL_EXPONENT {
        return Err(Error::parse(format!("exponent out of range in {s:?}")));
    }
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(format!("invalid number {s:?}")));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("invalid number {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let digits: BigUint = if digits.is_empty() {
        BigUint::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::parse(format!("invalid number {s:?}")))?
    };
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = Rational::from_integer(BigInt::from(digits));
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Exact decimal rendering of `r` with `places` digits after the point,
/// truncated toward zero. Used for human-readable output of exact values.
pub fn to_decimal_string(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = (r * Rational::from_integer(scale.clone())).to_integer();
    let (q, rem) = scaled.abs().div_rem(&scale);
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{q}");
    }
    format!("{sign}{q}.{:0>width$}", rem, width = places)
}

pub(crate) fn ratio(p: u64, q: u64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn integer(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub(crate) fn one() -> Rational {
    Rational::one()
}

/// serde adapter writing rationals as `"p/q"` strings.
pub mod serde_pq {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&format_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse_rational(&s).map_err(de::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_exact_syntax() {
        assert_eq!(parse_exact("7/10").unwrap(), ratio(7, 10));
        assert_eq!(parse_exact("0.7").unwrap(), ratio(7, 10));
        assert_eq!(parse_exact("1e-12").unwrap(), ratio(1, 1_000_000_000_000));
        assert_eq!(parse_exact("1.7e12").unwrap(), integer(1_700_000_000_000));
        assert_eq!(parse_exact(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_exact("-3/6").unwrap(), -ratio(1, 2));
        assert_eq!(parse_u64("1e13").unwrap(), 10_000_000_000_000);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1..2", "e5", "1e", "--1", "1/2/3", "1e99999", "."] {
            assert!(parse_exact(bad).is_err(), "{bad:?} accepted");
        }
        assert!(parse_rational("0.5").is_err());
        assert!(parse_u64("1.5").is_err());
        assert!(parse_u64("-1").is_err());
    }

    #[test]
    fn renders_pq_and_decimals() {
        assert_eq!(format_rational(&integer(1)), "1/1");
        assert_eq!(format_rational(&ratio(10, 4)), "5/2");
        assert_eq!(to_decimal_string(&ratio(1, 3), 4), "0.3333");
        assert_eq!(to_decimal_string(&-ratio(1, 8), 3), "-0.125");
    }
}
