//! Thin high-precision real type over `astro-float`.
//!
//! `Real` carries its own binary precision. Binary operators work at the
//! larger precision of their operands and round to nearest-even. Checks
//! that must hold rigorously use [`Real::nudge_up`] / [`Real::nudge_down`]
//! to step a rounded value past any accumulated rounding error.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use crate::exact::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Bits of slack granted to rounding error by the nudge helpers.
const NUDGE_SLACK_BITS: usize = 48;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary precision that holds `digits` significant decimal digits plus
/// a guard word.
pub fn bits_for_digits(digits: u32) -> usize {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as usize + 32
}

#[derive(Debug)]
pub struct Real(BigFloat);

impl Clone for Real {
    fn clone(&self) -> Self {
        Real(self.0.clone())
    }
}

impl Real {
    pub fn precision(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(64).max(64)
    }

    pub fn zero(p: usize) -> Self {
        Real(BigFloat::from_u64(0, p))
    }

    pub fn one(p: usize) -> Self {
        Real(BigFloat::from_u64(1, p))
    }

    pub fn from_u64(v: u64, p: usize) -> Self {
        Real(BigFloat::from_u64(v, p))
    }

    pub fn from_i64(v: i64, p: usize) -> Self {
        Real(BigFloat::from_i64(v, p))
    }

    /// Exact binary value of an `f64`, then rounded to `p` bits.
    pub fn from_f64(v: f64, p: usize) -> Self {
        Real(BigFloat::from_f64(v, p))
    }

    pub fn from_biguint(v: &BigUint, p: usize) -> Self {
        let words = v.to_u64_digits();
        if words.is_empty() {
            return Self::zero(p);
        }
        let mut f = BigFloat::from_words(&words, Sign::Pos, (words.len() * 64) as i32);
        f.set_precision(p, RM).expect("precision within limits");
        Real(f)
    }

    pub fn from_bigint(v: &BigInt, p: usize) -> Self {
        let r = Self::from_biguint(v.magnitude(), p);
        if v.is_negative() {
            -r
        } else {
            r
        }
    }

    pub fn from_rational(r: &Rational, p: usize) -> Self {
        &Self::from_bigint(r.numer(), p) / &Self::from_bigint(r.denom(), p)
    }

    /// Parses a decimal literal at precision `p`.
    pub fn parse_decimal(s: &str, p: usize) -> Self {
        Real(with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc)))
    }

    pub fn pi(p: usize) -> Self {
        Real(with_consts(|cc| cc.pi(p, RM)))
    }

    pub fn ln2(p: usize) -> Self {
        Real(with_consts(|cc| cc.ln_2(p, RM)))
    }

    pub fn ln(&self) -> Self {
        let p = self.precision();
        Real(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        let p = self.precision();
        Real(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    /// `self^e` for positive `self`, as `exp(e·ln self)`.
    ///
    /// astro-float's own `pow` keeps raising its internal precision when the
    /// result is exactly representable (1.5^2, say) and never returns.
    pub fn powf(&self, e: &Real) -> Self {
        let p = self.precision().max(e.precision());
        (self.with_precision(p).ln() * e).exp()
    }

    pub fn powi(&self, n: u64) -> Self {
        let p = self.precision();
        Real(self.0.powi(n as usize, p, RM))
    }

    pub fn sqrt(&self) -> Self {
        let p = self.precision();
        Real(self.0.sqrt(p, RM))
    }

    pub fn recip(&self) -> Self {
        let p = self.precision();
        Real(self.0.reciprocal(p, RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    /// Rounds to a coarser precision.
    pub fn with_precision(&self, p: usize) -> Self {
        let mut f = self.0.clone();
        f.set_precision(p, RM).expect("precision within limits");
        Real(f)
    }

    /// A value no smaller than the exact quantity `self` approximates,
    /// assuming the approximation error is below 2^-(p - 48) relative.
    pub fn nudge_up(&self) -> Self {
        self + &self.slack()
    }

    /// Mirror image of [`Real::nudge_up`].
    pub fn nudge_down(&self) -> Self {
        self - &self.slack()
    }

    fn slack(&self) -> Real {
        let p = self.precision();
        let shift = p.saturating_sub(NUDGE_SLACK_BITS).max(8) as i64;
        let eps = Real::from_u64(2, p).powi(shift as u64).recip();
        let mag = self.abs();
        // Zero gets an absolute slack of the same size.
        if mag.is_zero() {
            eps
        } else {
            &mag * &eps
        }
    }

    pub fn floor_u64(&self) -> Option<u64> {
        if !self.is_finite() || self.is_negative() {
            return None;
        }
        Real(self.0.floor()).to_plain_integer_string()?.parse().ok()
    }

    fn to_plain_integer_string(&self) -> Option<String> {
        if self.is_zero() {
            return Some("0".to_string());
        }
        let sci = self.to_string_sig(40);
        let (mant, exp) = sci.split_once('e')?;
        let exp: i64 = exp.parse().ok()?;
        let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
        if exp < 0 {
            return Some("0".to_string());
        }
        let int_len = (exp + 1) as usize;
        let mut out: String = digits.chars().take(int_len).collect();
        while out.len() < int_len {
            out.push('0');
        }
        Some(out)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        self.to_string_sig(20).parse().unwrap_or(f64::NAN)
    }

    /// Scientific notation with `sig` significant digits, rounded half-up on
    /// the decimal digit string: `d.ddde±X`.
    pub fn to_string_sig(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_nan() {
            return "NaN".to_string();
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { "-inf" } else { "inf" }.to_string();
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let raw = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_default();
        round_sci(&raw, sig).unwrap_or(raw)
    }
}

/// Rounds an astro-float decimal rendering (`-d.ddddde-X`) to `sig` digits.
fn round_sci(raw: &str, sig: usize) -> Option<String> {
    let (neg, body) = match raw.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, raw),
    };
    let (mant, exp) = body.split_once('e')?;
    let mut exp: i64 = exp.parse().ok()?;
    let mut digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
    // Skip any leading zeros so the first digit is significant.
    let lead = digits.iter().take_while(|&&d| d == 0).count();
    if lead == digits.len() {
        return Some("0".to_string());
    }
    if lead > 0 {
        digits.drain(..lead);
        exp -= lead as i64;
    }
    if digits.len() > sig {
        let round_up = digits[sig] >= 5;
        digits.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.truncate(sig);
                    exp += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    }
    while digits.len() > 1 && digits.last() == Some(&0) {
        digits.pop();
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + digits[0]) as char);
    if digits.len() > 1 {
        out.push('.');
        out.extend(digits[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{exp}"));
    Some(out)
}

/// Rewrites `d.ddde±X` positionally when `-7 < X < 21`.
fn sci_to_plain(sci: &str) -> String {
    let Some((mant, exp)) = sci.split_once('e') else {
        return sci.to_string();
    };
    let Ok(exp) = exp.parse::<i64>() else {
        return sci.to_string();
    };
    if exp <= -7 || exp >= 21 {
        return sci.to_string();
    }
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

impl Real {
    /// `sig` significant digits, positional for moderate magnitudes and
    /// scientific otherwise.
    pub fn to_display(&self, sig: usize) -> String {
        sci_to_plain(&self.to_string_sig(sig))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_display(f.precision().unwrap_or(30)))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.precision().max(rhs.precision());
                Real(self.0.$method(&rhs.0, p, RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

/// serde adapter writing reals as 30-significant-digit strings.
pub mod serde_real {
    use super::Real;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Real, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_display(30))
    }

    pub mod option {
        use super::Real;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(r: &Option<Real>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&r.to_display(30)),
                None => s.serialize_none(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 192;

    #[test]
    fn integer_conversion_is_exact() {
        let v: BigUint = BigUint::from(3u32).pow(100);
        let r = Real::from_biguint(&v, 256);
        assert_eq!(r.to_string_sig(60), format!("{}e47", {
            let s = v.to_string();
            format!("{}.{}", &s[..1], s[1..].trim_end_matches('0'))
        }));
    }

    #[test]
    fn rational_conversion() {
        let r = Real::from_rational(&crate::exact::ratio(1, 3), P);
        assert_eq!(r.to_string_sig(10), "3.333333333e-1");
        assert_eq!(r.to_display(10), "0.3333333333");
        assert_eq!(Real::from_u64(1500, 64).to_display(30), "1500");
        assert_eq!(Real::from_f64(-2.5e-3, 64).to_display(10), "-0.0025");
        assert_eq!(Real::from_u64(10, 64).powi(25).to_display(30), "1e25");
        assert!((r.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sig_rounding_carries() {
        assert_eq!(round_sci("9.996e+2", 3).unwrap(), "1e3");
        assert_eq!(round_sci("-1.23456e-5", 3).unwrap(), "-1.23e-5");
        assert_eq!(round_sci("0.0125e0", 2).unwrap(), "1.3e-2");
    }

    #[test]
    fn nudges_bracket_value() {
        let x = Real::from_rational(&crate::exact::ratio(2, 7), P);
        assert!(x.nudge_down() < x && x < x.nudge_up());
        let z = Real::zero(P);
        assert!(z.nudge_down() < z && z < z.nudge_up());
    }

    #[test]
    fn floor_to_u64() {
        assert_eq!(Real::from_f64(1.7e12, P).floor_u64(), Some(1_700_000_000_000));
        assert_eq!(Real::from_f64(12.9, P).floor_u64(), Some(12));
        assert_eq!(Real::from_f64(1e30, P).floor_u64(), None);
        assert_eq!(Real::from_f64(-1.0, P).floor_u64(), None);
    }

    #[test]
    fn transcendental_sanity() {
        let two = Real::from_u64(2, P);
        assert!((two.ln().to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((Real::pi(P).to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let e = Real::one(P).exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let x = Real::from_f64(1.5, P).powf(&Real::from_f64(0.5, P));
        assert!((x.to_f64() - 1.5f64.sqrt()).abs() < 1e-15);
    }
}
