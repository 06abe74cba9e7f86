//! Exact continued-fraction arithmetic on finite digit words.
//!
//! A word `[a_1, ..., a_n]` denotes `1/(a_1 + 1/(a_2 + ... + 1/a_n))`.
//! Convergents follow the usual recurrences seeded with
//! `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::sequences::IndexSequence;

/// Longest word accepted by the text parser.
pub const MAX_WORD_LEN: usize = 1 << 20;

/// A finite word of partial quotients, each at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PartialQuotients(Vec<u64>);

impl PartialQuotients {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&a| a == 0) {
            return Err(Error::domain(format!(
                "partial quotient at position {} is 0; digits must be >= 1",
                pos + 1
            )));
        }
        Ok(PartialQuotients(digits))
    }

    pub fn empty() -> Self {
        PartialQuotients(Vec::new())
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based digit access.
    pub fn get(&self, position: usize) -> Option<u64> {
        position.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// This word followed by `tail`.
    pub fn concat(&self, tail: &[u64]) -> Result<Self> {
        let mut d = self.0.clone();
        d.extend_from_slice(tail);
        PartialQuotients::new(d)
    }

    pub fn push(&self, a: u64) -> Result<Self> {
        self.concat(&[a])
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl TryFrom<Vec<u64>> for PartialQuotients {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PartialQuotients::new(v)
    }
}

impl From<PartialQuotients> for Vec<u64> {
    fn from(w: PartialQuotients) -> Self {
        w.0
    }
}

impl fmt::Display for PartialQuotients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Parses `"1,2,3"`. The empty string is the empty word.
impl FromStr for PartialQuotients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PartialQuotients::empty());
        }
        let mut digits = Vec::new();
        for (i, part) in s.split(',').enumerate() {
            if i >= MAX_WORD_LEN {
                return Err(Error::parse(format!("word longer than {MAX_WORD_LEN} digits")));
            }
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(format!("invalid digit {part:?} at position {}", i + 1)));
            }
            let a: u64 = part
                .parse()
                .map_err(|_| Error::parse(format!("digit {part:?} does not fit in 64 bits")))?;
            digits.push(a);
        }
        PartialQuotients::new(digits)
    }
}

/// The convergent `p_k / q_k`, kept in lowest terms by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigUint,
    pub q: BigUint,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()))
    }
}

/// `(q_n, q_{n-1})` for a word, with `(1, 0)` for the empty word.
pub fn denominators(w: &[u64]) -> (BigUint, BigUint) {
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    for &a in w {
        let next = &cur * a + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    (cur, prev)
}

/// Both recurrences at once: `((p_n, q_n), (p_{n-1}, q_{n-1}))`.
fn tail_pair(w: &[u64]) -> ((BigUint, BigUint), (BigUint, BigUint)) {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for &a in w {
        let p_next = &p * a + &p_prev;
        let q_next = &q * a + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    ((p, q), (p_prev, q_prev))
}

fn require_nonempty(w: &PartialQuotients) -> Result<()> {
    if w.is_empty() {
        return Err(Error::domain("word must be nonempty"));
    }
    Ok(())
}

/// All convergents `p_1/q_1, ..., p_n/q_n`.
pub fn convergents(w: &PartialQuotients) -> Result<Vec<Convergent>> {
    require_nonempty(w)?;
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    let mut out = Vec::with_capacity(w.len());
    for &a in w.digits() {
        let p_next = &p * a + &p_prev;
        let q_next = &q * a + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent { p: p.clone(), q: q.clone() });
    }
    Ok(out)
}

/// Value of a nonempty word, `p_n / q_n`.
pub fn evaluate(w: &PartialQuotients) -> Result<Rational> {
    require_nonempty(w)?;
    let ((p, q), _) = tail_pair(w.digits());
    Ok(BigRational::new(BigInt::from(p), BigInt::from(q)))
}

/// Unique expansion of a rational in (0, 1) whose last digit exceeds 1.
pub fn expand_rational(x: &Rational) -> Result<PartialQuotients> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::domain(format!(
            "expand_rational needs 0 < x < 1, got {}",
            exact::format_rational(x)
        )));
    }
    // Euclid on (denominator, numerator) of the reduced fraction.
    let mut num: BigUint = x.numer().magnitude().clone();
    let mut den: BigUint = x.denom().magnitude().clone();
    let mut digits = Vec::new();
    while !num.is_zero() {
        let (a, r) = den.div_rem(&num);
        let a = a
            .to_u64()
            .ok_or_else(|| Error::domain("partial quotient does not fit in 64 bits"))?;
        digits.push(a);
        den = std::mem::replace(&mut num, r);
    }
    // Euclid's final quotient is >= 2 whenever x < 1 has more than one digit;
    // the one-digit case is 1/a with a >= 2. Normalize defensively anyway.
    if let [.., a, 1] = digits[..] {
        let len = digits.len();
        digits[len - 2] = a + 1;
        digits.pop();
    }
    PartialQuotients::new(digits)
}

/// Digits of every point in the closed interval `[lo, hi] ⊂ (0, 1)` that all
/// share one expansion prefix, up to `max_digits`.
///
/// When `lo == hi` this is [`expand_rational`]. Otherwise expansion stops with
/// [`Error::BoundaryAmbiguity`] as soon as the interval meets two cylinders,
/// carrying the digits determined so far.
pub fn expand_interval(lo: &Rational, hi: &Rational, max_digits: usize) -> Result<PartialQuotients> {
    if lo > hi {
        return Err(Error::domain("interval lower end exceeds upper end"));
    }
    if !lo.is_positive() || *hi >= Rational::one() {
        return Err(Error::domain("interval must lie inside (0, 1)"));
    }
    if lo == hi {
        return expand_rational(lo);
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let mut digits = Vec::new();
    while digits.len() < max_digits {
        if lo.is_zero() {
            // A rational endpoint terminated; its neighbours continue.
            return Err(Error::BoundaryAmbiguity { determined: digits });
        }
        let a_hi = lo.recip().floor();
        let a_lo = hi.recip().floor();
        if a_lo != a_hi {
            return Err(Error::BoundaryAmbiguity { determined: digits });
        }
        let a = a_lo.to_integer();
        let a_u64 = a
            .to_u64()
            .ok_or_else(|| Error::domain("partial quotient does not fit in 64 bits"))?;
        digits.push(a_u64);
        let a = Rational::from_integer(a);
        // Gauss map x -> 1/x - a reverses order.
        let new_lo = hi.recip() - &a;
        let new_hi = lo.recip() - &a;
        lo = new_lo;
        hi = new_hi;
    }
    PartialQuotients::new(digits)
}

/// Expansion of a decimal literal that is accurate to half a unit in its
/// last place, e.g. `"0.41421356"` stands for `[0.414213555, 0.414213565]`.
pub fn expand_decimal(s: &str, max_digits: usize) -> Result<PartialQuotients> {
    let s = s.trim();
    let frac = match s.split_once('.') {
        Some((int, frac)) if int.trim_start_matches('+').chars().all(|c| c == '0') => frac,
        _ => return Err(Error::parse(format!("expected a decimal in (0,1) like 0.123, got {s:?}"))),
    };
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("invalid decimal {s:?}")));
    }
    if frac.len() > 4000 {
        return Err(Error::parse("decimal literal too long"));
    }
    let centre = exact::parse_exact(s)?;
    let half_ulp = Rational::new(
        BigInt::from(5u32),
        num_traits::pow(BigInt::from(10u32), frac.len() + 1),
    );
    expand_interval(&(&centre - &half_ulp), &(&centre + &half_ulp), max_digits)
}

/// The set of points whose expansion begins with a fixed word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub word: PartialQuotients,
    pub left: Rational,
    pub right: Rational,
    pub left_closed: bool,
    pub right_closed: bool,
}

impl Cylinder {
    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.left_closed { *x >= self.left } else { *x > self.left };
        let below = if self.right_closed { *x <= self.right } else { *x < self.right };
        above && below
    }

    /// Set inclusion `other ⊆ self`, honouring open and closed ends.
    pub fn contains_cylinder(&self, other: &Cylinder) -> bool {
        let left_ok = other.left > self.left
            || (other.left == self.left && (self.left_closed || !other.left_closed));
        let right_ok = other.right < self.right
            || (other.right == self.right && (self.right_closed || !other.right_closed));
        left_ok && right_ok
    }
}

/// `I(a_1..a_n)`: endpoints `p_n/q_n` and `(p_n+p_{n-1})/(q_n+q_{n-1})`,
/// left-closed for even `n` and right-closed for odd `n`.
pub fn cylinder(w: &PartialQuotients) -> Result<Cylinder> {
    require_nonempty(w)?;
    let ((p, q), (pp, qp)) = tail_pair(w.digits());
    let conv = BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()));
    let other = BigRational::new(BigInt::from(&p + &pp), BigInt::from(&q + &qp));
    let even = w.len() % 2 == 0;
    let (left, right) = if even { (conv, other) } else { (other, conv) };
    Ok(Cylinder {
        word: w.clone(),
        left,
        right,
        left_closed: even,
        right_closed: !even,
    })
}

/// `1 / (q_n (q_n + q_{n-1}))`; the empty word spans the unit interval.
pub fn cylinder_length(w: &[u64]) -> Rational {
    let (q, qp) = denominators(w);
    let den = &q * (&q + &qp);
    BigRational::new(BigInt::one(), BigInt::from(den))
}

/// The word with the positions listed in `seq` (1-based) removed.
pub fn delete_indices(w: &PartialQuotients, seq: &IndexSequence) -> PartialQuotients {
    let digits = w
        .digits()
        .iter()
        .enumerate()
        .filter(|(i, _)| !seq.contains(*i as u64 + 1))
        .map(|(_, &a)| a)
        .collect();
    PartialQuotients(digits)
}

/// Outcome of the digit-deletion denominator comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRatio {
    pub lower: Rational,
    pub ratio: Rational,
    pub upper: Rational,
    pub ok: bool,
}

/// Compares `q_n(w)` with `q_{n-1}` of `w` minus its `k`-th digit against
/// the bounds `(a_k + 1)/2` and `a_k + 1`.
pub fn quotient_ratio_check(w: &PartialQuotients, k: usize) -> Result<QuotientRatio> {
    require_nonempty(w)?;
    if k == 0 || k > w.len() {
        return Err(Error::domain(format!("position {k} outside 1..={}", w.len())));
    }
    let a_k = w.digits()[k - 1];
    let mut reduced = w.digits().to_vec();
    reduced.remove(k - 1);
    let (qn, _) = denominators(w.digits());
    let (qr, _) = denominators(&reduced);
    let ratio = BigRational::new(BigInt::from(qn), BigInt::from(qr));
    let upper = exact::integer(a_k) + exact::one();
    let lower = &upper / exact::integer(2);
    let ok = lower <= ratio && ratio <= upper;
    Ok(QuotientRatio { lower, ratio, upper, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn w(d: &[u64]) -> PartialQuotients {
        PartialQuotients::new(d.to_vec()).unwrap()
    }

    /// Nested-fraction evaluation, independent of the recurrences.
    fn nested(d: &[u64]) -> Rational {
        let mut x = Rational::zero();
        for &a in d.iter().rev() {
            x = (exact::integer(a) + x).recip();
        }
        x
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand_rational(&ratio(7, 10)).unwrap(), w(&[1, 2, 3]));
        assert_eq!(expand_rational(&ratio(1, 2)).unwrap(), w(&[2]));
        assert_eq!(expand_rational(&ratio(2, 5)).unwrap(), w(&[2, 2]));
        assert_eq!(nested(&[1, 2, 3]), ratio(7, 10));
        assert_eq!(nested(&[2, 2]), ratio(2, 5));
    }

    #[test]
    fn expand_rejects_outside_unit_interval() {
        for x in [ratio(0, 1), ratio(1, 1), ratio(3, 2), -ratio(1, 2)] {
            assert!(matches!(expand_rational(&x), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&w(&[2])).unwrap(), ratio(1, 2));
        assert_eq!(evaluate(&w(&[1, 2, 3])).unwrap(), ratio(7, 10));
        assert_eq!(evaluate(&w(&[1, 1, 1, 1, 1])).unwrap(), ratio(5, 8));
        assert!(evaluate(&PartialQuotients::empty()).is_err());
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(&w(&[1, 2, 3])).unwrap();
        let pq: Vec<(u32, u32)> = c
            .iter()
            .map(|c| (c.p.to_u32().unwrap(), c.q.to_u32().unwrap()))
            .collect();
        assert_eq!(pq, vec![(1, 1), (2, 3), (7, 10)]);
        let fib: Vec<u32> = convergents(&w(&[1, 1, 1, 1, 1]))
            .unwrap()
            .iter()
            .map(|c| c.q.to_u32().unwrap())
            .collect();
        assert_eq!(fib, vec![1, 2, 3, 5, 8]);
        let c = convergents(&w(&[5])).unwrap();
        assert_eq!((c[0].p.to_u32(), c[0].q.to_u32()), (Some(1), Some(5)));
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&w(&[1])).unwrap();
        assert_eq!((c.left.clone(), c.right.clone()), (ratio(1, 2), ratio(1, 1)));
        assert!(!c.left_closed && c.right_closed);
        assert_eq!(c.length(), ratio(1, 2));

        let c = cylinder(&w(&[2])).unwrap();
        assert_eq!((c.left.clone(), c.right.clone()), (ratio(1, 3), ratio(1, 2)));
        assert_eq!(c.length(), ratio(1, 6));

        let c = cylinder(&w(&[1, 1])).unwrap();
        assert_eq!((c.left.clone(), c.right.clone()), (ratio(1, 2), ratio(2, 3)));
        assert!(c.left_closed && !c.right_closed);
        assert_eq!(c.length(), ratio(1, 6));
        assert!(cylinder(&PartialQuotients::empty()).is_err());
    }

    #[test]
    fn cylinder_membership_matches_expansion() {
        // 1/2 = [2] lies in I(2), not in I(1) = (1/2, 1].
        assert!(!cylinder(&w(&[1])).unwrap().contains(&ratio(1, 2)));
        assert!(cylinder(&w(&[2])).unwrap().contains(&ratio(1, 2)));
        assert!(cylinder(&w(&[1, 2])).unwrap().contains(&ratio(7, 10)));
    }

    #[test]
    fn delete_examples() {
        let even = IndexSequence::even();
        assert_eq!(delete_indices(&w(&[1, 5, 2, 7, 3]), &even), w(&[1, 2, 3]));
        let none = IndexSequence::explicit(vec![]).unwrap();
        assert_eq!(delete_indices(&w(&[4, 4, 4]), &none), w(&[4, 4, 4]));
        let first = IndexSequence::explicit(vec![1]).unwrap();
        assert_eq!(delete_indices(&w(&[9, 1]), &first), w(&[1]));
    }

    #[test]
    fn quotient_ratio_examples() {
        let r = quotient_ratio_check(&w(&[1, 2, 3]), 2).unwrap();
        assert_eq!((r.lower, r.ratio, r.upper, r.ok), (ratio(3, 2), ratio(10, 4), ratio(3, 1), true));
        let r = quotient_ratio_check(&w(&[5]), 1).unwrap();
        assert_eq!((r.lower, r.ratio, r.upper, r.ok), (ratio(3, 1), ratio(5, 1), ratio(6, 1), true));
        let r = quotient_ratio_check(&w(&[1, 1]), 1).unwrap();
        assert_eq!((r.lower, r.ratio, r.upper, r.ok), (ratio(1, 1), ratio(2, 1), ratio(2, 1), true));
        assert!(quotient_ratio_check(&w(&[1, 1]), 0).is_err());
        assert!(quotient_ratio_check(&w(&[1, 1]), 3).is_err());
    }

    #[test]
    fn interval_expansion() {
        // sqrt(2) - 1 = [2, 2, 2, ...]
        let digits = expand_decimal("0.41421356237", 64);
        match digits {
            Err(Error::BoundaryAmbiguity { determined }) => {
                assert!(determined.len() >= 8);
                assert!(determined.iter().all(|&a| a == 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(expand_interval(&ratio(7, 10), &ratio(7, 10), 10).unwrap(), w(&[1, 2, 3]));
        // Straddles 1/2, the boundary between I(1) and I(2).
        assert!(matches!(
            expand_interval(&ratio(49, 100), &ratio(51, 100), 10),
            Err(Error::BoundaryAmbiguity { determined }) if determined.is_empty()
        ));
        assert_eq!(expand_interval(&ratio(41, 100), &ratio(42, 100), 1).unwrap(), w(&[2]));
        assert!(expand_decimal("1.5", 5).is_err());
        assert!(expand_decimal("0.", 5).is_err());
    }

    #[test]
    fn parse_and_display() {
        let x: PartialQuotients = " 1, 2 ,3".parse().unwrap();
        assert_eq!(x.to_string(), "1,2,3");
        assert_eq!("".parse::<PartialQuotients>().unwrap(), PartialQuotients::empty());
        for bad in ["1,,2", "0", "1,-2", "a", "1,2,", "99999999999999999999999"] {
            assert!(bad.parse::<PartialQuotients>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn word_length_one_is_special_only_for_one() {
        // [1] evaluates to 1, outside [0,1); expand never produces it.
        assert_eq!(evaluate(&w(&[1])).unwrap(), ratio(1, 1));
        assert_eq!(expand_rational(&ratio(1, 3)).unwrap(), w(&[3]));
    }
}
