//! Covering sums for sets whose even-position digits are at least `M`.
//!
//! The odd-length word `w` owns the interval
//! `J(w) = ⋃_{a >= M} I(w·a)`, whose length is exactly
//! `1/(q_{2n}·q_{2n-1})` with `q_{2n} = M·q_{2n-1} + q_{2n-2}`. Passing
//! from `J(w)` to `J(w·a·b)` shrinks the length by at most
//! `(M+1)/(M a² b²)`, and summing that factor over all `a >= 1, b >= M`
//! gives the per-level factor `(1+1/M)^s ζ(2s) Σ_{k>=M} k^{-2s}`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{self, PartialQuotients};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::hp::{self, Real};
use crate::special::{self, PrecisionContext};

/// Bisection iteration cap.
pub const MAX_BISECTION_ITERATIONS: u32 = 200;

/// Most words [`covering_sum_enumerated`] will visit.
pub const MAX_COVER_WORDS: u64 = 250_000;

/// Largest digit cap and level accepted by [`covering_sum_enumerated`].
pub const MAX_COVER_DIGIT: u64 = 50;
pub const MAX_COVER_LEVEL: u32 = 3;

/// Exact `|J(w)|` for a word of odd length.
pub fn j_interval_length(w: &PartialQuotients, m: u64) -> Result<Rational> {
    if w.len() % 2 == 0 {
        return Err(Error::domain(format!("J needs an odd-length word, got length {}", w.len())));
    }
    if m == 0 {
        return Err(Error::domain("J needs M >= 1"));
    }
    let inner = cf::evaluate(w)?;
    let outer = cf::evaluate(&w.push(m)?)?;
    let d = outer - inner;
    Ok(if d < Rational::from_integer(0.into()) { -d } else { d })
}

/// `(M+1)/(M · a_odd² · a_even²)`.
pub fn recursion_factor(a_odd: u64, a_even: u64, m: u64) -> Result<Rational> {
    if a_odd == 0 || m == 0 {
        return Err(Error::domain("recursion factor needs a_odd >= 1 and M >= 1"));
    }
    if a_even < m {
        return Err(Error::domain(format!("even digit {a_even} is below M = {m}")));
    }
    let den = BigInt::from(m) * BigInt::from(a_odd).pow(2) * BigInt::from(a_even).pow(2);
    Ok(Rational::new(BigInt::from(m) + 1, den))
}

fn check_s(s: &Real) -> Result<()> {
    let half = Real::from_rational(&exact::ratio(1, 2), s.precision());
    if !s.is_finite() || *s <= half {
        return Err(Error::Divergent(format!("covering sums diverge for s = {s} <= 1/2")));
    }
    Ok(())
}

/// `(1+1/M)^s · ζ(2s) · Σ_{k>=M} k^{-2s}`.
pub fn per_level_factor(m: u64, s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if m < 2 {
        return Err(Error::domain(format!("per-level factor needs M >= 2, got {m}")));
    }
    let p = ctx.bits();
    let s = s.with_precision(p);
    check_s(&s)?;
    let two_s = &s * &Real::from_u64(2, p);
    let zeta = special::zeta(&two_s, ctx)?;
    let tail = special::zeta_tail(m, &two_s, ctx)?;
    let base = Real::from_rational(&Rational::new(BigInt::from(m) + 1, BigInt::from(m)), p);
    Ok(base.powf(&s) * zeta * tail)
}

/// One bisection step: the midpoint and `g(mid)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionStep {
    #[serde(with = "hp::serde_real")]
    pub s: Real,
    #[serde(with = "hp::serde_real")]
    pub g: Real,
}

/// Root of `g(s) = 1` for the per-level factor `g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSolveResult {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(with = "hp::serde_real::option")]
    pub s_star: Option<Real>,
    #[serde(with = "hp::serde_real::option")]
    pub residual: Option<Real>,
    #[serde(with = "hp::serde_real")]
    pub s_lo: Real,
    #[serde(with = "hp::serde_real")]
    pub s_hi: Real,
    pub iterations: u32,
    pub converged: bool,
    pub diagnostic: Option<String>,
    pub trace: Vec<BisectionStep>,
}

/// Bisects `g(s) - 1` on `(1/2 + 1e-9, s_max]`.
///
/// `g` decreases from `+∞` at `s = 1/2`. When `g(s_max) > 1` there is no
/// root in range and the result carries `converged = false`.
pub fn critical_exponent(m: u64, tol: &Rational, s_max: &Rational, ctx: &PrecisionContext) -> Result<CriticalSolveResult> {
    if m < 2 {
        return Err(Error::domain(format!("critical exponent needs M >= 2, got {m}")));
    }
    if *tol <= Rational::from_integer(0.into()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let lo0 = exact::ratio(1, 2) + exact::ratio(1, 1_000_000_000);
    if *s_max <= lo0 {
        return Err(Error::domain("s_max must exceed 1/2 + 1e-9"));
    }
    let p = ctx.bits();
    let one = Real::one(p);
    let tol_r = Real::from_rational(tol, p);
    let mut lo = Real::from_rational(&lo0, p);
    let mut hi = Real::from_rational(s_max, p);
    let mut trace = Vec::new();

    let g_hi = per_level_factor(m, &hi, ctx)?;
    let residual_hi = (&g_hi - &one).abs();
    if residual_hi <= tol_r {
        return Ok(CriticalSolveResult {
            m,
            s_star: Some(hi.clone()),
            residual: Some(residual_hi),
            s_lo: lo,
            s_hi: hi,
            iterations: 0,
            converged: true,
            diagnostic: None,
            trace,
        });
    }
    if g_hi > one {
        return Ok(CriticalSolveResult {
            m,
            s_star: None,
            residual: None,
            s_lo: lo,
            s_hi: hi,
            iterations: 0,
            converged: false,
            diagnostic: Some(format!(
                "per-level factor is {} > 1 at s_max; no root in range, the covering bound is vacuous",
                g_hi
            )),
            trace,
        });
    }

    let two = Real::from_u64(2, p);
    for it in 1..=MAX_BISECTION_ITERATIONS {
        let mid = &(&lo + &hi) / &two;
        let g = per_level_factor(m, &mid, ctx)?;
        let residual = (&g - &one).abs();
        trace.push(BisectionStep { s: mid.clone(), g: g.clone() });
        if residual <= tol_r {
            return Ok(CriticalSolveResult {
                m,
                s_star: Some(mid),
                residual: Some(residual),
                s_lo: lo,
                s_hi: hi,
                iterations: it,
                converged: true,
                diagnostic: None,
                trace,
            });
        }
        if g > one {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalSolveResult {
        m,
        s_star: None,
        residual: None,
        s_lo: lo,
        s_hi: hi,
        iterations: MAX_BISECTION_ITERATIONS,
        converged: false,
        diagnostic: Some("bisection exhausted its iteration budget before meeting the tolerance".into()),
        trace,
    })
}

/// `1/2 + (ln ln M - ln 2)/ln M`.
pub fn asymptotic_exponent(m: u64, ctx: &PrecisionContext) -> Result<Real> {
    if m < 3 {
        return Err(Error::domain(format!("asymptotic exponent needs M >= 3, got {m}")));
    }
    let p = ctx.bits();
    let ln_m = Real::from_u64(m, p).ln();
    let half = Real::from_rational(&exact::ratio(1, 2), p);
    Ok(half + (ln_m.ln() - Real::ln2(p)) / ln_m)
}

fn odd_word(index: u64, m: u64, a: u64, level: u32) -> Vec<u64> {
    // Mixed radix: odd positions range over [1, A], even ones over [M, A].
    let odd_span = a;
    let even_span = a - m + 1;
    let len = 2 * level as usize - 1;
    let mut digits = vec![0u64; len];
    let mut rest = index;
    for (pos, d) in digits.iter_mut().enumerate().rev() {
        if pos % 2 == 0 {
            *d = rest % odd_span + 1;
            rest /= odd_span;
        } else {
            *d = rest % even_span + m;
            rest /= even_span;
        }
    }
    digits
}

/// `Σ |J(w)|^s` over odd-length `2n-1` words with odd-position digits in
/// `[1, A]` and even-position digits in `[M, A]`.
///
/// Terms are computed in parallel and summed in word order, so the result
/// does not depend on the thread count.
pub fn covering_sum_enumerated(m: u64, s: &Real, level: u32, a: u64, ctx: &PrecisionContext) -> Result<Real> {
    if m == 0 {
        return Err(Error::domain("covering sum needs M >= 1"));
    }
    if level == 0 {
        return Err(Error::domain("covering sum needs level >= 1"));
    }
    if a < m {
        return Err(Error::domain(format!("digit cap {a} is below M = {m}")));
    }
    if a > MAX_COVER_DIGIT || level > MAX_COVER_LEVEL {
        return Err(Error::ResourceCap(format!(
            "enumeration limited to A <= {MAX_COVER_DIGIT} and level <= {MAX_COVER_LEVEL}"
        )));
    }
    let count = (a as u128).pow(level) * ((a - m + 1) as u128).pow(level - 1);
    if count > MAX_COVER_WORDS as u128 {
        return Err(Error::ResourceCap(format!(
            "{count} words exceeds the enumeration cap of {MAX_COVER_WORDS}"
        )));
    }
    let p = ctx.bits();
    let s = s.with_precision(p);
    if !s.is_positive() {
        return Err(Error::domain("exponent s must be positive"));
    }
    let terms: Vec<Real> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let w = PartialQuotients::new(odd_word(i, m, a, level)).expect("digits are positive");
            let len = j_interval_length(&w, m).expect("odd nonempty word");
            (Real::from_rational(&len, p).ln() * &s).exp()
        })
        .collect();
    Ok(terms.into_iter().fold(Real::zero(p), |acc, t| acc + t))
}

/// Classical dimension bounds for the set of reals with all digits `>= M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceBounds {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(with = "hp::serde_real")]
    pub jarnik_lo: Real,
    #[serde(with = "hp::serde_real")]
    pub jarnik_hi: Real,
    pub jarnik_applicable: bool,
    #[serde(with = "hp::serde_real")]
    pub kurzweil_lo: Real,
    #[serde(with = "hp::serde_real")]
    pub kurzweil_hi: Real,
    pub kurzweil_applicable: bool,
    #[serde(with = "hp::serde_real")]
    pub hensley: Real,
    #[serde(rename = "good_F_lo", with = "hp::serde_real")]
    pub good_f_lo: Real,
    #[serde(rename = "good_F_hi", with = "hp::serde_real::option")]
    pub good_f_hi: Option<Real>,
    pub good_applicable: bool,
    #[serde(with = "hp::serde_real")]
    pub jk_asymptotic: Real,
}

/// Evaluates the Jarník, Kurzweil, Hensley, Good and Jaerisch–Kesseböhmer
/// formulas at `M`; each carries the range of `M` where it is a theorem.
pub fn reference_bounds(m: u64, ctx: &PrecisionContext) -> Result<ReferenceBounds> {
    if m < 2 {
        return Err(Error::domain(format!("reference bounds need M >= 2, got {m}")));
    }
    let p = ctx.bits();
    let one = Real::one(p);
    let half = Real::from_rational(&exact::ratio(1, 2), p);
    let mr = Real::from_u64(m, p);
    let ln_m = mr.ln();
    let jarnik_lo = &one - &(Real::from_u64(4, p) / (&mr * &Real::ln2(p)));
    let jarnik_hi = &one - &(Real::from_u64(8, p) * &mr * &ln_m).recip();
    let kurzweil_lo = &one - &(Real::from_rational(&exact::ratio(99, 100), p) / &mr);
    let kurzweil_hi = &one - &(Real::from_rational(&exact::ratio(1, 4), p) / &mr);
    let pi = Real::pi(p);
    let hensley = &one - &(Real::from_u64(6, p) / (&pi * &pi * &mr));
    let good_f_lo = &half + &(Real::from_u64(2, p) * Real::from_u64(m + 2, p).ln()).recip();
    let good_f_hi = if m >= 3 {
        let ln_m1 = Real::from_u64(m - 1, p).ln();
        Some(&half + &(ln_m1.ln() / (Real::from_u64(2, p) * ln_m1)))
    } else {
        None
    };
    let jk_asymptotic = &half + &(ln_m.ln() / (Real::from_u64(2, p) * &ln_m));
    Ok(ReferenceBounds {
        m,
        jarnik_lo,
        jarnik_hi,
        jarnik_applicable: m >= 8,
        kurzweil_lo,
        kurzweil_hi,
        kurzweil_applicable: m >= 1000,
        hensley,
        good_f_lo,
        good_f_hi,
        good_applicable: m >= 20,
        jk_asymptotic,
    })
}
