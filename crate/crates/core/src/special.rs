//! Riemann zeta, its tails, and the closed-form approximations to them.
//!
//! Sums are evaluated by Euler–Maclaurin: an explicit partial sum up to a
//! cutoff `N`, then
//!
//! `N^{1-z}/(z-1) + N^{-z}/2 + Σ_{j=1}^{4} B_{2j}/(2j)! · (z)_{2j-1} · N^{-z-2j+1}`
//!
//! with `(z)_m` the rising factorial. The first omitted term is bounded by
//! `(z)_9 · N^{-z-9} / 47900160`, and `N` is doubled until that bound is
//! far below the requested tolerance.

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::hp::{bits_for_digits, Real};

/// Euler–Mascheroni constant to 30 digits.
pub const EULER_GAMMA: &str = "0.577215664901532860606512090082";

/// `B_{2j}/(2j)!` for `j = 1..=4`, as (numerator, denominator).
const EM_COEFFS: [(i64, u64); 4] = [(1, 12), (-1, 720), (1, 30_240), (-1, 1_209_600)];

/// `|B_10| / 10!`, the first omitted coefficient.
const EM_REMAINDER_DEN: f64 = 47_900_160.0;

const MIN_CUTOFF: u64 = 64;

/// Largest cutoff tried before declaring the tolerance unreachable.
const MAX_CUTOFF: u64 = 1 << 24;

/// Absolute accuracy target and internal working precision.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    target_abs_tol: Rational,
    working_digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            target_abs_tol: Rational::new(1.into(), num_traits::pow(10.into(), 12)),
            working_digits: 50,
        }
    }
}

impl PrecisionContext {
    pub fn new(target_abs_tol: Rational, working_digits: u32) -> Result<Self> {
        if target_abs_tol <= Rational::from_integer(0.into()) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if working_digits < 30 {
            return Err(Error::domain(format!("working digits must be >= 30, got {working_digits}")));
        }
        if working_digits > 10_000 {
            return Err(Error::ResourceCap(format!("working digits {working_digits} exceeds 10000")));
        }
        Ok(PrecisionContext { target_abs_tol, working_digits })
    }

    pub fn tol(&self) -> &Rational {
        &self.target_abs_tol
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    /// Binary working precision.
    pub fn bits(&self) -> usize {
        bits_for_digits(self.working_digits)
    }

    pub fn tol_real(&self) -> Real {
        Real::from_rational(&self.target_abs_tol, self.bits())
    }

    fn tol_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.target_abs_tol).unwrap_or(f64::MIN_POSITIVE)
    }
}

pub fn euler_gamma(p: usize) -> Real {
    Real::parse_decimal(EULER_GAMMA, p)
}

fn check_pole(z: &Real) -> Result<()> {
    let p = z.precision();
    let margin = Real::one(p) + Real::from_rational(&exact::ratio(1, 1_000_000_000), p);
    if !z.is_finite() || *z <= margin {
        return Err(Error::PoleProximity { z: z.to_string() });
    }
    Ok(())
}

/// Natural log of the remainder bound `(z)_9 · N^{-z-9} / 47900160`.
fn remainder_log_bound(z: f64, n: u64) -> f64 {
    let rising: f64 = (0..9).map(|i| (z + f64::from(i)).ln()).sum();
    rising - (z + 9.0) * (n as f64).ln() - EM_REMAINDER_DEN.ln()
}

/// Smallest power-of-two multiple of 64 whose remainder bound is at most
/// `tol / 8`.
fn cutoff(z: &Real, ctx: &PrecisionContext) -> Result<u64> {
    let zf = z.to_f64();
    let target = (ctx.tol_f64() / 8.0).ln();
    let mut n = MIN_CUTOFF;
    while remainder_log_bound(zf, n) > target {
        n *= 2;
        if n > MAX_CUTOFF {
            return Err(Error::ResourceCap(format!(
                "zeta at z = {z}: tolerance needs more than {MAX_CUTOFF} terms"
            )));
        }
    }
    Ok(n)
}

/// `k^{-z}`.
fn inv_pow(k: u64, z: &Real) -> Real {
    let p = z.precision();
    (-(Real::from_u64(k, p).ln() * z)).exp()
}

/// Euler–Maclaurin estimate of `Σ_{k >= n} k^{-z}`.
fn em_tail(n: u64, z: &Real) -> Real {
    let p = z.precision();
    let one = Real::one(p);
    let nr = Real::from_u64(n, p);
    let ln_n = nr.ln();
    let n_pow = (-(&ln_n * z)).exp(); // N^{-z}
    let zm1 = z - &one;
    let mut acc = &(&n_pow * &nr) / &zm1 + &n_pow / &Real::from_u64(2, p);
    // term_j = c_j · (z)_{2j-1} · N^{-z-2j+1}
    let mut rising = z.clone();
    let mut power = &n_pow / &nr;
    let n2 = &nr * &nr;
    for (j, &(num, den)) in EM_COEFFS.iter().enumerate() {
        if j > 0 {
            let base = 2 * j as u64 - 1;
            rising = &rising * &(z + &Real::from_u64(base, p));
            rising = &rising * &(z + &Real::from_u64(base + 1, p));
            power = &power / &n2;
        }
        let c = Real::from_i64(num, p) / Real::from_u64(den, p);
        acc = acc + &c * &(&rising * &power);
    }
    acc
}

fn finite_sum(from: u64, to_excl: u64, z: &Real) -> Real {
    let mut acc = Real::zero(z.precision());
    for k in from..to_excl {
        acc = acc + inv_pow(k, z);
    }
    acc
}

fn at_working_precision(z: &Real, ctx: &PrecisionContext) -> Real {
    z.with_precision(ctx.bits())
}

/// `ζ(z)` for real `z > 1 + 1e-9`.
pub fn zeta(z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    zeta_tail(1, z, ctx)
}

/// `Σ_{k >= m} k^{-z}` for real `z > 1 + 1e-9`.
pub fn zeta_tail(m: u64, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if m == 0 {
        return Err(Error::domain("zeta tail needs M >= 1"));
    }
    let z = at_working_precision(z, ctx);
    check_pole(&z)?;
    let n = cutoff(&z, ctx)?;
    if m >= n {
        return Ok(em_tail(m, &z));
    }
    Ok(finite_sum(m, n, &z) + em_tail(n, &z))
}

/// `Σ_{k < m} k^{-z}`, summed directly.
pub fn partial_sum(m: u64, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if m > MAX_CUTOFF {
        return Err(Error::ResourceCap(format!("direct sum of {m} terms")));
    }
    Ok(finite_sum(1, m, &at_working_precision(z, ctx)))
}

/// `∫_M^∞ x^{-2s} dx = M^{1-2s}/(2s-1)`.
pub fn tail_integral_approx(m: u64, s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if m == 0 {
        return Err(Error::domain("integral needs M >= 1"));
    }
    let s = at_working_precision(s, ctx);
    let p = s.precision();
    let half = Real::from_rational(&exact::ratio(1, 2), p);
    if s <= half {
        return Err(Error::Divergent(format!("integral of x^(-2s) diverges for s = {s} <= 1/2")));
    }
    let two_s_m1 = &(&s * &Real::from_u64(2, p)) - &Real::one(p);
    let value = (-(Real::from_u64(m, p).ln() * &two_s_m1)).exp();
    Ok(value / two_s_m1)
}

/// `1/(2δ) + γ`, the two-term expansion of `ζ(1 + 2δ)`.
pub fn laurent_zeta_approx(delta: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let d = at_working_precision(delta, ctx);
    let p = d.precision();
    if !d.is_positive() || d > Real::from_rational(&exact::ratio(1, 2), p) {
        return Err(Error::domain(format!("laurent approximation needs 0 < delta <= 1/2, got {d}")));
    }
    Ok((&d * &Real::from_u64(2, p)).recip() + euler_gamma(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn r(s: &str) -> Real {
        Real::parse_decimal(s, ctx().bits())
    }

    fn close(a: &Real, b: &Real, tol: &str) -> bool {
        (a - b).abs() <= r(tol)
    }

    #[test]
    fn basel_and_friends() {
        let p = ctx().bits();
        let pi = Real::pi(p);
        let z2 = zeta(&r("2"), &ctx()).unwrap();
        assert!(close(&z2, &(&(&pi * &pi) / &Real::from_u64(6, p)), "1e-18"));
        let pi4 = pi.powi(4);
        let z4 = zeta(&r("4"), &ctx()).unwrap();
        assert!(close(&z4, &(&pi4 / &Real::from_u64(90, p)), "1e-18"));
    }

    #[test]
    fn near_pole() {
        let z = zeta(&r("1.02"), &ctx()).unwrap();
        assert!(close(&z, &r("50.5772156649"), "0.01"));
        assert!(close(&z, &r("50.5786700410156032176133025354"), "1e-18"));
        assert!(matches!(zeta(&r("1"), &ctx()), Err(Error::PoleProximity { .. })));
        assert!(matches!(zeta(&r("1.0000000001"), &ctx()), Err(Error::PoleProximity { .. })));
        assert!(matches!(zeta(&r("0.5"), &ctx()), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn tail_examples() {
        let p = ctx().bits();
        let z2 = zeta(&r("2"), &ctx()).unwrap();
        assert!(close(&zeta_tail(1, &r("2"), &ctx()).unwrap(), &z2, "1e-18"));
        assert!(close(&zeta_tail(2, &r("2"), &ctx()).unwrap(), &(&z2 - &Real::one(p)), "1e-18"));

        // Σ_{k>=1000} k^{-1.4} against the integral approximation.
        let t = zeta_tail(1000, &r("1.4"), &ctx()).unwrap();
        let approx = (-(Real::from_u64(1000, p).ln() * r("0.4"))).exp() / r("0.4");
        let slack = (-(Real::from_u64(1000, p).ln() * r("1.4"))).exp() * Real::from_u64(5, p);
        assert!((&t - &approx).abs() <= slack);
    }

    #[test]
    fn huge_tail_uses_asymptotics() {
        // Σ_{k>=10^13} k^{-1.2} ≈ 10^{13·(-0.2)}/0.2 (1 + O(1/M)).
        let t = zeta_tail(10_000_000_000_000, &r("1.2"), &ctx()).unwrap();
        let expect = (-(Real::from_u64(10_000_000_000_000, ctx().bits()).ln() * r("0.2"))).exp() / r("0.2");
        assert!(close(&t, &expect, "1e-14"));
    }

    #[test]
    fn integral_examples() {
        let c = ctx();
        assert!(close(&tail_integral_approx(1, &r("1"), &c).unwrap(), &r("1"), "1e-40"));
        assert!(close(&tail_integral_approx(4, &r("1"), &c).unwrap(), &r("0.25"), "1e-40"));
        assert!(close(&tail_integral_approx(100, &r("0.75"), &c).unwrap(), &r("0.2"), "1e-40"));
        assert!(matches!(tail_integral_approx(4, &r("0.5"), &c), Err(Error::Divergent(_))));
    }

    #[test]
    fn laurent_examples() {
        let c = ctx();
        let g = euler_gamma(c.bits());
        assert!(close(&laurent_zeta_approx(&r("0.01"), &c).unwrap(), &(r("50") + &g), "1e-40"));
        assert!(close(&laurent_zeta_approx(&r("0.5"), &c).unwrap(), &(r("1") + &g), "1e-40"));
        let l = laurent_zeta_approx(&r("0.001"), &c).unwrap();
        assert!(close(&l, &(r("500") + &g), "1e-40"));
        assert!(close(&zeta(&r("1.002"), &c).unwrap(), &l, "0.01"));
        assert!(laurent_zeta_approx(&r("0"), &c).is_err());
        assert!(laurent_zeta_approx(&r("0.6"), &c).is_err());
    }

    #[test]
    fn gamma_literal_matches_series() {
        // γ = lim (H_n - ln n); use ζ(1+2δ) - 1/(2δ) → γ as δ → 0.
        let c = ctx();
        let d = r("1e-7");
        let z = zeta(&(r("1") + &(&d * &r("2"))), &c).unwrap();
        let est = z - (&d * &r("2")).recip();
        assert!(close(&est, &euler_gamma(c.bits()), "1e-6"));
    }

    #[test]
    fn context_validation() {
        assert!(PrecisionContext::new(exact::ratio(0, 1), 50).is_err());
        assert!(PrecisionContext::new(exact::ratio(1, 10), 29).is_err());
        assert!(PrecisionContext::new(exact::ratio(1, 10), 30).is_ok());
    }
}
