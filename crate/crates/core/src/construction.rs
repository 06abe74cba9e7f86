//! Points whose digits along an index sequence grow slowly, and the
//! inequalities that make digit deletion a Hölder map on them.
//!
//! Along a zero-density sequence `{k_n}` the digit at `k_n` is `φ(n)`, a
//! step function that increases by one at each breakpoint `n_j`. All other
//! digits lie in `[1, M]`. Deleting the constrained positions maps such a
//! point onto a point with bounded digits; the checks here confirm, word by
//! word, the length and separation estimates behind that map.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{self, PartialQuotients};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::hp::{self, Real};
use crate::sequences::IndexSequence;
use crate::special::PrecisionContext;

/// Upper bound on `horizon × j_max` scanned by [`choose_schedule`].
pub const MAX_SCHEDULE_WORK: u64 = 500_000_000;

/// Largest exact power of two built for tie-breaking comparisons.
const MAX_EXACT_BITS: u64 = 1 << 24;

/// The constant `c_1`, either a rational multiple of `ln 2` or rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum C1 {
    LogTwoMultiple(Rational),
    Value(Rational),
}

impl C1 {
    /// `ε·ln2/2`.
    pub fn from_eps(eps: &Rational) -> Self {
        C1::LogTwoMultiple(eps / exact::integer(2))
    }

    fn coefficient(&self) -> &Rational {
        match self {
            C1::LogTwoMultiple(r) | C1::Value(r) => r,
        }
    }

    pub fn to_real(&self, p: usize) -> Real {
        match self {
            C1::LogTwoMultiple(r) => Real::from_rational(r, p) * Real::ln2(p),
            C1::Value(r) => Real::from_rational(r, p),
        }
    }
}

impl fmt::Display for C1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C1::LogTwoMultiple(r) => write!(f, "{}*ln2", exact::format_rational(r)),
            C1::Value(r) => f.write_str(&exact::format_rational(r)),
        }
    }
}

/// Accepts `p/q`, `p/q*ln2` and the exact decimal forms of [`exact::parse_exact`].
impl FromStr for C1 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let c = match s.strip_suffix("ln2").map(str::trim_end) {
            Some(head) => {
                let head = head.strip_suffix('*').unwrap_or(head).trim();
                let r = if head.is_empty() { exact::one() } else { exact::parse_exact(head)? };
                C1::LogTwoMultiple(r)
            }
            None => C1::Value(exact::parse_exact(s)?),
        };
        if !c.coefficient().is_positive() {
            return Err(Error::domain("c1 must be positive"));
        }
        Ok(c)
    }
}

impl Serialize for C1 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for C1 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Thresholds `N_j`, breakpoints `n_j` and the step function `φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr")]
pub struct PhiSchedule {
    pub c1: C1,
    #[serde(with = "exact::serde_pq::option")]
    pub eps: Option<Rational>,
    pub horizon: u64,
    #[serde(rename = "N")]
    pub thresholds: Vec<u64>,
    #[serde(rename = "n")]
    pub breakpoints: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleRepr {
    c1: C1,
    #[serde(default, with = "exact::serde_pq::option")]
    eps: Option<Rational>,
    horizon: u64,
    #[serde(rename = "N")]
    thresholds: Vec<u64>,
    #[serde(rename = "n")]
    breakpoints: Vec<u64>,
}

impl TryFrom<ScheduleRepr> for PhiSchedule {
    type Error = Error;
    fn try_from(r: ScheduleRepr) -> Result<Self> {
        PhiSchedule::new(r.c1, r.eps, r.horizon, r.thresholds, r.breakpoints)
    }
}

impl PhiSchedule {
    pub fn new(c1: C1, eps: Option<Rational>, horizon: u64, thresholds: Vec<u64>, breakpoints: Vec<u64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::domain("schedule needs at least one breakpoint"));
        }
        if thresholds.len() != breakpoints.len() {
            return Err(Error::domain("N and n must have the same length"));
        }
        if breakpoints[0] == 0 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("breakpoints must be positive and strictly increasing"));
        }
        if let Some(e) = &eps {
            if !e.is_positive() {
                return Err(Error::domain("eps must be positive"));
            }
        }
        Ok(PhiSchedule { c1, eps, horizon, thresholds, breakpoints })
    }

    /// A schedule given only by its breakpoints.
    pub fn from_breakpoints(breakpoints: Vec<u64>) -> Result<Self> {
        let n = breakpoints.len();
        PhiSchedule::new(C1::Value(exact::one()), None, 0, vec![0; n], breakpoints)
    }

    pub fn j_max(&self) -> u64 {
        self.breakpoints.len() as u64
    }

    /// Last index on which `φ` is defined.
    pub fn last_index(&self) -> u64 {
        *self.breakpoints.last().expect("nonempty")
    }
}

/// `φ(n)`: the `j` with `n_{j-1} < n <= n_j`.
pub fn phi(schedule: &PhiSchedule, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("phi is defined for n >= 1"));
    }
    if n > schedule.last_index() {
        return Err(Error::Precondition(format!(
            "phi({n}) lies beyond the last breakpoint n_{} = {}",
            schedule.j_max(),
            schedule.last_index()
        )));
    }
    Ok(schedule.breakpoints.partition_point(|&b| b < n) as u64 + 1)
}

enum Threshold {
    Exact(Rational),
    Irrational(Real),
}

fn log2_exact(v: u64) -> Option<u64> {
    v.is_power_of_two().then(|| u64::from(v.trailing_zeros()))
}

/// `c1 / ln(j+1)`, exact when `c1 = r·ln2` and `j+1` is a power of two.
fn threshold(c1: &C1, j: u64, p: usize) -> Threshold {
    match c1 {
        C1::LogTwoMultiple(r) => match log2_exact(j + 1) {
            Some(m) => Threshold::Exact(r / exact::integer(m)),
            None => Threshold::Irrational(Real::from_rational(r, p) * Real::ln2(p) / Real::from_u64(j + 1, p).ln()),
        },
        C1::Value(r) => Threshold::Irrational(Real::from_rational(r, p) / Real::from_u64(j + 1, p).ln()),
    }
}

fn ambiguous(what: &str) -> Error {
    Error::NoConvergence(format!("{what}: values agree to working precision, cannot order them"))
}

/// Strict comparison `x > t` for a rational `x`. No ties are possible
/// against an irrational threshold, so near-equality is an error.
fn exceeds(x: &Rational, t: &Threshold) -> Result<bool> {
    match t {
        Threshold::Exact(t) => Ok(x > t),
        Threshold::Irrational(t) => {
            let xf = x.to_f64().unwrap_or(f64::NAN);
            let tf = t.to_f64();
            if (xf - tf).abs() > 1e-9 * tf.abs().max(1e-300) {
                return Ok(xf > tf);
            }
            let xr = Real::from_rational(x, t.precision());
            if xr.nudge_down() > t.nudge_up() {
                Ok(true)
            } else if xr.nudge_up() < t.nudge_down() {
                Ok(false)
            } else {
                Err(ambiguous("k(n)/n against c1/ln(j+1)"))
            }
        }
    }
}

fn ratio_kn(k: u64, n: u64) -> Rational {
    Rational::new(BigInt::from(k), BigInt::from(n))
}

/// The schedule of a zero-density sequence for constant `c1`.
///
/// `N_j` is the largest `n <= horizon` with `k(n)/n > c1/ln(j+1)` (0 if
/// none), certified beyond the horizon by the exact tail supremum of
/// `k(n)/n`. `n_j` is the least index above `n_{j-1}` with `k_{n_j} >= N_j`.
pub fn choose_schedule(
    seq: &IndexSequence,
    c1: &C1,
    eps: Option<Rational>,
    j_max: u64,
    horizon: u64,
    ctx: &PrecisionContext,
) -> Result<PhiSchedule> {
    match seq.exact_density() {
        Some(d) if d.is_zero() => {}
        Some(d) => {
            return Err(Error::Precondition(format!(
                "sequence {seq} has density {}; a schedule needs density 0",
                exact::format_rational(&d)
            )))
        }
        None => {
            return Err(Error::Precondition(format!(
                "sequence {seq} has no analytic density; a schedule needs certified density 0"
            )))
        }
    }
    if j_max == 0 {
        return Err(Error::domain("j_max must be >= 1"));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be >= 1"));
    }
    if horizon.saturating_mul(j_max) > MAX_SCHEDULE_WORK {
        return Err(Error::ResourceCap(format!(
            "horizon x j_max exceeds {MAX_SCHEDULE_WORK}"
        )));
    }
    let p = ctx.bits();
    let sup = seq
        .tail_sup_ratio(horizon)
        .ok_or_else(|| Error::NoCertificate(format!("no closed-form tail bound for {seq}")))?;
    let mut thresholds = Vec::new();
    let mut breakpoints: Vec<u64> = Vec::new();
    for j in 1..=j_max {
        let t = threshold(c1, j, p);
        if exceeds(&sup, &t)? {
            return Err(Error::InsufficientHorizon(format!(
                "k(n)/n is not certified below c1/ln({}) beyond horizon {horizon}; N_{j} is undetermined",
                j + 1
            )));
        }
        let mut n_j = 0;
        for n in (1..=horizon).rev() {
            if exceeds(&ratio_kn(seq.count(n), n), &t)? {
                n_j = n;
                break;
            }
        }
        let prev = breakpoints.last().copied().unwrap_or(0);
        let first_reaching = if n_j == 0 { 1 } else { seq.count(n_j - 1) + 1 };
        thresholds.push(n_j);
        breakpoints.push(first_reaching.max(prev + 1));
    }
    let schedule = PhiSchedule::new(c1.clone(), eps, horizon, thresholds, breakpoints)?;
    let inv = check_schedule_invariant(seq, &schedule, ctx)?;
    if let Some(n) = inv.first_failure {
        return Err(Error::NoCertificate(format!("schedule invariant fails at n = {n}")));
    }
    Ok(schedule)
}

/// Result of replaying `c1·n >= Σ_{j<=k(n)} ln(φ(j)+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    /// Checked for `n` in `(from, to]` wherever `φ` covers `k(n)`.
    pub from: u64,
    pub to: u64,
    pub values_checked: u64,
    pub ok: bool,
    pub first_failure: Option<u64>,
}

/// Counts `c_j = #{i <= kk : φ(i) = j}` for every step.
fn step_counts(schedule: &PhiSchedule, kk: u64) -> Vec<u64> {
    let mut prev = 0;
    let mut out = Vec::new();
    for &b in &schedule.breakpoints {
        if prev >= kk {
            break;
        }
        out.push(b.min(kk) - prev);
        prev = b;
    }
    out
}

/// `c1·n >= Σ_j c_j ln(j+1)`, deciding near-ties exactly when possible.
fn invariant_holds(c1: &C1, n: u64, counts: &[u64], p: usize) -> Result<bool> {
    let lhs = c1.to_real(p) * Real::from_u64(n, p);
    let mut rhs = Real::zero(p);
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            rhs = rhs + Real::from_u64(c, p) * Real::from_u64(i as u64 + 2, p).ln();
        }
    }
    if lhs.nudge_down() >= rhs.nudge_up() {
        return Ok(true);
    }
    if lhs.nudge_up() < rhs.nudge_down() {
        return Ok(false);
    }
    // c1 = (a/b)·ln2: compare 2^{a·n} with Π (j+1)^{b·c_j}.
    let C1::LogTwoMultiple(r) = c1 else {
        return Err(ambiguous("schedule invariant"));
    };
    let a = r.numer().to_u64().ok_or_else(|| ambiguous("schedule invariant"))?;
    let b = r.denom().to_u64().ok_or_else(|| ambiguous("schedule invariant"))?;
    let bits = a.checked_mul(n).filter(|&x| x <= MAX_EXACT_BITS).ok_or_else(|| ambiguous("schedule invariant"))?;
    let left = BigUint::one() << bits;
    let mut right = BigUint::one();
    for (i, &c) in counts.iter().enumerate() {
        let e = b.checked_mul(c).filter(|&x| x <= MAX_EXACT_BITS).ok_or_else(|| ambiguous("schedule invariant"))?;
        right *= BigUint::from(i as u64 + 2).pow(e as u32);
    }
    Ok(left >= right)
}

/// Replays the schedule inequality `c1·n >= Σ_{j<=k(n)} ln(φ(j)+1)` for
/// every `n` in `(N_1, horizon]` with `k(n) <= n_{j_max}`.
///
/// For fixed `k(n) = K` the left side is smallest at the first `n` with
/// that count, so one comparison per `K` covers the whole range.
pub fn check_schedule_invariant(seq: &IndexSequence, schedule: &PhiSchedule, ctx: &PrecisionContext) -> Result<InvariantReport> {
    let from = schedule.thresholds[0];
    let to = schedule.horizon;
    let p = ctx.bits();
    let mut report = InvariantReport { from, to, values_checked: 0, ok: true, first_failure: None };
    if to <= from {
        return Ok(report);
    }
    let k_lo = seq.count(from + 1);
    let k_hi = seq.count(to).min(schedule.last_index());
    for kk in k_lo..=k_hi {
        let first_n = if kk == 0 { 1 } else { seq.k_n(kk).unwrap_or(u64::MAX) };
        let n = first_n.max(from + 1);
        if n > to {
            break;
        }
        report.values_checked += 1;
        if !invariant_holds(&schedule.c1, n, &step_counts(schedule, kk), p)? {
            report.ok = false;
            report.first_failure = Some(n);
            break;
        }
    }
    Ok(report)
}

/// Least `n` with `n·ε/2 >= 1 + 2ε + k(m)·ε` for every `m` in `[n, horizon]`.
pub fn n0(seq: &IndexSequence, eps: &Rational, horizon: u64) -> Result<u64> {
    if !eps.is_positive() {
        return Err(Error::domain("eps must be positive"));
    }
    // Multiply through by 2/ε: m - 4 - 2k(m) >= 2/ε.
    let two_over_eps = exact::integer(2) / eps;
    let holds = |m: u64| exact::integer(m) - exact::integer(4) - exact::integer(2 * seq.count(m)) >= two_over_eps;
    if !holds(horizon) {
        return Err(Error::InsufficientHorizon(format!(
            "the N0 condition does not yet hold at horizon {horizon}"
        )));
    }
    let mut n = horizon;
    while n > 1 && holds(n - 1) {
        n -= 1;
    }
    Ok(n)
}

/// The sequence, digit bound and schedule that define admissible words.
#[derive(Debug, Clone, Copy)]
pub struct Admissible<'a> {
    pub seq: &'a IndexSequence,
    pub m: u64,
    pub schedule: &'a PhiSchedule,
}

impl<'a> Admissible<'a> {
    pub fn new(seq: &'a IndexSequence, m: u64, schedule: &'a PhiSchedule) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("M must be >= 1"));
        }
        Ok(Admissible { seq, m, schedule })
    }

    /// The forced digit at 1-based `position`, or `None` when it is free.
    pub fn forced(&self, position: u64) -> Result<Option<u64>> {
        if self.seq.contains(position) {
            phi(self.schedule, self.seq.count(position)).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Digits allowed at `position`, in increasing order.
    pub fn choices(&self, position: u64) -> Result<Vec<u64>> {
        Ok(match self.forced(position)? {
            Some(v) => vec![v],
            None => (1..=self.m).collect(),
        })
    }

    /// Checks `digits`, placed from 1-based `start`.
    pub fn check_at(&self, start: u64, digits: &[u64]) -> Result<()> {
        for (i, &a) in digits.iter().enumerate() {
            let pos = start + i as u64;
            match self.forced(pos)? {
                Some(v) if a != v => {
                    return Err(Error::NotAdmissible(format!(
                        "position {pos} must carry phi = {v}, found {a}"
                    )))
                }
                None if a == 0 || a > self.m => {
                    return Err(Error::NotAdmissible(format!(
                        "position {pos} must lie in [1, {}], found {a}",
                        self.m
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn check(&self, w: &PartialQuotients) -> Result<()> {
        self.check_at(1, w.digits())
    }
}

/// Word of length `depth` with `φ` on constrained positions and `filler`
/// elsewhere.
pub fn build_point(seq: &IndexSequence, m: u64, schedule: &PhiSchedule, depth: u64, filler: u64) -> Result<PartialQuotients> {
    if filler == 0 || filler > m {
        return Err(Error::domain(format!("filler {filler} outside [1, {m}]")));
    }
    if seq.count(depth) > schedule.last_index() {
        return Err(Error::Precondition(format!(
            "depth {depth} has {} constrained positions but phi stops at {}",
            seq.count(depth),
            schedule.last_index()
        )));
    }
    let adm = Admissible::new(seq, m, schedule)?;
    let mut digits = Vec::with_capacity(depth as usize);
    for pos in 1..=depth {
        digits.push(adm.forced(pos)?.unwrap_or(filler));
    }
    PartialQuotients::new(digits)
}

/// Checks only the constrained positions of `w`.
fn check_constrained(seq: &IndexSequence, schedule: &PhiSchedule, w: &PartialQuotients) -> Result<()> {
    // Free digits are unrestricted here; use a bound no digit can exceed.
    Admissible::new(seq, u64::MAX, schedule)?.check(w)
}

fn ln_of_biguint(v: &BigUint, p: usize) -> Real {
    Real::from_biguint(v, p).ln()
}

/// `-ln |I(w)| = ln(q_n (q_n + q_{n-1}))`.
fn neg_ln_cylinder(w: &[u64], p: usize) -> Real {
    let (q, qp) = cf::denominators(w);
    ln_of_biguint(&(&q * (&q + &qp)), p)
}

/// `|I_n(w)|` against `|Ī_n|^{1+ε}`, where `Ī_n` is the cylinder of `w`
/// with its constrained digits deleted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeLemmaReport {
    #[serde(with = "exact::serde_pq")]
    pub eps: Rational,
    #[serde(rename = "N0")]
    pub n0: u64,
    pub word_len: u64,
    pub deleted: u64,
    #[serde(with = "exact::serde_pq")]
    pub lhs: Rational,
    #[serde(with = "hp::serde_real")]
    pub rhs: Real,
    #[serde(with = "hp::serde_real")]
    pub ln_lhs: Real,
    #[serde(with = "hp::serde_real")]
    pub ln_rhs: Real,
    pub at_least_n0: bool,
    pub ok: bool,
}

pub fn verify_size_lemma(
    eps: &Rational,
    seq: &IndexSequence,
    schedule: &PhiSchedule,
    w: &PartialQuotients,
    ctx: &PrecisionContext,
) -> Result<SizeLemmaReport> {
    if !eps.is_positive() {
        return Err(Error::domain("eps must be positive"));
    }
    check_constrained(seq, schedule, w)?;
    let n0 = n0(seq, eps, schedule.horizon)?;
    let p = ctx.bits();
    let wbar = cf::delete_indices(w, seq);
    let lhs = cf::cylinder_length(w.digits());
    let ln_lhs = -neg_ln_cylinder(w.digits(), p);
    let one_eps = Real::from_rational(&(exact::one() + eps), p);
    let ln_rhs = -(neg_ln_cylinder(wbar.digits(), p) * one_eps);
    let ok = ln_lhs.nudge_down() >= ln_rhs.nudge_up();
    Ok(SizeLemmaReport {
        eps: eps.clone(),
        n0,
        word_len: w.len() as u64,
        deleted: (w.len() - wbar.len()) as u64,
        lhs,
        rhs: ln_rhs.exp().nudge_up(),
        ln_lhs,
        ln_rhs,
        at_least_n0: w.len() as u64 >= n0,
        ok,
    })
}

/// The two comparisons chained inside the length estimate, decided exactly:
/// `q_m(w̄)^{2ε} >= 2^{(m-2)ε}` and `2^{(m-2)ε} >= 2 Π_j (σ_{k_j}+1)²`,
/// with `m = n - k(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofChainReport {
    pub n: u64,
    pub m: u64,
    pub growth_link: bool,
    pub budget_link: bool,
}

pub fn proof_chain(eps: &Rational, seq: &IndexSequence, schedule: &PhiSchedule, w: &PartialQuotients) -> Result<ProofChainReport> {
    if !eps.is_positive() {
        return Err(Error::domain("eps must be positive"));
    }
    check_constrained(seq, schedule, w)?;
    let n = w.len() as u64;
    let wbar = cf::delete_indices(w, seq);
    let m = wbar.len() as u64;
    // ε > 0 cancels: q² >= 2^{m-2}.
    let (q, _) = cf::denominators(wbar.digits());
    let growth_link = if m >= 2 { &q * &q >= BigUint::one() << (m - 2) } else { true };
    // ε = a/b: 2^{(m-2)a} >= 2^b Π (σ+1)^{2b}.
    let a = eps.numer().to_u64().ok_or_else(|| Error::domain("eps numerator too large"))?;
    let b = eps.denom().to_u64().ok_or_else(|| Error::domain("eps denominator too large"))?;
    let budget_link = if m < 2 {
        false
    } else {
        let left_bits = (m - 2).checked_mul(a).filter(|&x| x <= MAX_EXACT_BITS);
        let left_bits = left_bits.ok_or_else(|| Error::ResourceCap("exponent too large".into()))?;
        let two_b = b.checked_mul(2).filter(|&x| x <= MAX_EXACT_BITS).ok_or_else(|| Error::ResourceCap("exponent too large".into()))?;
        let mut right = BigUint::one() << b;
        for (i, &d) in w.digits().iter().enumerate() {
            if seq.contains(i as u64 + 1) {
                right *= BigUint::from(d + 1).pow(two_b as u32);
            }
        }
        (BigUint::one() << left_bits) >= right
    };
    Ok(ProofChainReport { n, m, growth_link, budget_link })
}

/// Whether position `n + 2` is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeparationCase {
    #[serde(rename = "I")]
    ConstrainedNext,
    #[serde(rename = "II")]
    FreeNext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub prefix_len: u64,
    pub case: SeparationCase,
    #[serde(with = "exact::serde_pq")]
    pub gap: Rational,
    #[serde(with = "exact::serde_pq")]
    pub bound: Rational,
    pub ok: bool,
}

fn check_tail(adm: &Admissible<'_>, start: u64, tail: &[u64]) -> Result<()> {
    if tail.is_empty() {
        return Err(Error::domain("tails must be nonempty"));
    }
    adm.check_at(start, tail)?;
    if *tail.last().expect("nonempty") == 1 {
        return Err(Error::NotAdmissible(
            "tail ends in 1, so the word names the same point as one ending in a+1".into(),
        ));
    }
    Ok(())
}

/// `|x - y| >= |I_n(w)| / (9M³)` for `x = w·x_tail`, `y = w·y_tail` whose
/// digits at `n + 1` differ.
pub fn verify_separation(
    adm: &Admissible<'_>,
    prefix: &PartialQuotients,
    x_tail: &[u64],
    y_tail: &[u64],
) -> Result<SeparationReport> {
    if adm.m < 2 {
        return Err(Error::domain("separation needs M >= 2"));
    }
    adm.check(prefix)?;
    let n = prefix.len() as u64;
    if x_tail.first() == y_tail.first() {
        return Err(Error::domain("tails must differ in their first digit"));
    }
    check_tail(adm, n + 1, x_tail)?;
    check_tail(adm, n + 1, y_tail)?;
    let x = cf::evaluate(&prefix.concat(x_tail)?)?;
    let y = cf::evaluate(&prefix.concat(y_tail)?)?;
    let gap = (x - y).abs();
    let bound = cf::cylinder_length(prefix.digits()) / exact::integer(9 * adm.m.pow(3));
    let case = if adm.seq.contains(n + 2) { SeparationCase::ConstrainedNext } else { SeparationCase::FreeNext };
    Ok(SeparationReport { prefix_len: n, case, ok: gap >= bound, gap, bound })
}

/// Every admissible word of length `len` starting at 1-based `start`.
fn enumerate_words(adm: &Admissible<'_>, start: u64, len: u64) -> Result<Vec<Vec<u64>>> {
    let mut out = vec![Vec::new()];
    for pos in start..start + len {
        let choices = adm.choices(pos)?;
        out = out
            .into_iter()
            .flat_map(|w| {
                choices.iter().map(move |&a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationFailure {
    pub prefix: Vec<u64>,
    pub x_tail: Vec<u64>,
    pub y_tail: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationSummary {
    #[serde(rename = "M")]
    pub m: u64,
    pub max_prefix: u64,
    pub max_tail: u64,
    pub prefixes: u64,
    pub pairs: u64,
    pub case_i: u64,
    pub case_ii: u64,
    pub failures: u64,
    pub first_failures: Vec<SeparationFailure>,
}

/// Runs [`verify_separation`] on every admissible prefix of length
/// `<= max_prefix` and every pair of admissible tails of length
/// `<= max_tail` ending in a digit above 1.
pub fn verify_separation_exhaustive(adm: &Admissible<'_>, max_prefix: u64, max_tail: u64) -> Result<SeparationSummary> {
    if max_prefix > 8 || max_tail > 6 {
        return Err(Error::ResourceCap("exhaustive separation limited to prefix <= 8, tail <= 6".into()));
    }
    let mut prefixes = Vec::new();
    for n in 0..=max_prefix {
        if adm.forced(n + 1)?.is_some() {
            continue;
        }
        prefixes.extend(enumerate_words(adm, 1, n)?);
    }
    let per_prefix: Vec<Result<(u64, u64, u64, Vec<SeparationFailure>)>> = prefixes
        .par_iter()
        .map(|pre| {
            let n = pre.len() as u64;
            let mut tails = Vec::new();
            for len in 1..=max_tail {
                tails.extend(enumerate_words(adm, n + 1, len)?.into_iter().filter(|t| *t.last().unwrap() > 1));
            }
            let prefix = PartialQuotients::new(pre.clone())?;
            let (mut pairs, mut case_i, mut fails) = (0, 0, Vec::new());
            let mut case_ii = 0;
            for x in &tails {
                for y in tails.iter().filter(|y| x[0] < y[0]) {
                    let r = verify_separation(adm, &prefix, x, y)?;
                    pairs += 1;
                    match r.case {
                        SeparationCase::ConstrainedNext => case_i += 1,
                        SeparationCase::FreeNext => case_ii += 1,
                    }
                    if !r.ok {
                        fails.push(SeparationFailure { prefix: pre.clone(), x_tail: x.clone(), y_tail: y.clone() });
                    }
                }
            }
            Ok((pairs, case_i, case_ii, fails))
        })
        .collect();
    let mut summary = SeparationSummary {
        m: adm.m,
        max_prefix,
        max_tail,
        prefixes: prefixes.len() as u64,
        pairs: 0,
        case_i: 0,
        case_ii: 0,
        failures: 0,
        first_failures: Vec::new(),
    };
    for r in per_prefix {
        let (pairs, ci, cii, fails) = r?;
        summary.pairs += pairs;
        summary.case_i += ci;
        summary.case_ii += cii;
        summary.failures += fails.len() as u64;
        for f in fails {
            if summary.first_failures.len() < 10 {
                summary.first_failures.push(f);
            }
        }
    }
    Ok(summary)
}

/// One Hölder comparison, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    pub prefix_len: u64,
    pub skipped: Option<String>,
    #[serde(with = "exact::serde_pq::option")]
    pub lhs: Option<Rational>,
    #[serde(with = "hp::serde_real::option")]
    pub rhs: Option<Real>,
    pub ok: Option<bool>,
}

impl HolderReport {
    fn skip(prefix_len: u64, reason: impl Into<String>) -> Self {
        HolderReport { prefix_len, skipped: Some(reason.into()), lhs: None, rhs: None, ok: None }
    }
}

/// `|f̃x - f̃y| <= (9M³)^{1/(1+ε)} |x - y|^{1/(1+ε)}` for finite words `x, y`,
/// where `f̃` deletes the constrained digits and evaluates.
pub fn holder_check(
    adm: &Admissible<'_>,
    eps: &Rational,
    pairs: &[(PartialQuotients, PartialQuotients)],
    ctx: &PrecisionContext,
) -> Result<Vec<HolderReport>> {
    if !eps.is_positive() {
        return Err(Error::domain("eps must be positive"));
    }
    let n0 = n0(adm.seq, eps, adm.schedule.horizon)?;
    let p = ctx.bits();
    let alpha = Real::from_rational(&(exact::one() / (exact::one() + eps)), p);
    let scale = Real::from_u64(9 * adm.m.pow(3), p).ln();
    let out = pairs
        .par_iter()
        .map(|(x, y)| holder_one(adm, n0, &alpha, &scale, x, y, p))
        .collect();
    Ok(out)
}

fn holder_one(adm: &Admissible<'_>, n0: u64, alpha: &Real, ln_scale: &Real, x: &PartialQuotients, y: &PartialQuotients, p: usize) -> HolderReport {
    let n = x.digits().iter().zip(y.digits()).take_while(|(a, b)| a == b).count() as u64;
    if x == y {
        return HolderReport { prefix_len: n, skipped: None, lhs: Some(Rational::zero()), rhs: Some(Real::zero(p)), ok: Some(true) };
    }
    if x.is_empty() || y.is_empty() || n as usize == x.len().min(y.len()) {
        return HolderReport::skip(n, "one word is a prefix of the other");
    }
    if n < n0 {
        return HolderReport::skip(n, "below N0");
    }
    for w in [x, y] {
        if let Err(e) = adm.check(w) {
            return HolderReport::skip(n, format!("not admissible: {e}"));
        }
        if *w.digits().last().expect("nonempty") == 1 {
            return HolderReport::skip(n, "word ends in 1");
        }
    }
    let fx = cf::evaluate(&cf::delete_indices(x, adm.seq));
    let fy = cf::evaluate(&cf::delete_indices(y, adm.seq));
    let (fx, fy) = match (fx, fy) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return HolderReport::skip(n, "image word is empty"),
    };
    let lhs = (fx - fy).abs();
    let dist = (cf::evaluate(x).expect("nonempty") - cf::evaluate(y).expect("nonempty")).abs();
    let ln_rhs = alpha * &(ln_scale + &Real::from_rational(&dist, p).ln());
    let ok = if lhs.is_zero() {
        true
    } else {
        Real::from_rational(&lhs, p).ln().nudge_up() <= ln_rhs.nudge_down()
    };
    HolderReport { prefix_len: n, skipped: None, lhs: Some(lhs), rhs: Some(ln_rhs.exp().nudge_down()), ok: Some(ok) }
}

/// Random admissible word of length `len`, free digits uniform in `[1, M]`.
pub fn random_admissible_word<R: Rng>(adm: &Admissible<'_>, len: u64, rng: &mut R) -> Result<PartialQuotients> {
    let mut digits = Vec::with_capacity(len as usize);
    for pos in 1..=len {
        digits.push(match adm.forced(pos)? {
            Some(v) => v,
            None => rng.gen_range(1..=adm.m),
        });
    }
    PartialQuotients::new(digits)
}

/// Random admissible tail from `start` whose last digit exceeds 1; `None`
/// if the sampled length lands on a forced 1.
fn random_tail<R: Rng>(adm: &Admissible<'_>, start: u64, len: u64, first: u64, rng: &mut R) -> Result<Option<Vec<u64>>> {
    let mut t = vec![first];
    for pos in start + 1..start + len {
        t.push(match adm.forced(pos)? {
            Some(v) => v,
            None => rng.gen_range(1..=adm.m),
        });
    }
    let last_pos = start + len - 1;
    if *t.last().unwrap() == 1 {
        match adm.forced(last_pos)? {
            Some(_) => return Ok(None),
            None => *t.last_mut().unwrap() = rng.gen_range(2..=adm.m.max(2)),
        }
    }
    Ok(Some(t))
}

/// A pair `(w·x, w·y)` with a random admissible prefix of length in
/// `prefix_range` and tails of length `1..=max_tail` that differ at once.
pub fn random_admissible_pair<R: Rng>(
    adm: &Admissible<'_>,
    prefix_range: (u64, u64),
    max_tail: u64,
    rng: &mut R,
) -> Result<(PartialQuotients, PartialQuotients)> {
    if adm.m < 2 {
        return Err(Error::domain("pairs need M >= 2"));
    }
    for _ in 0..1000 {
        let n = rng.gen_range(prefix_range.0..=prefix_range.1);
        if adm.forced(n + 1)?.is_some() {
            continue;
        }
        let prefix = random_admissible_word(adm, n, rng)?;
        let a = rng.gen_range(1..=adm.m);
        let mut b = rng.gen_range(1..adm.m);
        if b >= a {
            b += 1;
        }
        let lx = rng.gen_range(1..=max_tail);
        let ly = rng.gen_range(1..=max_tail);
        let (Some(x), Some(y)) = (random_tail(adm, n + 1, lx, a, rng)?, random_tail(adm, n + 1, ly, b, rng)?) else {
            continue;
        };
        if x[0] == y[0] {
            continue;
        }
        return Ok((prefix.concat(&x)?, prefix.concat(&y)?));
    }
    Err(Error::Precondition("could not sample an admissible pair".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn square_schedule(j_max: u64) -> PhiSchedule {
        let eps = ratio(1, 10);
        choose_schedule(&IndexSequence::square(), &C1::from_eps(&eps), Some(eps), j_max, 10_000, &ctx()).unwrap()
    }

    #[test]
    fn square_schedule_first_step() {
        let s = square_schedule(1);
        assert_eq!(s.thresholds, vec![379]);
        assert_eq!(s.breakpoints, vec![20]);
    }

    #[test]
    fn square_schedule_covers_horizon() {
        let s = square_schedule(31);
        assert_eq!(&s.thresholds[..4], &[379, 982, 1559, 2136]);
        assert_eq!(&s.breakpoints[..4], &[20, 32, 40, 47]);
        assert_eq!(s.last_index(), 101);
        let inv = check_schedule_invariant(&IndexSequence::square(), &s, &ctx()).unwrap();
        assert!(inv.ok);
        let eps = ratio(1, 10);
        let err = choose_schedule(&IndexSequence::square(), &C1::from_eps(&eps), None, 32, 10_000, &ctx());
        assert!(matches!(err, Err(Error::InsufficientHorizon(_))));
    }

    #[test]
    fn pow2_schedule() {
        let s = choose_schedule(&IndexSequence::pow(2).unwrap(), &C1::Value(exact::one()), None, 1, 1000, &ctx()).unwrap();
        // k(n)/n <= 1 < 1/ln 2, so no n exceeds the threshold.
        assert_eq!(s.thresholds, vec![0]);
        assert!(s.breakpoints[0] >= 1);
    }

    #[test]
    fn positive_density_rejected() {
        let r = choose_schedule(&IndexSequence::even(), &C1::Value(exact::one()), None, 1, 1000, &ctx());
        assert!(matches!(r, Err(Error::Precondition(_))));
        let l = IndexSequence::explicit(vec![1, 10, 100]).unwrap();
        assert!(matches!(choose_schedule(&l, &C1::Value(exact::one()), None, 1, 1000, &ctx()), Err(Error::Precondition(_))));
    }

    #[test]
    fn literal_counting_form_fails() {
        // c1·k(n) >= Σ_{j<=k(n)} ln(φ(j)+1) would need c1 >= ln 2 whenever
        // k(n) >= 1; the replayed form compares against c1·n instead.
        let c1 = C1::from_eps(&ratio(1, 10)).to_real(ctx().bits());
        assert!(c1 < Real::ln2(ctx().bits()));
    }

    #[test]
    fn phi_steps() {
        let s = square_schedule(2);
        assert_eq!(phi(&s, 1).unwrap(), 1);
        assert_eq!(phi(&s, 20).unwrap(), 1);
        assert_eq!(phi(&s, 21).unwrap(), 2);
        assert_eq!(phi(&s, 32).unwrap(), 2);
        assert!(phi(&s, 33).is_err());
        assert!(phi(&s, 0).is_err());
    }

    #[test]
    fn build_examples() {
        let even = IndexSequence::even();
        let s3 = PhiSchedule::from_breakpoints(vec![3]).unwrap();
        assert_eq!(build_point(&even, 3, &s3, 6, 1).unwrap().digits(), &[1, 1, 1, 1, 1, 1]);
        let s2 = PhiSchedule::from_breakpoints(vec![2, 4]).unwrap();
        assert_eq!(build_point(&even, 3, &s2, 6, 2).unwrap().digits(), &[2, 1, 2, 1, 2, 2]);
        let sq = square_schedule(2);
        let w = build_point(&IndexSequence::square(), 5, &sq, 10, 1).unwrap();
        assert_eq!(w.len(), 10);
        assert!(build_point(&even, 3, &s2, 6, 4).is_err());
        assert!(build_point(&even, 3, &s3, 8, 1).is_err());
    }

    #[test]
    fn n0_square() {
        assert_eq!(n0(&IndexSequence::square(), &ratio(1, 10), 10_000).unwrap(), 34);
        assert!(matches!(n0(&IndexSequence::square(), &ratio(1, 10), 20), Err(Error::InsufficientHorizon(_))));
    }

    #[test]
    fn size_lemma_long_filler_word() {
        let seq = IndexSequence::square();
        let s = square_schedule(31);
        let w = build_point(&seq, 5, &s, 500, 1).unwrap();
        let r = verify_size_lemma(&ratio(1, 10), &seq, &s, &w, &ctx()).unwrap();
        assert!(r.ok && r.at_least_n0);
    }

    #[test]
    fn size_lemma_low_digit_counterexample() {
        // All-ones words just past N0 violate the length estimate.
        let seq = IndexSequence::square();
        let s = square_schedule(31);
        let w = build_point(&seq, 5, &s, 34, 1).unwrap();
        let r = verify_size_lemma(&ratio(1, 10), &seq, &s, &w, &ctx()).unwrap();
        assert!(r.at_least_n0 && !r.ok);
        let chain = proof_chain(&ratio(1, 10), &seq, &s, &w).unwrap();
        assert!(chain.growth_link && !chain.budget_link);
    }

    #[test]
    fn size_lemma_large_eps_short_word() {
        let seq = IndexSequence::square();
        let s = square_schedule(1);
        let w = build_point(&seq, 5, &s, 5, 3).unwrap();
        let r = verify_size_lemma(&exact::integer(10), &seq, &s, &w, &ctx()).unwrap();
        assert!(r.ok);
    }

    #[test]
    fn size_lemma_rejects_wrong_phi() {
        let seq = IndexSequence::square();
        let s = square_schedule(1);
        let w = PartialQuotients::new(vec![2, 1, 1]).unwrap();
        assert!(matches!(verify_size_lemma(&ratio(1, 10), &seq, &s, &w, &ctx()), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn separation_spot_check() {
        let seq = IndexSequence::square();
        let s = square_schedule(1);
        let adm = Admissible::new(&seq, 3, &s).unwrap();
        let w = PartialQuotients::new(vec![1, 1]).unwrap();
        // Position 4 is constrained, so this is the first case of the proof.
        let r = verify_separation(&adm, &w, &[1, 1, 2], &[2, 1, 3]).unwrap();
        assert_eq!(r.case, SeparationCase::ConstrainedNext);
        assert!(r.ok);
        assert!(verify_separation(&adm, &w, &[1, 1, 2], &[1, 1, 3]).is_err());
        assert!(matches!(verify_separation(&adm, &w, &[1, 2, 2], &[2, 1, 3]), Err(Error::NotAdmissible(_))));
        assert!(matches!(verify_separation(&adm, &w, &[1, 1, 1], &[2, 1, 3]), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn separation_exhaustive_small() {
        let seq = IndexSequence::square();
        let s = square_schedule(1);
        for m in [2u64, 3] {
            let adm = Admissible::new(&seq, m, &s).unwrap();
            let sum = verify_separation_exhaustive(&adm, 3, 3).unwrap();
            assert_eq!(sum.failures, 0, "{:?}", sum.first_failures);
            assert!(sum.case_i > 0 && sum.case_ii > 0);
        }
        let adm = Admissible::new(&seq, 3, &s).unwrap();
        let sum = verify_separation_exhaustive(&adm, 3, 3).unwrap();
        assert_eq!((sum.pairs, sum.case_i, sum.case_ii), (84, 63, 21));
    }

    #[test]
    fn holder_identical_and_short() {
        let seq = IndexSequence::square();
        let s = square_schedule(31);
        let adm = Admissible::new(&seq, 5, &s).unwrap();
        let w = build_point(&seq, 5, &s, 40, 2).unwrap();
        let reports = holder_check(&adm, &ratio(1, 10), &[(w.clone(), w.clone())], &ctx()).unwrap();
        assert_eq!(reports[0].ok, Some(true));
        let a = PartialQuotients::new(vec![1, 2, 3, 1, 2]).unwrap();
        let b = PartialQuotients::new(vec![1, 2, 4, 1, 2]).unwrap();
        let reports = holder_check(&adm, &ratio(1, 10), &[(a, b)], &ctx()).unwrap();
        assert_eq!(reports[0].skipped.as_deref(), Some("below N0"));
    }

    #[test]
    fn holder_random_pairs() {
        use rand::SeedableRng;
        let seq = IndexSequence::square();
        let s = square_schedule(31);
        let adm = Admissible::new(&seq, 5, &s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pairs: Vec<_> = (0..200).map(|_| random_admissible_pair(&adm, (34, 200), 5, &mut rng).unwrap()).collect();
        let reports = holder_check(&adm, &ratio(1, 10), &pairs, &ctx()).unwrap();
        for r in &reports {
            assert_eq!(r.ok, Some(true), "{r:?}");
        }
    }

    #[test]
    fn c1_round_trip() {
        for s in ["1/20*ln2", "3/7", "ln2"] {
            let c: C1 = s.parse().unwrap();
            let again: C1 = c.to_string().parse().unwrap();
            assert_eq!(c, again);
        }
        assert!("0*ln2".parse::<C1>().is_err());
        assert!("-1".parse::<C1>().is_err());
    }

    #[test]
    fn schedule_json_round_trip() {
        let s = square_schedule(3);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with(r#"{"c1":"1/20*ln2","eps":"1/10","horizon":10000,"N":[379,"#));
        let back: PhiSchedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"c1":"1/20","horizon":10,"N":[1,2],"n":[3,3]}"#;
        assert!(serde_json::from_str::<PhiSchedule>(bad).is_err());
    }
}
