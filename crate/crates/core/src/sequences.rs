//! Index sequences `{k_n}`, digit sets `D`, densities and exponents of
//! convergence.
//!
//! Both kinds of set are described by a small text language:
//!
//! | spec            | index sequence      | digit set            |
//! |-----------------|---------------------|----------------------|
//! | `even`          | 2, 4, 6, ...        |                      |
//! | `arith:a0,d`    | a0, a0+d, ...       |                      |
//! | `square`        | 1, 4, 9, ...        | 1, 4, 9, ...         |
//! | `pow:b`         | b, b², b³, ...      | b, b², b³, ...       |
//! | `all`           |                     | 1, 2, 3, ...         |
//! | `geq:M`         |                     | M, M+1, ...          |
//! | `list:1,5,9`    | explicit            | explicit             |
//! | `file:<path>`   | one integer a line  | one integer a line   |

use std::fmt;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::hp::Real;
use crate::special::{self, PrecisionContext};

/// Most entries accepted from an explicit list or file.
pub const MAX_LIST_LEN: usize = 1_000_000;

/// Largest horizon [`density`] will scan.
pub const MAX_DENSITY_HORIZON: u64 = 100_000_000;

/// A parsed index-sequence spec. `File` is not yet read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqSpec {
    Even,
    Arith { a0: u64, d: u64 },
    Square,
    Pow { b: u64 },
    List(Vec<u64>),
    File(PathBuf),
}

/// A parsed digit-set spec. `File` is not yet read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSpec {
    All,
    Geq(u64),
    Square,
    Pow(u64),
    List(Vec<u64>),
    File(PathBuf),
}

fn split_spec(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((head, rest)) => (head.trim(), Some(rest)),
        None => (s.trim(), None),
    }
}

fn arg_u64(s: &str, what: &str) -> Result<u64> {
    exact::parse_u64(s.trim()).map_err(|_| Error::parse(format!("{what}: expected a positive integer, got {:?}", s.trim())))
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(_) => Err(Error::parse(format!("`{name}` takes no argument"))),
    }
}

fn need_arg<'a>(name: &str, arg: Option<&'a str>) -> Result<&'a str> {
    arg.ok_or_else(|| Error::parse(format!("`{name}` needs an argument, e.g. `{name}:2`")))
}

/// Parses a comma-separated ascending list such as `"1,5,9"`.
pub fn parse_list_inline(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        if out.len() >= MAX_LIST_LEN {
            return Err(Error::parse(format!("list longer than {MAX_LIST_LEN} entries")));
        }
        out.push(parse_entry(part)?);
    }
    check_increasing(&out)?;
    Ok(out)
}

/// Parses newline-delimited ascending integers. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_list_contents(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if out.len() >= MAX_LIST_LEN {
            return Err(Error::parse(format!("list longer than {MAX_LIST_LEN} entries")));
        }
        out.push(parse_entry(line).map_err(|e| Error::parse(format!("line {}: {e}", lineno + 1)))?);
    }
    check_increasing(&out)?;
    Ok(out)
}

fn parse_entry(s: &str) -> Result<u64> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("invalid entry {s:?}")));
    }
    let v: u64 = s.parse().map_err(|_| Error::parse(format!("entry {s:?} does not fit in 64 bits")))?;
    if v == 0 {
        return Err(Error::parse("entries must be positive"));
    }
    Ok(v)
}

fn check_increasing(v: &[u64]) -> Result<()> {
    if let Some(i) = v.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::parse(format!(
            "list not strictly increasing at entry {}: {} then {}",
            i + 2,
            v[i],
            v[i + 1]
        )));
    }
    Ok(())
}

fn read_list_file(path: &PathBuf) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_list_contents(&text)
}

/// Parses an index-sequence spec without touching the filesystem.
pub fn parse_seq_spec(s: &str) -> Result<SeqSpec> {
    let (head, arg) = split_spec(s);
    match head {
        "even" => no_arg(head, arg).map(|_| SeqSpec::Even),
        "square" => no_arg(head, arg).map(|_| SeqSpec::Square),
        "arith" => {
            let arg = need_arg(head, arg)?;
            let (a0, d) = arg
                .split_once(',')
                .ok_or_else(|| Error::parse("`arith` needs `a0,d`, e.g. `arith:3,5`"))?;
            Ok(SeqSpec::Arith { a0: arg_u64(a0, "arith a0")?, d: arg_u64(d, "arith d")? })
        }
        "pow" => Ok(SeqSpec::Pow { b: arg_u64(need_arg(head, arg)?, "pow base")? }),
        "list" => Ok(SeqSpec::List(parse_list_inline(need_arg(head, arg)?)?)),
        "file" => Ok(SeqSpec::File(PathBuf::from(need_arg(head, arg)?))),
        _ => Err(Error::parse(format!(
            "unknown sequence spec {s:?}; expected even, arith:a0,d, square, pow:b, list:..., file:<path>"
        ))),
    }
}

/// Parses a digit-set spec without touching the filesystem.
pub fn parse_digit_spec(s: &str) -> Result<DigitSpec> {
    let (head, arg) = split_spec(s);
    match head {
        "all" => no_arg(head, arg).map(|_| DigitSpec::All),
        "square" => no_arg(head, arg).map(|_| DigitSpec::Square),
        "geq" => Ok(DigitSpec::Geq(arg_u64(need_arg(head, arg)?, "geq bound")?)),
        "pow" => Ok(DigitSpec::Pow(arg_u64(need_arg(head, arg)?, "pow base")?)),
        "list" => Ok(DigitSpec::List(parse_list_inline(need_arg(head, arg)?)?)),
        "file" => Ok(DigitSpec::File(PathBuf::from(need_arg(head, arg)?))),
        _ => Err(Error::parse(format!(
            "unknown digit-set spec {s:?}; expected all, geq:M, square, pow:b, list:..., file:<path>"
        ))),
    }
}

/// Parses and resolves an index sequence, reading `file:` lists.
pub fn parse_sequence(s: &str) -> Result<IndexSequence> {
    IndexSequence::from_spec(parse_seq_spec(s)?)
}

/// Parses and resolves a digit set, reading `file:` lists.
pub fn parse_digit_set(s: &str) -> Result<DigitSet> {
    DigitSet::from_spec(parse_digit_spec(s)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SeqRule {
    Even,
    Arith { a0: u64, d: u64 },
    Square,
    Pow { b: u64 },
    Explicit(Vec<u64>),
}

/// A strictly increasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSequence {
    rule: SeqRule,
}

impl IndexSequence {
    pub fn even() -> Self {
        IndexSequence { rule: SeqRule::Even }
    }

    pub fn square() -> Self {
        IndexSequence { rule: SeqRule::Square }
    }

    pub fn arith(a0: u64, d: u64) -> Result<Self> {
        if a0 == 0 || d == 0 {
            return Err(Error::domain("arith needs a0 >= 1 and d >= 1"));
        }
        Ok(IndexSequence { rule: SeqRule::Arith { a0, d } })
    }

    pub fn pow(b: u64) -> Result<Self> {
        if b < 2 {
            return Err(Error::domain("pow needs base b >= 2"));
        }
        Ok(IndexSequence { rule: SeqRule::Pow { b } })
    }

    pub fn explicit(v: Vec<u64>) -> Result<Self> {
        if v.first() == Some(&0) {
            return Err(Error::domain("sequence entries must be positive"));
        }
        check_increasing(&v)?;
        Ok(IndexSequence { rule: SeqRule::Explicit(v) })
    }

    pub fn from_spec(spec: SeqSpec) -> Result<Self> {
        match spec {
            SeqSpec::Even => Ok(Self::even()),
            SeqSpec::Square => Ok(Self::square()),
            SeqSpec::Arith { a0, d } => Self::arith(a0, d),
            SeqSpec::Pow { b } => Self::pow(b),
            SeqSpec::List(v) => Self::explicit(v),
            SeqSpec::File(p) => Self::explicit(read_list_file(&p)?),
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.rule, SeqRule::Explicit(_))
    }

    /// `k_n` for `n >= 1`; `None` past the end of an explicit list or on
    /// 64-bit overflow.
    pub fn k_n(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        match &self.rule {
            SeqRule::Even => n.checked_mul(2),
            SeqRule::Arith { a0, d } => (n - 1).checked_mul(*d)?.checked_add(*a0),
            SeqRule::Square => n.checked_mul(n),
            SeqRule::Pow { b } => b.checked_pow(u32::try_from(n).ok()?),
            SeqRule::Explicit(v) => usize::try_from(n - 1).ok().and_then(|i| v.get(i).copied()),
        }
    }

    /// `k(n)`, the number of terms `<= n`.
    pub fn count(&self, n: u64) -> u64 {
        match &self.rule {
            SeqRule::Even => n / 2,
            SeqRule::Arith { a0, d } => {
                if n < *a0 {
                    0
                } else {
                    (n - a0) / d + 1
                }
            }
            SeqRule::Square => n.sqrt(),
            SeqRule::Pow { b } => {
                let mut c = 0;
                let mut p = *b as u128;
                while p <= n as u128 {
                    c += 1;
                    p *= *b as u128;
                }
                c
            }
            SeqRule::Explicit(v) => v.partition_point(|&x| x <= n) as u64,
        }
    }

    pub fn contains(&self, i: u64) -> bool {
        i >= 1 && self.count(i) > self.count(i - 1)
    }

    /// Closed-form density where the rule has one.
    pub fn exact_density(&self) -> Option<Rational> {
        match &self.rule {
            SeqRule::Even => Some(exact::ratio(1, 2)),
            SeqRule::Arith { d, .. } => Some(exact::ratio(1, *d)),
            SeqRule::Square | SeqRule::Pow { .. } => Some(Rational::zero()),
            SeqRule::Explicit(_) => None,
        }
    }

    /// Exact `sup { k(n)/n : n > h }` for rules where it is computable.
    pub fn tail_sup_ratio(&self, h: u64) -> Option<Rational> {
        let first = Rational::new(BigInt::from(self.count(h + 1)), BigInt::from(h + 1));
        match &self.rule {
            SeqRule::Square => {
                // On [m², (m+1)²) the ratio peaks at n = m², where it is 1/m.
                let m0 = h.sqrt() + 1;
                Some(first.max(exact::ratio(1, m0)))
            }
            SeqRule::Pow { b } => {
                // Peaks at n = b^m with value m/b^m, nonincreasing in m.
                let mut m0: u32 = 1;
                let mut p = *b as u128;
                while p <= h as u128 {
                    m0 += 1;
                    p *= *b as u128;
                }
                let peak = Rational::new(BigInt::from(m0), num_traits::pow(BigInt::from(*b), m0 as usize));
                Some(first.max(peak))
            }
            _ => None,
        }
    }

    /// The textual form this sequence was parsed from (lists are inlined).
    pub fn spec_string(&self) -> String {
        match &self.rule {
            SeqRule::Even => "even".into(),
            SeqRule::Square => "square".into(),
            SeqRule::Arith { a0, d } => format!("arith:{a0},{d}"),
            SeqRule::Pow { b } => format!("pow:{b}"),
            SeqRule::Explicit(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                format!("list:{}", items.join(","))
            }
        }
    }
}

impl fmt::Display for IndexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            SeqRule::Explicit(v) => write!(f, "explicit list of {} terms", v.len()),
            _ => f.write_str(&self.spec_string()),
        }
    }
}

/// Finite-horizon density estimates plus the closed form where known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub horizon: u64,
    pub window: (u64, u64),
    #[serde(with = "exact::serde_pq")]
    pub upper_est: Rational,
    #[serde(with = "exact::serde_pq")]
    pub lower_est: Rational,
    #[serde(with = "exact::serde_pq::option")]
    pub exact: Option<Rational>,
}

/// Max and min of `k(n)/n` over `n ∈ [horizon/2, horizon]`.
pub fn density(seq: &IndexSequence, horizon: u64) -> Result<DensityReport> {
    if horizon < 100 {
        return Err(Error::domain(format!("density needs horizon >= 100, got {horizon}")));
    }
    if horizon > MAX_DENSITY_HORIZON {
        return Err(Error::ResourceCap(format!(
            "density horizon {horizon} exceeds {MAX_DENSITY_HORIZON}"
        )));
    }
    let start = horizon / 2;
    // Best (count, n) pairs so far, compared by cross-multiplication.
    let mut hi = (seq.count(start), start);
    let mut lo = hi;
    let mut k = hi.0;
    for n in start + 1..=horizon {
        if seq.contains(n) {
            k += 1;
        }
        if (k as u128) * (hi.1 as u128) > (hi.0 as u128) * (n as u128) {
            hi = (k, n);
        }
        if (k as u128) * (lo.1 as u128) < (lo.0 as u128) * (n as u128) {
            lo = (k, n);
        }
    }
    Ok(DensityReport {
        horizon,
        window: (start, horizon),
        upper_est: exact::ratio(hi.0, hi.1),
        lower_est: exact::ratio(lo.0, lo.1),
        exact: seq.exact_density(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DigitRule {
    All,
    Geq(u64),
    Square,
    Pow(u64),
    Explicit(Vec<u64>),
}

/// A set of admissible partial quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSet {
    rule: DigitRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TauMethod {
    Analytic,
    Estimated,
}

/// Exponent of convergence of a digit set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    #[serde(with = "exact::serde_pq")]
    pub value: Rational,
    pub method: TauMethod,
    /// For finite lists: `max ln(i)/ln(a_i)` over the upper half of the
    /// list, the exponent the list would have if its growth continued.
    pub growth_estimate: Option<f64>,
    pub warnings: Vec<String>,
}

impl DigitSet {
    pub fn all() -> Self {
        DigitSet { rule: DigitRule::All }
    }

    pub fn square() -> Self {
        DigitSet { rule: DigitRule::Square }
    }

    pub fn geq(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("geq needs M >= 1"));
        }
        Ok(DigitSet { rule: DigitRule::Geq(m) })
    }

    pub fn pow(b: u64) -> Result<Self> {
        if b < 2 {
            return Err(Error::domain("pow needs base b >= 2"));
        }
        Ok(DigitSet { rule: DigitRule::Pow(b) })
    }

    pub fn explicit(v: Vec<u64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::domain("digit set is empty"));
        }
        if v[0] == 0 {
            return Err(Error::domain("digits must be positive"));
        }
        check_increasing(&v)?;
        Ok(DigitSet { rule: DigitRule::Explicit(v) })
    }

    pub fn from_spec(spec: DigitSpec) -> Result<Self> {
        match spec {
            DigitSpec::All => Ok(Self::all()),
            DigitSpec::Square => Ok(Self::square()),
            DigitSpec::Geq(m) => Self::geq(m),
            DigitSpec::Pow(b) => Self::pow(b),
            DigitSpec::List(v) => Self::explicit(v),
            DigitSpec::File(p) => Self::explicit(read_list_file(&p)?),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.rule, DigitRule::Explicit(_))
    }

    pub fn contains(&self, a: u64) -> bool {
        match &self.rule {
            DigitRule::All => a >= 1,
            DigitRule::Geq(m) => a >= *m,
            DigitRule::Square => a >= 1 && a.sqrt() * a.sqrt() == a,
            DigitRule::Pow(b) => {
                let mut p = *b;
                while p < a {
                    match p.checked_mul(*b) {
                        Some(q) => p = q,
                        None => return false,
                    }
                }
                p == a
            }
            DigitRule::Explicit(v) => v.binary_search(&a).is_ok(),
        }
    }

    /// Members `<= bound` in increasing order.
    pub fn members_up_to(&self, bound: u64) -> Vec<u64> {
        match &self.rule {
            DigitRule::Explicit(v) => v.iter().copied().take_while(|&a| a <= bound).collect(),
            DigitRule::Square => (1..=bound.sqrt()).map(|m| m * m).collect(),
            DigitRule::Pow(b) => {
                let mut out = Vec::new();
                let mut p = *b;
                while p <= bound {
                    out.push(p);
                    match p.checked_mul(*b) {
                        Some(q) => p = q,
                        None => break,
                    }
                }
                out
            }
            DigitRule::All => (1..=bound).collect(),
            DigitRule::Geq(m) => (*m..=bound).collect(),
        }
    }

    pub fn spec_string(&self) -> String {
        match &self.rule {
            DigitRule::All => "all".into(),
            DigitRule::Square => "square".into(),
            DigitRule::Geq(m) => format!("geq:{m}"),
            DigitRule::Pow(b) => format!("pow:{b}"),
            DigitRule::Explicit(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                format!("list:{}", items.join(","))
            }
        }
    }

    /// `(c, m)` when the set is `{k^c : k >= m}`.
    pub fn power_family(&self) -> Option<(u64, u64)> {
        match &self.rule {
            DigitRule::All => Some((1, 1)),
            DigitRule::Geq(m) => Some((1, *m)),
            DigitRule::Square => Some((2, 1)),
            _ => None,
        }
    }

    /// `Σ_{a ∈ D, a >= min} a^{-z}`.
    pub fn power_sum(&self, z: &Real, min: u64, ctx: &PrecisionContext) -> Result<Real> {
        let p = ctx.bits();
        let min = min.max(1);
        match &self.rule {
            DigitRule::All => special::zeta_tail(min, z, ctx),
            DigitRule::Geq(m) => special::zeta_tail(min.max(*m), z, ctx),
            DigitRule::Square => {
                let mut r = min.sqrt();
                if r * r < min {
                    r += 1;
                }
                let two = Real::from_u64(2, p);
                special::zeta_tail(r, &(&two * z), ctx)
            }
            DigitRule::Pow(b) => {
                if !z.is_positive() {
                    return Err(Error::Divergent(format!("sum of b^(-kz) diverges for z = {z}")));
                }
                let mut k0: u64 = 1;
                let mut pk = *b as u128;
                while pk < min as u128 {
                    k0 += 1;
                    pk *= *b as u128;
                }
                let r = (Real::from_u64(*b, p).ln() * z).exp().recip();
                let num = r.powi(k0);
                Ok(num / (Real::one(p) - r))
            }
            DigitRule::Explicit(v) => {
                let mut acc = Real::zero(p);
                for &a in v.iter().filter(|&&a| a >= min) {
                    acc = acc + (Real::from_u64(a, p).ln() * z).exp().recip();
                }
                Ok(acc)
            }
        }
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            DigitRule::Explicit(v) => write!(f, "explicit set of {} digits", v.len()),
            _ => f.write_str(&self.spec_string()),
        }
    }
}

/// Exponent of convergence `τ(D)`.
pub fn tau(d: &DigitSet) -> Result<TauReport> {
    let analytic = |value: Rational| TauReport {
        value,
        method: TauMethod::Analytic,
        growth_estimate: None,
        warnings: Vec::new(),
    };
    Ok(match &d.rule {
        DigitRule::All | DigitRule::Geq(_) => analytic(exact::one()),
        DigitRule::Square => analytic(exact::ratio(1, 2)),
        DigitRule::Pow(_) => analytic(Rational::zero()),
        DigitRule::Explicit(v) => TauReport {
            value: Rational::zero(),
            method: TauMethod::Analytic,
            growth_estimate: growth_exponent(v),
            warnings: vec![format!(
                "finite digit set ({} digits): every power sum converges, so tau = 0",
                v.len()
            )],
        },
    })
}

/// Heuristic exponent of a list read as the start of an infinite set:
/// `Σ a_i^{-s}` diverges roughly when `i · a_i^{-s}` stays bounded away
/// from 0, i.e. for `s < ln i / ln a_i`. Uses the upper half of the list.
fn growth_exponent(v: &[u64]) -> Option<f64> {
    let n = v.len();
    if n < 4 {
        return None;
    }
    (n / 2..n)
        .filter(|&i| v[i] > 1)
        .map(|i| ((i + 1) as f64).ln() / (v[i] as f64).ln())
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
}
