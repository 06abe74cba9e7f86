use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

fn count(s: &str) -> Result<u64, String> {
    cfdim::exact::parse_u64(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "cfdim", version, about = "Continued fractions, zeta tails and dimension bounds for sets of reals with growing partial quotients")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Decimal digits of working precision.
    #[arg(long, global = true, default_value_t = 50)]
    pub working_digits: u32,
    /// Absolute accuracy target for series evaluation.
    #[arg(long, global = true, default_value = "1e-12")]
    pub abs_tol: String,
    #[command(subcommand)]
    pub command: Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Continued-fraction arithmetic.
    #[command(subcommand)]
    Cf(CfCmd),
    /// Riemann zeta and its tails.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Covering sums and the critical exponent.
    #[command(subcommand)]
    Dim(DimCmd),
    /// Index sequences and digit sets.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Schedules, built points and the inequality checks on them.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Digit-set dimension and the covering condition.
    #[command(subcommand)]
    Hirst(HirstCmd),
}

#[derive(Debug, Subcommand)]
pub enum CfCmd {
    /// Expand an exact rational or a decimal literal.
    Expand(CfExpand),
    /// Evaluate a word exactly.
    Eval(WordArg),
    /// Convergents p_n/q_n of a word.
    Convergents(WordArg),
    /// The cylinder of a word.
    Cylinder(WordArg),
    /// Delete the positions listed by a sequence.
    Delete(CfDelete),
    /// Compare q_n with the denominator after deleting position k.
    Ratio(CfRatio),
}

#[derive(Debug, Args, Serialize)]
pub struct CfExpand {
    /// Exact value in (0,1): p/q, integer or decimal taken literally.
    #[arg(long, conflicts_with = "decimal", required_unless_present = "decimal")]
    pub rational: Option<String>,
    /// Decimal in (0,1), read as accurate to half a unit in the last place.
    #[arg(long)]
    pub decimal: Option<String>,
    #[arg(long, default_value_t = 64, value_parser = count)]
    pub max_digits: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct WordArg {
    /// Comma-separated partial quotients, e.g. 1,2,3.
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args, Serialize)]
pub struct CfDelete {
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub seq: String,
}

#[derive(Debug, Args, Serialize)]
pub struct CfRatio {
    #[arg(long)]
    pub word: String,
    /// 1-based position to delete; all positions when omitted.
    #[arg(long, value_parser = count)]
    pub k: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum ZetaCmd {
    /// zeta(z) for real z > 1.
    Value(ZetaValue),
    /// Sum of k^-z over k >= M.
    Tail(ZetaTail),
    /// Sum of k^-z over k < M.
    Partial(ZetaTail),
    /// 1/(2 delta) + gamma, the Laurent approximation to zeta(1 + 2 delta).
    Laurent(ZetaLaurent),
    /// M^(1-2s)/(2s-1), the integral of x^-2s over [M, inf).
    Integral(ZetaIntegral),
}

#[derive(Debug, Args, Serialize)]
pub struct ZetaValue {
    #[arg(long)]
    pub z: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ZetaTail {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long)]
    pub z: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ZetaLaurent {
    #[arg(long)]
    pub delta: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ZetaIntegral {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long)]
    pub s: String,
}

#[derive(Debug, Subcommand)]
pub enum DimCmd {
    /// (1+1/M)^s zeta(2s) sum_{k>=M} k^-2s.
    Factor(DimFactor),
    /// Root of the per-level factor equal to 1.
    Critical(DimCritical),
    /// 1/2 + (ln ln M - ln 2)/ln M.
    Asymptotic(MArg),
    /// Classical bounds on the dimension of bounded-digit sets.
    Reference(MArg),
    /// Exact length of J(w) for an odd-length word.
    Jlen(DimJlen),
    /// (M+1)/(M a^2 b^2).
    Recursion(DimRecursion),
    /// Enumerated covering sum over truncated digits.
    Cover(DimCover),
}

#[derive(Debug, Args, Serialize)]
pub struct MArg {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DimFactor {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long)]
    pub s: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DimCritical {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long, default_value = "1e-12")]
    pub tol: String,
    #[arg(long, default_value = "2")]
    pub s_max: String,
    /// Include every bisection step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DimJlen {
    #[arg(long)]
    pub word: String,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DimRecursion {
    #[arg(long, value_parser = count)]
    pub a_odd: u64,
    #[arg(long, value_parser = count)]
    pub a_even: u64,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DimCover {
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long)]
    pub s: String,
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    /// Digit truncation.
    #[arg(long = "A", value_parser = count)]
    #[serde(rename = "A")]
    pub a: u64,
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// Density estimates and the closed form where known.
    Density(SeqDensity),
    /// Exponent of convergence of a digit set.
    Tau(DigitsArg),
    /// k(n) and k_n.
    Count(SeqCount),
}

#[derive(Debug, Args, Serialize)]
pub struct SeqDensity {
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value_t = 10_000, value_parser = count)]
    pub horizon: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DigitsArg {
    #[arg(long)]
    pub digits_spec: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SeqCount {
    #[arg(long)]
    pub spec: String,
    #[arg(long, value_parser = count)]
    pub n: u64,
}

#[derive(Debug, Subcommand)]
pub enum ConstructCmd {
    /// Thresholds N_j and breakpoints n_j for a zero-density sequence.
    Schedule(ScheduleArgs),
    /// phi(n).
    Phi(ConstructPhi),
    /// Word with phi on constrained positions and a filler elsewhere.
    Point(ConstructPoint),
    /// Compare |I_n(w)| with |I_n(w')|^(1+eps), w' = w with constrained digits deleted.
    VerifySize(ConstructVerifySize),
    /// Separation of points that split right after a common prefix.
    VerifySep(ConstructVerifySep),
    /// Hoelder comparison of the digit-deletion map on pairs of points.
    Holder(ConstructHolder),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub seq: String,
    /// eps; c1 defaults to eps*ln2/2.
    #[arg(long)]
    pub eps: Option<String>,
    /// c1 as p/q or p/q*ln2.
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long, default_value_t = 31, value_parser = count)]
    pub j_max: u64,
    #[arg(long, default_value_t = 10_000, value_parser = count)]
    pub horizon: u64,
    /// Read the schedule from a JSON file instead of computing it.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructPhi {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, value_parser = count)]
    pub n: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructPoint {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long, value_parser = count)]
    pub depth: u64,
    #[arg(long, default_value_t = 1, value_parser = count)]
    pub filler: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructVerifySize {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructVerifySep {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    /// Check every admissible prefix and tail pair up to the given lengths.
    #[arg(long, conflicts_with_all = ["prefix", "x_tail", "y_tail"])]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 3, value_parser = count)]
    pub max_prefix: u64,
    #[arg(long, default_value_t = 3, value_parser = count)]
    pub max_tail: u64,
    #[arg(long, default_value = "")]
    pub prefix: String,
    #[arg(long, required_unless_present = "exhaustive")]
    pub x_tail: Option<String>,
    #[arg(long, required_unless_present = "exhaustive")]
    pub y_tail: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructHolder {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    /// Number of random pairs.
    #[arg(long, default_value_t = 100, value_parser = count)]
    pub pairs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prefix lengths are drawn from [N0, N0 + span].
    #[arg(long, default_value_t = 200, value_parser = count)]
    pub span: u64,
    #[arg(long, default_value_t = 5, value_parser = count)]
    pub max_tail: u64,
    /// Check this pair instead of random ones.
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    #[arg(long, requires = "x")]
    pub y: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum HirstCmd {
    /// tau(D)/2.
    Dim(DigitsArg),
    /// The covering condition at M, or the estimated threshold M0.
    M0(HirstM0),
    /// Covering-sum product bound.
    Product(HirstProduct),
    /// Dimension 1/2 or 1 according to the upper density of a sequence.
    Theorem(SeqArg),
}

#[derive(Debug, Args, Serialize)]
pub struct SeqArg {
    #[arg(long)]
    pub seq: String,
}

#[derive(Debug, Args, Serialize)]
pub struct HirstM0 {
    #[arg(long)]
    pub digits_spec: String,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long = "M", value_parser = count, required_unless_present = "estimate")]
    #[serde(rename = "M")]
    pub m: Option<u64>,
    /// Estimate M0 from the integral tail bound and check it.
    #[arg(long, conflicts_with = "m")]
    pub estimate: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct HirstProduct {
    #[arg(long)]
    pub digits_spec: String,
    #[arg(long)]
    pub seq: String,
    #[arg(long = "M", value_parser = count)]
    #[serde(rename = "M")]
    pub m: u64,
    #[arg(long)]
    pub s: String,
    #[arg(long = "N", value_parser = count)]
    #[serde(rename = "N")]
    pub big_n: u64,
    #[arg(long, value_parser = count)]
    pub n: u64,
    #[arg(long, default_value = "")]
    pub prefix: String,
}
