use std::fs;

use cfdim::cf::{self, PartialQuotients};
use cfdim::construction::{self, Admissible, PhiSchedule, C1};
use cfdim::exact::{format_rational, parse_exact, to_decimal_string};
use cfdim::sequences::{self, parse_digit_set, parse_sequence};
use cfdim::{dimension, hirst, special, Error, IndexSequence, PrecisionContext, Rational, Real, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// What a command hands back for rendering.
pub struct Output {
    pub result: Value,
    /// Rows for csv and table output; the result itself when absent.
    pub rows: Option<Vec<Value>>,
    pub warnings: Vec<String>,
    /// Set when the computation ran but could not be certified.
    pub uncertified: bool,
}

impl Output {
    fn new(result: impl Serialize) -> Self {
        Output {
            result: to_json(&result),
            rows: None,
            warnings: Vec::new(),
            uncertified: false,
        }
    }

    fn rows(mut self, rows: Vec<Value>) -> Self {
        self.rows = Some(rows);
        self
    }

    fn warn(mut self, w: impl IntoIterator<Item = String>) -> Self {
        self.warnings.extend(w);
        self
    }
}

fn to_json(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

fn real(r: &Real) -> String {
    r.to_display(30)
}

fn word(s: &str) -> Result<PartialQuotients> {
    s.parse()
}

fn real_arg(s: &str, ctx: &PrecisionContext) -> Result<Real> {
    Ok(Real::from_rational(&parse_exact(s)?, ctx.bits()))
}

pub fn dispatch(group: &Group, ctx: &PrecisionContext) -> Result<Output> {
    match group {
        Group::Cf(c) => cf_cmd(c),
        Group::Zeta(c) => zeta_cmd(c, ctx),
        Group::Dim(c) => dim_cmd(c, ctx),
        Group::Seq(c) => seq_cmd(c),
        Group::Construct(c) => construct_cmd(c, ctx),
        Group::Hirst(c) => hirst_cmd(c, ctx),
    }
}

/// Command name as typed, e.g. `cf expand`.
pub fn command_name(group: &Group) -> String {
    let (g, c) = match group {
        Group::Cf(c) => ("cf", match c {
            CfCmd::Expand(_) => "expand",
            CfCmd::Eval(_) => "eval",
            CfCmd::Convergents(_) => "convergents",
            CfCmd::Cylinder(_) => "cylinder",
            CfCmd::Delete(_) => "delete",
            CfCmd::Ratio(_) => "ratio",
        }),
        Group::Zeta(c) => ("zeta", match c {
            ZetaCmd::Value(_) => "value",
            ZetaCmd::Tail(_) => "tail",
            ZetaCmd::Partial(_) => "partial",
            ZetaCmd::Laurent(_) => "laurent",
            ZetaCmd::Integral(_) => "integral",
        }),
        Group::Dim(c) => ("dim", match c {
            DimCmd::Factor(_) => "factor",
            DimCmd::Critical(_) => "critical",
            DimCmd::Asymptotic(_) => "asymptotic",
            DimCmd::Reference(_) => "reference",
            DimCmd::Jlen(_) => "jlen",
            DimCmd::Recursion(_) => "recursion",
            DimCmd::Cover(_) => "cover",
        }),
        Group::Seq(c) => ("seq", match c {
            SeqCmd::Density(_) => "density",
            SeqCmd::Tau(_) => "tau",
            SeqCmd::Count(_) => "count",
        }),
        Group::Construct(c) => ("construct", match c {
            ConstructCmd::Schedule(_) => "schedule",
            ConstructCmd::Phi(_) => "phi",
            ConstructCmd::Point(_) => "point",
            ConstructCmd::VerifySize(_) => "verify-size",
            ConstructCmd::VerifySep(_) => "verify-sep",
            ConstructCmd::Holder(_) => "holder",
        }),
        Group::Hirst(c) => ("hirst", match c {
            HirstCmd::Dim(_) => "dim",
            HirstCmd::M0(_) => "m0",
            HirstCmd::Product(_) => "product",
            HirstCmd::Theorem(_) => "theorem",
        }),
    };
    format!("{g} {c}")
}

/// Echoed parameters of the leaf command.
pub fn inputs_of(group: &Group) -> Value {
    match group {
        Group::Cf(c) => match c {
            CfCmd::Expand(a) => to_json(a),
            CfCmd::Eval(a) | CfCmd::Convergents(a) | CfCmd::Cylinder(a) => to_json(a),
            CfCmd::Delete(a) => to_json(a),
            CfCmd::Ratio(a) => to_json(a),
        },
        Group::Zeta(c) => match c {
            ZetaCmd::Value(a) => to_json(a),
            ZetaCmd::Tail(a) | ZetaCmd::Partial(a) => to_json(a),
            ZetaCmd::Laurent(a) => to_json(a),
            ZetaCmd::Integral(a) => to_json(a),
        },
        Group::Dim(c) => match c {
            DimCmd::Factor(a) => to_json(a),
            DimCmd::Critical(a) => to_json(a),
            DimCmd::Asymptotic(a) | DimCmd::Reference(a) => to_json(a),
            DimCmd::Jlen(a) => to_json(a),
            DimCmd::Recursion(a) => to_json(a),
            DimCmd::Cover(a) => to_json(a),
        },
        Group::Seq(c) => match c {
            SeqCmd::Density(a) => to_json(a),
            SeqCmd::Tau(a) => to_json(a),
            SeqCmd::Count(a) => to_json(a),
        },
        Group::Construct(c) => match c {
            ConstructCmd::Schedule(a) => to_json(a),
            ConstructCmd::Phi(a) => to_json(a),
            ConstructCmd::Point(a) => to_json(a),
            ConstructCmd::VerifySize(a) => to_json(a),
            ConstructCmd::VerifySep(a) => to_json(a),
            ConstructCmd::Holder(a) => to_json(a),
        },
        Group::Hirst(c) => match c {
            HirstCmd::Dim(a) => to_json(a),
            HirstCmd::M0(a) => to_json(a),
            HirstCmd::Product(a) => to_json(a),
            HirstCmd::Theorem(a) => to_json(a),
        },
    }
}

fn cf_cmd(c: &CfCmd) -> Result<Output> {
    Ok(match c {
        CfCmd::Expand(a) => {
            let max = usize::try_from(a.max_digits).unwrap_or(usize::MAX).min(cf::MAX_WORD_LEN);
            let w = match (&a.rational, &a.decimal) {
                (Some(r), _) => cf::expand_rational(&parse_exact(r)?)?,
                (None, Some(d)) => cf::expand_decimal(d, max)?,
                (None, None) => return Err(Error::Parse("give --rational or --decimal".into())),
            };
            let rows = w.digits().iter().enumerate().map(|(i, d)| json!({"n": i + 1, "a_n": d})).collect();
            Output::new(json!({"digits": w, "length": w.len()})).rows(rows)
        }
        CfCmd::Eval(a) => {
            let w = word(&a.word)?;
            let x = cf::evaluate(&w)?;
            Output::new(json!({"value": q(&x), "decimal": to_decimal_string(&x, 30)}))
        }
        CfCmd::Convergents(a) => {
            let w = word(&a.word)?;
            let rows: Vec<Value> = cf::convergents(&w)?
                .iter()
                .enumerate()
                .map(|(i, c)| json!({"n": i + 1, "p": c.p.to_string(), "q": c.q.to_string(), "value": q(&c.value())}))
                .collect();
            Output::new(json!({ "convergents": rows.clone() })).rows(rows)
        }
        CfCmd::Cylinder(a) => {
            let c = cf::cylinder(&word(&a.word)?)?;
            Output::new(json!({
                    "word": c.word,
                    "left": q(&c.left),
                    "right": q(&c.right),
                    "left_closed": c.left_closed,
                    "right_closed": c.right_closed,
                    "length": q(&c.length()),
                }),
            )
        }
        CfCmd::Delete(a) => {
            let w = word(&a.word)?;
            let seq = parse_sequence(&a.seq)?;
            let n = w.len() as u64;
            let removed: Vec<u64> = (1..=n).filter(|&i| seq.contains(i)).collect();
            let kept = cf::delete_indices(&w, &seq);
            Output::new(json!({"word": w, "deleted_positions": removed, "result": kept, "result_length": kept.len()}))
        }
        CfCmd::Ratio(a) => {
            let w = word(&a.word)?;
            let ks: Vec<u64> = match a.k {
                Some(k) => vec![k],
                None => (1..=w.len() as u64).collect(),
            };
            let mut rows = Vec::new();
            for k in ks {
                let r = cf::quotient_ratio_check(&w, usize::try_from(k).unwrap_or(usize::MAX))?;
                rows.push(json!({"k": k, "lower": q(&r.lower), "ratio": q(&r.ratio), "upper": q(&r.upper), "ok": r.ok}));
            }
            let ok = rows.iter().all(|r| r["ok"] == json!(true));
            Output::new(json!({"ok": ok, "positions": rows.clone()})).rows(rows)
        }
    })
}

fn zeta_cmd(c: &ZetaCmd, ctx: &PrecisionContext) -> Result<Output> {
    Ok(match c {
        ZetaCmd::Value(a) => Output::new(json!({"zeta": real(&special::zeta(&real_arg(&a.z, ctx)?, ctx)?)})),
        ZetaCmd::Tail(a) => Output::new(json!({"tail": real(&special::zeta_tail(a.m, &real_arg(&a.z, ctx)?, ctx)?)})),
        ZetaCmd::Partial(a) => {
            Output::new(json!({"partial_sum": real(&special::partial_sum(a.m, &real_arg(&a.z, ctx)?, ctx)?)}))
        }
        ZetaCmd::Laurent(a) => {
            let delta = real_arg(&a.delta, ctx)?;
            let approx = special::laurent_zeta_approx(&delta, ctx)?;
            let z = &Real::one(ctx.bits()) + &(&Real::from_u64(2, ctx.bits()) * &delta);
            let exact = special::zeta(&z, ctx)?;
            let err = (&exact - &approx).abs();
            Output::new(json!({"approx": real(&approx), "zeta": real(&exact), "abs_error": real(&err)}))
        }
        ZetaCmd::Integral(a) => {
            Output::new(json!({"integral": real(&special::tail_integral_approx(a.m, &real_arg(&a.s, ctx)?, ctx)?)}))
        }
    })
}

fn dim_cmd(c: &DimCmd, ctx: &PrecisionContext) -> Result<Output> {
    Ok(match c {
        DimCmd::Factor(a) => {
            Output::new(json!({"factor": real(&dimension::per_level_factor(a.m, &real_arg(&a.s, ctx)?, ctx)?)}))
        }
        DimCmd::Critical(a) => {
            let mut r = dimension::critical_exponent(a.m, &parse_exact(&a.tol)?, &parse_exact(&a.s_max)?, ctx)?;
            let rows: Vec<Value> = r.trace.iter().map(to_json).collect();
            let uncertified = !r.converged;
            if !a.trace {
                r.trace.clear();
            }
            let warnings = r.diagnostic.clone().into_iter();
            let mut out = Output::new(&r).warn(warnings);
            if a.trace {
                out = out.rows(rows);
            }
            out.uncertified = uncertified;
            out
        }
        DimCmd::Asymptotic(a) => Output::new(json!({"s": real(&dimension::asymptotic_exponent(a.m, ctx)?)})),
        DimCmd::Reference(a) => Output::new(dimension::reference_bounds(a.m, ctx)?),
        DimCmd::Jlen(a) => Output::new(json!({"length": q(&dimension::j_interval_length(&word(&a.word)?, a.m)?)})),
        DimCmd::Recursion(a) => Output::new(json!({"factor": q(&dimension::recursion_factor(a.a_odd, a.a_even, a.m)?)})),
        DimCmd::Cover(a) => {
            let v = dimension::covering_sum_enumerated(a.m, &real_arg(&a.s, ctx)?, a.level, a.a, ctx)?;
            Output::new(json!({"sum": real(&v)}))
        }
    })
}

fn seq_cmd(c: &SeqCmd) -> Result<Output> {
    Ok(match c {
        SeqCmd::Density(a) => Output::new(sequences::density(&parse_sequence(&a.spec)?, a.horizon)?),
        SeqCmd::Tau(a) => {
            let t = sequences::tau(&parse_digit_set(&a.digits_spec)?)?;
            let w = t.warnings.clone();
            Output::new(t).warn(w)
        }
        SeqCmd::Count(a) => {
            let seq = parse_sequence(&a.spec)?;
            Output::new(json!({"k(n)": seq.count(a.n), "k_n": seq.k_n(a.n), "contains_n": seq.contains(a.n)}))
        }
    })
}

struct Ctx {
    seq: IndexSequence,
    schedule: PhiSchedule,
    eps: Option<Rational>,
}

fn schedule_from(a: &ScheduleArgs, ctx: &PrecisionContext) -> Result<Ctx> {
    let seq = parse_sequence(&a.seq)?;
    let cli_eps = a.eps.as_deref().map(parse_exact).transpose()?;
    let schedule = match &a.schedule {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<PhiSchedule>(&text).map_err(|e| Error::Parse(format!("schedule JSON: {e}")))?
        }
        None => {
            let c1 = match (&a.c1, &cli_eps) {
                (Some(c), _) => c.parse::<C1>()?,
                (None, Some(e)) => C1::from_eps(e),
                (None, None) => return Err(Error::Parse("give --eps or --c1".into())),
            };
            construction::choose_schedule(&seq, &c1, cli_eps.clone(), a.j_max, a.horizon, ctx)?
        }
    };
    let eps = cli_eps.or_else(|| schedule.eps.clone());
    Ok(Ctx { seq, schedule, eps })
}

fn need_eps(c: &Ctx) -> Result<Rational> {
    c.eps.clone().ok_or_else(|| Error::Parse("this command needs --eps".into()))
}

fn construct_cmd(c: &ConstructCmd, ctx: &PrecisionContext) -> Result<Output> {
    Ok(match c {
        ConstructCmd::Schedule(a) => {
            let s = schedule_from(a, ctx)?;
            let inv = construction::check_schedule_invariant(&s.seq, &s.schedule, ctx)?;
            let n0 = match &s.eps {
                Some(e) => Some(construction::n0(&s.seq, e, s.schedule.horizon)?),
                None => None,
            };
            let rows = s
                .schedule
                .thresholds
                .iter()
                .zip(&s.schedule.breakpoints)
                .enumerate()
                .map(|(j, (big, small))| json!({"j": j + 1, "N_j": big, "n_j": small}))
                .collect();
            Output::new(json!({"schedule": s.schedule, "invariant": inv, "N0": n0})).rows(rows)
        }
        ConstructCmd::Phi(a) => {
            let s = schedule_from(&a.schedule, ctx)?;
            Output::new(json!({"n": a.n, "phi": construction::phi(&s.schedule, a.n)?}))
        }
        ConstructCmd::Point(a) => {
            let s = schedule_from(&a.schedule, ctx)?;
            let w = construction::build_point(&s.seq, a.m, &s.schedule, a.depth, a.filler)?;
            let x = cf::evaluate(&w)?;
            Output::new(json!({"digits": w, "value": q(&x), "decimal": to_decimal_string(&x, 30)}))
        }
        ConstructCmd::VerifySize(a) => {
            let s = schedule_from(&a.schedule, ctx)?;
            let eps = need_eps(&s)?;
            let w = word(&a.word)?;
            let r = construction::verify_size_lemma(&eps, &s.seq, &s.schedule, &w, ctx)?;
            let chain = construction::proof_chain(&eps, &s.seq, &s.schedule, &w)?;
            let mut warnings = Vec::new();
            if r.at_least_n0 && !r.ok {
                warnings.push(format!("length {} >= N0 = {} but the length estimate fails", r.word_len, r.n0));
            }
            Output::new(json!({"size": r, "chain": chain})).warn(warnings)
        }
        ConstructCmd::VerifySep(a) => {
            let s = schedule_from(&a.schedule, ctx)?;
            let adm = Admissible::new(&s.seq, a.m, &s.schedule)?;
            if a.exhaustive {
                let r = construction::verify_separation_exhaustive(&adm, a.max_prefix, a.max_tail)?;
                Output::new(r)
            } else {
                let x = parse_list(a.x_tail.as_deref().unwrap_or(""))?;
                let y = parse_list(a.y_tail.as_deref().unwrap_or(""))?;
                Output::new(construction::verify_separation(&adm, &word(&a.prefix)?, &x, &y)?)
            }
        }
        ConstructCmd::Holder(a) => holder(a, ctx)?,
    })
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    Ok(word(s)?.into_vec())
}

fn holder(a: &ConstructHolder, ctx: &PrecisionContext) -> Result<Output> {
    let s = schedule_from(&a.schedule, ctx)?;
    let eps = need_eps(&s)?;
    let adm = Admissible::new(&s.seq, a.m, &s.schedule)?;
    let pairs = match (&a.x, &a.y) {
        (Some(x), Some(y)) => vec![(word(x)?, word(y)?)],
        _ => {
            let n0 = construction::n0(&s.seq, &eps, s.schedule.horizon)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let hi = n0.saturating_add(a.span);
            (0..a.pairs)
                .map(|_| construction::random_admissible_pair(&adm, (n0, hi), a.max_tail.max(1), &mut rng))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let reports = construction::holder_check(&adm, &eps, &pairs, ctx)?;
    let checked = reports.iter().filter(|r| r.ok.is_some()).count();
    let passed = reports.iter().filter(|r| r.ok == Some(true)).count();
    let rows: Vec<Value> = reports.iter().map(to_json).collect();
    let result = json!({
        "pairs": reports.len(),
        "checked": checked,
        "skipped": reports.len() - checked,
        "passed": passed,
        "failed": checked - passed,
        "reports": rows.clone(),
    });
    Ok(Output::new(result).rows(rows))
}

fn hirst_cmd(c: &HirstCmd, ctx: &PrecisionContext) -> Result<Output> {
    Ok(match c {
        HirstCmd::Dim(a) => {
            let r = hirst::hirst_dimension(&parse_digit_set(&a.digits_spec)?)?;
            let w = r.warnings.clone();
            Output::new(r).warn(w)
        }
        HirstCmd::M0(a) => {
            let d = parse_digit_set(&a.digits_spec)?;
            let seq = parse_sequence(&a.seq)?;
            let eps = parse_exact(&a.eps)?;
            match a.m {
                Some(m) if !a.estimate => Output::new(hirst::m0_condition(&d, &seq, &eps, m, ctx)?),
                _ => {
                    let r = hirst::estimate_m0(&d, &seq, &eps, ctx)?;
                    let w = match r.m0 {
                        hirst::M0Estimate::Exceeds(c) => vec![format!("M0 exceeds {c}; condition not evaluated")],
                        hirst::M0Estimate::Value(_) => Vec::new(),
                    };
                    Output::new(r).warn(w)
                }
            }
        }
        HirstCmd::Product(a) => {
            let d = parse_digit_set(&a.digits_spec)?;
            let seq = parse_sequence(&a.seq)?;
            let v = hirst::covering_product_bound(&d, &seq, a.m, &parse_exact(&a.s)?, a.big_n, a.n, &word(&a.prefix)?, ctx)?;
            Output::new(json!({"bound": real(&v)}))
        }
        HirstCmd::Theorem(a) => Output::new(hirst::reference_dimension_theorem(&parse_sequence(&a.seq)?)?),
    })
}
