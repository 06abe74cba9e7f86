use cfdim::exact::parse_exact;
use cfdim::hirst::{covering_product_bound, hirst_dimension, m0_condition, reference_dimension_theorem};
use cfdim::sequences::parse_sequence;
use cfdim::{DigitSet, IndexSequence, PartialQuotients, PrecisionContext, Real};

fn q(s: &str) -> cfdim::Rational {
    parse_exact(s).unwrap()
}

#[test]
fn specialization_agrees() {
    let h = hirst_dimension(&DigitSet::all()).unwrap().dim;
    for spec in ["even", "arith:1,3", "arith:2,5"] {
        assert_eq!(reference_dimension_theorem(&parse_sequence(spec).unwrap()).unwrap().dim, h);
    }
}

#[test]
fn condition_lhs_decreasing_in_m() {
    let ctx = PrecisionContext::default();
    let (d, seq, eps) = (DigitSet::all(), IndexSequence::even(), q("1/5"));
    let mut prev: Option<Real> = None;
    for m in [1u64, 10, 100, 10_000, 1_000_000, 100_000_000, 10_000_000_000_000] {
        let lhs = m0_condition(&d, &seq, &eps, m, &ctx).unwrap().lhs;
        if let Some(p) = &prev {
            assert!(&lhs < p, "M={m}");
        }
        prev = Some(lhs);
    }
}

#[test]
fn product_decreasing_in_s() {
    let ctx = PrecisionContext::default();
    let seq = IndexSequence::even();
    let prefix = PartialQuotients::new(vec![3, 1]).unwrap();
    for (d, lo) in [(DigitSet::all(), 55u64), (DigitSet::square(), 30)] {
        let mut prev: Option<Real> = None;
        for i in 0..10 {
            let s = q(&format!("{}/100", lo + 10 * i));
            let v = covering_product_bound(&d, &seq, 3, &s, 1, 3, &prefix, &ctx);
            let v = match v {
                Ok(v) => v,
                // 1 and 3 are not squares.
                Err(_) => covering_product_bound(&d, &seq, 3, &s, 1, 3, &PartialQuotients::new(vec![4, 1]).unwrap(), &ctx).unwrap(),
            };
            if let Some(p) = &prev {
                assert!(&v < p);
            }
            prev = Some(v);
        }
    }
}

/// Enumerates `Σ Π a_i^{-2s}` over words of length `k_n` with digits in
/// `[1, 20]`, constrained digits past `k_N` at least `M`.
fn enumerated(seq: &IndexSequence, m: u64, s: f64, big_n: u64, n: u64, prefix: &[u64]) -> f64 {
    let k_big = prefix.len() as u64;
    assert_eq!(k_big, if big_n == 0 { 0 } else { seq.k_n(big_n).unwrap() });
    let len = seq.k_n(n).unwrap();
    let mut total = 0.0;
    let start: f64 = prefix.iter().map(|&a| (a as f64).powf(-2.0 * s)).product();
    let mut stack = vec![(k_big, start)];
    while let Some((pos, acc)) = stack.pop() {
        if pos == len {
            total += acc;
            continue;
        }
        let i = pos + 1;
        let min = if i > k_big && seq.contains(i) { m } else { 1 };
        for a in min..=20 {
            stack.push((i, acc * (a as f64).powf(-2.0 * s)));
        }
    }
    total
}

#[test]
fn bound_dominates_enumeration() {
    let ctx = PrecisionContext::default();
    let d = DigitSet::explicit((1..=20).collect()).unwrap();
    let seq = IndexSequence::even();
    for (m, big_n, n, prefix) in [(2u64, 0u64, 1u64, vec![]), (3, 0, 2, vec![]), (5, 1, 2, vec![1, 1]), (2, 1, 3, vec![2, 7])] {
        let pq = PartialQuotients::new(prefix.clone()).unwrap();
        let bound = covering_product_bound(&d, &seq, m, &q("9/10"), big_n, n, &pq, &ctx).unwrap().to_f64();
        let sum = enumerated(&seq, m, 0.9, big_n, n, &prefix);
        assert!(sum <= bound * (1.0 + 1e-12), "{m} {big_n} {n}: {sum} > {bound}");
    }
}
