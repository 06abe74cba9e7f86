use cfdim::cf::{self, cylinder, cylinder_length, delete_indices, denominators, evaluate, expand_rational, quotient_ratio_check};
use cfdim::{IndexSequence, PartialQuotients, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=50, 1..=20)
}

fn canonical(mut w: Vec<u64>) -> Vec<u64> {
    if *w.last().unwrap() == 1 && w.len() > 1 {
        w.pop();
        *w.last_mut().unwrap() += 1;
    } else if w == [1] {
        w[0] = 2;
    }
    w
}

proptest! {
    #[test]
    fn expand_inverts_evaluate(w in word()) {
        let w = canonical(w);
        let pq = PartialQuotients::new(w.clone()).unwrap();
        let x = evaluate(&pq).unwrap();
        prop_assert_eq!(expand_rational(&x).unwrap().into_vec(), w);
    }

    #[test]
    fn evaluate_inverts_expand(p in 1u64..100_000, q in 2u64..100_000) {
        prop_assume!(p < q);
        let x = Rational::new(BigInt::from(p), BigInt::from(q));
        let w = expand_rational(&x).unwrap();
        prop_assert!(*w.digits().last().unwrap() > 1 || w.len() == 1);
        prop_assert_eq!(evaluate(&w).unwrap(), x);
    }

    #[test]
    fn determinant_identity(w in word()) {
        let conv = cf::convergents(&PartialQuotients::new(w).unwrap()).unwrap();
        let (mut pp, mut qp) = (BigInt::zero(), BigInt::one());
        for (n, c) in conv.iter().enumerate() {
            let (p, q) = (BigInt::from(c.p.clone()), BigInt::from(c.q.clone()));
            let det = &pp * &q - &p * &qp;
            let expect = if (n + 1) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            prop_assert_eq!(det, expect);
            pp = p;
            qp = q;
        }
    }

    #[test]
    fn denominator_growth(w in word()) {
        let n = w.len() as u32;
        let (q, _) = denominators(&w);
        // q_n² >= 2^{n-1}.
        prop_assert!(&q * &q >= BigUint::one() << (n - 1));
    }

    #[test]
    fn cylinder_length_matches_endpoints(w in word()) {
        let c = cylinder(&PartialQuotients::new(w.clone()).unwrap()).unwrap();
        prop_assert_eq!(&c.right - &c.left, cylinder_length(&w));
        prop_assert!(c.left < c.right);
    }

    #[test]
    fn cylinders_nest(w in prop::collection::vec(1u64..=9, 1..=8), a in 1u64..=9) {
        let pq = PartialQuotients::new(w).unwrap();
        let (parent, child) = (cylinder(&pq).unwrap(), cylinder(&pq.push(a).unwrap()).unwrap());
        prop_assert!(parent.left <= child.left && child.right <= parent.right);
        // For a = 1 the child's closed end is the rational [w, 1], which is
        // the parent's open end.
        prop_assert_eq!(parent.contains_cylinder(&child), a > 1);
    }

    #[test]
    fn point_lies_in_its_cylinder(w in word()) {
        let pq = PartialQuotients::new(w).unwrap();
        let c = cylinder(&pq).unwrap();
        prop_assert!(c.contains(&evaluate(&pq).unwrap()));
    }

    #[test]
    fn quotient_ratio_bounds(w in prop::collection::vec(1u64..=30, 1..=10), k in 1usize..=10) {
        prop_assume!(k <= w.len());
        prop_assert!(quotient_ratio_check(&PartialQuotients::new(w).unwrap(), k).unwrap().ok);
    }

    #[test]
    fn deletion_length(w in prop::collection::vec(1u64..=5, 0..=200)) {
        let pq = PartialQuotients::new(w).unwrap();
        for seq in [IndexSequence::even(), IndexSequence::square(), IndexSequence::pow(3).unwrap()] {
            let n = pq.len() as u64;
            prop_assert_eq!(delete_indices(&pq, &seq).len() as u64, n - seq.count(n));
        }
    }

    #[test]
    fn word_text_round_trip(w in prop::collection::vec(1u64..=u64::MAX, 0..=10)) {
        let pq = PartialQuotients::new(w).unwrap();
        let back: PartialQuotients = pq.to_string().parse().unwrap();
        prop_assert_eq!(back, pq);
    }
}

#[test]
fn decimal_expansion_stops_at_ambiguity() {
    // 0.7 stands for [0.65, 0.75], which meets [1, 1, ...] and [1, 2, ...].
    match cf::expand_decimal("0.7", 20) {
        Err(cfdim::Error::BoundaryAmbiguity { determined }) => assert_eq!(determined, vec![1]),
        other => panic!("{other:?}"),
    }
    let pi = cf::expand_decimal("0.14159265358979323846", 5).unwrap();
    assert_eq!(pi.digits(), &[7, 15, 1, 292, 1]);
}

#[test]
fn empty_word_is_unit_interval() {
    assert_eq!(cylinder_length(&[]), Rational::one());
}
