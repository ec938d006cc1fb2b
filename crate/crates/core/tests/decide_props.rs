mod common;

use std::sync::Arc;

use common::{arc, subtraction_family, RandomAlgebra};
use pcoeq::coeq::{check_p_instance, is_normal_epi};
use pcoeq::congruence::all_congruences;
use pcoeq::constructions::{product, quotient};
use pcoeq::decide::{
    concretize_p_failure, decide_local_np, decide_p, verify_local_terms, verify_p_terms,
};
use pcoeq::shifting::egg_box_check;
use pcoeq::{fixtures, Error, FiniteAlgebra, Limits, Symbol};
use proptest::prelude::*;

/// `A`, `A²` and the quotients of `A²`.
fn small_members(a: &Arc<FiniteAlgebra>) -> Vec<Arc<FiniteAlgebra>> {
    let sq = product(a, a).unwrap().algebra;
    let mut out = vec![a.clone(), sq.clone()];
    for theta in all_congruences(&sq, 12).unwrap() {
        let q = quotient(&theta).unwrap().algebra;
        if q.size() > 1 && q.size() < sq.size() {
            out.push(q);
        }
    }
    out
}

#[test]
fn positive_verdicts_imply_the_egg_box_property() {
    let limits = Limits::default();
    let mut positives = 0;
    for name in fixtures::BUILTIN_NAMES {
        let a = arc(fixtures::builtin(name).unwrap());
        if !a.is_pointed() || !decide_p(&a, &limits).unwrap().holds() {
            continue;
        }
        positives += 1;
        let members = small_members(&a);
        for l in &members {
            for r in &members {
                let prod = product(l, r).unwrap();
                if prod.algebra.size() > 12 {
                    continue;
                }
                for c in all_congruences(&prod.algebra, 12).unwrap() {
                    let out = egg_box_check(&prod, &c).unwrap();
                    assert!(out.holds(), "{name}: {:?}", out.witness());
                }
            }
        }
    }
    assert!(positives >= 3);
}

#[test]
fn negative_verdicts_concretize_to_failing_instances() {
    let limits = Limits::default();
    let mut negatives = 0;
    for name in fixtures::BUILTIN_NAMES {
        let a = arc(fixtures::builtin(name).unwrap());
        if !a.is_pointed() {
            continue;
        }
        let d = decide_p(&a, &limits).unwrap();
        if d.holds() {
            continue;
        }
        negatives += 1;
        let (p1, p2) = concretize_p_failure(&a, &d, &limits).unwrap();
        let out = check_p_instance(&p1, &p2).unwrap();
        let w = out.witness().expect(name);
        assert!(w.in_product_kernel);
    }
    assert_eq!(negatives, 2);
}

/// The subtraction algebra fails the decision while every product
/// projection among small members of its variety is normal.
#[test]
fn subtraction_algebra_has_normal_projections_without_the_property() {
    let limits = Limits::default();
    let x = arc(fixtures::subtraction_x());
    assert!(!decide_p(&x, &limits).unwrap().holds());
    let mut family = subtraction_family();
    family.push(product(&family[1], &family[2]).unwrap().algebra);
    let mut checked = 0;
    for l in &family {
        for r in &family {
            let prod = product(l, r).unwrap();
            if prod.algebra.size() > 36 {
                continue;
            }
            assert!(is_normal_epi(&prod.pi1).unwrap().holds());
            assert!(is_normal_epi(&prod.pi2).unwrap().holds());
            checked += 1;
        }
    }
    assert!(checked >= 16);
}

/// Two-element algebras with a constant `0` and up to two further
/// operations of arity at most two.
fn pointed_pairs() -> impl Strategy<Value = RandomAlgebra> {
    (
        0usize..2,
        prop::collection::vec(
            (1usize..=2).prop_flat_map(|k| (Just(k), prop::collection::vec(0usize..2, 1 << k))),
            0..=2,
        ),
    )
        .prop_map(|(c, ops)| {
            let mut all = vec![(0, vec![c])];
            all.extend(ops);
            RandomAlgebra { size: 2, ops: all }
        })
}

fn build(ra: &RandomAlgebra) -> Arc<FiniteAlgebra> {
    let ops = ra
        .ops
        .iter()
        .enumerate()
        .map(|(i, (k, t))| {
            let name = if *k == 0 {
                "0".to_string()
            } else {
                format!("f{i}")
            };
            (Symbol::new(name, *k), t.clone())
        })
        .collect();
    arc(FiniteAlgebra::new("R", ra.size, ops).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn extracted_global_terms_verify(ra in pointed_pairs()) {
        let a = build(&ra);
        match decide_p(&a, &Limits::default()) {
            Ok(d) => {
                if let Some(w) = &d.witness {
                    prop_assert!(verify_p_terms(&a, w).unwrap().holds());
                } else {
                    prop_assert!(!d.instance.holds());
                }
            }
            Err(Error::NotPointed(_)) => prop_assert!(!a.is_pointed()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn extracted_local_terms_verify(ra in common::random_algebra(2, 2, 2)) {
        let a = arc(ra.build());
        match decide_local_np(&a, &Limits::default()) {
            Ok(d) => {
                if let Some(w) = &d.witness {
                    prop_assert!(verify_local_terms(&a, w).unwrap().holds());
                } else {
                    prop_assert!(!d.instance.holds());
                }
            }
            Err(Error::EmptyPullback) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
