mod common;

use common::{algebra_with_pairs, arc, random_algebra, RandomAlgebra};
use pcoeq::congruence::cg;
use pcoeq::constructions::{product, quotient};
use pcoeq::enumerate::homomorphisms;
use pcoeq::{eval_term, kernel_congruence, FiniteAlgebra, Homomorphism, Term};
use proptest::prelude::*;

/// Random terms over operations with the given arities and `vars`
/// variables.
fn random_term(arities: Vec<usize>, vars: usize) -> BoxedStrategy<Term> {
    let leaf = (0..vars).prop_map(Term::var);
    if arities.is_empty() {
        return leaf.boxed();
    }
    leaf.prop_recursive(3, 24, 3, move |inner| {
        let arities = arities.clone();
        (0..arities.len(), prop::collection::vec(inner, 3))
            .prop_map(move |(s, args)| Term::op(s, args.into_iter().take(arities[s]).collect()))
    })
    .boxed()
}

fn algebra_and_term() -> impl Strategy<Value = (RandomAlgebra, Term)> {
    random_algebra(4, 2, 2).prop_flat_map(|ra| {
        let arities: Vec<usize> = ra.ops.iter().map(|o| o.0).collect();
        (Just(ra), random_term(arities, 2))
    })
}

/// The signature sorts symbols by name, so map term symbols through it.
fn symbols_sorted(alg: &FiniteAlgebra, t: &Term) -> Term {
    match t {
        Term::Var(i) => Term::var(*i),
        Term::Op(s, args) => Term::op(
            alg.signature().index_of(&format!("f{s}")).unwrap(),
            args.iter().map(|a| symbols_sorted(alg, a)).collect(),
        ),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_pairing_is_the_unique_mediator(
        a in random_algebra(2, 1, 2),
        seed in 0usize..4,
    ) {
        let a = arc(a.build());
        // a second algebra of the same signature: `a` itself or `a²`
        let b = if seed % 2 == 0 { a.clone() } else { product(&a, &a).unwrap().algebra };
        let prod = product(&a, &b).unwrap();
        prop_assert!(prod.algebra.size() <= 8);
        Homomorphism::new(prod.algebra.clone(), a.clone(), prod.pi1.map().to_vec()).unwrap();
        Homomorphism::new(prod.algebra.clone(), b.clone(), prod.pi2.map().to_vec()).unwrap();
        let t = if seed < 2 { a.clone() } else { b.clone() };
        let into_prod = homomorphisms(&t, &prod.algebra).unwrap();
        for f in homomorphisms(&t, &a).unwrap() {
            for g in homomorphisms(&t, &b).unwrap() {
                let h = prod.pairing(&f, &g).unwrap();
                let mediators: Vec<_> = into_prod
                    .iter()
                    .filter(|k| k.then(&prod.pi1).unwrap().same_as(&f) && k.then(&prod.pi2).unwrap().same_as(&g))
                    .collect();
                prop_assert_eq!(mediators.len(), 1);
                prop_assert!(mediators[0].same_as(&h));
            }
        }
    }

    #[test]
    fn subalgebra_generation_is_idempotent_and_monotone(
        ra in random_algebra(5, 2, 2),
        seed in prop::collection::vec(0usize..5, 0..4),
        extra in 0usize..5,
    ) {
        let alg = ra.build();
        let seed: Vec<_> = seed.into_iter().filter(|&e| e < alg.size()).collect();
        let sub = alg.subalgebra_generated(&seed);
        prop_assert_eq!(alg.subalgebra_generated(&sub), sub.clone());
        let mut bigger = seed.clone();
        bigger.push(extra % alg.size());
        let sup = alg.subalgebra_generated(&bigger);
        prop_assert!(sub.iter().all(|e| sup.contains(e)));
    }

    #[test]
    fn quotient_then_kernel_recovers_the_congruence((ra, pairs) in algebra_with_pairs(5, 2, 2, 3)) {
        let alg = arc(ra.build());
        let theta = cg(&alg, &pairs).unwrap();
        let q = quotient(&theta).unwrap();
        let kernel = kernel_congruence(&q.q);
        prop_assert_eq!(kernel.partition(), theta.partition());
    }

    #[test]
    fn evaluation_commutes_with_homomorphisms(
        (ra, t) in algebra_and_term(),
        pairs in prop::collection::vec((0usize..4, 0usize..4), 0..3),
        env in prop::collection::vec(0usize..4, 2),
    ) {
        let alg = arc(ra.build());
        let n = alg.size();
        let t = symbols_sorted(&alg, &t);
        let env: Vec<_> = env.into_iter().map(|e| e % n).collect();
        prop_assert_eq!(eval_term(&alg, &Term::var(1), &env).unwrap(), env[1]);
        let pairs: Vec<_> = pairs.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let q = quotient(&cg(&alg, &pairs).unwrap()).unwrap();
        let image: Vec<_> = env.iter().map(|&e| q.q.apply(e)).collect();
        prop_assert_eq!(
            q.q.apply(eval_term(&alg, &t, &env).unwrap()),
            eval_term(&q.algebra, &t, &image).unwrap()
        );
        for h in homomorphisms(&alg, &alg).unwrap() {
            let image: Vec<_> = env.iter().map(|&e| h.apply(e)).collect();
            prop_assert_eq!(h.apply(eval_term(&alg, &t, &env).unwrap()), eval_term(&alg, &t, &image).unwrap());
        }
    }
}
