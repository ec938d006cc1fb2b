#![allow(dead_code)]

use std::sync::Arc;

use pcoeq::congruence::all_congruences;
use pcoeq::constructions::{product, quotient};
use pcoeq::fixtures;
use pcoeq::{Element, FiniteAlgebra, Partition, Symbol};
use proptest::prelude::*;

pub fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
    Arc::new(a)
}

/// Shape of a random algebra: carrier size and `(arity, table)` per
/// operation.
#[derive(Debug, Clone)]
pub struct RandomAlgebra {
    pub size: usize,
    pub ops: Vec<(usize, Vec<usize>)>,
}

impl RandomAlgebra {
    pub fn build(&self) -> FiniteAlgebra {
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(i, (arity, table))| (Symbol::new(format!("f{i}"), *arity), table.clone()))
            .collect();
        FiniteAlgebra::new("R", self.size, ops).expect("random algebra")
    }
}

/// Algebras with `1..=max_size` elements and up to `max_ops` operations of
/// arity at most `max_arity`.
pub fn random_algebra(
    max_size: usize,
    max_ops: usize,
    max_arity: usize,
) -> impl Strategy<Value = RandomAlgebra> {
    (
        1..=max_size,
        prop::collection::vec(0..=max_arity, 0..=max_ops),
    )
        .prop_flat_map(|(n, arities)| {
            let tables: Vec<_> = arities
                .iter()
                .map(|&k| prop::collection::vec(0..n, n.pow(k as u32)))
                .collect();
            (Just(n), Just(arities), tables).prop_map(|(n, arities, tables)| RandomAlgebra {
                size: n,
                ops: arities.into_iter().zip(tables).collect(),
            })
        })
}

/// Random algebra together with up to `max_pairs` element pairs.
pub fn algebra_with_pairs(
    max_size: usize,
    max_ops: usize,
    max_arity: usize,
    max_pairs: usize,
) -> impl Strategy<Value = (RandomAlgebra, Vec<(Element, Element)>)> {
    random_algebra(max_size, max_ops, max_arity).prop_flat_map(move |ra| {
        let n = ra.size;
        (Just(ra), prop::collection::vec((0..n, 0..n), 0..=max_pairs))
    })
}

/// Least congruence containing `pairs`, computed on a boolean relation
/// matrix by repeating reflexive, symmetric, operation and transitive
/// closure until nothing changes.
#[allow(clippy::needless_range_loop)]
pub fn naive_congruence(alg: &FiniteAlgebra, pairs: &[(Element, Element)]) -> Partition {
    let n = alg.size();
    let mut rel = vec![vec![false; n]; n];
    for &(a, b) in pairs {
        rel[a][b] = true;
    }
    loop {
        let before = rel.clone();
        for (a, row) in rel.iter_mut().enumerate() {
            row[a] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if rel[a][b] {
                    rel[b][a] = true;
                }
            }
        }
        let sig = alg.signature();
        for sym in 0..sig.len() {
            let k = sig.arity(sym);
            let tuples = n.pow(k as u32);
            for s in 0..tuples {
                for t in 0..tuples {
                    let (xs, ys) = (decode(s, n, k), decode(t, n, k));
                    if xs.iter().zip(&ys).all(|(&x, &y)| rel[x][y]) {
                        rel[alg.apply(sym, &xs)][alg.apply(sym, &ys)] = true;
                    }
                }
            }
        }
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if rel[a][m] && rel[m][b] {
                        rel[a][b] = true;
                    }
                }
            }
        }
        if rel == before {
            break;
        }
    }
    Partition::from_keys((0..n).map(|a| rel[a].clone()))
}

pub fn decode(mut flat: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    out
}

/// The trivial algebra, Z2 and Z2², plus every quotient of Z2² (each
/// isomorphic to one of the first three).
pub fn z2_family(with_quotients: bool) -> Vec<Arc<FiniteAlgebra>> {
    let z2 = arc(fixtures::z2());
    let one = arc(fixtures::trivial(z2.signature()));
    let sq = product(&z2, &z2).unwrap().algebra;
    let mut out = vec![one, z2, sq.clone()];
    if with_quotients {
        for theta in all_congruences(&sq, 12).unwrap() {
            out.push(quotient(&theta).unwrap().algebra);
        }
    }
    out
}

/// `1`, `Y`, `X` and the subalgebra `{0, a}` of `X`.
pub fn subtraction_family() -> Vec<Arc<FiniteAlgebra>> {
    let x = fixtures::subtraction_x();
    let s = x.restrict("S", &[0, 1]).unwrap();
    let y = fixtures::subtraction_y();
    vec![
        arc(fixtures::trivial(x.signature())),
        arc(y),
        arc(x),
        arc(s),
    ]
}

/// Every built-in fixture.
pub fn builtins() -> Vec<Arc<FiniteAlgebra>> {
    fixtures::BUILTIN_NAMES
        .iter()
        .map(|n| arc(fixtures::builtin(n).unwrap()))
        .collect()
}
