//! Exhaustive enumeration of homomorphisms between small algebras.
//!
//! A homomorphism is fixed by its values on a generating set, so only
//! `|B|^g` candidate maps are tried, with `g` the size of a greedy
//! generating set of the source.

use std::sync::Arc;

use crate::algebra::{Element, FiniteAlgebra};
use crate::error::Result;
use crate::hom::Homomorphism;

/// A generating set picked greedily in index order.
pub fn generating_set(alg: &FiniteAlgebra) -> Vec<Element> {
    let mut gens = Vec::new();
    let mut covered = vec![false; alg.size()];
    for e in alg.subalgebra_generated(&[]) {
        covered[e] = true;
    }
    for e in 0..alg.size() {
        if !covered[e] {
            gens.push(e);
            covered.iter_mut().for_each(|c| *c = false);
            for x in alg.subalgebra_generated(&gens) {
                covered[x] = true;
            }
        }
    }
    gens
}

/// Every homomorphism `source -> target`, in lexicographic order of the
/// generator images.
pub fn homomorphisms(
    source: &Arc<FiniteAlgebra>,
    target: &Arc<FiniteAlgebra>,
) -> Result<Vec<Homomorphism>> {
    source.same_signature(target)?;
    let gens = generating_set(source);
    let order = source.generate_with_origins(&gens);
    let m = target.size();
    let g = gens.len();
    let mut out = Vec::new();
    let mut choice = vec![0usize; g];
    let mut map = vec![0usize; source.size()];
    let mut scratch = Vec::new();
    'outer: loop {
        let mut next_gen = 0;
        for (e, origin) in &order {
            map[*e] = match origin {
                None => {
                    next_gen += 1;
                    choice[next_gen - 1]
                }
                Some((sym, args)) => {
                    scratch.clear();
                    scratch.extend(args.iter().map(|&a| map[a]));
                    target.apply(*sym, &scratch)
                }
            };
        }
        if let Ok(h) = Homomorphism::new(source.clone(), target.clone(), map.clone()) {
            out.push(h);
        }
        // odometer, last generator fastest
        let mut i = g;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < m {
                break;
            }
            choice[i] = 0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::product;
    use crate::fixtures;

    #[test]
    fn z2_counts() {
        let z2 = Arc::new(fixtures::z2());
        let sq = product(&z2, &z2).unwrap();
        assert_eq!(homomorphisms(&z2, &z2).unwrap().len(), 2);
        assert_eq!(homomorphisms(&sq.algebra, &z2).unwrap().len(), 4);
        assert_eq!(homomorphisms(&sq.algebra, &sq.algebra).unwrap().len(), 16);
        assert_eq!(generating_set(&sq.algebra).len(), 2);
    }

    #[test]
    fn matches_brute_force() {
        // all maps X -> Y checked one by one
        let x = Arc::new(fixtures::subtraction_x());
        let y = Arc::new(fixtures::subtraction_y());
        let mut brute = 0;
        for code in 0..8usize {
            let map = vec![code & 1, (code >> 1) & 1, (code >> 2) & 1];
            if Homomorphism::new(x.clone(), y.clone(), map).is_ok() {
                brute += 1;
            }
        }
        assert_eq!(homomorphisms(&x, &y).unwrap().len(), brute);
    }

    #[test]
    fn sets_give_all_maps() {
        let s = Arc::new(fixtures::set2());
        assert_eq!(homomorphisms(&s, &s).unwrap().len(), 4);
    }
}
