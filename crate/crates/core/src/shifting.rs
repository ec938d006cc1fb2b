//! Rectangle-completion checks on congruences: the egg-box condition on
//! products, Gumm's shifting lemma and its weak form, and the egg-box
//! condition on pullbacks.
//!
//! Congruences stand in for effective equivalence relations, as every
//! congruence of an algebra is the kernel of its quotient map. Elements
//! stand in for generalized elements.

use serde::Serialize;

use crate::algebra::Element;
use crate::congruence::Congruence;
use crate::constructions::{same_algebra, Product, PullbackAlgebra};
use crate::error::{Error, Result};
use crate::Outcome;

/// `(x,0) C (y,0)` holds but `(x,z) C (y,z)` does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EggBoxViolation {
    pub x: Element,
    pub y: Element,
    pub z: Element,
}

fn on_algebra(c: &Congruence, alg: &std::sync::Arc<crate::FiniteAlgebra>) -> Result<()> {
    if same_algebra(c.algebra(), alg) {
        Ok(())
    } else {
        Err(Error::InvalidPair(format!(
            "congruence lives on `{}`, expected `{}`",
            c.algebra().name(),
            alg.name()
        )))
    }
}

/// For all `x, y ∈ A`, `z ∈ B`: `(x,0) C (y,0)` implies `(x,z) C (y,z)`.
/// Reports the lexicographically least violating `(x, y, z)`.
pub fn egg_box_check(prod: &Product, c: &Congruence) -> Result<Outcome<EggBoxViolation>> {
    on_algebra(c, &prod.algebra)?;
    prod.left.require_zero()?;
    let zero = prod.right.require_zero()?;
    let (na, nb) = (prod.left.size(), prod.right.size());
    for x in 0..na {
        for y in 0..na {
            if x == y || !c.related(prod.pair(x, zero), prod.pair(y, zero)) {
                continue;
            }
            for z in 0..nb {
                if !c.related(prod.pair(x, z), prod.pair(y, z)) {
                    return Ok(Outcome::Fails(EggBoxViolation { x, y, z }));
                }
            }
        }
    }
    Ok(Outcome::Holds)
}

/// Elements in the shifting-lemma square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftingViolation {
    pub x: Element,
    pub y: Element,
    pub z: Element,
    pub w: Element,
}

/// Shifting lemma for congruences `R, S, T` on one algebra with
/// `R ∩ S ≤ T`: if `x R y`, `w R z`, `y S z`, `x S w` and `y T z`, then
/// `x T w`. Returns `None` when `R ∩ S ≤ T` fails (not applicable).
pub fn shifting_lemma_check(
    r: &Congruence,
    s: &Congruence,
    t: &Congruence,
) -> Result<Option<Outcome<ShiftingViolation>>> {
    on_algebra(s, r.algebra())?;
    on_algebra(t, r.algebra())?;
    if !r.meet(s).leq(t) {
        return Ok(None);
    }
    let n = r.algebra().size();
    let r_blocks = r.partition().blocks();
    let s_blocks = s.partition().blocks();
    let block_of = |blocks: &Vec<Vec<Element>>, c: &Congruence, e: Element| {
        blocks
            .iter()
            .position(|b| b[0] == c.partition().rep(e))
            .expect("representative has a block")
    };
    for x in 0..n {
        let rx = &r_blocks[block_of(&r_blocks, r, x)];
        let sx = &s_blocks[block_of(&s_blocks, s, x)];
        for &y in rx {
            for &w in sx {
                if t.related(x, w) {
                    continue;
                }
                for z in 0..n {
                    if r.related(w, z) && s.related(y, z) && t.related(y, z) {
                        return Ok(Some(Outcome::Fails(ShiftingViolation { x, y, z, w })));
                    }
                }
            }
        }
    }
    Ok(Some(Outcome::Holds))
}

/// Corners `(a,b), (a,c), (d,e), (d,f)` of a weak-shifting square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeakShiftingViolation {
    pub a: Element,
    pub b: Element,
    pub c: Element,
    pub d: Element,
    pub e: Element,
    pub f: Element,
}

/// Weak shifting on `A × B` for congruences `R, S` with `Eq(π1) ∩ R ≤ S`:
/// if `(a,c) R (d,f)`, `(a,c) S (d,f)` and `(a,b) R (d,e)`, then
/// `(a,b) S (d,e)`. Returns `None` when not applicable.
pub fn weak_shifting_check(
    prod: &Product,
    r: &Congruence,
    s: &Congruence,
) -> Result<Option<Outcome<WeakShiftingViolation>>> {
    on_algebra(r, &prod.algebra)?;
    on_algebra(s, &prod.algebra)?;
    let eq_pi1 = crate::hom::kernel_congruence(&prod.pi1);
    if !eq_pi1.meet(r).leq(s) {
        return Ok(None);
    }
    let (na, nb) = (prod.left.size(), prod.right.size());
    let p = |x, y| prod.pair(x, y);
    for a in 0..na {
        for d in 0..na {
            for b in 0..nb {
                for e in 0..nb {
                    if !r.related(p(a, b), p(d, e)) || s.related(p(a, b), p(d, e)) {
                        continue;
                    }
                    for c in 0..nb {
                        for f in 0..nb {
                            if r.related(p(a, c), p(d, f)) && s.related(p(a, c), p(d, f)) {
                                return Ok(Some(Outcome::Fails(WeakShiftingViolation {
                                    a,
                                    b,
                                    c,
                                    d,
                                    e,
                                    f,
                                })));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Some(Outcome::Holds))
}

/// `(x,u) C (y,u)` holds in the pullback but `(x,v) C (y,v)` does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalEggBoxViolation {
    pub x: Element,
    pub y: Element,
    pub u: Element,
    pub v: Element,
}

/// For all `(x,u), (y,u), (x,v), (y,v)` in the pullback:
/// `(x,u) C (y,u)` implies `(x,v) C (y,v)`. Coordinates in the witness
/// are elements of the two factors.
pub fn local_egg_box_check(
    pb: &PullbackAlgebra,
    c: &Congruence,
) -> Result<Outcome<LocalEggBoxViolation>> {
    on_algebra(c, &pb.algebra)?;
    let (na, nb) = (pb.p1.target().size(), pb.p2.target().size());
    for x in 0..na {
        for y in 0..na {
            if x == y {
                continue;
            }
            for u in 0..nb {
                let (Some(xu), Some(yu)) = (pb.index_of(x, u), pb.index_of(y, u)) else {
                    continue;
                };
                if !c.related(xu, yu) {
                    continue;
                }
                for v in 0..nb {
                    if let (Some(xv), Some(yv)) = (pb.index_of(x, v), pb.index_of(y, v)) {
                        if !c.related(xv, yv) {
                            return Ok(Outcome::Fails(LocalEggBoxViolation { x, y, u, v }));
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::Holds)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::congruence::{all_congruences, cg};
    use crate::constructions::{product, pullback};
    use crate::fixtures;
    use crate::hom::Homomorphism;
    use crate::FiniteAlgebra;

    fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
        Arc::new(a)
    }

    #[test]
    fn diagonal_passes_egg_box() {
        let z2 = arc(fixtures::z2());
        let p = product(&z2, &z2).unwrap();
        let d = Congruence::diagonal(p.algebra.clone());
        assert!(egg_box_check(&p, &d).unwrap().holds());
    }

    #[test]
    fn z2_squared_every_congruence_egg_box() {
        let z2 = arc(fixtures::z2());
        let p = product(&z2, &z2).unwrap();
        for c in all_congruences(&p.algebra, 12).unwrap() {
            assert!(egg_box_check(&p, &c).unwrap().holds());
        }
    }

    #[test]
    fn subtraction_egg_box_on_generated_congruences() {
        let x = arc(fixtures::subtraction_x());
        let y = arc(fixtures::subtraction_y());
        let p = product(&x, &y).unwrap();
        let (a, b, c) = (1, 2, 1);
        // Cg((a,0),(0,0)) relates everything: b - a = 0 but b - 0 = b.
        let ca0 = cg(&p.algebra, &[(p.pair(a, 0), p.pair(0, 0))]).unwrap();
        assert!(ca0.related(p.pair(a, c), p.pair(0, c)));
        assert!(egg_box_check(&p, &ca0).unwrap().holds());
        // Cg((a,0),(b,0)) is the one that breaks the rectangle.
        let cab = cg(&p.algebra, &[(p.pair(a, 0), p.pair(b, 0))]).unwrap();
        assert_eq!(
            egg_box_check(&p, &cab).unwrap(),
            Outcome::Fails(EggBoxViolation { x: a, y: b, z: c })
        );
    }

    #[test]
    fn egg_box_needs_pointed() {
        let s = arc(fixtures::set2());
        let p = product(&s, &s).unwrap();
        let d = Congruence::diagonal(p.algebra.clone());
        assert!(matches!(egg_box_check(&p, &d), Err(Error::NotPointed(_))));
    }

    #[test]
    fn shifting_total_t_holds() {
        let l = arc(fixtures::lattice2(false));
        let all = all_congruences(&l, 12).unwrap();
        let t = Congruence::total(l.clone());
        for r in &all {
            for s in &all {
                assert_eq!(
                    shifting_lemma_check(r, s, &t).unwrap(),
                    Some(Outcome::Holds)
                );
            }
        }
    }

    #[test]
    fn shifting_on_lattice_reducts() {
        // Products and powers of the two-element lattice up to size 4.
        let l = arc(fixtures::lattice2(false));
        let sq = product(&l, &l).unwrap();
        for alg in [l.clone(), sq.algebra.clone()] {
            let all = all_congruences(&alg, 12).unwrap();
            for r in &all {
                for s in &all {
                    for t in &all {
                        if let Some(o) = shifting_lemma_check(r, s, t).unwrap() {
                            assert!(o.holds());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shifting_fails_for_pointed_sets() {
        let p2 = arc(fixtures::pointed_set2());
        let sq = product(&p2, &p2).unwrap();
        let all = all_congruences(&sq.algebra, 12).unwrap();
        // every partition of a 4-element pointed set is a congruence
        assert_eq!(all.len(), 15);
        let mut found = None;
        'outer: for r in &all {
            for s in &all {
                for t in &all {
                    if let Some(Outcome::Fails(w)) = shifting_lemma_check(r, s, t).unwrap() {
                        found = Some(w);
                        break 'outer;
                    }
                }
            }
        }
        let w = found.expect("pointed sets are not congruence modular");
        assert!(w.x != w.w);
    }

    #[test]
    fn weak_shifting() {
        let z2 = arc(fixtures::z2());
        let p = product(&z2, &z2).unwrap();
        let all = all_congruences(&p.algebra, 12).unwrap();
        let d = Congruence::diagonal(p.algebra.clone());
        for s in &all {
            assert_eq!(
                weak_shifting_check(&p, &d, s).unwrap(),
                Some(Outcome::Holds)
            );
        }
        for r in &all {
            for s in &all {
                if let Some(o) = weak_shifting_check(&p, r, s).unwrap() {
                    assert!(o.holds());
                }
            }
        }
        // Pointed sets: the 2×2 product has violations.
        let p2 = arc(fixtures::pointed_set2());
        let pp = product(&p2, &p2).unwrap();
        let all = all_congruences(&pp.algebra, 12).unwrap();
        let violations = all
            .iter()
            .flat_map(|r| all.iter().map(move |s| (r, s)))
            .filter(|(r, s)| {
                matches!(
                    weak_shifting_check(&pp, r, s).unwrap(),
                    Some(Outcome::Fails(_))
                )
            })
            .count();
        assert!(violations > 0);
    }

    #[test]
    fn local_egg_box() {
        let z2 = arc(fixtures::z2());
        let id = Homomorphism::identity(z2.clone());
        let pb = pullback(&id, &id).unwrap();
        let d = Congruence::diagonal(pb.algebra.clone());
        assert!(local_egg_box_check(&pb, &d).unwrap().holds());
        // Pullback of Z2² -> Z2 (first projection) along itself, 8 elements.
        let sq = product(&z2, &z2).unwrap();
        let pb = pullback(&sq.pi1, &sq.pi1).unwrap();
        assert_eq!(pb.algebra.size(), 8);
        for c in all_congruences(&pb.algebra, 12).unwrap() {
            assert!(local_egg_box_check(&pb, &c).unwrap().holds());
        }
        // Sets: the kernel-pair of a surjection fails it.
        let s = arc(fixtures::set2());
        let ss = product(&s, &s).unwrap();
        let one = arc(fixtures::trivial(s.signature()));
        let bang = Homomorphism::new(ss.algebra.clone(), one.clone(), vec![0; 4]).unwrap();
        let pb = pullback(&bang, &bang).unwrap();
        let gen = cg(
            &pb.algebra,
            &[(pb.index_of(0, 0).unwrap(), pb.index_of(1, 0).unwrap())],
        )
        .unwrap();
        assert!(!local_egg_box_check(&pb, &gen).unwrap().holds());
    }
}
