//! Products, pullbacks, and quotients.

use std::sync::Arc;

use crate::algebra::{Element, FiniteAlgebra, MAX_ARITY};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;

pub(crate) fn same_algebra(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `A × B` with its projections. The pair `(a, b)` sits at `a·|B| + b`.
#[derive(Debug, Clone)]
pub struct Product {
    pub algebra: Arc<FiniteAlgebra>,
    pub pi1: Homomorphism,
    pub pi2: Homomorphism,
    pub left: Arc<FiniteAlgebra>,
    pub right: Arc<FiniteAlgebra>,
}

impl Product {
    #[inline]
    pub fn pair(&self, a: Element, b: Element) -> Element {
        a * self.right.size() + b
    }

    #[inline]
    pub fn split(&self, e: Element) -> (Element, Element) {
        (e / self.right.size(), e % self.right.size())
    }

    /// The mediating map `⟨f, g⟩ : C -> A × B`.
    pub fn pairing(&self, f: &Homomorphism, g: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(f.source(), g.source())
            || !same_algebra(f.target(), &self.left)
            || !same_algebra(g.target(), &self.right)
        {
            return Err(Error::InvalidPair(
                "pairing needs maps C -> A and C -> B".into(),
            ));
        }
        let map = (0..f.source().size())
            .map(|c| self.pair(f.apply(c), g.apply(c)))
            .collect();
        Ok(Homomorphism::trusted(
            f.source().clone(),
            self.algebra.clone(),
            map,
        ))
    }
}

fn pair_label(a: &FiniteAlgebra, b: &FiniteAlgebra, x: Element, y: Element) -> String {
    format!("({},{})", a.label(x), b.label(y))
}

pub fn product(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Product> {
    a.same_signature(b)?;
    let (na, nb) = (a.size(), b.size());
    let size = na
        .checked_mul(nb)
        .filter(|&s| s <= crate::algebra::MAX_SIZE)
        .ok_or_else(|| Error::CapExceeded {
            what: format!("product {}×{}", a.name(), b.name()),
            cap: crate::algebra::MAX_SIZE,
            bound: format!("{na}·{nb}"),
        })?;
    let mut la = [0usize; MAX_ARITY];
    let mut lb = [0usize; MAX_ARITY];
    let alg = FiniteAlgebra::from_fn(
        format!("{}×{}", a.name(), b.name()),
        size,
        a.signature(),
        |sym, args| {
            for (i, &e) in args.iter().enumerate() {
                la[i] = e / nb;
                lb[i] = e % nb;
            }
            let k = args.len();
            a.apply(sym, &la[..k]) * nb + b.apply(sym, &lb[..k])
        },
    )?;
    let labels = (0..size)
        .map(|e| pair_label(a, b, e / nb, e % nb))
        .collect();
    let alg = Arc::new(alg.with_labels(labels)?);
    let pi1 = Homomorphism::trusted(alg.clone(), a.clone(), (0..size).map(|e| e / nb).collect());
    let pi2 = Homomorphism::trusted(alg.clone(), b.clone(), (0..size).map(|e| e % nb).collect());
    Ok(Product {
        algebra: alg,
        pi1,
        pi2,
        left: a.clone(),
        right: b.clone(),
    })
}

/// `f × g : A × B -> A' × B'` between two given products.
pub fn product_map(
    f: &Homomorphism,
    g: &Homomorphism,
    source: &Product,
    target: &Product,
) -> Result<Homomorphism> {
    if !same_algebra(f.source(), &source.left)
        || !same_algebra(g.source(), &source.right)
        || !same_algebra(f.target(), &target.left)
        || !same_algebra(g.target(), &target.right)
    {
        return Err(Error::InvalidPair(
            "product map between mismatched products".into(),
        ));
    }
    let map = (0..source.algebra.size())
        .map(|e| {
            let (x, y) = source.split(e);
            target.pair(f.apply(x), g.apply(y))
        })
        .collect();
    Ok(Homomorphism::trusted(
        source.algebra.clone(),
        target.algebra.clone(),
        map,
    ))
}

/// `A ×_X B = {(a, b) | f(a) = g(b)}` with its projections.
#[derive(Debug, Clone)]
pub struct PullbackAlgebra {
    pub algebra: Arc<FiniteAlgebra>,
    pub left: Homomorphism,
    pub right: Homomorphism,
    pub p1: Homomorphism,
    pub p2: Homomorphism,
    /// Carrier in lexicographic order of pairs.
    pub pairs: Vec<(Element, Element)>,
    index: Vec<u32>,
}

impl PullbackAlgebra {
    /// Index of `(a, b)` if the pair lies in the pullback.
    pub fn index_of(&self, a: Element, b: Element) -> Option<Element> {
        let i = self.index[a * self.right.source().size() + b];
        (i != u32::MAX).then_some(i as Element)
    }

    pub fn pair(&self, e: Element) -> (Element, Element) {
        self.pairs[e]
    }

    /// The mediating map `⟨h, k⟩ : C -> A ×_X B`, provided `f∘h = g∘k`.
    pub fn pairing(&self, h: &Homomorphism, k: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(h.source(), k.source()) {
            return Err(Error::InvalidPair("pairing needs a common source".into()));
        }
        let map = (0..h.source().size())
            .map(|c| {
                self.index_of(h.apply(c), k.apply(c)).ok_or_else(|| {
                    Error::InvalidPair(
                        "pairing leaves the pullback (square does not commute)".into(),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism::trusted(
            h.source().clone(),
            self.algebra.clone(),
            map,
        ))
    }
}

pub fn pullback(f: &Homomorphism, g: &Homomorphism) -> Result<PullbackAlgebra> {
    if !same_algebra(f.target(), g.target()) {
        return Err(Error::InvalidPair(
            "pullback needs a common codomain".into(),
        ));
    }
    let (a, b) = (f.source(), g.source());
    a.same_signature(b)?;
    let (na, nb) = (a.size(), b.size());
    let mut pairs = Vec::new();
    let mut index = vec![u32::MAX; na * nb];
    for x in 0..na {
        for y in 0..nb {
            if f.apply(x) == g.apply(y) {
                index[x * nb + y] = pairs.len() as u32;
                pairs.push((x, y));
            }
        }
    }
    if pairs.is_empty() {
        // Constants always land in the pullback; an empty one only arises
        // without constants, and carriers must be non-empty.
        return Err(Error::EmptyPullback);
    }
    let mut la = [0usize; MAX_ARITY];
    let mut lb = [0usize; MAX_ARITY];
    let alg = FiniteAlgebra::from_fn(
        format!("{}×_{}{}", a.name(), f.target().name(), b.name()),
        pairs.len(),
        a.signature(),
        |sym, args| {
            for (i, &e) in args.iter().enumerate() {
                la[i] = pairs[e].0;
                lb[i] = pairs[e].1;
            }
            let k = args.len();
            let (x, y) = (a.apply(sym, &la[..k]), b.apply(sym, &lb[..k]));
            index[x * nb + y] as usize
        },
    )?;
    let labels = pairs.iter().map(|&(x, y)| pair_label(a, b, x, y)).collect();
    let alg = Arc::new(alg.with_labels(labels)?);
    let p1 = Homomorphism::trusted(alg.clone(), a.clone(), pairs.iter().map(|p| p.0).collect());
    let p2 = Homomorphism::trusted(alg.clone(), b.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(PullbackAlgebra {
        algebra: alg,
        left: f.clone(),
        right: g.clone(),
        p1,
        p2,
        pairs,
        index,
    })
}

/// `A/θ` with its quotient map. Classes are indexed in order of their
/// least element and labelled `[r]` by that representative.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: Arc<FiniteAlgebra>,
    pub q: Homomorphism,
}

pub fn quotient(theta: &Congruence) -> Result<Quotient> {
    let a = theta.algebra();
    let p = theta.partition();
    let reps: Vec<Element> = (0..a.size()).filter(|&e| p.rep(e) == e).collect();
    let mut class = vec![0usize; a.size()];
    for (i, &r) in reps.iter().enumerate() {
        class[r] = i;
    }
    let class: Vec<Element> = (0..a.size()).map(|e| class[p.rep(e)]).collect();
    let mut lifted = [0usize; MAX_ARITY];
    let alg = FiniteAlgebra::from_fn(
        format!("{}/θ", a.name()),
        reps.len(),
        a.signature(),
        |sym, args| {
            for (i, &c) in args.iter().enumerate() {
                lifted[i] = reps[c];
            }
            class[a.apply(sym, &lifted[..args.len()])]
        },
    )?;
    let labels = reps.iter().map(|&r| format!("[{}]", a.label(r))).collect();
    let alg = Arc::new(alg.with_labels(labels)?);
    let q = Homomorphism::new(a.clone(), alg.clone(), class)?;
    Ok(Quotient { algebra: alg, q })
}

/// The subalgebra on a closed subset together with its inclusion.
pub fn subalgebra(
    a: &Arc<FiniteAlgebra>,
    name: impl Into<String>,
    elements: &[Element],
) -> Result<(Arc<FiniteAlgebra>, Homomorphism)> {
    let sub = Arc::new(a.restrict(name, elements)?);
    let inc = Homomorphism::new(sub.clone(), a.clone(), elements.to_vec())?;
    Ok((sub, inc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{cg, Congruence};
    use crate::fixtures;
    use crate::hom::kernel_congruence;
    use crate::partition::Partition;

    fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
        Arc::new(a)
    }

    #[test]
    fn product_of_subtraction_algebras() {
        let p = product(
            &arc(fixtures::subtraction_x()),
            &arc(fixtures::subtraction_y()),
        )
        .unwrap();
        assert_eq!(p.algebra.size(), 6);
        assert_eq!(p.algebra.label(p.pair(1, 1)), "(a,c)");
        // π1 fibres: 3 blocks of size 2
        let k = kernel_congruence(&p.pi1);
        assert_eq!(k.blocks().len(), 3);
        assert!(k.blocks().iter().all(|b| b.len() == 2));
    }

    #[test]
    fn product_with_trivial_is_iso() {
        let z2 = arc(fixtures::z2());
        let one = arc(fixtures::trivial(z2.signature()));
        let p = product(&z2, &one).unwrap();
        assert_eq!(p.algebra.size(), 2);
        assert_eq!(p.algebra.table(0), z2.table(0));
        assert_eq!(p.algebra.table(1), z2.table(1));
    }

    #[test]
    fn klein_four() {
        let z2 = arc(fixtures::z2());
        let p = product(&z2, &z2).unwrap();
        let plus = z2.signature().index_of("+").unwrap();
        // brute-force table of (a,b)+(c,d) = (a^c, b^d)
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        assert_eq!(
                            p.algebra.apply(plus, &[p.pair(a, b), p.pair(c, d)]),
                            p.pair(a ^ c, b ^ d)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn signature_mismatch() {
        assert!(matches!(
            product(&arc(fixtures::z2()), &arc(fixtures::set2())),
            Err(Error::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn quotient_examples() {
        let x = arc(fixtures::subtraction_x());
        let d = Congruence::diagonal(x.clone());
        let q = quotient(&d).unwrap();
        assert_eq!(q.algebra.size(), 3);
        assert!(q.q.is_injective());
        let theta =
            Congruence::new(x.clone(), Partition::from_blocks(3, &[vec![1, 2]]).unwrap()).unwrap();
        let q = quotient(&theta).unwrap();
        assert_eq!(q.algebra.size(), 2);
        assert_eq!(kernel_congruence(&q.q), theta);
        // quotient(Z2², Cg((0,0),(1,0))) has two elements
        let z2 = arc(fixtures::z2());
        let sq = product(&z2, &z2).unwrap();
        let c = cg(&sq.algebra, &[(sq.pair(0, 0), sq.pair(1, 0))]).unwrap();
        assert_eq!(quotient(&c).unwrap().algebra.size(), 2);
    }

    #[test]
    fn pullbacks() {
        let z2 = arc(fixtures::z2());
        let id = Homomorphism::identity(z2.clone());
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.pairs, vec![(0, 0), (1, 1)]);
        // X -> Y quotient pulled back along itself: {0} and {a, b} fibres.
        let x = arc(fixtures::subtraction_x());
        let y = arc(fixtures::subtraction_y());
        let q = Homomorphism::new(x.clone(), y.clone(), vec![0, 1, 1]).unwrap();
        let pb = pullback(&q, &q).unwrap();
        assert_eq!(pb.algebra.size(), 5);
        let pb = pullback(&q, &Homomorphism::identity(y)).unwrap();
        assert_eq!(pb.algebra.size(), 3);
        assert!(pb.p1.is_injective() && pb.p1.is_surjective());
    }

    #[test]
    fn empty_pullback_without_constants() {
        let s = arc(fixtures::set2());
        let f = Homomorphism::new(s.clone(), s.clone(), vec![0, 0]).unwrap();
        let g = Homomorphism::new(s.clone(), s, vec![1, 1]).unwrap();
        assert_eq!(pullback(&f, &g).unwrap_err(), Error::EmptyPullback);
    }
}
