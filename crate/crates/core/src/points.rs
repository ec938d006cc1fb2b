//! Points over a base algebra `X`: split epimorphisms `p : A -> X` with a
//! chosen section `s`. Products of points are pullbacks over `X`, the zero
//! point is `(X, 1, 1)`, and coequalizers are computed on total algebras.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Element, FiniteAlgebra};
use crate::coeq::{coequalizer, KernelComparison, ParallelPair};
use crate::congruence::Congruence;
use crate::constructions::{pullback, same_algebra, PullbackAlgebra};
use crate::enumerate::homomorphisms;
use crate::error::{Error, Result};
use crate::hom::{kernel_congruence, Homomorphism};
use crate::partition::Partition;
use crate::Outcome;

#[derive(Debug, Clone)]
pub struct Point {
    p: Homomorphism,
    s: Homomorphism,
}

impl Point {
    /// Requires `p : A -> X`, `s : X -> A` and `p∘s = 1_X`.
    pub fn new(p: Homomorphism, s: Homomorphism) -> Result<Self> {
        if !same_algebra(p.target(), s.source()) || !same_algebra(p.source(), s.target()) {
            return Err(Error::InvalidPoint(format!(
                "p : {} -> {} and s : {} -> {} do not form a split pair",
                p.source().name(),
                p.target().name(),
                s.source().name(),
                s.target().name()
            )));
        }
        if let Some(x) = (0..p.target().size()).find(|&x| p.apply(s.apply(x)) != x) {
            return Err(Error::InvalidPoint(format!(
                "p(s({})) = {}",
                p.target().label(x),
                p.target().label(p.apply(s.apply(x)))
            )));
        }
        Ok(Point { p, s })
    }

    pub fn total(&self) -> &Arc<FiniteAlgebra> {
        self.p.source()
    }

    pub fn base(&self) -> &Arc<FiniteAlgebra> {
        self.p.target()
    }

    pub fn p(&self) -> &Homomorphism {
        &self.p
    }

    pub fn s(&self) -> &Homomorphism {
        &self.s
    }

    fn same_base(&self, other: &Point) -> Result<()> {
        if same_algebra(self.base(), other.base()) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }
}

/// A homomorphism `f` of totals with `q∘f = p` and `f∘s = t`.
#[derive(Debug, Clone)]
pub struct PointMorphism {
    from: Point,
    to: Point,
    f: Homomorphism,
}

impl PointMorphism {
    pub fn new(from: &Point, to: &Point, f: Homomorphism) -> Result<Self> {
        from.same_base(to)?;
        if !same_algebra(f.source(), from.total()) || !same_algebra(f.target(), to.total()) {
            return Err(Error::InvalidPoint(format!(
                "{} -> {} does not run between the totals {} and {}",
                f.source().name(),
                f.target().name(),
                from.total().name(),
                to.total().name()
            )));
        }
        if let Some(a) =
            (0..from.total().size()).find(|&a| to.p.apply(f.apply(a)) != from.p.apply(a))
        {
            return Err(Error::InvalidPoint(format!(
                "q(f({})) differs from p({})",
                from.total().label(a),
                from.total().label(a)
            )));
        }
        if let Some(x) =
            (0..from.base().size()).find(|&x| f.apply(from.s.apply(x)) != to.s.apply(x))
        {
            return Err(Error::InvalidPoint(format!(
                "f(s({})) differs from t({})",
                from.base().label(x),
                from.base().label(x)
            )));
        }
        Ok(PointMorphism {
            from: from.clone(),
            to: to.clone(),
            f,
        })
    }

    pub fn from(&self) -> &Point {
        &self.from
    }

    pub fn to(&self) -> &Point {
        &self.to
    }

    pub fn hom(&self) -> &Homomorphism {
        &self.f
    }

    pub fn then(&self, next: &PointMorphism) -> Result<PointMorphism> {
        PointMorphism::new(&self.from, &next.to, self.f.then(&next.f)?)
    }
}

/// `(X, 1_X, 1_X)`.
pub fn pt_zero(base: Arc<FiniteAlgebra>) -> Point {
    let id = Homomorphism::identity(base);
    Point {
        p: id.clone(),
        s: id,
    }
}

/// The zero morphism `t∘p` from `(A, p, s)` to `(B, q, t)`.
pub fn pt_zero_morphism(from: &Point, to: &Point) -> Result<PointMorphism> {
    from.same_base(to)?;
    PointMorphism::new(from, to, from.p.then(&to.s)?)
}

/// Every point morphism between two points (exhaustive).
pub fn point_morphisms(from: &Point, to: &Point) -> Result<Vec<PointMorphism>> {
    from.same_base(to)?;
    Ok(homomorphisms(from.total(), to.total())?
        .into_iter()
        .filter_map(|f| PointMorphism::new(from, to, f).ok())
        .collect())
}

#[derive(Debug, Clone)]
pub struct PtProduct {
    /// `(A ×_X B, d, ⟨s, t⟩)` with `d = p∘π1 = q∘π2`.
    pub point: Point,
    pub pi1: PointMorphism,
    pub pi2: PointMorphism,
    pub pullback: PullbackAlgebra,
}

impl PtProduct {
    /// The mediating morphism `⟨f1, f2⟩`.
    pub fn pairing(&self, f1: &PointMorphism, f2: &PointMorphism) -> Result<PointMorphism> {
        let h = self.pullback.pairing(f1.hom(), f2.hom())?;
        PointMorphism::new(f1.from(), &self.point, h)
    }
}

pub fn pt_product(p1: &Point, p2: &Point) -> Result<PtProduct> {
    p1.same_base(p2)?;
    let pb = pullback(&p1.p, &p2.p)?;
    let d = pb.p1.then(&p1.p)?;
    let section = pb.pairing(&p1.s, &p2.s)?;
    let point = Point::new(d, section)?;
    let pi1 = PointMorphism::new(&point, p1, pb.p1.clone())?;
    let pi2 = PointMorphism::new(&point, p2, pb.p2.clone())?;
    Ok(PtProduct {
        point,
        pi1,
        pi2,
        pullback: pb,
    })
}

/// A pair of point morphisms into the factors with the wrong number of
/// mediating morphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PtProductViolation {
    pub test_point: String,
    pub f1: Vec<Element>,
    pub f2: Vec<Element>,
    pub mediating: usize,
}

/// Checks the product's universal property against every pair of point
/// morphisms out of each test point. Test points with totals larger than
/// `max_size` are refused.
pub fn pt_product_universal_check(
    prod: &PtProduct,
    tests: &[Point],
    max_size: usize,
) -> Result<Outcome<PtProductViolation>> {
    if let Some(t) = tests.iter().find(|t| t.total().size() > max_size) {
        return Err(Error::CapExceeded {
            what: format!("point-morphism enumeration from `{}`", t.total().name()),
            cap: max_size,
            bound: t.total().size().to_string(),
        });
    }
    let (left, right) = (prod.pi1.to(), prod.pi2.to());
    for t in tests {
        let into_left = point_morphisms(t, left)?;
        let into_right = point_morphisms(t, right)?;
        let into_prod = point_morphisms(t, &prod.point)?;
        for f1 in &into_left {
            for f2 in &into_right {
                let mediating = into_prod
                    .iter()
                    .filter(|g| {
                        (0..t.total().size()).all(|w| {
                            let (a, b) = prod.pullback.pair(g.hom().apply(w));
                            a == f1.hom().apply(w) && b == f2.hom().apply(w)
                        })
                    })
                    .count();
                if mediating != 1 {
                    return Ok(Outcome::Fails(PtProductViolation {
                        test_point: t.total().name().to_string(),
                        f1: f1.hom().map().to_vec(),
                        f2: f2.hom().map().to_vec(),
                        mediating,
                    }));
                }
            }
        }
    }
    Ok(Outcome::Holds)
}

#[derive(Debug, Clone)]
pub struct PtCoequalizer {
    pub point: Point,
    pub q: PointMorphism,
    pub congruence: Congruence,
}

/// The coequalizer of `u, v : (C, r, w) ⇉ (A, p, s)`: the quotient
/// `A/θ` inherits `p` (which is constant on θ-classes because `p∘u = r =
/// p∘v`) and the section `q∘s`.
pub fn pt_coequalizer(u: &PointMorphism, v: &PointMorphism) -> Result<PtCoequalizer> {
    let pair = ParallelPair::new(u.f.clone(), v.f.clone())?;
    let a = &u.to;
    if !same_algebra(v.to.total(), a.total()) || !same_algebra(v.from.total(), u.from.total()) {
        return Err(Error::InvalidPair(
            "point morphisms are not parallel".into(),
        ));
    }
    let co = coequalizer(&pair)?;
    let mut p_map = vec![0; co.quotient.size()];
    for x in 0..a.total().size() {
        p_map[co.q.apply(x)] = a.p.apply(x);
    }
    let p = Homomorphism::new(co.quotient.clone(), a.base().clone(), p_map)?;
    let s = a.s.then(&co.q)?;
    let point = Point::new(p, s)?;
    let q = PointMorphism::new(a, &point, co.q)?;
    Ok(PtCoequalizer {
        point,
        q,
        congruence: co.congruence,
    })
}

/// `Eq(f)` against `Cg{(a, s(p(a))) | f(a) = t(p(a))}` on the total
/// algebra of the domain.
pub fn pt_normal_epi_comparison(f: &PointMorphism) -> Result<KernelComparison> {
    if !f.f.is_surjective() {
        return Err(Error::NotEpi);
    }
    let (from, to) = (&f.from, &f.to);
    let gens: Vec<_> = (0..from.total().size())
        .filter(|&a| f.f.apply(a) == to.s.apply(from.p.apply(a)))
        .map(|a| (a, from.s.apply(from.p.apply(a))))
        .collect();
    let kernel = kernel_congruence(&f.f).partition().clone();
    KernelComparison::new(from.total().clone(), gens, kernel)
}

/// Whether the surjective point morphism `f : (A, p, s) -> (B, q, t)` is a
/// normal epimorphism of points: `Eq(f) = Cg{(a, s(p(a))) | f(a) = t(p(a))}`.
/// The generators pair each element of the kernel object with its image
/// under the zero endomorphism `s∘p`.
pub fn pt_is_normal_epi(f: &PointMorphism) -> Result<Outcome<(Element, Element)>> {
    Ok(match pt_normal_epi_comparison(f)?.difference() {
        None => Outcome::Holds,
        Some((w, _)) => Outcome::Fails(w),
    })
}

/// Two elements of a pullback `A1 ×_X A2`, as coordinate pairs, on which
/// the generated congruence and `Eq(q1 ×_X q2)` disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalPFailure {
    pub first: (Element, Element),
    pub second: (Element, Element),
    pub in_product_kernel: bool,
}

fn pullback_comparison(
    pb: &PullbackAlgebra,
    pairs: Vec<(Element, Element)>,
    key: impl Fn(Element, Element) -> (Element, Element),
) -> Result<KernelComparison> {
    let kernel = Partition::from_keys(pb.pairs.iter().map(|&(a, b)| key(a, b)));
    KernelComparison::new(pb.algebra.clone(), pairs, kernel)
}

fn pullback_failure(cmp: &KernelComparison, pb: &PullbackAlgebra) -> Outcome<LocalPFailure> {
    match cmp.difference() {
        None => Outcome::Holds,
        Some((pair, in_kernel)) => Outcome::Fails(LocalPFailure {
            first: pb.pair(pair.0),
            second: pb.pair(pair.1),
            in_product_kernel: in_kernel,
        }),
    }
}

/// The comparison behind [`check_local_p_instance`], on the pullback of
/// the two target points, with that pullback.
pub fn local_p_instance_comparison(
    pair1: (&PointMorphism, &PointMorphism),
    pair2: (&PointMorphism, &PointMorphism),
) -> Result<(KernelComparison, PullbackAlgebra)> {
    pair1.0.from.same_base(&pair2.0.from)?;
    let co1 = pt_coequalizer(pair1.0, pair1.1)?;
    let co2 = pt_coequalizer(pair2.0, pair2.1)?;
    let sources = pt_product(&pair1.0.from, &pair2.0.from)?;
    let targets = pt_product(&pair1.0.to, &pair2.0.to)?;
    let lift = |f: &Homomorphism, g: &Homomorphism, c: Element| -> Result<Element> {
        let (c1, c2) = sources.pullback.pair(c);
        targets
            .pullback
            .index_of(f.apply(c1), g.apply(c2))
            .ok_or_else(|| Error::Internal("point morphisms leave the pullback".into()))
    };
    let pairs = (0..sources.point.total().size())
        .map(|c| {
            Ok((
                lift(&pair1.0.f, &pair2.0.f, c)?,
                lift(&pair1.1.f, &pair2.1.f, c)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (q1, q2) = (co1.q.hom(), co2.q.hom());
    let cmp = pullback_comparison(&targets.pullback, pairs, |a, b| (q1.apply(a), q2.apply(b)))?;
    Ok((cmp, targets.pullback))
}

/// Whether the pullback `q1 ×_X q2` of the two coequalizers is the
/// coequalizer of `u1 ×_X u2, v1 ×_X v2`, compared by kernel on the
/// pullback carrier.
pub fn check_local_p_instance(
    pair1: (&PointMorphism, &PointMorphism),
    pair2: (&PointMorphism, &PointMorphism),
) -> Result<Outcome<LocalPFailure>> {
    let (cmp, pb) = local_p_instance_comparison(pair1, pair2)?;
    Ok(pullback_failure(&cmp, &pb))
}

/// The comparison behind [`check_local_p_zero_trick`], on `A ×_X B`.
pub fn local_p_zero_trick_comparison(
    u: &PointMorphism,
    v: &PointMorphism,
    b: &Point,
) -> Result<(KernelComparison, PullbackAlgebra)> {
    u.from.same_base(b)?;
    let co = pt_coequalizer(u, v)?;
    let prod = pt_product(&u.to, b)?;
    let (r, t) = (&u.from.p, &b.s);
    let pairs = (0..u.from.total().size())
        .map(|c| {
            let z = t.apply(r.apply(c));
            let idx = |f: &Homomorphism| {
                prod.pullback
                    .index_of(f.apply(c), z)
                    .ok_or_else(|| Error::Internal("induced pair leaves the pullback".into()))
            };
            Ok((idx(&u.f)?, idx(&v.f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let q = co.q.hom();
    let cmp = pullback_comparison(&prod.pullback, pairs, |a, y| (q.apply(a), y))?;
    Ok((cmp, prod.pullback))
}

/// The fibrewise zero trick: for `u, v : (C, r, w) ⇉ (A, p, s)` and a
/// point `(B, q, t)`, whether `q_A ×_X 1_B` is the coequalizer of the
/// induced pair `c ↦ (u(c), t(r(c)))`, `c ↦ (v(c), t(r(c)))` into
/// `A ×_X B`.
pub fn check_local_p_zero_trick(
    u: &PointMorphism,
    v: &PointMorphism,
    b: &Point,
) -> Result<Outcome<LocalPFailure>> {
    let (cmp, pb) = local_p_zero_trick_comparison(u, v, b)?;
    Ok(pullback_failure(&cmp, &pb))
}
