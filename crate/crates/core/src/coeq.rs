//! Coequalizers of parallel pairs, normal epimorphisms, cokernels, and
//! instance-wise checks that products commute with coequalizers.
//!
//! In a variety the coequalizer of `u, v : C ⇉ X` is the quotient of `X`
//! by `Cg{(u(c), v(c))}`, so coequalizers are compared by kernel
//! congruence. The enumeration oracles in this module check the universal
//! property directly and are meant for small instances.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Element, FiniteAlgebra};
use crate::congruence::{cg, Congruence};
use crate::constructions::{product, product_map, quotient, same_algebra, Product};
use crate::enumerate::homomorphisms;
use crate::error::{Error, Result};
use crate::hom::{kernel_congruence, Homomorphism};
use crate::partition::Partition;
use crate::Outcome;

/// Two homomorphisms with a common source and a common target.
#[derive(Debug, Clone)]
pub struct ParallelPair {
    u: Homomorphism,
    v: Homomorphism,
}

impl ParallelPair {
    pub fn new(u: Homomorphism, v: Homomorphism) -> Result<Self> {
        if !same_algebra(u.source(), v.source()) || !same_algebra(u.target(), v.target()) {
            return Err(Error::InvalidPair(format!(
                "{} -> {} and {} -> {} are not parallel",
                u.source().name(),
                u.target().name(),
                v.source().name(),
                v.target().name()
            )));
        }
        Ok(ParallelPair { u, v })
    }

    pub fn u(&self) -> &Homomorphism {
        &self.u
    }

    pub fn v(&self) -> &Homomorphism {
        &self.v
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        self.u.source()
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        self.u.target()
    }

    /// `(u(c), v(c))` for every `c`, in order of `c`.
    pub fn image_pairs(&self) -> Vec<(Element, Element)> {
        (0..self.source().size())
            .map(|c| (self.u.apply(c), self.v.apply(c)))
            .collect()
    }

    /// `(h∘u, h∘v)`.
    pub fn then(&self, h: &Homomorphism) -> Result<ParallelPair> {
        ParallelPair::new(self.u.then(h)?, self.v.then(h)?)
    }
}

#[derive(Debug, Clone)]
pub struct CoequalizerResult {
    pub quotient: Arc<FiniteAlgebra>,
    pub q: Homomorphism,
    pub congruence: Congruence,
}

fn quotient_result(congruence: Congruence) -> Result<CoequalizerResult> {
    let quo = quotient(&congruence)?;
    Ok(CoequalizerResult {
        quotient: quo.algebra,
        q: quo.q,
        congruence,
    })
}

pub fn coequalizer(p: &ParallelPair) -> Result<CoequalizerResult> {
    quotient_result(cg(p.target(), &p.image_pairs())?)
}

/// A congruence generated by explicit pairs, set against the kernel it is
/// expected to equal. Every property checked in this crate reduces to such
/// a comparison; it is exposed so that callers can certify verdicts.
#[derive(Debug, Clone)]
pub struct KernelComparison {
    pub algebra: Arc<FiniteAlgebra>,
    pub generators: Vec<(Element, Element)>,
    pub generated: Congruence,
    pub kernel: Partition,
}

impl KernelComparison {
    pub fn new(
        algebra: Arc<FiniteAlgebra>,
        generators: Vec<(Element, Element)>,
        kernel: Partition,
    ) -> Result<Self> {
        let generated = cg(&algebra, &generators)?;
        Ok(KernelComparison {
            algebra,
            generators,
            generated,
            kernel,
        })
    }

    /// The least pair on which the two partitions disagree, and whether it
    /// lies in the kernel (rather than only in the generated congruence).
    pub fn difference(&self) -> Option<((Element, Element), bool)> {
        let missing = self.kernel.first_pair_not_in(self.generated.partition());
        let extra = self.generated.partition().first_pair_not_in(&self.kernel);
        match (missing, extra) {
            (None, None) => None,
            (Some(m), Some(e)) if e < m => Some((e, false)),
            (Some(m), _) => Some((m, true)),
            (None, Some(e)) => Some((e, false)),
        }
    }
}

/// `Eq(f)` against `Cg{(k, 0) | f(k) = 0}` on the source of `f`.
pub fn normal_epi_comparison(f: &Homomorphism) -> Result<KernelComparison> {
    if !f.is_surjective() {
        return Err(Error::NotEpi);
    }
    let zero = f.source().require_zero()?;
    let target_zero = f.target().require_zero()?;
    let gens: Vec<_> = (0..f.source().size())
        .filter(|&k| f.apply(k) == target_zero)
        .map(|k| (k, zero))
        .collect();
    let kernel = kernel_congruence(f).partition().clone();
    KernelComparison::new(f.source().clone(), gens, kernel)
}

/// Whether the surjection `f` is a normal epimorphism, i.e. whether
/// `Eq(f) = Cg{(k, 0) | f(k) = 0}`. On failure, reports the least pair
/// of `Eq(f)` outside the generated congruence.
pub fn is_normal_epi(f: &Homomorphism) -> Result<Outcome<(Element, Element)>> {
    Ok(match normal_epi_comparison(f)?.difference() {
        None => Outcome::Holds,
        Some((w, _)) => Outcome::Fails(w),
    })
}

/// Quotient of the target by `Cg{(f(a), 0)}`.
pub fn cokernel(f: &Homomorphism) -> Result<CoequalizerResult> {
    let zero = f.target().require_zero()?;
    let gens: Vec<_> = f.map().iter().map(|&b| (b, zero)).collect();
    quotient_result(cg(f.target(), &gens)?)
}

/// Two elements of a product, given by coordinates, on which the
/// generated congruence and the kernel of the product of the quotient
/// maps disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PInstanceFailure {
    pub first: (Element, Element),
    pub second: (Element, Element),
    /// Whether the pair lies in the kernel of the product map (it always
    /// does in a variety; the reverse inclusion is the one that can fail).
    pub in_product_kernel: bool,
}

fn product_failure(
    cmp: &KernelComparison,
    split: impl Fn(Element) -> (Element, Element),
) -> Outcome<PInstanceFailure> {
    match cmp.difference() {
        None => Outcome::Holds,
        Some((pair, in_kernel)) => Outcome::Fails(PInstanceFailure {
            first: split(pair.0),
            second: split(pair.1),
            in_product_kernel: in_kernel,
        }),
    }
}

/// The comparison behind [`check_p_instance`], on `X × Y` (the product of
/// the two targets), with the product used to split elements.
pub fn p_instance_comparison(
    p1: &ParallelPair,
    p2: &ParallelPair,
) -> Result<(KernelComparison, Product)> {
    let sources = product(p1.source(), p2.source())?;
    let targets = product(p1.target(), p2.target())?;
    let uu = product_map(p1.u(), p2.u(), &sources, &targets)?;
    let vv = product_map(p1.v(), p2.v(), &sources, &targets)?;
    let pair = ParallelPair::new(uu, vv)?;
    let q1 = coequalizer(p1)?.q;
    let q2 = coequalizer(p2)?.q;
    let kernel = Partition::from_keys((0..targets.algebra.size()).map(|e| {
        let (x, y) = targets.split(e);
        (q1.apply(x), q2.apply(y))
    }));
    let cmp = KernelComparison::new(targets.algebra.clone(), pair.image_pairs(), kernel)?;
    Ok((cmp, targets))
}

/// Whether `q1 × q2` is a coequalizer of `u × u'`, `v × v'`, where `q1`,
/// `q2` are the coequalizers of the two pairs.
pub fn check_p_instance(p1: &ParallelPair, p2: &ParallelPair) -> Result<Outcome<PInstanceFailure>> {
    let (cmp, targets) = p_instance_comparison(p1, p2)?;
    Ok(product_failure(&cmp, |e| targets.split(e)))
}

/// The comparison behind [`check_p_zero_trick`], on `X × B`.
pub fn p_zero_trick_comparison(
    p: &ParallelPair,
    b: &Arc<FiniteAlgebra>,
) -> Result<(KernelComparison, Product)> {
    let zero = Homomorphism::zero(p.source().clone(), b.clone())?;
    let targets = product(p.target(), b)?;
    let pair = ParallelPair::new(
        targets.pairing(p.u(), &zero)?,
        targets.pairing(p.v(), &zero)?,
    )?;
    let q = coequalizer(p)?.q;
    let kernel = Partition::from_keys((0..targets.algebra.size()).map(|e| {
        let (x, y) = targets.split(e);
        (q.apply(x), y)
    }));
    let cmp = KernelComparison::new(targets.algebra.clone(), pair.image_pairs(), kernel)?;
    Ok((cmp, targets))
}

/// Whether `q × 1_B` is a coequalizer of `(u, 0), (v, 0) : C ⇉ X × B`,
/// where `q` is the coequalizer of `p`. This is the special case of
/// [`check_p_instance`] against the trivial coequalizer on `B`.
pub fn check_p_zero_trick(
    p: &ParallelPair,
    b: &Arc<FiniteAlgebra>,
) -> Result<Outcome<PInstanceFailure>> {
    let (cmp, targets) = p_zero_trick_comparison(p, b)?;
    Ok(product_failure(&cmp, |e| targets.split(e)))
}

/// Ways in which a map fails to be a coequalizer of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoequalizerViolation {
    /// `e(u(c)) ≠ e(v(c))`.
    NotCocone {
        element: Element,
    },
    NotSurjective,
    /// Least pair on which `Eq(e)` and the generated congruence differ.
    KernelMismatch {
        pair: (Element, Element),
    },
    /// A cocone `h` into a test algebra with the wrong number of
    /// factorizations through `e`.
    Factorization {
        test_algebra: String,
        h: Vec<Element>,
        factorizations: usize,
    },
}

fn cocone_failure(pair: &ParallelPair, e: &Homomorphism) -> Result<Option<CoequalizerViolation>> {
    if !same_algebra(pair.target(), e.source()) {
        return Err(Error::InvalidPair(format!(
            "`{}` does not start at the target `{}` of the pair",
            e.source().name(),
            pair.target().name()
        )));
    }
    Ok((0..pair.source().size())
        .find(|&c| e.apply(pair.u().apply(c)) != e.apply(pair.v().apply(c)))
        .map(|element| CoequalizerViolation::NotCocone { element }))
}

/// Whether `e` is a coequalizer of `pair`, by kernel comparison: `e` must
/// coequalize the pair, be surjective, and have kernel `Cg{(u(c), v(c))}`.
pub fn is_coequalizer(
    pair: &ParallelPair,
    e: &Homomorphism,
) -> Result<Outcome<CoequalizerViolation>> {
    if let Some(v) = cocone_failure(pair, e)? {
        return Ok(Outcome::Fails(v));
    }
    if !e.is_surjective() {
        return Ok(Outcome::Fails(CoequalizerViolation::NotSurjective));
    }
    let generated = cg(pair.target(), &pair.image_pairs())?;
    let kernel = kernel_congruence(e);
    let missing = kernel.partition().first_pair_not_in(generated.partition());
    Ok(match missing {
        None => Outcome::Holds,
        Some(pair) => Outcome::Fails(CoequalizerViolation::KernelMismatch { pair }),
    })
}

fn check_test_sizes(tests: &[Arc<FiniteAlgebra>], max_size: usize) -> Result<()> {
    match tests.iter().find(|w| w.size() > max_size) {
        Some(w) => Err(Error::CapExceeded {
            what: format!("morphism enumeration into `{}`", w.name()),
            cap: max_size,
            bound: w.size().to_string(),
        }),
        None => Ok(()),
    }
}

/// Checks the universal property of `e` against every homomorphism into
/// each test algebra: every `h` with `h∘u = h∘v` must factor through `e`
/// in exactly one way. Test algebras larger than `max_size` are refused.
pub fn coequalizer_universal_check(
    pair: &ParallelPair,
    e: &Homomorphism,
    tests: &[Arc<FiniteAlgebra>],
    max_size: usize,
) -> Result<Outcome<CoequalizerViolation>> {
    check_test_sizes(tests, max_size)?;
    if let Some(v) = cocone_failure(pair, e)? {
        return Ok(Outcome::Fails(v));
    }
    let images = pair.image_pairs();
    for w in tests {
        let through = homomorphisms(e.target(), w)?;
        for h in homomorphisms(pair.target(), w)? {
            if images.iter().any(|&(a, b)| h.apply(a) != h.apply(b)) {
                continue;
            }
            let factorizations = through
                .iter()
                .filter(|k| (0..e.source().size()).all(|x| k.apply(e.apply(x)) == h.apply(x)))
                .count();
            if factorizations != 1 {
                return Ok(Outcome::Fails(CoequalizerViolation::Factorization {
                    test_algebra: w.name().to_string(),
                    h: h.map().to_vec(),
                    factorizations,
                }));
            }
        }
    }
    Ok(Outcome::Holds)
}

/// The configuration of the composite-coequalizer lemma:
///
/// ```text
/// S1 --i1--\
///           D ==u,v==> X --e1--> E1 --e2--> E2
/// S2 --i2--/
/// ```
///
/// with `e1` a coequalizer of `u∘i1, v∘i1`, `e2` a coequalizer of
/// `e1∘u∘i2, e1∘v∘i2`, and `e2∘e1∘u = e2∘e1∘v`. (Printed statements of
/// the lemma sometimes write `ι1` for `i1`; they are the same arrow.)
#[derive(Debug, Clone)]
pub struct CompositeCoequalizer {
    pub i1: Homomorphism,
    pub i2: Homomorphism,
    pub pair: ParallelPair,
    pub e1: Homomorphism,
    pub e2: Homomorphism,
}

impl CompositeCoequalizer {
    /// Checks each hypothesis in turn, naming the first one that fails.
    pub fn check_hypotheses(&self) -> Result<()> {
        let first = ParallelPair::new(self.i1.then(self.pair.u())?, self.i1.then(self.pair.v())?)?;
        if let Outcome::Fails(v) = is_coequalizer(&first, &self.e1)? {
            return Err(Error::Hypothesis(format!(
                "e1 is not a coequalizer of u∘i1, v∘i1: {v:?}"
            )));
        }
        let second = ParallelPair::new(
            self.i2.then(self.pair.u())?.then(&self.e1)?,
            self.i2.then(self.pair.v())?.then(&self.e1)?,
        )?;
        if let Outcome::Fails(v) = is_coequalizer(&second, &self.e2)? {
            return Err(Error::Hypothesis(format!(
                "e2 is not a coequalizer of e1∘u∘i2, e1∘v∘i2: {v:?}"
            )));
        }
        let composite = self.e1.then(&self.e2)?;
        if let Some(CoequalizerViolation::NotCocone { element }) =
            cocone_failure(&self.pair, &composite)?
        {
            return Err(Error::Hypothesis(format!(
                "e2∘e1∘u and e2∘e1∘v differ at element {element}"
            )));
        }
        Ok(())
    }
}

/// Verifies the lemma's conclusion on an instance: after checking the
/// hypotheses, `e2∘e1` must be a coequalizer of `u, v`, both by kernel
/// comparison and by the universal property against `tests`.
pub fn compose_coequalizers_check(
    config: &CompositeCoequalizer,
    tests: &[Arc<FiniteAlgebra>],
    max_size: usize,
) -> Result<Outcome<CoequalizerViolation>> {
    config.check_hypotheses()?;
    let composite = config.e1.then(&config.e2)?;
    if let Outcome::Fails(v) = is_coequalizer(&config.pair, &composite)? {
        return Ok(Outcome::Fails(v));
    }
    coequalizer_universal_check(&config.pair, &composite, tests, max_size)
}
