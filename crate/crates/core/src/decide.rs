//! Free algebras of the variety generated by a finite algebra, and the
//! decision procedures for products commuting with coequalizers, globally
//! and in every fibre of points.
//!
//! Both procedures compute one congruence on a generic instance built from
//! free algebras. When the target pair is related, the transitivity chain
//! in the derivation trace is read off as witness terms; when it is not,
//! the generic instance itself is the counterexample.
//!
//! Witness terms use one variable layout throughout: `b_j` is binary in
//! `(x, y)`; `c_j` is unary in `z` (global version) or binary in `(u, v)`
//! (local version); `p_i` takes `(x, y, t_1, ..., t_m)` as variables
//! `0, 1, 2..m+2`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, FiniteAlgebra};
use crate::clone::{clone_slice, CloneSlice};
use crate::coeq::ParallelPair;
use crate::congruence::{congruence_generated, Congruence, DerivationTrace, Justification};
use crate::constructions::{product, pullback};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::term::{eval_unchecked, Term};
use crate::{Limits, Outcome};

/// Largest rank accepted by [`free_algebra`].
pub const MAX_RANK: usize = 3;

/// The free algebra of `V(A)` on named generators, realized as term
/// operations of `A`.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    slice: CloneSlice,
    algebra: Arc<FiniteAlgebra>,
    variables: Vec<String>,
}

impl FreeAlgebra {
    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn rank(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn generator(&self, i: usize) -> Element {
        self.slice.projection(i)
    }

    /// Minimal-depth term over the generators denoting `e`.
    pub fn witness(&self, e: Element) -> &Term {
        self.slice.witness(e)
    }

    /// The element denoted by a term over the generators.
    pub fn element_of(&self, t: &Term) -> Result<Element> {
        self.slice.evaluate(t)
    }

    /// The homomorphism to `target` sending generator `i` to `images[i]`.
    pub fn hom_to(&self, target: &Arc<FiniteAlgebra>, images: &[Element]) -> Result<Homomorphism> {
        if images.len() != self.rank() {
            return Err(Error::InvalidPair(format!(
                "free algebra of rank {} needs {} generator images, got {}",
                self.rank(),
                self.rank(),
                images.len()
            )));
        }
        self.algebra.same_signature(target)?;
        for &i in images {
            target.check_element(i)?;
        }
        let map = (0..self.size())
            .map(|e| eval_unchecked(target, self.witness(e), images))
            .collect();
        Homomorphism::new(self.algebra.clone(), target.clone(), map)
    }
}

/// `F_{V(A)}(variables)`, with at most [`MAX_RANK`] generators. Rank zero
/// gives the subalgebra of constants (and fails without constants).
pub fn free_algebra(
    a: &Arc<FiniteAlgebra>,
    variables: &[&str],
    limits: &Limits,
) -> Result<FreeAlgebra> {
    if variables.len() > MAX_RANK {
        return Err(Error::CapExceeded {
            what: "free algebra rank".into(),
            cap: MAX_RANK,
            bound: variables.len().to_string(),
        });
    }
    let slice = clone_slice(a, variables.len(), limits)?;
    if slice.is_empty() {
        return Err(Error::Algebra {
            name: format!("F({})", a.name()),
            reason: "no constants, so the free algebra on no generators is empty".into(),
        });
    }
    let name = format!("F({})", variables.join(","));
    let algebra = Arc::new(slice.to_algebra(name, variables)?);
    Ok(FreeAlgebra {
        slice,
        algebra,
        variables: variables.iter().map(|v| v.to_string()).collect(),
    })
}

/// Witness terms for either characterization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PWitness {
    pub m: usize,
    pub n: usize,
    pub b: Vec<Term>,
    pub c: Vec<Term>,
    pub p: Vec<Term>,
}

/// Which equation schema a witness is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    /// Binary `b_j(x,y)`, unary `c_j(z)`, `p_i(0,0,c(z)) = z`.
    Global,
    /// Binary `b_j(x,y)` and `c_j(u,v)`, `p_i(u,u,c(u,v)) = v`,
    /// `b_j(z,z) = c_j(z,z)`.
    Local,
}

impl Schema {
    fn c_arity(self) -> usize {
        match self {
            Schema::Global => 1,
            Schema::Local => 2,
        }
    }
}

impl PWitness {
    /// Checks counts, variable ranges and arities.
    pub fn check_shape(&self, alg: &FiniteAlgebra, schema: Schema) -> Result<()> {
        let sig = alg.signature();
        if self.b.len() != self.m || self.c.len() != self.m {
            return Err(Error::Format(format!(
                "m = {} but {} b-terms and {} c-terms",
                self.m,
                self.b.len(),
                self.c.len()
            )));
        }
        if self.p.len() != self.n || self.n == 0 {
            return Err(Error::Format(format!(
                "n = {} but {} p-terms (n must be positive)",
                self.n,
                self.p.len()
            )));
        }
        self.b.iter().try_for_each(|t| t.check(sig, 2))?;
        self.c
            .iter()
            .try_for_each(|t| t.check(sig, schema.c_arity()))?;
        self.p.iter().try_for_each(|t| t.check(sig, self.m + 2))
    }
}

/// An equation of the schema that fails, with the substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationViolation {
    pub equation: String,
    pub assignment: Vec<(String, Element)>,
    pub lhs: Element,
    pub rhs: Element,
}

fn violation(
    equation: String,
    names: &[&str],
    vals: &[Element],
    lhs: Element,
    rhs: Element,
) -> Outcome<EquationViolation> {
    Outcome::Fails(EquationViolation {
        equation,
        assignment: names
            .iter()
            .map(|s| s.to_string())
            .zip(vals.iter().copied())
            .collect(),
        lhs,
        rhs,
    })
}

/// The `x, y` chain equations shared by both schemas:
/// `p_1(x,y,b) = x`, `p_i(y,x,b) = p_{i+1}(x,y,b)`, `p_n(y,x,b) = y`.
fn check_chain(alg: &FiniteAlgebra, w: &PWitness) -> Option<Outcome<EquationViolation>> {
    let size = alg.size();
    let mut fwd = vec![0; w.m + 2];
    let mut rev = vec![0; w.m + 2];
    for x in 0..size {
        for y in 0..size {
            fwd[0] = x;
            fwd[1] = y;
            rev[0] = y;
            rev[1] = x;
            for j in 0..w.m {
                let bj = eval_unchecked(alg, &w.b[j], &[x, y]);
                fwd[2 + j] = bj;
                rev[2 + j] = bj;
            }
            let first = eval_unchecked(alg, &w.p[0], &fwd);
            if first != x {
                return Some(violation(
                    "p_1(x,y,b(x,y)) = x".into(),
                    &["x", "y"],
                    &[x, y],
                    first,
                    x,
                ));
            }
            for i in 0..w.n {
                let back = eval_unchecked(alg, &w.p[i], &rev);
                let rhs = if i + 1 < w.n {
                    eval_unchecked(alg, &w.p[i + 1], &fwd)
                } else {
                    y
                };
                if back != rhs {
                    let eq = if i + 1 < w.n {
                        format!("p_{}(y,x,b(x,y)) = p_{}(x,y,b(x,y))", i + 1, i + 2)
                    } else {
                        format!("p_{}(y,x,b(x,y)) = y", i + 1)
                    };
                    return Some(violation(eq, &["x", "y"], &[x, y], back, rhs));
                }
            }
        }
    }
    None
}

/// Checks the global schema under every substitution from `A`, with `0`
/// read as the constant of the pointed algebra `A`.
pub fn verify_p_terms(alg: &FiniteAlgebra, w: &PWitness) -> Result<Outcome<EquationViolation>> {
    w.check_shape(alg, Schema::Global)?;
    let zero = alg.require_zero()?;
    if let Some(v) = check_chain(alg, w) {
        return Ok(v);
    }
    let mut args = vec![zero; w.m + 2];
    for z in 0..alg.size() {
        for j in 0..w.m {
            args[2 + j] = eval_unchecked(alg, &w.c[j], &[z]);
        }
        for (i, p) in w.p.iter().enumerate() {
            let got = eval_unchecked(alg, p, &args);
            if got != z {
                return Ok(violation(
                    format!("p_{}(0,0,c(z)) = z", i + 1),
                    &["z"],
                    &[z],
                    got,
                    z,
                ));
            }
        }
    }
    Ok(Outcome::Holds)
}

/// Checks the local schema under every substitution from `A`.
pub fn verify_local_terms(alg: &FiniteAlgebra, w: &PWitness) -> Result<Outcome<EquationViolation>> {
    w.check_shape(alg, Schema::Local)?;
    if let Some(v) = check_chain(alg, w) {
        return Ok(v);
    }
    let mut args = vec![0; w.m + 2];
    for u in 0..alg.size() {
        for v in 0..alg.size() {
            args[0] = u;
            args[1] = u;
            for j in 0..w.m {
                args[2 + j] = eval_unchecked(alg, &w.c[j], &[u, v]);
            }
            for (i, p) in w.p.iter().enumerate() {
                let got = eval_unchecked(alg, p, &args);
                if got != v {
                    return Ok(violation(
                        format!("p_{}(u,u,c(u,v)) = v", i + 1),
                        &["u", "v"],
                        &[u, v],
                        got,
                        v,
                    ));
                }
            }
        }
    }
    for z in 0..alg.size() {
        for j in 0..w.m {
            let (bz, cz) = (
                eval_unchecked(alg, &w.b[j], &[z, z]),
                eval_unchecked(alg, &w.c[j], &[z, z]),
            );
            if bz != cz {
                return Ok(violation(
                    format!("b_{0}(z,z) = c_{0}(z,z)", j + 1),
                    &["z"],
                    &[z],
                    bz,
                    cz,
                ));
            }
        }
    }
    Ok(Outcome::Holds)
}

/// The generic instance of a decision procedure: a congruence generated by
/// one pair on a subalgebra of a product of two free algebras, and the
/// pair whose membership decides the property.
#[derive(Debug, Clone)]
pub struct GenericInstance {
    pub schema: Schema,
    pub left: FreeAlgebra,
    pub right: FreeAlgebra,
    /// `F(x,y) × F(z)` or the pullback of `F(x,y)` and `F(u,v)` over `F(w)`.
    pub algebra: Arc<FiniteAlgebra>,
    /// Coordinates of each element of `algebra`.
    pub coords: Vec<(Element, Element)>,
    pub generator: (Element, Element),
    pub target: (Element, Element),
    pub congruence: Congruence,
    pub trace: DerivationTrace,
    /// Size of the free algebra `F(w)` (local version only).
    pub base_size: Option<usize>,
}

impl GenericInstance {
    pub fn holds(&self) -> bool {
        self.congruence.related(self.target.0, self.target.1)
    }

    /// Renders an element as a pair of terms.
    pub fn describe(&self, e: Element) -> (String, String) {
        let (l, r) = self.coords[e];
        (self.left.algebra().label(l), self.right.algebra().label(r))
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub instance: GenericInstance,
    /// Verified witness terms when the property holds.
    pub witness: Option<PWitness>,
}

impl Decision {
    pub fn holds(&self) -> bool {
        self.witness.is_some()
    }
}

fn finish(instance: GenericInstance, base: &FiniteAlgebra) -> Result<Decision> {
    if !instance.holds() {
        return Ok(Decision {
            instance,
            witness: None,
        });
    }
    let w = extract_terms(&instance)?;
    let check = match instance.schema {
        Schema::Global => verify_p_terms(base, &w)?,
        Schema::Local => verify_local_terms(base, &w)?,
    };
    if let Outcome::Fails(v) = check {
        return Err(Error::Internal(format!(
            "extracted terms fail their verifier: {} at {:?}",
            v.equation, v.assignment
        )));
    }
    Ok(Decision {
        instance,
        witness: Some(w),
    })
}

/// Decides whether `V(A)` satisfies (P): with `F = F(x,y)`, `G = F(z)` and
/// `C = Cg((x,0),(y,0))` on `F × G`, the property holds iff
/// `(x,z) C (y,z)`.
pub fn decide_p(a: &Arc<FiniteAlgebra>, limits: &Limits) -> Result<Decision> {
    a.require_zero()?;
    let left = free_algebra(a, &["x", "y"], limits)?;
    let right = free_algebra(a, &["z"], limits)?;
    let prod = product(left.algebra(), right.algebra())?;
    let zero = right.algebra().require_zero()?;
    let (x, y, z) = (left.generator(0), left.generator(1), right.generator(0));
    let generator = (prod.pair(x, zero), prod.pair(y, zero));
    let target = (prod.pair(x, z), prod.pair(y, z));
    let (congruence, trace) = congruence_generated(&prod.algebra, &[generator])?;
    let coords = (0..prod.algebra.size()).map(|e| prod.split(e)).collect();
    let instance = GenericInstance {
        schema: Schema::Global,
        left,
        right,
        algebra: prod.algebra.clone(),
        coords,
        generator,
        target,
        congruence,
        trace,
        base_size: None,
    };
    finish(instance, a)
}

/// Decides whether `V(A)` has local normal projections (equivalently,
/// satisfies (P) in every fibre of points). With `F1 = F(x,y)`,
/// `F2 = F(u,v)` mapped onto `W = F(w)` by collapsing generators to `w`,
/// and `C = Cg((x,u),(y,u))` on the pullback, the property holds iff
/// `(x,v) C (y,v)`.
pub fn decide_local_np(a: &Arc<FiniteAlgebra>, limits: &Limits) -> Result<Decision> {
    let left = free_algebra(a, &["x", "y"], limits)?;
    let right = free_algebra(a, &["u", "v"], limits)?;
    let base = free_algebra(a, &["w"], limits)?;
    let w = base.generator(0);
    let f = left.hom_to(base.algebra(), &[w, w])?;
    let g = right.hom_to(base.algebra(), &[w, w])?;
    let pb = pullback(&f, &g)?;
    let (x, y) = (left.generator(0), left.generator(1));
    let (u, v) = (right.generator(0), right.generator(1));
    let idx = |l, r| {
        pb.index_of(l, r)
            .ok_or_else(|| Error::Internal("generic pair outside the pullback".into()))
    };
    let generator = (idx(x, u)?, idx(y, u)?);
    let target = (idx(x, v)?, idx(y, v)?);
    let (congruence, trace) = congruence_generated(&pb.algebra, &[generator])?;
    let instance = GenericInstance {
        schema: Schema::Local,
        left,
        right,
        algebra: pb.algebra.clone(),
        coords: pb.pairs.clone(),
        generator,
        target,
        congruence,
        trace,
        base_size: Some(base.size()),
    };
    finish(instance, a)
}

/// Reads witness terms off the derivation trace of a generic instance.
///
/// Each link of the transitivity chain from the target's first element to
/// its second is an engine edge `τ(g)` for a composite translation `τ` of
/// the generating pair `g`. A link traversed forwards becomes
/// `p_i = τ[r]`, a reversed one `p_i = τ[s]`; every constant argument of a
/// translation becomes one of the variables `t_j`, with `b_j`, `c_j` the
/// witness terms of its two coordinates. Constants are shared across all
/// `p_i`, which makes every `p_i` take the same argument list.
pub fn extract_terms(instance: &GenericInstance) -> Result<PWitness> {
    let trace = &instance.trace;
    let (from, to) = instance.target;
    let links = trace
        .chain(from, to)
        .ok_or_else(|| Error::Internal("target pair is not derived by the trace".into()))?;
    let mut constants: Vec<Element> = Vec::new();
    let mut slot: HashMap<Element, usize> = HashMap::new();
    let mut p = Vec::with_capacity(links.len().max(1));
    for link in &links {
        let hole = Term::Var(usize::from(link.reversed));
        p.push(polynomial(
            trace,
            link.step,
            hole,
            &mut constants,
            &mut slot,
        )?);
    }
    if p.is_empty() {
        p.push(Term::Var(0));
    }
    let m = constants.len();
    let b = constants
        .iter()
        .map(|&e| instance.left.witness(instance.coords[e].0).clone())
        .collect();
    let c = constants
        .iter()
        .map(|&e| instance.right.witness(instance.coords[e].1).clone())
        .collect();
    Ok(PWitness {
        m,
        n: p.len(),
        b,
        c,
        p,
    })
}

/// The term `τ[hole]` for the composite translation producing `step` from
/// the generator.
fn polynomial(
    trace: &DerivationTrace,
    step: usize,
    hole: Term,
    constants: &mut Vec<Element>,
    slot: &mut HashMap<Element, usize>,
) -> Result<Term> {
    let steps = trace.steps();
    // Walk down to the generator, then rebuild from the inside out.
    let mut path = Vec::new();
    let mut cur = step;
    loop {
        match &steps[cur].justification {
            Justification::Generator(0) => break,
            Justification::OpApplication { premise, .. } => {
                path.push(cur);
                cur = *premise;
            }
            other => {
                return Err(Error::Internal(format!(
                    "unexpected justification {other:?} under a chain edge"
                )))
            }
        }
    }
    let mut term = hole;
    for &i in path.iter().rev() {
        let Justification::OpApplication { symbol, args, .. } = &steps[i].justification else {
            unreachable!()
        };
        let mut children = Vec::with_capacity(args.len());
        let mut placed = false;
        for &(a, b) in args {
            if a != b && !placed {
                children.push(std::mem::replace(&mut term, Term::Var(0)));
                placed = true;
            } else {
                let j = *slot.entry(a).or_insert_with(|| {
                    constants.push(a);
                    constants.len() - 1
                });
                children.push(Term::Var(2 + j));
            }
        }
        if !placed {
            return Err(Error::Internal(
                "operation step without a premise argument".into(),
            ));
        }
        term = Term::Op(*symbol, children);
    }
    Ok(term)
}

/// For a negative global verdict: the pairs `t ↦ x`, `t ↦ y` from `F(t)`
/// into `F(x,y)`, and the zero pair from `F()` into `F(z)`. By
/// construction their product pair generates the congruence of the
/// generic instance, so [`crate::coeq::check_p_instance`] fails on them.
pub fn concretize_p_failure(
    a: &Arc<FiniteAlgebra>,
    decision: &Decision,
    limits: &Limits,
) -> Result<(ParallelPair, ParallelPair)> {
    let inst = &decision.instance;
    let free_t = free_algebra(a, &["t"], limits)?;
    let fxy = inst.left.algebra();
    let u = free_t.hom_to(fxy, &[inst.left.generator(0)])?;
    let v = free_t.hom_to(fxy, &[inst.left.generator(1)])?;
    let free0 = free_algebra(a, &[], limits)?;
    let zero = Homomorphism::zero(free0.algebra().clone(), inst.right.algebra().clone())?;
    Ok((
        ParallelPair::new(u, v)?,
        ParallelPair::new(zero.clone(), zero)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeq::check_p_instance;
    use crate::fixtures;

    fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
        Arc::new(a)
    }

    #[test]
    fn free_algebra_sizes() {
        let limits = Limits::default();
        let z2 = arc(fixtures::z2());
        assert_eq!(free_algebra(&z2, &["z"], &limits).unwrap().size(), 2);
        assert_eq!(free_algebra(&z2, &["x", "y"], &limits).unwrap().size(), 4);
        let one = arc(fixtures::trivial(z2.signature()));
        assert_eq!(
            free_algebra(&one, &["x", "y", "z"], &limits)
                .unwrap()
                .size(),
            1
        );
        assert!(free_algebra(&z2, &["a", "b", "c", "d"], &limits).is_err());
        let set = arc(fixtures::set2());
        assert!(free_algebra(&set, &[], &limits).is_err());
    }

    #[test]
    fn hom_from_free_algebra() {
        let z2 = arc(fixtures::z2());
        let f = free_algebra(&z2, &["x", "y"], &Limits::default()).unwrap();
        let h = f.hom_to(&z2, &[1, 1]).unwrap();
        let plus = z2.signature().index_of("+").unwrap();
        let sum = f.algebra().apply(plus, &[f.generator(0), f.generator(1)]);
        assert_eq!(h.apply(sum), 0);
    }

    #[test]
    fn z2_satisfies_p() {
        let z2 = arc(fixtures::z2());
        let d = decide_p(&z2, &Limits::default()).unwrap();
        assert!(d.holds());
        assert_eq!(d.instance.algebra.size(), 8);
        let w = d.witness.unwrap();
        assert!(verify_p_terms(&z2, &w).unwrap().holds());
    }

    #[test]
    fn pointed_set_fails_p() {
        let ps = arc(fixtures::pointed_set2());
        let limits = Limits::default();
        let d = decide_p(&ps, &limits).unwrap();
        assert!(!d.holds());
        let (p1, p2) = concretize_p_failure(&ps, &d, &limits).unwrap();
        assert!(!check_p_instance(&p1, &p2).unwrap().holds());
    }

    #[test]
    fn pointed_lattice_satisfies_p() {
        let l = arc(fixtures::lattice2(true));
        let d = decide_p(&l, &Limits::default()).unwrap();
        assert!(d.holds());
    }

    #[test]
    fn subtraction_algebra_fails_p() {
        let x = arc(fixtures::subtraction_x());
        assert!(!decide_p(&x, &Limits::default()).unwrap().holds());
    }

    #[test]
    fn local_versions() {
        let limits = Limits::default();
        for alg in [fixtures::z2(), fixtures::lattice2(false)] {
            let a = arc(alg);
            let d = decide_local_np(&a, &limits).unwrap();
            assert!(d.holds(), "{}", a.name());
            assert!(verify_local_terms(&a, d.witness.as_ref().unwrap())
                .unwrap()
                .holds());
        }
        let set = arc(fixtures::set2());
        assert!(!decide_local_np(&set, &limits).unwrap().holds());
    }

    #[test]
    fn verifier_rejects_bad_witnesses() {
        let z2 = arc(fixtures::z2());
        // p_1 = r alone: p_1(y,x) = y only if n = 1, but p_1(0,0) = 0 ≠ z
        let w = PWitness {
            m: 0,
            n: 1,
            b: vec![],
            c: vec![],
            p: vec![Term::Var(0)],
        };
        let out = verify_p_terms(&z2, &w).unwrap();
        assert!(!out.holds());
        // wrong n: two copies of the projection break the chain
        let w2 = PWitness {
            n: 2,
            p: vec![Term::Var(0), Term::Var(0)],
            ..w.clone()
        };
        assert!(!verify_p_terms(&z2, &w2).unwrap().holds());
        // shape errors are errors, not verdicts
        let bad = PWitness { n: 3, ..w };
        assert!(verify_p_terms(&z2, &bad).is_err());
    }

    #[test]
    fn local_verifier_catches_b_c_mismatch() {
        let z2 = arc(fixtures::z2());
        let d = decide_local_np(&z2, &Limits::default()).unwrap();
        let mut w = d.witness.unwrap();
        if w.m > 0 {
            let plus = z2.signature().index_of("+").unwrap();
            w.c[0] = Term::Op(plus, vec![w.c[0].clone(), Term::Var(0)]);
            assert!(!verify_local_terms(&z2, &w).unwrap().holds());
        }
    }
}
