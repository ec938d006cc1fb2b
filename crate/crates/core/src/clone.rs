//! Term operations of a finite algebra, generated as functions `A^k -> A`,
//! and searches for Mal'tsev, majority and subtraction terms.
//!
//! Members are generated breadth-first by term depth (constants count as
//! depth one), ties broken by symbol order and then lexicographically by
//! argument indices, so every member carries a witness term of minimal
//! depth and the order is deterministic. Each round is evaluated in
//! parallel and merged in order.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{decode_tuple, Element, FiniteAlgebra, Symbol, MAX_ARITY};
use crate::error::{Error, Result};
use crate::term::{eval_term, Term};
use crate::Limits;

/// The k-ary term operations of `base`, with witness terms over the
/// variables `0..k`.
#[derive(Debug, Clone)]
pub struct CloneSlice {
    base: Arc<FiniteAlgebra>,
    arity: usize,
    /// Number of points `|A|^k` in the domain.
    points: usize,
    /// Member values, `points` entries per member.
    values: Vec<u32>,
    witnesses: Vec<Term>,
    index: HashMap<Box<[u32]>, usize>,
    /// Member index of each projection.
    projections: Vec<usize>,
}

impl CloneSlice {
    pub fn base(&self) -> &Arc<FiniteAlgebra> {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Values of member `i`, indexed by argument tuples in row-major order.
    pub fn member(&self, i: usize) -> &[u32] {
        &self.values[i * self.points..(i + 1) * self.points]
    }

    pub fn witness(&self, i: usize) -> &Term {
        &self.witnesses[i]
    }

    pub fn witnesses(&self) -> &[Term] {
        &self.witnesses
    }

    pub fn projection(&self, var: usize) -> usize {
        self.projections[var]
    }

    pub fn find(&self, values: &[u32]) -> Option<usize> {
        self.index.get(values).copied()
    }

    /// Index of the member computed by `t` over the variables `0..k`.
    pub fn evaluate(&self, t: &Term) -> Result<usize> {
        t.check(self.base.signature(), self.arity)?;
        let mut env = vec![0; self.arity];
        let mut vals = Vec::with_capacity(self.points);
        for point in 0..self.points {
            decode_tuple(point, self.base.size(), self.arity, &mut env);
            vals.push(eval_term(&self.base, t, &env)? as u32);
        }
        self.find(&vals)
            .ok_or_else(|| Error::Internal("term value missing from the clone slice".into()))
    }

    /// Value at the point `args`.
    pub fn value(&self, member: usize, args: &[Element]) -> Element {
        let n = self.base.size();
        let point = args.iter().fold(0, |acc, &a| acc * n + a);
        self.member(member)[point] as Element
    }

    /// The slice as an algebra (the free algebra of the generated variety
    /// on `k` generators). Labels are the rendered witness terms.
    pub fn to_algebra(&self, name: impl Into<String>, variables: &[&str]) -> Result<FiniteAlgebra> {
        let size = self.len();
        let sig = self.base.signature();
        let mut operations = Vec::with_capacity(sig.len());
        for sym in 0..sig.len() {
            let arity = sig.arity(sym);
            let len = (0..arity).try_fold(1usize, |acc, _| acc.checked_mul(size));
            let len = len
                .filter(|&l| l <= crate::algebra::MAX_TABLE_LEN)
                .ok_or_else(|| Error::CapExceeded {
                    what: format!("table of `{}` on {size} elements", sig.name(sym)),
                    cap: crate::algebra::MAX_TABLE_LEN,
                    bound: format!("{size}^{arity}"),
                })?;
            let table = (0..len)
                .into_par_iter()
                .map_init(
                    || {
                        (
                            Vec::with_capacity(MAX_ARITY),
                            Vec::with_capacity(self.points),
                        )
                    },
                    |(args, buf), flat| {
                        decode_tuple(flat, size, arity, args);
                        self.apply_into(sym, args, buf);
                        self.index[buf.as_slice()]
                    },
                )
                .collect();
            operations.push((Symbol::new(sig.name(sym), arity), table));
        }
        let labels = self
            .witnesses
            .iter()
            .map(|t| t.render(sig, variables))
            .collect();
        FiniteAlgebra::new(name, size, operations)?.with_labels(labels)
    }

    /// Pointwise application of `sym` to members.
    fn apply_into(&self, sym: usize, args: &[usize], out: &mut Vec<u32>) {
        apply_pointwise(&self.base, self.points, &self.values, sym, args, out);
    }
}

fn apply_pointwise(
    base: &FiniteAlgebra,
    points: usize,
    values: &[u32],
    sym: usize,
    args: &[usize],
    out: &mut Vec<u32>,
) {
    let n = base.size();
    let table = base.table(sym);
    out.clear();
    for point in 0..points {
        let flat = args.iter().fold(0usize, |acc, &m| {
            acc * n + values[m * points + point] as usize
        });
        out.push(table[flat]);
    }
}

fn domain_points(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

/// Generates the k-ary term operations of `base`, refusing to go past
/// `limits.max_free_size` members.
pub fn clone_slice(base: &Arc<FiniteAlgebra>, k: usize, limits: &Limits) -> Result<CloneSlice> {
    let n = base.size();
    let points = domain_points(n, k)
        .filter(|&p| p <= 1 << 20)
        .ok_or_else(|| Error::CapExceeded {
            what: format!("domain of {k}-ary operations on `{}`", base.name()),
            cap: 1 << 20,
            bound: format!("{n}^{k}"),
        })?;
    let cap = limits.max_free_size;
    let mut slice = CloneSlice {
        base: base.clone(),
        arity: k,
        points,
        values: Vec::new(),
        witnesses: Vec::new(),
        index: HashMap::new(),
        projections: Vec::with_capacity(k),
    };
    let mut tuple = Vec::with_capacity(k);
    for var in 0..k {
        let vals: Vec<u32> = (0..points)
            .map(|p| {
                decode_tuple(p, n, k, &mut tuple);
                tuple[var] as u32
            })
            .collect();
        let idx = match slice.find(&vals) {
            Some(i) => i,
            None => push(&mut slice, vals, Term::Var(var), cap)?,
        };
        slice.projections.push(idx);
    }

    let sig = base.signature().clone();
    let mut layer_start = 0;
    let mut first_round = true;
    loop {
        let total = slice.len();
        let layer_end = total;
        for sym in 0..sig.len() {
            let arity = sig.arity(sym);
            if arity == 0 {
                if first_round {
                    let mut buf = Vec::new();
                    apply_pointwise(base, points, &slice.values, sym, &[], &mut buf);
                    if slice.find(&buf).is_none() {
                        push(&mut slice, buf, Term::Op(sym, Vec::new()), cap)?;
                    }
                }
                continue;
            }
            if total == 0 {
                continue;
            }
            let found = round_candidates(&slice, sym, arity, total, layer_start);
            for (args, vals) in found {
                if slice.find(&vals).is_none() {
                    let t = Term::Op(
                        sym,
                        args.iter().map(|&a| slice.witnesses[a].clone()).collect(),
                    );
                    push(&mut slice, vals, t, cap)?;
                }
            }
        }
        first_round = false;
        if slice.len() == total {
            break;
        }
        layer_start = layer_end;
    }
    Ok(slice)
}

fn push(slice: &mut CloneSlice, vals: Vec<u32>, t: Term, cap: usize) -> Result<usize> {
    if slice.len() >= cap {
        let n = slice.base.size();
        return Err(Error::CapExceeded {
            what: format!(
                "{}-ary term operations of `{}`",
                slice.arity,
                slice.base.name()
            ),
            cap,
            bound: format!("{n}^{}", slice.points),
        });
    }
    let idx = slice.len();
    slice.values.extend_from_slice(&vals);
    slice.index.insert(vals.into_boxed_slice(), idx);
    slice.witnesses.push(t);
    Ok(idx)
}

/// New values from applying `sym` to tuples over members `0..total` that
/// use at least one member from `layer_start..`, in lexicographic order
/// of the tuples (first occurrence kept).
fn round_candidates(
    slice: &CloneSlice,
    sym: usize,
    arity: usize,
    total: usize,
    layer_start: usize,
) -> Vec<(Vec<usize>, Vec<u32>)> {
    let chunks: Vec<Vec<(Vec<usize>, Vec<u32>)>> = (0..total)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut seen = HashSet::new();
            let mut args = vec![0usize; arity];
            args[0] = first;
            let mut buf = Vec::with_capacity(slice.points);
            loop {
                if args.iter().any(|&a| a >= layer_start) {
                    slice.apply_into(sym, &args, &mut buf);
                    if slice.find(&buf).is_none() && seen.insert(buf.clone()) {
                        out.push((args.clone(), buf.clone()));
                    }
                }
                // odometer over positions 1.., last fastest
                let mut i = arity;
                loop {
                    i -= 1;
                    if i == 0 {
                        return out;
                    }
                    args[i] += 1;
                    if args[i] < total {
                        break;
                    }
                    args[i] = 0;
                }
            }
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Which identities a term finder looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// `g(x,y,y) = x = g(y,y,x)`.
    Malcev,
    /// `m(x,x,y) = m(x,y,x) = m(y,x,x) = x`.
    Majority,
    /// `s(x,0) = x`, `s(x,x) = 0`.
    Subtraction,
}

impl TermKind {
    pub fn arity(self) -> usize {
        match self {
            TermKind::Malcev | TermKind::Majority => 3,
            TermKind::Subtraction => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TermKind::Malcev => "malcev",
            TermKind::Majority => "majority",
            TermKind::Subtraction => "subtraction",
        }
    }

    /// Every instance of the identities over `A`, as
    /// `(argument tuple, expected value)`.
    fn instances(self, alg: &FiniteAlgebra) -> Result<Vec<([Element; 3], Element)>> {
        let n = alg.size();
        let mut out = Vec::new();
        match self {
            TermKind::Malcev => {
                for x in 0..n {
                    for y in 0..n {
                        out.push(([x, y, y], x));
                        out.push(([y, y, x], x));
                    }
                }
            }
            TermKind::Majority => {
                for x in 0..n {
                    for y in 0..n {
                        out.push(([x, x, y], x));
                        out.push(([x, y, x], x));
                        out.push(([y, x, x], x));
                    }
                }
            }
            TermKind::Subtraction => {
                let zero = alg.require_zero()?;
                for x in 0..n {
                    out.push(([x, zero, 0], x));
                    out.push(([x, x, 0], zero));
                }
            }
        }
        Ok(out)
    }
}

impl std::str::FromStr for TermKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "malcev" => Ok(TermKind::Malcev),
            "majority" => Ok(TermKind::Majority),
            "subtraction" => Ok(TermKind::Subtraction),
            other => Err(Error::Format(format!(
                "unknown term kind `{other}` (expected malcev, majority or subtraction)"
            ))),
        }
    }
}

/// Checks the identities of `kind` for `t` under every substitution.
pub fn satisfies(alg: &FiniteAlgebra, kind: TermKind, t: &Term) -> Result<bool> {
    t.check(alg.signature(), kind.arity())?;
    for (args, expected) in kind.instances(alg)? {
        if eval_term(alg, t, &args[..kind.arity()])? != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first member of the clone slice (minimal depth) satisfying the
/// identities of `kind`, or `None` if no term operation does. The result
/// is re-verified by term evaluation before it is returned.
pub fn find_term(
    alg: &Arc<FiniteAlgebra>,
    kind: TermKind,
    limits: &Limits,
) -> Result<Option<Term>> {
    let instances = kind.instances(alg)?;
    let slice = clone_slice(alg, kind.arity(), limits)?;
    let hit = (0..slice.len()).find(|&i| {
        instances
            .iter()
            .all(|(args, expected)| slice.value(i, &args[..kind.arity()]) == *expected)
    });
    let Some(i) = hit else { return Ok(None) };
    let t = slice.witness(i).clone();
    if !satisfies(alg, kind, &t)? {
        return Err(Error::Internal(format!(
            "{} candidate failed re-verification",
            kind.name()
        )));
    }
    Ok(Some(t))
}

pub fn find_malcev(alg: &Arc<FiniteAlgebra>, limits: &Limits) -> Result<Option<Term>> {
    find_term(alg, TermKind::Malcev, limits)
}

pub fn find_majority(alg: &Arc<FiniteAlgebra>, limits: &Limits) -> Result<Option<Term>> {
    find_term(alg, TermKind::Majority, limits)
}

pub fn find_subtraction(alg: &Arc<FiniteAlgebra>, limits: &Limits) -> Result<Option<Term>> {
    find_term(alg, TermKind::Subtraction, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
        Arc::new(a)
    }

    #[test]
    fn set_slice_is_projections() {
        let s = clone_slice(&arc(fixtures::set2()), 3, &Limits::default()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.witnesses(), &[Term::Var(0), Term::Var(1), Term::Var(2)]);
    }

    #[test]
    fn z2_slices() {
        let z2 = arc(fixtures::z2());
        assert_eq!(clone_slice(&z2, 1, &Limits::default()).unwrap().len(), 2);
        assert_eq!(clone_slice(&z2, 2, &Limits::default()).unwrap().len(), 4);
        assert_eq!(clone_slice(&z2, 3, &Limits::default()).unwrap().len(), 8);
        // constants alone: the nullary slice
        assert_eq!(clone_slice(&z2, 0, &Limits::default()).unwrap().len(), 1);
    }

    #[test]
    fn lattice_slice_has_median() {
        let l = arc(fixtures::lattice2(false));
        let s = clone_slice(&l, 3, &Limits::default()).unwrap();
        // the free distributive lattice on 3 generators has 18 elements
        assert_eq!(s.len(), 18);
        let median: Vec<u32> = (0..8u32)
            .map(|p| {
                let (x, y, z) = (p >> 2 & 1, p >> 1 & 1, p & 1);
                u32::from(x + y + z >= 2)
            })
            .collect();
        assert!(s.find(&median).is_some());
    }

    #[test]
    fn cap_is_enforced() {
        let l = arc(fixtures::lattice2(false));
        let limits = Limits {
            max_free_size: 10,
            ..Limits::default()
        };
        assert!(matches!(
            clone_slice(&l, 3, &limits),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn witnesses_evaluate_to_members() {
        let x = arc(fixtures::subtraction_x());
        let s = clone_slice(&x, 2, &Limits::default()).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.evaluate(s.witness(i)).unwrap(), i);
        }
    }

    #[test]
    fn finders() {
        let limits = Limits::default();
        let z2 = arc(fixtures::z2());
        let lat = arc(fixtures::lattice2(false));
        let x = arc(fixtures::subtraction_x());
        let ps = arc(fixtures::pointed_set2());

        let m = find_malcev(&z2, &limits).unwrap().unwrap();
        assert!(satisfies(&z2, TermKind::Malcev, &m).unwrap());
        assert!(find_majority(&z2, &limits).unwrap().is_none());

        let maj = find_majority(&lat, &limits).unwrap().unwrap();
        assert!(satisfies(&lat, TermKind::Majority, &maj).unwrap());
        assert!(find_malcev(&lat, &limits).unwrap().is_none());

        assert!(find_malcev(&x, &limits).unwrap().is_none());
        let s = find_subtraction(&x, &limits).unwrap().unwrap();
        assert_eq!(s.render(x.signature(), &["x", "y"]), "(x - y)");

        let s = find_subtraction(&z2, &limits).unwrap().unwrap();
        assert_eq!(s.render(z2.signature(), &["x", "y"]), "(x + y)");

        assert!(find_subtraction(&ps, &limits).unwrap().is_none());
        assert!(matches!(
            find_subtraction(&lat, &limits),
            Err(Error::NotPointed(_))
        ));
    }

    #[test]
    fn one_element_majority_is_projection() {
        let one = arc(fixtures::trivial(fixtures::z2().signature()));
        let t = find_majority(&one, &Limits::default()).unwrap().unwrap();
        assert_eq!(t, Term::Var(0));
    }

    #[test]
    fn to_algebra_matches_pointwise() {
        let z2 = arc(fixtures::z2());
        let s = clone_slice(&z2, 2, &Limits::default()).unwrap();
        let f = s.to_algebra("F", &["x", "y"]).unwrap();
        assert_eq!(f.size(), 4);
        let plus = f.signature().index_of("+").unwrap();
        let (x, y) = (s.projection(0), s.projection(1));
        let sum = f.apply(plus, &[x, y]);
        assert_eq!(f.label(sum), "(x + y)");
        assert_eq!(f.apply(plus, &[sum, sum]), f.zero().unwrap());
    }
}
