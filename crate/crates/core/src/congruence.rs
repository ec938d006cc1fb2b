//! Congruences, congruence generation with derivation traces, and
//! enumeration of the congruence lattice.
//!
//! Generation runs a worklist over a union-find. Every successful union
//! is recorded as a trace step ("edge"). When an edge `(a, b)` is popped,
//! each basic translation `f(c_1, .., _, .., c_k)` is applied to it and
//! the two images are merged. The resulting equivalence is closed under
//! basic translations, hence a congruence, and it is the least one
//! containing the generators. Edges are processed in FIFO order; within an
//! edge, symbols go in signature order, then the hole position, then the
//! remaining arguments in lexicographic order.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::{decode_tuple, Element, FiniteAlgebra, MAX_ARITY};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};

/// Operation-compatible partition of an algebra's carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    algebra: Arc<FiniteAlgebra>,
    partition: Partition,
}

impl Congruence {
    /// Validates operation compatibility.
    pub fn new(algebra: Arc<FiniteAlgebra>, partition: Partition) -> Result<Self> {
        if partition.len() != algebra.size() {
            return Err(Error::NotCongruence {
                algebra: algebra.name().to_string(),
                reason: format!(
                    "partition of {} elements for carrier of size {}",
                    partition.len(),
                    algebra.size()
                ),
            });
        }
        if let Some(reason) = algebra.compatibility_failure(partition.reps()) {
            return Err(Error::NotCongruence {
                algebra: algebra.name().to_string(),
                reason,
            });
        }
        Ok(Congruence { algebra, partition })
    }

    /// For partitions that are congruences by construction.
    pub(crate) fn trusted(algebra: Arc<FiniteAlgebra>, partition: Partition) -> Self {
        debug_assert!(algebra.compatibility_failure(partition.reps()).is_none());
        Congruence { algebra, partition }
    }

    pub fn diagonal(algebra: Arc<FiniteAlgebra>) -> Self {
        let n = algebra.size();
        Congruence {
            algebra,
            partition: Partition::discrete(n),
        }
    }

    pub fn total(algebra: Arc<FiniteAlgebra>) -> Self {
        let n = algebra.size();
        Congruence {
            algebra,
            partition: Partition::total(n),
        }
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    #[inline]
    pub fn related(&self, a: Element, b: Element) -> bool {
        self.partition.related(a, b)
    }

    pub fn blocks(&self) -> Vec<Vec<Element>> {
        self.partition.blocks()
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        self.partition.leq(&other.partition)
    }

    /// Intersection; always a congruence.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        Congruence::trusted(self.algebra.clone(), self.partition.meet(&other.partition))
    }

    /// Least congruence above both.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let seeds = partition_pairs(&self.partition)
            .chain(partition_pairs(&other.partition))
            .collect::<Vec<_>>();
        let (uf, _) = close(&self.algebra, &seeds, false);
        Congruence::trusted(self.algebra.clone(), uf.into_partition())
    }

    /// Blocks as sorted arrays of element indices.
    pub fn blocks_json(&self) -> Value {
        Value::Array(
            self.blocks()
                .into_iter()
                .map(|b| Value::Array(b.into_iter().map(|e| json!(e)).collect()))
                .collect(),
        )
    }
}

fn partition_pairs(p: &Partition) -> impl Iterator<Item = (Element, Element)> + '_ {
    (0..p.len())
        .filter(move |&e| p.rep(e) != e)
        .map(move |e| (p.rep(e), e))
}

/// Why a pair belongs to a generated congruence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// The `k`-th generating pair.
    Generator(usize),
    Reflexivity,
    /// Reverse of an earlier step.
    Symmetry(usize),
    /// `(a, via)` from step `left` and `(via, b)` from step `right`.
    Transitivity {
        via: Element,
        left: usize,
        right: usize,
    },
    /// `(f(a_1..a_k), f(b_1..b_k))` where every argument pair is reflexive
    /// except the one equal to the pair of step `premise`.
    OpApplication {
        symbol: usize,
        args: Vec<(Element, Element)>,
        premise: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub pair: (Element, Element),
    pub justification: Justification,
}

/// One link of a transitivity chain: an engine step, possibly reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub step: usize,
    pub reversed: bool,
}

/// Justification list for a generated congruence. Every step refers only
/// to earlier steps, so the justification graph is acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    generators: Vec<(Element, Element)>,
    steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn generators(&self) -> &[(Element, Element)] {
        &self.generators
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    /// Path of engine edges joining `a` to `b`, oriented from `a`.
    /// `Some(vec![])` when `a == b`; `None` when unrelated.
    pub fn chain(&self, a: Element, b: Element) -> Option<Vec<Link>> {
        if a == b {
            return Some(Vec::new());
        }
        let mut adj: std::collections::HashMap<Element, Vec<(usize, Element, bool)>> =
            std::collections::HashMap::new();
        for (i, s) in self.steps.iter().enumerate() {
            if !matches!(
                s.justification,
                Justification::Generator(_) | Justification::OpApplication { .. }
            ) || s.pair.0 == s.pair.1
            {
                continue;
            }
            adj.entry(s.pair.0).or_default().push((i, s.pair.1, false));
            adj.entry(s.pair.1).or_default().push((i, s.pair.0, true));
        }
        let mut back: std::collections::HashMap<Element, (Element, Link)> =
            std::collections::HashMap::new();
        let mut queue = VecDeque::from([a]);
        let mut seen = HashSet::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &(step, y, reversed) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y) {
                    back.insert(y, (x, Link { step, reversed }));
                    queue.push_back(y);
                }
            }
        }
        if !seen.contains(&b) {
            return None;
        }
        let mut links = Vec::new();
        let mut cur = b;
        while cur != a {
            let (prev, link) = back[&cur];
            links.push(link);
            cur = prev;
        }
        links.reverse();
        Some(links)
    }

    /// A self-contained trace whose last step derives `(a, b)`, using
    /// Symmetry and Transitivity on top of the needed engine steps.
    pub fn justify(&self, a: Element, b: Element) -> Option<DerivationTrace> {
        let links = self.chain(a, b)?;
        if links.is_empty() {
            return Some(DerivationTrace {
                generators: self.generators.clone(),
                steps: vec![TraceStep {
                    pair: (a, a),
                    justification: Justification::Reflexivity,
                }],
            });
        }
        // Ancestors of the chain's edges, in original order.
        let mut needed = vec![false; self.steps.len()];
        let mut stack: Vec<usize> = links.iter().map(|l| l.step).collect();
        while let Some(i) = stack.pop() {
            if needed[i] {
                continue;
            }
            needed[i] = true;
            if let Justification::OpApplication { premise, .. } = self.steps[i].justification {
                stack.push(premise);
            }
        }
        let mut remap = vec![usize::MAX; self.steps.len()];
        let mut steps = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            if !needed[i] {
                continue;
            }
            let mut s = s.clone();
            if let Justification::OpApplication { premise, .. } = &mut s.justification {
                *premise = remap[*premise];
            }
            remap[i] = steps.len();
            steps.push(s);
        }
        let mut oriented = Vec::with_capacity(links.len());
        for link in &links {
            let idx = remap[link.step];
            if link.reversed {
                let (x, y) = steps[idx].pair;
                steps.push(TraceStep {
                    pair: (y, x),
                    justification: Justification::Symmetry(idx),
                });
                oriented.push(steps.len() - 1);
            } else {
                oriented.push(idx);
            }
        }
        let mut acc = oriented[0];
        for &next in &oriented[1..] {
            let (x, via) = steps[acc].pair;
            let (_, y) = steps[next].pair;
            steps.push(TraceStep {
                pair: (x, y),
                justification: Justification::Transitivity {
                    via,
                    left: acc,
                    right: next,
                },
            });
            acc = steps.len() - 1;
        }
        Some(DerivationTrace {
            generators: self.generators.clone(),
            steps,
        })
    }

    /// Checks every step against the algebra and the generators, and
    /// returns the equivalence generated by all derived pairs.
    pub fn replay(&self, alg: &FiniteAlgebra) -> Result<Partition> {
        let bad = |i: usize, why: &str| Error::Internal(format!("trace step {i}: {why}"));
        let n = alg.size();
        let mut uf = UnionFind::new(n);
        for (i, step) in self.steps.iter().enumerate() {
            let (a, b) = step.pair;
            if a >= n || b >= n {
                return Err(bad(i, "element out of range"));
            }
            let earlier = |j: usize| -> Result<(Element, Element)> {
                if j < i {
                    Ok(self.steps[j].pair)
                } else {
                    Err(bad(i, "refers forward"))
                }
            };
            match &step.justification {
                Justification::Generator(k) => {
                    if self.generators.get(*k) != Some(&(a, b)) {
                        return Err(bad(i, "not the named generator"));
                    }
                }
                Justification::Reflexivity => {
                    if a != b {
                        return Err(bad(i, "reflexivity on distinct elements"));
                    }
                }
                Justification::Symmetry(j) => {
                    if earlier(*j)? != (b, a) {
                        return Err(bad(i, "symmetry of a different pair"));
                    }
                }
                Justification::Transitivity { via, left, right } => {
                    if earlier(*left)? != (a, *via) || earlier(*right)? != (*via, b) {
                        return Err(bad(i, "transitivity does not compose"));
                    }
                }
                Justification::OpApplication {
                    symbol,
                    args,
                    premise,
                } => {
                    let prem = earlier(*premise)?;
                    if *symbol >= alg.signature().len()
                        || alg.signature().arity(*symbol) != args.len()
                    {
                        return Err(bad(i, "bad symbol or arity"));
                    }
                    if args.iter().any(|&(x, y)| x >= n || y >= n) {
                        return Err(bad(i, "argument out of range"));
                    }
                    if !args.iter().all(|&p| p.0 == p.1 || p == prem) {
                        return Err(bad(i, "argument pair neither reflexive nor the premise"));
                    }
                    let l: Vec<Element> = args.iter().map(|p| p.0).collect();
                    let r: Vec<Element> = args.iter().map(|p| p.1).collect();
                    if (alg.apply(*symbol, &l), alg.apply(*symbol, &r)) != (a, b) {
                        return Err(bad(i, "operation does not produce the pair"));
                    }
                }
            }
            uf.union(a, b);
        }
        Ok(uf.into_partition())
    }

    pub fn to_json(&self, alg: &FiniteAlgebra) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                let why = match &s.justification {
                    Justification::Generator(k) => json!({"generator": k}),
                    Justification::Reflexivity => json!({"reflexivity": true}),
                    Justification::Symmetry(j) => json!({"symmetry": j}),
                    Justification::Transitivity { via, left, right } => {
                        json!({"transitivity": {"via": via, "left": left, "right": right}})
                    }
                    Justification::OpApplication {
                        symbol,
                        args,
                        premise,
                    } => json!({"operation": {
                        "symbol": alg.signature().name(*symbol),
                        "args": args,
                        "premise": premise,
                    }}),
                };
                json!({"pair": [s.pair.0, s.pair.1], "by": why})
            })
            .collect();
        json!({"generators": self.generators, "steps": steps})
    }
}

/// Core closure. Returns the union-find and, if `record`, the engine steps.
fn close(
    alg: &FiniteAlgebra,
    pairs: &[(Element, Element)],
    record: bool,
) -> (UnionFind, Vec<TraceStep>) {
    let n = alg.size();
    let sig = alg.signature();
    let mut uf = UnionFind::new(n);
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut queue: VecDeque<(Element, Element, usize)> = VecDeque::new();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        if uf.union(a, b) {
            let id = if record {
                steps.push(TraceStep {
                    pair: (a, b),
                    justification: Justification::Generator(k),
                });
                steps.len() - 1
            } else {
                usize::MAX
            };
            queue.push_back((a, b, id));
        }
    }
    let mut args = Vec::with_capacity(MAX_ARITY);
    while let Some((a, b, premise)) = queue.pop_front() {
        for sym in 0..sig.len() {
            let arity = sig.arity(sym);
            if arity == 0 {
                continue;
            }
            let others = n.pow(arity as u32 - 1);
            for pos in 0..arity {
                for flat in 0..others {
                    decode_tuple(flat, n, arity - 1, &mut args);
                    args.insert(pos, a);
                    let fa = alg.apply(sym, &args);
                    args[pos] = b;
                    let fb = alg.apply(sym, &args);
                    if fa != fb && uf.union(fa, fb) {
                        let id = if record {
                            let arg_pairs = args
                                .iter()
                                .enumerate()
                                .map(|(i, &c)| if i == pos { (a, b) } else { (c, c) })
                                .collect();
                            steps.push(TraceStep {
                                pair: (fa, fb),
                                justification: Justification::OpApplication {
                                    symbol: sym,
                                    args: arg_pairs,
                                    premise,
                                },
                            });
                            steps.len() - 1
                        } else {
                            usize::MAX
                        };
                        queue.push_back((fa, fb, id));
                    }
                }
            }
        }
    }
    (uf, steps)
}

fn check_pairs(alg: &FiniteAlgebra, pairs: &[(Element, Element)]) -> Result<()> {
    pairs.iter().try_for_each(|&(a, b)| {
        alg.check_element(a)?;
        alg.check_element(b)
    })
}

/// Least congruence containing `pairs`, with a trace justifying it.
pub fn congruence_generated(
    alg: &Arc<FiniteAlgebra>,
    pairs: &[(Element, Element)],
) -> Result<(Congruence, DerivationTrace)> {
    check_pairs(alg, pairs)?;
    let (uf, steps) = close(alg, pairs, true);
    let trace = DerivationTrace {
        generators: pairs.to_vec(),
        steps,
    };
    Ok((Congruence::trusted(alg.clone(), uf.into_partition()), trace))
}

/// [`congruence_generated`] without recording a trace.
pub fn cg(alg: &Arc<FiniteAlgebra>, pairs: &[(Element, Element)]) -> Result<Congruence> {
    check_pairs(alg, pairs)?;
    let (uf, _) = close(alg, pairs, false);
    Ok(Congruence::trusted(alg.clone(), uf.into_partition()))
}

pub fn principal_congruence(
    alg: &Arc<FiniteAlgebra>,
    x: Element,
    y: Element,
) -> Result<(Congruence, DerivationTrace)> {
    congruence_generated(alg, &[(x, y)])
}

/// Default carrier bound for [`all_congruences`].
pub const DEFAULT_CONGRUENCE_ENUM_BOUND: usize = 12;

/// Every congruence of `alg`, sorted by representative array (so the
/// diagonal comes last and the total congruence first).
///
/// Every congruence is a join of principal congruences, so the lattice is
/// the closure of the diagonal under joining with principal congruences.
pub fn all_congruences(alg: &Arc<FiniteAlgebra>, bound: usize) -> Result<Vec<Congruence>> {
    let n = alg.size();
    if n > bound {
        return Err(Error::CapExceeded {
            what: format!("congruence enumeration on `{}`", alg.name()),
            cap: bound,
            bound: n.to_string(),
        });
    }
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen_principal = HashSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let (uf, _) = close(alg, &[(a, b)], false);
            let p = uf.into_partition();
            if seen_principal.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    let mut found: HashSet<Partition> = HashSet::new();
    let mut list = vec![Partition::discrete(n)];
    found.insert(list[0].clone());
    let mut i = 0;
    while i < list.len() {
        let theta = list[i].clone();
        for p in &principals {
            if p.leq(&theta) {
                continue;
            }
            let joined = theta.join(p);
            // The join of two congruences as equivalences may need
            // re-closing under the operations.
            let seeds: Vec<_> = partition_pairs(&joined).collect();
            let (uf, _) = close(alg, &seeds, false);
            let c = uf.into_partition();
            if found.insert(c.clone()) {
                list.push(c);
            }
        }
        i += 1;
    }
    list.sort();
    Ok(list
        .into_iter()
        .map(|p| Congruence::trusted(alg.clone(), p))
        .collect())
}
