//! Machine-checkable certificates attached to verdicts, and their
//! re-verification.
//!
//! Validation deliberately avoids the library's congruence engine:
//! congruences are recomputed by sweeping every operation to a fixpoint,
//! and traces are replayed step by step against raw tables.

use pcoeq::algebra::MAX_ARITY;
use pcoeq::clone::TermKind;
use pcoeq::decide::{verify_local_terms, verify_p_terms, Schema};
use pcoeq::io::{algebra_from_json, algebra_to_json, witness_from_json};
use pcoeq::{eval_term, Element, FiniteAlgebra, Outcome, Partition, Term};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Evidence for a verdict. Algebras are embedded in the file format so a
/// certificate can be checked on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `pair` is not in `Cg(generators)`. With `kernel` (class keys per
    /// element), also: `kernel` is a congruence containing the generators
    /// and relating `pair`, so it differs from `Cg(generators)`.
    NonMembership {
        algebra: Value,
        generators: Vec<(Element, Element)>,
        pair: (Element, Element),
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<Vec<usize>>,
    },
    /// `pair` is in `Cg(generators)`, as derived by `trace`.
    Membership {
        algebra: Value,
        generators: Vec<(Element, Element)>,
        pair: (Element, Element),
        trace: Value,
    },
    /// `Cg(generators)` is exactly the partition given by `kernel`.
    CongruenceEqual {
        algebra: Value,
        generators: Vec<(Element, Element)>,
        kernel: Vec<usize>,
    },
    /// `map` does not commute with `symbol` at `args`.
    NotHomomorphism {
        source: Value,
        target: Value,
        map: Vec<Element>,
        symbol: String,
        args: Vec<Element>,
    },
    /// The two elements of `pair` have different images under `map`.
    Separated {
        map: Vec<Element>,
        pair: (Element, Element),
    },
    /// No term operation of the given arity satisfies the identities.
    NoTerm { algebra: Value, term_kind: String },
    /// A term satisfying the identities of `term_kind`, in prefix form over
    /// `x, y` (binary) or `x, y, z` (ternary).
    Term {
        algebra: Value,
        term_kind: String,
        term: Value,
    },
    /// Witness terms for the given schema.
    Terms { algebra: Value, witness: Value },
}

/// Congruence generated by `pairs`, by sweeping all operations until no
/// new pair appears. Independent of the library's worklist engine.
pub fn naive_congruence(alg: &FiniteAlgebra, pairs: &[(Element, Element)]) -> Partition {
    let n = alg.size();
    let mut class: Vec<usize> = (0..n).collect();
    let merge = |class: &mut Vec<usize>, a: usize, b: usize| -> bool {
        let (ca, cb) = (class[a], class[b]);
        if ca == cb {
            return false;
        }
        let (keep, drop) = (ca.min(cb), ca.max(cb));
        for c in class.iter_mut() {
            if *c == drop {
                *c = keep;
            }
        }
        true
    };
    for &(a, b) in pairs {
        merge(&mut class, a, b);
    }
    let sig = alg.signature();
    let mut args = [0usize; MAX_ARITY];
    let mut moved = [0usize; MAX_ARITY];
    loop {
        let mut changed = false;
        for sym in 0..sig.len() {
            let k = sig.arity(sym);
            for flat in 0..n.pow(k as u32) {
                let mut rest = flat;
                for i in (0..k).rev() {
                    args[i] = rest % n;
                    rest /= n;
                }
                let base = alg.apply(sym, &args[..k]);
                for pos in 0..k {
                    for other in 0..n {
                        if class[other] != class[args[pos]] || other == args[pos] {
                            continue;
                        }
                        moved[..k].copy_from_slice(&args[..k]);
                        moved[pos] = other;
                        let image = alg.apply(sym, &moved[..k]);
                        changed |= merge(&mut class, base, image);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Partition::from_keys(class)
}

fn load(value: &Value) -> Result<FiniteAlgebra, String> {
    algebra_from_json(value).map_err(|e| e.to_string())
}

fn check_range(
    alg: &FiniteAlgebra,
    elems: impl IntoIterator<Item = Element>,
) -> Result<(), String> {
    for e in elems {
        if e >= alg.size() {
            return Err(format!("element {e} outside `{}`", alg.name()));
        }
    }
    Ok(())
}

fn kernel_partition(alg: &FiniteAlgebra, kernel: &[usize]) -> Result<Partition, String> {
    if kernel.len() != alg.size() {
        return Err(format!(
            "kernel has {} keys for {} elements",
            kernel.len(),
            alg.size()
        ));
    }
    Ok(Partition::from_keys(kernel.iter().copied()))
}

/// Whether a partition is compatible with every operation.
fn is_congruence(alg: &FiniteAlgebra, p: &Partition) -> bool {
    naive_congruence(alg, &partition_pairs(p)) == *p
}

fn partition_pairs(p: &Partition) -> Vec<(Element, Element)> {
    (0..p.len())
        .map(|e| (p.rep(e), e))
        .filter(|(r, e)| r != e)
        .collect()
}

/// Replays a trace in the library's JSON form against raw tables.
fn replay(
    alg: &FiniteAlgebra,
    generators: &[(Element, Element)],
    trace: &Value,
) -> Result<Vec<(Element, Element)>, String> {
    let steps = trace
        .get("steps")
        .and_then(Value::as_array)
        .ok_or("trace has no steps")?;
    let pair_of = |v: &Value| -> Result<(Element, Element), String> {
        let arr = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or("pair must have two entries")?;
        let get = |x: &Value| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or("pair entries must be indices")
        };
        Ok((get(&arr[0])?, get(&arr[1])?))
    };
    let idx = |v: &Value| {
        v.as_u64()
            .map(|x| x as usize)
            .ok_or("step reference must be an index")
    };
    let mut derived: Vec<(Element, Element)> = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let pair = pair_of(step.get("pair").ok_or("step without pair")?)?;
        check_range(alg, [pair.0, pair.1])?;
        let by = step.get("by").ok_or("step without justification")?;
        let earlier = |j: usize| -> Result<(Element, Element), String> {
            derived
                .get(j)
                .copied()
                .filter(|_| j < i)
                .ok_or(format!("step {i} refers forward"))
        };
        let ok = if let Some(k) = by.get("generator") {
            generators.get(idx(k)?) == Some(&pair)
        } else if by.get("reflexivity").is_some() {
            pair.0 == pair.1
        } else if let Some(j) = by.get("symmetry") {
            let (a, b) = earlier(idx(j)?)?;
            (b, a) == pair
        } else if let Some(t) = by.get("transitivity") {
            let via = idx(t.get("via").ok_or("transitivity without via")?)?;
            let l = earlier(idx(t.get("left").ok_or("no left")?)?)?;
            let r = earlier(idx(t.get("right").ok_or("no right")?)?)?;
            l == (pair.0, via) && r == (via, pair.1)
        } else if let Some(op) = by.get("operation") {
            let name = op
                .get("symbol")
                .and_then(Value::as_str)
                .ok_or("operation without symbol")?;
            let sym = alg
                .signature()
                .index_of(name)
                .ok_or(format!("unknown symbol `{name}`"))?;
            let prem = earlier(idx(op.get("premise").ok_or("no premise")?)?)?;
            let args = op
                .get("args")
                .and_then(Value::as_array)
                .ok_or("operation without args")?
                .iter()
                .map(pair_of)
                .collect::<Result<Vec<_>, _>>()?;
            if args.len() != alg.signature().arity(sym) {
                return Err(format!("step {i}: wrong arity"));
            }
            check_range(alg, args.iter().flat_map(|&(a, b)| [a, b]))?;
            let left: Vec<_> = args.iter().map(|p| p.0).collect();
            let right: Vec<_> = args.iter().map(|p| p.1).collect();
            args.iter().all(|&p| p.0 == p.1 || p == prem)
                && (alg.apply(sym, &left), alg.apply(sym, &right)) == pair
        } else {
            return Err(format!("step {i}: unknown justification"));
        };
        if !ok {
            return Err(format!("step {i} does not follow"));
        }
        derived.push(pair);
    }
    Ok(derived)
}

/// All `k`-ary term operations, by naive closure of the projections and
/// constants under the operations, as value vectors.
fn naive_clone(alg: &FiniteAlgebra, k: usize) -> Vec<Vec<usize>> {
    let n = alg.size();
    let points = n.pow(k as u32);
    let digit = |p: usize, i: usize| (p / n.pow((k - 1 - i) as u32)) % n;
    let mut members: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..points).map(|p| digit(p, i)).collect())
        .collect();
    members.dedup();
    let sig = alg.signature();
    let mut seen: std::collections::HashSet<Vec<usize>> = members.iter().cloned().collect();
    loop {
        let before = members.len();
        for sym in 0..sig.len() {
            let a = sig.arity(sym);
            let total = members.len();
            for flat in 0..total.pow(a as u32) {
                let mut rest = flat;
                let mut pick = vec![0; a];
                for slot in pick.iter_mut().rev() {
                    *slot = rest % total;
                    rest /= total;
                }
                let f: Vec<usize> = (0..points)
                    .map(|p| {
                        let vals: Vec<usize> = pick.iter().map(|&m| members[m][p]).collect();
                        alg.apply(sym, &vals)
                    })
                    .collect();
                if seen.insert(f.clone()) {
                    members.push(f);
                }
            }
        }
        if members.len() == before {
            return members;
        }
    }
}

fn term_identities_hold(alg: &FiniteAlgebra, kind: TermKind, f: &[usize]) -> bool {
    let n = alg.size();
    let at = |args: &[usize]| f[args.iter().fold(0, |acc, &a| acc * n + a)];
    (0..n).all(|x| {
        (0..n).all(|y| match kind {
            TermKind::Malcev => at(&[x, y, y]) == x && at(&[y, y, x]) == x,
            TermKind::Majority => at(&[x, x, y]) == x && at(&[x, y, x]) == x && at(&[y, x, x]) == x,
            TermKind::Subtraction => {
                let zero = alg.zero().unwrap_or(0);
                at(&[x, zero]) == x && at(&[x, x]) == zero
            }
        })
    })
}

impl Certificate {
    /// `Ok(())` when the certificate checks out; `Err(reason)` otherwise.
    pub fn check(&self) -> Result<(), String> {
        match self {
            Certificate::NonMembership {
                algebra,
                generators,
                pair,
                kernel,
            } => {
                let alg = load(algebra)?;
                check_range(
                    &alg,
                    generators
                        .iter()
                        .flat_map(|&(a, b)| [a, b])
                        .chain([pair.0, pair.1]),
                )?;
                let cg = naive_congruence(&alg, generators);
                if cg.related(pair.0, pair.1) {
                    return Err("pair lies in the generated congruence".into());
                }
                if let Some(keys) = kernel {
                    let k = kernel_partition(&alg, keys)?;
                    if !k.related(pair.0, pair.1) {
                        return Err("kernel does not relate the pair".into());
                    }
                    if !generators.iter().all(|&(a, b)| k.related(a, b)) {
                        return Err("kernel misses a generator".into());
                    }
                    if !is_congruence(&alg, &k) {
                        return Err("kernel is not a congruence".into());
                    }
                }
                Ok(())
            }
            Certificate::Membership {
                algebra,
                generators,
                pair,
                trace,
            } => {
                let alg = load(algebra)?;
                check_range(
                    &alg,
                    generators
                        .iter()
                        .flat_map(|&(a, b)| [a, b])
                        .chain([pair.0, pair.1]),
                )?;
                let derived = replay(&alg, generators, trace)?;
                if derived.last() != Some(pair) {
                    return Err("trace does not end in the pair".into());
                }
                Ok(())
            }
            Certificate::CongruenceEqual {
                algebra,
                generators,
                kernel,
            } => {
                let alg = load(algebra)?;
                check_range(&alg, generators.iter().flat_map(|&(a, b)| [a, b]))?;
                let k = kernel_partition(&alg, kernel)?;
                if naive_congruence(&alg, generators) == k {
                    Ok(())
                } else {
                    Err("generated congruence differs from the kernel".into())
                }
            }
            Certificate::NotHomomorphism {
                source,
                target,
                map,
                symbol,
                args,
            } => {
                let (s, t) = (load(source)?, load(target)?);
                let sym = s
                    .signature()
                    .index_of(symbol)
                    .ok_or(format!("unknown symbol `{symbol}`"))?;
                let tsym = t
                    .signature()
                    .index_of(symbol)
                    .ok_or(format!("unknown symbol `{symbol}` in target"))?;
                if map.len() != s.size() || args.len() != s.signature().arity(sym) {
                    return Err("map or argument list has the wrong length".into());
                }
                check_range(&s, args.iter().copied())?;
                check_range(&t, map.iter().copied())?;
                let images: Vec<_> = args.iter().map(|&a| map[a]).collect();
                if map[s.apply(sym, args)] != t.apply(tsym, &images) {
                    Ok(())
                } else {
                    Err("the map commutes at the given arguments".into())
                }
            }
            Certificate::Separated { map, pair } => match (map.get(pair.0), map.get(pair.1)) {
                (Some(x), Some(y)) if x != y => Ok(()),
                (Some(_), Some(_)) => Err("the map identifies the pair".into()),
                _ => Err("pair outside the map".into()),
            },
            Certificate::NoTerm { algebra, term_kind } => {
                let alg = load(algebra)?;
                let kind: TermKind = term_kind.parse().map_err(|e: pcoeq::Error| e.to_string())?;
                if kind == TermKind::Subtraction && !alg.is_pointed() {
                    return Err("subtraction terms need a pointed algebra".into());
                }
                match naive_clone(&alg, kind.arity())
                    .iter()
                    .find(|f| term_identities_hold(&alg, kind, f))
                {
                    None => Ok(()),
                    Some(_) => Err(format!("a {term_kind} term exists")),
                }
            }
            Certificate::Term {
                algebra,
                term_kind,
                term,
            } => {
                let alg = load(algebra)?;
                let kind: TermKind = term_kind.parse().map_err(|e: pcoeq::Error| e.to_string())?;
                let vars: &[&str] = if kind.arity() == 2 {
                    &["x", "y"]
                } else {
                    &["x", "y", "z"]
                };
                let t = Term::from_json(term, alg.signature(), vars).map_err(|e| e.to_string())?;
                let n = alg.size();
                let values = (0..n.pow(kind.arity() as u32))
                    .map(|flat| {
                        let env: Vec<Element> = (0..kind.arity())
                            .map(|i| (flat / n.pow((kind.arity() - 1 - i) as u32)) % n)
                            .collect();
                        eval_term(&alg, &t, &env)
                    })
                    .collect::<pcoeq::Result<Vec<_>>>()
                    .map_err(|e| e.to_string())?;
                if kind == TermKind::Subtraction && !alg.is_pointed() {
                    return Err("subtraction terms need a pointed algebra".into());
                }
                if term_identities_hold(&alg, kind, &values) {
                    Ok(())
                } else {
                    Err(format!("the term is not a {term_kind} term"))
                }
            }
            Certificate::Terms { algebra, witness } => {
                let alg = load(algebra)?;
                let (schema, w) = witness_from_json(witness, &alg).map_err(|e| e.to_string())?;
                let out = match schema {
                    Schema::Global => verify_p_terms(&alg, &w),
                    Schema::Local => verify_local_terms(&alg, &w),
                }
                .map_err(|e| e.to_string())?;
                match out {
                    Outcome::Holds => Ok(()),
                    Outcome::Fails(v) => Err(format!("{} fails at {:?}", v.equation, v.assignment)),
                }
            }
        }
    }
}

/// Helper for building certificates from library values.
pub fn algebra_value(alg: &FiniteAlgebra) -> Value {
    algebra_to_json(alg)
}
