//! Finite algebras over a finite signature.
//!
//! Carriers are the index sets `0..n`. Every operation of arity `k` is a
//! flat table of length `n^k`, indexed row-major:
//! `index(args) = sum args[i] * n^(k-1-i)`. Element names live in an
//! optional label table that is only used for I/O and reports.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element of a carrier, an index below the algebra's size.
pub type Element = usize;

/// How an element was reached in a closure: operation symbol and arguments.
pub type Origin = (usize, Vec<Element>);

/// Largest operation arity with a direct table.
pub const MAX_ARITY: usize = 4;

/// Largest carrier size with direct tables.
pub const MAX_SIZE: usize = 1 << 16;

/// Largest number of entries in a single operation table.
pub const MAX_TABLE_LEN: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// A similarity type. Symbols are kept sorted by name, so two signatures
/// with the same symbols compare equal however they were written down.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(mut symbols: Vec<Symbol>) -> Result<Self> {
        symbols.sort_by(|a, b| a.name.cmp(&b.name));
        for w in symbols.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::Signature(format!(
                    "duplicate symbol `{}`",
                    w[0].name
                )));
            }
        }
        for s in &symbols {
            if s.name.is_empty() {
                return Err(Error::Signature("empty symbol name".into()));
            }
            if s.arity > MAX_ARITY {
                return Err(Error::Signature(format!(
                    "symbol `{}` has arity {} (max {MAX_ARITY})",
                    s.name, s.arity
                )));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature {
            symbols: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols
            .binary_search_by(|s| s.name.as_str().cmp(name))
            .ok()
    }

    /// Indices of the arity-0 symbols.
    pub fn constants(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len()).filter(|&i| self.symbols[i].arity == 0)
    }

    pub fn has_constants(&self) -> bool {
        self.constants().next().is_some()
    }
}

/// A finite algebra: carrier `0..size` together with one table per symbol.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    size: usize,
    tables: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
    zero: Option<Element>,
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("name", &self.name)
            .field("size", &self.size)
            .field("signature", &self.signature.symbols)
            .field("zero", &self.zero)
            .finish()
    }
}

fn table_len(size: usize, arity: usize) -> Option<usize> {
    let mut len: usize = 1;
    for _ in 0..arity {
        len = len.checked_mul(size)?;
    }
    Some(len)
}

impl FiniteAlgebra {
    /// Builds an algebra from `(symbol, table)` pairs in any order.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        operations: Vec<(Symbol, Vec<usize>)>,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::Algebra {
            name: name.clone(),
            reason,
        };
        if size == 0 {
            return Err(bad("carrier must be non-empty".into()));
        }
        if size > MAX_SIZE {
            return Err(bad(format!("size {size} exceeds {MAX_SIZE}")));
        }
        let signature = Signature::new(operations.iter().map(|(s, _)| s.clone()).collect())?;
        let mut by_name: Vec<(Symbol, Vec<usize>)> = operations;
        by_name.sort_by(|a, b| a.0.name.cmp(&b.0.name));
        let mut tables = Vec::with_capacity(by_name.len());
        for (sym, table) in by_name {
            let expected = table_len(size, sym.arity)
                .filter(|&l| l <= MAX_TABLE_LEN)
                .ok_or_else(|| bad(format!("table of `{}` too large", sym.name)))?;
            if table.len() != expected {
                return Err(bad(format!(
                    "table of `{}` has {} entries, expected {}",
                    sym.name,
                    table.len(),
                    expected
                )));
            }
            if let Some(pos) = table.iter().position(|&v| v >= size) {
                return Err(bad(format!(
                    "table of `{}` has entry {} at position {pos}, outside 0..{size}",
                    sym.name, table[pos]
                )));
            }
            tables.push(table.into_iter().map(|v| v as u32).collect());
        }
        let mut alg = FiniteAlgebra {
            name,
            signature,
            size,
            tables,
            labels: None,
            zero: None,
        };
        alg.zero = alg.compute_zero();
        Ok(alg)
    }

    /// Builds an algebra of the given signature by evaluating `op` on every
    /// argument tuple.
    pub fn from_fn(
        name: impl Into<String>,
        size: usize,
        signature: &Signature,
        mut op: impl FnMut(usize, &[Element]) -> Element,
    ) -> Result<Self> {
        let mut operations = Vec::with_capacity(signature.len());
        let mut args = Vec::with_capacity(MAX_ARITY);
        for (i, sym) in signature.symbols().iter().enumerate() {
            let len = table_len(size, sym.arity)
                .filter(|&l| l <= MAX_TABLE_LEN)
                .ok_or_else(|| Error::CapExceeded {
                    what: format!("table of `{}`", sym.name),
                    cap: MAX_TABLE_LEN,
                    bound: format!("{size}^{}", sym.arity),
                })?;
            let mut table = Vec::with_capacity(len);
            for flat in 0..len {
                decode_tuple(flat, size, sym.arity, &mut args);
                table.push(op(i, &args));
            }
            operations.push((sym.clone(), table));
        }
        FiniteAlgebra::new(name, size, operations)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::Algebra {
                name: self.name,
                reason: format!("{} labels for {} elements", labels.len(), self.size),
            });
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Algebra {
                name: self.name,
                reason: "labels are not distinct".into(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of an element: its label if present, else its index.
    pub fn label(&self, e: Element) -> String {
        match &self.labels {
            Some(l) => l[e].clone(),
            None => e.to_string(),
        }
    }

    /// Looks up an element by label, falling back to parsing an index.
    pub fn element(&self, label: &str) -> Option<Element> {
        if let Some(l) = &self.labels {
            if let Some(i) = l.iter().position(|s| s == label) {
                return Some(i);
            }
        }
        label.parse().ok().filter(|&i: &usize| i < self.size)
    }

    pub fn table(&self, symbol: usize) -> &[u32] {
        &self.tables[symbol]
    }

    #[inline]
    pub fn apply(&self, symbol: usize, args: &[Element]) -> Element {
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a;
        }
        self.tables[symbol][idx] as Element
    }

    /// The pointed zero: set when the constants generate a one-element
    /// subalgebra, i.e. every constant term of the generated variety agrees.
    pub fn zero(&self) -> Option<Element> {
        self.zero
    }

    pub fn is_pointed(&self) -> bool {
        self.zero.is_some()
    }

    pub fn require_zero(&self) -> Result<Element> {
        self.zero
            .ok_or_else(|| Error::NotPointed(self.name.clone()))
    }

    pub fn check_element(&self, e: Element) -> Result<()> {
        if e < self.size {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                algebra: self.name.clone(),
                element: e,
                size: self.size,
            })
        }
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature == other.signature {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                left: self.name.clone(),
                right: other.name.clone(),
            })
        }
    }

    fn compute_zero(&self) -> Option<Element> {
        if !self.signature.has_constants() {
            return None;
        }
        let closure = self.subalgebra_generated(&[]);
        match closure.as_slice() {
            [z] => Some(*z),
            _ => None,
        }
    }

    /// Least subset containing `seed` and every constant, closed under all
    /// operations. Returned sorted.
    pub fn subalgebra_generated(&self, seed: &[Element]) -> Vec<Element> {
        self.generate_with_origins(seed)
            .into_iter()
            .map(|(e, _)| e)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Closure in discovery order. Each element carries how it was found:
    /// `None` for seeds, `Some((symbol, args))` otherwise, where every
    /// argument was discovered earlier.
    pub fn generate_with_origins(&self, seed: &[Element]) -> Vec<(Element, Option<Origin>)> {
        let mut seen = vec![false; self.size];
        let mut order: Vec<(Element, Option<Origin>)> = Vec::new();
        for &s in seed {
            if !seen[s] {
                seen[s] = true;
                order.push((s, None));
            }
        }
        let mut frontier_start = 0;
        let mut args = Vec::with_capacity(MAX_ARITY);
        let mut idx = Vec::with_capacity(MAX_ARITY);
        let mut first_round = true;
        loop {
            let known = order.len();
            for sym in 0..self.signature.len() {
                let arity = self.signature.arity(sym);
                if arity == 0 {
                    if first_round {
                        let v = self.tables[sym][0] as usize;
                        if !seen[v] {
                            seen[v] = true;
                            order.push((v, Some((sym, Vec::new()))));
                        }
                    }
                    continue;
                }
                if known == 0 {
                    continue;
                }
                let total = match table_len(known, arity) {
                    Some(t) => t,
                    None => continue,
                };
                for flat in 0..total {
                    decode_tuple(flat, known, arity, &mut idx);
                    if idx.iter().all(|&i| i < frontier_start) {
                        continue;
                    }
                    args.clear();
                    args.extend(idx.iter().map(|&i| order[i].0));
                    let v = self.apply(sym, &args);
                    if !seen[v] {
                        seen[v] = true;
                        order.push((v, Some((sym, args.clone()))));
                    }
                }
            }
            first_round = false;
            if order.len() == known {
                break;
            }
            frontier_start = known;
        }
        order
    }

    /// The subalgebra on a closed subset, re-indexed in the given order.
    pub fn restrict(&self, name: impl Into<String>, elements: &[Element]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            self.check_element(e)?;
            pos[e] = i;
        }
        let name = name.into();
        let mut failure = None;
        let mut args = Vec::with_capacity(MAX_ARITY);
        let sub = FiniteAlgebra::from_fn(
            name.clone(),
            elements.len(),
            &self.signature,
            |sym, local| {
                args.clear();
                args.extend(local.iter().map(|&i| elements[i]));
                let v = self.apply(sym, &args);
                if pos[v] == usize::MAX {
                    failure.get_or_insert(v);
                    0
                } else {
                    pos[v]
                }
            },
        )?;
        if let Some(v) = failure {
            return Err(Error::Algebra {
                name,
                reason: format!("subset is not closed: produces {}", self.label(v)),
            });
        }
        let sub = match &self.labels {
            Some(l) => sub.with_labels(elements.iter().map(|&e| l[e].clone()).collect())?,
            None => sub,
        };
        Ok(sub)
    }

    /// Checks that a partition (given by representatives) is compatible with
    /// every operation; reports the first offending application.
    pub(crate) fn compatibility_failure(&self, rep: &[Element]) -> Option<String> {
        let n = self.size;
        let mut args = Vec::with_capacity(MAX_ARITY);
        for sym in 0..self.signature.len() {
            let arity = self.signature.arity(sym);
            if arity == 0 {
                continue;
            }
            let others = n.pow(arity as u32 - 1);
            for pos in 0..arity {
                for flat in 0..others {
                    decode_tuple(flat, n, arity - 1, &mut args);
                    args.insert(pos, 0);
                    for e in 0..n {
                        let r = rep[e];
                        if r == e {
                            continue;
                        }
                        args[pos] = e;
                        let a = self.apply(sym, &args);
                        args[pos] = r;
                        let b = self.apply(sym, &args);
                        if rep[a] != rep[b] {
                            return Some(format!(
                                "`{}` maps related {} and {} (position {pos}) to unrelated {} and {}",
                                self.signature.name(sym),
                                self.label(e),
                                self.label(r),
                                self.label(a),
                                self.label(b)
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

/// Writes the base-`n` digits of `flat` (most significant first) into `out`.
pub(crate) fn decode_tuple(mut flat: usize, n: usize, arity: usize, out: &mut Vec<usize>) {
    out.clear();
    out.resize(arity, 0);
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn signature_sorted_and_unique() {
        let sig = Signature::new(vec![Symbol::new("+", 2), Symbol::new("0", 0)]).unwrap();
        assert_eq!(sig.name(0), "+");
        assert_eq!(sig.index_of("0"), Some(1));
        assert!(Signature::new(vec![Symbol::new("f", 1), Symbol::new("f", 2)]).is_err());
        assert!(Signature::new(vec![Symbol::new("g", 5)]).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let short = FiniteAlgebra::new("a", 2, vec![(Symbol::new("f", 2), vec![0, 1, 1])]);
        assert!(short.is_err());
        let oob = FiniteAlgebra::new("a", 2, vec![(Symbol::new("f", 1), vec![0, 2])]);
        assert!(oob.is_err());
        assert!(FiniteAlgebra::new("a", 0, vec![]).is_err());
    }

    #[test]
    fn row_major_apply() {
        // f(x, y) = x: table[x * n + y] = x
        let alg = FiniteAlgebra::new(
            "p",
            3,
            vec![(Symbol::new("f", 2), vec![0, 0, 0, 1, 1, 1, 2, 2, 2])],
        )
        .unwrap();
        assert_eq!(alg.apply(0, &[2, 0]), 2);
        assert_eq!(alg.apply(0, &[0, 2]), 0);
    }

    #[test]
    fn pointedness() {
        assert_eq!(fixtures::z2().zero(), Some(0));
        assert_eq!(fixtures::set2().zero(), None);
        assert_eq!(fixtures::lattice2(false).zero(), None);
        // Two constants interpreted differently: not pointed.
        let two = FiniteAlgebra::new(
            "c",
            2,
            vec![
                (Symbol::new("0", 0), vec![0]),
                (Symbol::new("1", 0), vec![1]),
            ],
        )
        .unwrap();
        assert_eq!(two.zero(), None);
        // Two constants interpreted alike: pointed.
        let same = FiniteAlgebra::new(
            "c",
            2,
            vec![
                (Symbol::new("0", 0), vec![1]),
                (Symbol::new("e", 0), vec![1]),
            ],
        )
        .unwrap();
        assert_eq!(same.zero(), Some(1));
    }

    #[test]
    fn subalgebra_examples() {
        let z2 = fixtures::z2();
        assert_eq!(z2.subalgebra_generated(&[]), vec![0]);
        let x = fixtures::subtraction_x();
        let b = x.element("b").unwrap();
        assert_eq!(x.subalgebra_generated(&[b]), vec![0, b]);
    }

    #[test]
    fn restrict_requires_closed_subset() {
        let x = fixtures::subtraction_x();
        let sub = x.restrict("k", &[0, 1]).unwrap();
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.label(1), "a");
        let z2 = fixtures::z2();
        assert!(z2.restrict("bad", &[1]).is_err());
    }
}
