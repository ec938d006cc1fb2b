//! Homomorphisms between finite algebras.

use std::sync::Arc;

use crate::algebra::{decode_tuple, Element, FiniteAlgebra, MAX_ARITY};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    map: Vec<Element>,
}

impl Homomorphism {
    /// Validates totality, range, and that `map` commutes with every
    /// operation (constants included).
    pub fn new(
        source: Arc<FiniteAlgebra>,
        target: Arc<FiniteAlgebra>,
        map: Vec<Element>,
    ) -> Result<Self> {
        source.same_signature(&target)?;
        let err = |reason: String| Error::NotHomomorphism {
            source_name: source.name().to_string(),
            target: target.name().to_string(),
            reason,
        };
        if map.len() != source.size() {
            return Err(err(format!(
                "map has {} entries for a source of size {}",
                map.len(),
                source.size()
            )));
        }
        if let Some(&v) = map.iter().find(|&&v| v >= target.size()) {
            return Err(err(format!(
                "value {v} outside target of size {}",
                target.size()
            )));
        }
        if let Some(reason) = commute_failure(&source, &target, &map) {
            return Err(err(reason));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    /// For maps that are homomorphisms by construction.
    pub(crate) fn trusted(
        source: Arc<FiniteAlgebra>,
        target: Arc<FiniteAlgebra>,
        map: Vec<Element>,
    ) -> Self {
        debug_assert!(commute_failure(&source, &target, &map).is_none());
        Homomorphism {
            source,
            target,
            map,
        }
    }

    pub fn identity(alg: Arc<FiniteAlgebra>) -> Self {
        let map = (0..alg.size()).collect();
        Homomorphism {
            source: alg.clone(),
            target: alg,
            map,
        }
    }

    /// The map sending everything to the target's zero.
    pub fn zero(source: Arc<FiniteAlgebra>, target: Arc<FiniteAlgebra>) -> Result<Self> {
        source.same_signature(&target)?;
        let z = target.require_zero()?;
        let map = vec![z; source.size()];
        Homomorphism::new(source, target, map)
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &[Element] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, e: Element) -> Element {
        self.map[e]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if !crate::constructions::same_algebra(&self.target, &next.source) {
            return Err(Error::InvalidPair(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.source.name(),
                self.target.name(),
                next.source.name(),
                next.target.name()
            )));
        }
        Ok(Homomorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&e| next.map[e]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        self.map
            .iter()
            .all(|&v| !std::mem::replace(&mut hit[v], true))
    }

    /// Same source, target, and values.
    pub fn same_as(&self, other: &Homomorphism) -> bool {
        self.map == other.map && *self.source == *other.source && *self.target == *other.target
    }
}

fn commute_failure(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[Element],
) -> Option<String> {
    let sig = source.signature();
    let n = source.size();
    let mut args = Vec::with_capacity(MAX_ARITY);
    let mut images = Vec::with_capacity(MAX_ARITY);
    for sym in 0..sig.len() {
        let arity = sig.arity(sym);
        for flat in 0..n.pow(arity as u32) {
            decode_tuple(flat, n, arity, &mut args);
            images.clear();
            images.extend(args.iter().map(|&a| map[a]));
            let lhs = map[source.apply(sym, &args)];
            let rhs = target.apply(sym, &images);
            if lhs != rhs {
                let shown: Vec<String> = args.iter().map(|&a| source.label(a)).collect();
                return Some(format!(
                    "h({}({})) = {} but {}(h(..)) = {}",
                    sig.name(sym),
                    shown.join(", "),
                    target.label(lhs),
                    sig.name(sym),
                    target.label(rhs)
                ));
            }
        }
    }
    None
}

/// Partition of the source into fibres of `f`.
pub fn kernel_congruence(f: &Homomorphism) -> Congruence {
    Congruence::trusted(
        f.source.clone(),
        Partition::from_keys(f.map.iter().copied()),
    )
}
