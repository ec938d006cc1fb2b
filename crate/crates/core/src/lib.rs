//! Finite universal algebras and the question of whether finite products
//! commute with coequalizers in the variety they generate.
//!
//! The crate covers:
//! - finite algebras, homomorphisms, products, pullbacks and quotients
//!   ([`algebra`], [`hom`], [`constructions`]);
//! - congruence generation with derivation traces and congruence
//!   enumeration ([`congruence`]), plus the egg-box and shifting-lemma
//!   checkers ([`shifting`]);
//! - coequalizers, normal epimorphisms and instance-wise checks of the
//!   product/coequalizer property ([`coeq`]);
//! - the category of points over a base algebra ([`points`]);
//! - free algebras, term finders and the decision procedures with witness
//!   term extraction ([`clone`], [`decide`]).

pub mod algebra;
pub mod clone;
pub mod coeq;
pub mod congruence;
pub mod constructions;
pub mod decide;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod hom;
pub mod io;
pub mod partition;
pub mod points;
pub mod shifting;
pub mod term;

pub use algebra::{Element, FiniteAlgebra, Signature, Symbol};
pub use congruence::{congruence_generated, principal_congruence, Congruence, DerivationTrace};
pub use error::{Error, Result};
pub use hom::{kernel_congruence, Homomorphism};
pub use partition::Partition;
pub use term::{eval_term, Term};

/// Result of checking a universally quantified property on finite data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<W> {
    Holds,
    Fails(W),
}

impl<W> Outcome<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Outcome::Holds => None,
            Outcome::Fails(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Outcome<V> {
        match self {
            Outcome::Holds => Outcome::Holds,
            Outcome::Fails(w) => Outcome::Fails(f(w)),
        }
    }
}

/// Size bounds shared by the constructions that can blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Most elements a free algebra or clone slice may reach.
    pub max_free_size: usize,
    /// Largest target size for exhaustive morphism enumeration.
    pub max_enumeration_size: usize,
    /// Largest carrier for congruence-lattice enumeration.
    pub max_congruence_enum_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_free_size: 1_000_000,
            max_enumeration_size: 5,
            max_congruence_enum_size: congruence::DEFAULT_CONGRUENCE_ENUM_BOUND,
        }
    }
}
