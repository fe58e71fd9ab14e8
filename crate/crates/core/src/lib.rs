//! Consistency checking for `ALC(D)` ontologies over ω-admissible concrete
//! domains by augmented-type elimination.
//!
//! The crate is `no_std` (it needs `alloc`). Text formats, file IO and the
//! command line live in the companion `alcd` crate.
//!
//! Pipeline, in order:
//!
//! 1. [`reductions`] rewrites singleton predicates, feature assertions and
//!    predicate assertions away;
//! 2. [`syntax::normalize`] moves every concept into the `¬ / ⊓ / ∃` fragment;
//! 3. [`typesys`] computes the subconcept closure, the types, and the
//!    augmented types (root type, successor slots, local constraint system);
//! 4. [`elimination`] removes augmented types that cannot be patched, looks
//!    for an ABox type over the survivors, and can unfold the survivors into
//!    a finite prefix of a model.
//!
//! [`oracle`] is an independent bounded model finder used to test the
//! procedure above.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cdomain;
pub mod elimination;
pub mod error;
pub mod oracle;
pub mod reductions;
pub mod syntax;
pub mod typesys;

pub use cdomain::{ConcreteDomain, DomainTag, Pred, Value};
pub use elimination::{decide_consistency, Reasoner, Verdict};
pub use error::{DomainError, OntologyError, ReasonerError};
pub use syntax::{Assertion, Concept, FeaturePath, Gci, Name, Ontology, PredRef};
