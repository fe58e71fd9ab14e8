//! Ontology AST, normalization into the `¬ / ⊓ / ∃` fragment, and the
//! subconcept closure.
//!
//! The text format is parsed and printed by the `alcd` crate.

mod ast;
mod closure;
mod normalize;

pub use ast::{name, Assertion, Concept, FeaturePath, Gci, Name, NameKind, Ontology, PredRef};
pub use closure::{slot_parameters, subconcept_closure, ClosureSet, Lit, Node, SlotParameters};
pub use normalize::{normalize, normalize_concept};

#[cfg(test)]
pub(crate) use closure::tests::two_ordered_successors;
