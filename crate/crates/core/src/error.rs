use alloc::string::String;

use thiserror::Error;

use crate::cdomain::DomainTag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("predicate #{0} is not part of the {1} signature")]
    UnknownPredicate(u8, DomainTag),
    #[error("predicate {name} expects {expected} arguments, got {found}")]
    Arity {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("constant {0} is not a value of the {1} domain")]
    WrongValue(String, DomainTag),
    #[error("interval [{0}, {1}] must have start < end")]
    EmptyInterval(String, String),
    #[error("constraint system has no solution")]
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("`{0}` is used both as a role and as a feature")]
    RoleFeatureClash(String),
    #[error("restriction over {paths} paths uses predicate {pred} of arity {arity}")]
    RestrictionArity {
        pred: String,
        arity: usize,
        paths: usize,
    },
    #[error("predicate assertion {pred} has {found} arguments, expected {arity}")]
    AssertionArity {
        pred: String,
        arity: usize,
        found: usize,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("operation requires {0}")]
    Precondition(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("feature assertions need a homogeneous domain, {0} is not")]
    NotHomogeneous(DomainTag),
    #[error("slot {0} is not used by the augmented type")]
    UnusedSlot(u32),
    #[error("witness extraction: {0}")]
    Witness(&'static str),
}
