//! Finite interpretations, a model checker, and a bounded model finder used
//! as an independent reference for the elimination procedure.

mod eval;
mod search;

pub use eval::{check_model, evaluate, FiniteInterpretation, Truth, View};
pub use search::{bounded_model_search, bounded_model_search_with_budget, SearchOutcome};
