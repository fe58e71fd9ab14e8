//! Text format, debug dumps, JSON reports and the command line for the
//! ALC(D) reasoner in `alcd-core`.

pub mod cli;
pub mod dump;
pub mod report;
pub mod text;

pub use text::{parse_ontology, print_ontology, ParseError, ParseErrorKind};
