//! Type elimination, ABox-type search and witness extraction.
//!
//! [`Engine`] computes the surviving augmented types lazily, per node
//! signature; [`literal`] enumerates and eliminates augmented types
//! verbatim and serves as its reference on small inputs.

mod abox;
mod engine;
pub mod literal;
mod witness;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use abox::{find_abox_type, AboxType, GlobalVar};
pub use engine::{Context, Engine, Sig, SigId, Witness};
pub use witness::{extract_witness, Element, FinitePrefixModel};

use crate::error::ReasonerError;
use crate::reductions::reduction_pipeline;
use crate::syntax::{normalize, Name, Ontology};
use crate::typesys::TypeSystem;

/// Why a signature was eliminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropReason {
    /// No locally realizable augmented type exists for it at all.
    Local,
    /// Every candidate needs a successor at `slot` (an `role`-slot) that no
    /// survivor can patch.
    Patch { role: Name, slot: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub iteration: u32,
    pub dropped: u32,
    pub reason: DropReason,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iter={} drop={} reason=", self.iteration, self.dropped)?;
        match &self.reason {
            DropReason::Local => write!(f, "local"),
            DropReason::Patch { role, slot } => write!(f, "patch:{role}@{slot}"),
        }
    }
}

/// Counters describing one decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// `|M|`.
    pub closure: usize,
    pub nt: u32,
    /// Types materialized during the search.
    pub types: usize,
    /// Augmented types built (one per witness search that succeeded).
    pub augmented: u64,
    /// Signatures alive at the end.
    pub survivors: usize,
    /// Elimination rounds.
    pub iterations: u32,
    pub csp_calls: u64,
    /// Wall time in milliseconds; filled in by callers that have a clock.
    pub ms: u64,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub consistent: bool,
    pub stats: Stats,
    pub trace: Vec<TraceEntry>,
    pub abox_type: Option<AboxType>,
}

impl Verdict {
    pub fn trace_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.trace.iter().map(|t| alloc::format!("{t}"))
    }
}

/// A prepared decision: reductions applied, normalized, closure computed.
pub struct Reasoner {
    ts: TypeSystem,
    seed: u64,
}

impl Reasoner {
    pub fn new(o: &Ontology) -> Result<Self, ReasonerError> {
        o.validate()?;
        let reduced = reduction_pipeline(o)?;
        let ts = TypeSystem::new(&normalize(&reduced))?;
        Ok(Reasoner { ts, seed: 0 })
    }

    /// Seed for the order in which queued signatures are processed. The
    /// verdict does not depend on it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn type_system(&self) -> &TypeSystem {
        &self.ts
    }

    pub fn engine(&self) -> Engine<'_> {
        Engine::new(&self.ts, self.seed)
    }

    pub fn decide(&self) -> Verdict {
        let mut engine = self.engine();
        let abox_type = find_abox_type(&mut engine);
        self.verdict(&engine, abox_type)
    }

    fn verdict(&self, engine: &Engine<'_>, abox_type: Option<AboxType>) -> Verdict {
        Verdict {
            consistent: abox_type.is_some(),
            stats: Stats {
                closure: self.ts.closure.len(),
                nt: self.ts.layout.nt(),
                types: engine.types_seen(),
                augmented: engine.witnesses_built,
                survivors: engine.alive().count(),
                iterations: engine.rounds(),
                csp_calls: engine.csp.calls(),
                ms: 0,
            },
            trace: engine.trace.clone(),
            abox_type,
        }
    }

    /// Decides consistency and, if consistent, builds the depth-`depth`
    /// prefix of a model.
    pub fn witness(&self, depth: usize) -> Result<(Verdict, Option<FinitePrefixModel>), ReasonerError> {
        let mut engine = self.engine();
        let abox_type = find_abox_type(&mut engine);
        let model = match &abox_type {
            Some(at) => Some(extract_witness(&mut engine, at, depth)?),
            None => None,
        };
        Ok((self.verdict(&engine, abox_type), model))
    }
}

/// Full pipeline: reductions, normalization, elimination, ABox-type search.
pub fn decide_consistency(o: &Ontology) -> Result<Verdict, ReasonerError> {
    Ok(Reasoner::new(o)?.decide())
}
