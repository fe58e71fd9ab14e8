//! Finite prefixes of the forest model built from an ABox type.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::abox::AboxType;
use super::engine::{Engine, SigId, Witness};
use crate::cdomain::{solve, ConstraintSystem, Value};
use crate::error::ReasonerError;
use crate::oracle::FiniteInterpretation;
use crate::syntax::{Name, Node};

/// One element of the prefix: a named individual or an anonymous successor
/// reached from one through a word of (signature, slot) steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub individual: Option<Name>,
    /// The root this element descends from (itself for roots).
    pub root: usize,
    pub word: Vec<(SigId, u32)>,
    pub parent: Option<usize>,
    pub sig: SigId,
}

impl Element {
    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

#[derive(Debug, Clone)]
pub struct FinitePrefixModel {
    pub depth: usize,
    pub elements: Vec<Element>,
    pub interpretation: FiniteInterpretation,
    /// Elements at the depth bound, whose successors are cut off.
    pub leaves: BTreeSet<usize>,
    /// The assembled system over (element, feature index).
    pub system: ConstraintSystem<(usize, u32)>,
    pub solution: BTreeMap<(usize, u32), Value>,
}

/// Unfolds the ABox type `depth` levels, placing at each used slot the
/// surviving witness of the slot's signature, and solves the assembled
/// constraint system. An empty ABox gets one anonymous root.
pub fn extract_witness(
    engine: &mut Engine<'_>,
    at: &AboxType,
    depth: usize,
) -> Result<FinitePrefixModel, ReasonerError> {
    let ts = engine.type_system();
    let nt = ts.layout.nt();
    let mut elements: Vec<Element> = Vec::new();
    // Local system of each root element, and the element at each of its
    // context positions.
    let mut root_locals: Vec<(Witness, Vec<usize>)> = Vec::new();
    if at.individuals.is_empty() {
        let sig = engine.any_alive().ok_or(ReasonerError::Witness("no surviving signature"))?;
        let w = engine.witness(sig).cloned().ok_or(ReasonerError::Witness("survivor without witness"))?;
        elements.push(Element {
            individual: None,
            root: 0,
            word: Vec::new(),
            parent: None,
            sig,
        });
        root_locals.push((w, Vec::new()));
    } else {
        for (a, name) in at.individuals.iter().enumerate() {
            elements.push(Element {
                individual: Some(name.clone()),
                root: a,
                word: Vec::new(),
                parent: None,
                sig: at.sigs[a],
            });
            let ctx = at.neighbours[a].iter().map(|&b| b as usize).collect();
            root_locals.push((at.locals[a].clone(), ctx));
        }
    }
    let mut system: ConstraintSystem<(usize, u32)> = ConstraintSystem::new();
    let mut edges: BTreeMap<Name, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (r, a, b) in &at.roles {
        edges.entry(r.clone()).or_default().insert((*a as usize, *b as usize));
    }
    let mut next = 0;
    while next < elements.len() {
        let e = next;
        next += 1;
        let el = elements[e].clone();
        let (local, ctx) = if el.word.is_empty() {
            root_locals[e].clone()
        } else {
            if !engine.ensure(el.sig) {
                return Err(ReasonerError::Witness("a slot signature did not survive"));
            }
            let w = engine.witness(el.sig).cloned().ok_or(ReasonerError::Witness("survivor without witness"))?;
            (w, Vec::new())
        };
        let expand = el.depth() < depth;
        let t0 = engine.type_of(engine.sig(el.sig).ty).clone();
        let sigma = ts.sigma(&t0);
        let mut at_slot: BTreeMap<u32, usize> = BTreeMap::new();
        if expand {
            for &(slot, s) in &local.slots {
                let child = elements.len();
                let mut word = el.word.clone();
                word.push((s, slot));
                elements.push(Element {
                    individual: None,
                    root: el.root,
                    word,
                    parent: Some(e),
                    sig: s,
                });
                at_slot.insert(slot, child);
                let role = sigma.role_of(slot).expect("used slots have a role").clone();
                edges.entry(role).or_default().insert((e, child));
            }
        }
        if el.word.is_empty() || expand {
            for atom in &local.system {
                let mut args = smallvec::SmallVec::<[(usize, u32); 2]>::new();
                let mut placed = true;
                for &v in &atom.args {
                    let lv = engine.unvar(v);
                    let target = if lv.slot == 0 {
                        Some(e)
                    } else if lv.slot > nt {
                        Some(ctx[(lv.slot - nt - 1) as usize])
                    } else {
                        at_slot.get(&lv.slot).copied()
                    };
                    match target {
                        Some(x) => args.push((x, lv.feature)),
                        None => placed = false,
                    }
                }
                if placed {
                    system.insert(crate::cdomain::Atom { pred: atom.pred, args });
                }
            }
        }
    }
    let d = ts.domain();
    let solution = solve(d, &system).map_err(|_| ReasonerError::Witness("assembled system is unsatisfiable"))?;
    let mut interpretation = FiniteInterpretation::new(ts.ontology.domain, elements.len());
    for (x, el) in elements.iter().enumerate() {
        if let Some(a) = &el.individual {
            interpretation.individuals.insert(a.clone(), x);
        }
        let t = engine.type_of(engine.sig(el.sig).ty);
        for (k, node) in ts.closure.nodes().iter().enumerate() {
            if let Node::Atomic(a) = node {
                if t.has_positive(k) {
                    interpretation.concepts.entry(a.clone()).or_default().insert(x);
                }
            }
        }
    }
    interpretation.roles = edges;
    for ((x, f), v) in &solution {
        interpretation
            .features
            .insert((*x, ts.features[*f as usize].clone()), v.clone());
    }
    let leaves = elements
        .iter()
        .enumerate()
        .filter(|(_, el)| el.depth() >= depth)
        .map(|(x, _)| x)
        .collect();
    Ok(FinitePrefixModel {
        depth,
        elements,
        interpretation,
        leaves,
        system,
        solution,
    })
}
