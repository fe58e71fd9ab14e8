use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::ast::{Concept, FeaturePath, Name, Ontology, PredRef};
use crate::cdomain::Pred;

/// An element of the closure `M`: `2·i` is the i-th positive concept and
/// `2·i + 1` its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(pub u32);

impl Lit {
    pub fn positive(i: usize) -> Lit {
        Lit(2 * i as u32)
    }

    /// Index of the underlying positive concept.
    pub fn base(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Shape of a positive closure element, with children as closure literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Top,
    Atomic(Name),
    And(Lit, Lit),
    Exists { role: Name, filler: Lit },
    Cd { paths: Vec<FeaturePath>, pred: Pred },
}

/// The subconcept closure `M` of a normalized ontology, closed under
/// negation. Positive concepts are numbered children-first.
#[derive(Debug, Clone)]
pub struct ClosureSet {
    positives: Vec<Concept>,
    nodes: Vec<Node>,
    index: BTreeMap<Concept, usize>,
}

impl ClosureSet {
    /// `|M|`, counting each concept and its negation.
    pub fn len(&self) -> usize {
        2 * self.positives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty()
    }

    pub fn positives(&self) -> &[Concept] {
        &self.positives
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// The concept at closure position `lit`.
    pub fn concept(&self, lit: Lit) -> Concept {
        let c = self.positives[lit.base()].clone();
        if lit.is_negated() {
            Concept::not(c)
        } else {
            c
        }
    }

    /// All of `M` in closure order.
    pub fn iter(&self) -> impl Iterator<Item = Concept> + '_ {
        (0..self.len() as u32).map(|i| self.concept(Lit(i)))
    }

    pub fn lit(&self, c: &Concept) -> Option<Lit> {
        match c {
            Concept::Not(inner) => self.lit(inner).map(Lit::negate),
            other => self.index.get(other).map(|&i| Lit::positive(i)),
        }
    }

    pub fn contains(&self, c: &Concept) -> bool {
        self.lit(c).is_some()
    }

    fn add(&mut self, c: &Concept) -> Lit {
        if let Concept::Not(inner) = c {
            return self.add(inner).negate();
        }
        if let Some(&i) = self.index.get(c) {
            return Lit::positive(i);
        }
        let node = match c {
            Concept::Top => Node::Top,
            Concept::Atomic(n) => Node::Atomic(n.clone()),
            Concept::And(a, b) => {
                let (a, b) = (self.add(a), self.add(b));
                Node::And(a, b)
            }
            Concept::Exists(r, filler) => Node::Exists {
                role: r.clone(),
                filler: self.add(filler),
            },
            Concept::CdExists(paths, PredRef::Domain(p)) => Node::Cd {
                paths: paths.clone(),
                pred: *p,
            },
            other => panic!("closure of a non-normalized concept: {other:?}"),
        };
        let i = self.positives.len();
        self.positives.push(c.clone());
        self.nodes.push(node);
        self.index.insert(c.clone(), i);
        Lit::positive(i)
    }

    /// Features occurring in CD-restrictions of `M`, sorted.
    pub fn features(&self) -> Vec<Name> {
        let mut out: Vec<Name> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Cd { paths, .. } => Some(paths.iter().map(|p| p.feature.clone())),
                _ => None,
            })
            .flatten()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Roles occurring in `M`, sorted.
    pub fn roles(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for n in &self.nodes {
            match n {
                Node::Exists { role, .. } => out.push(role.clone()),
                Node::Cd { paths, .. } => out.extend(paths.iter().filter_map(|p| p.role.clone())),
                _ => {}
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// All subconcepts of GCI sides and asserted concepts, with negations.
/// The ontology must be normalized.
pub fn subconcept_closure(o: &Ontology) -> ClosureSet {
    let mut m = ClosureSet {
        positives: Vec::new(),
        nodes: Vec::new(),
        index: BTreeMap::new(),
    };
    for c in o.concepts() {
        m.add(c);
    }
    m
}

/// Successor-slot bookkeeping derived from `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotParameters {
    /// Number of `∃r.C` in `M`.
    pub nex: usize,
    /// Number of `∃p̄.P` in `M`.
    pub ncd: usize,
    /// Largest arity among the CD-restrictions of `M`.
    pub nar: usize,
    /// `nex + ncd · nar`.
    pub nt: usize,
}

pub fn slot_parameters(m: &ClosureSet) -> SlotParameters {
    let nex = m
        .nodes
        .iter()
        .filter(|n| matches!(n, Node::Exists { .. }))
        .count();
    let (ncd, nar) = m.nodes.iter().fold((0, 0), |(k, a), n| match n {
        Node::Cd { paths, .. } => (k + 1, a.max(paths.len())),
        _ => (k, a),
    });
    SlotParameters {
        nex,
        ncd,
        nar,
        nt: nex + ncd * nar,
    }
}
