use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::types::TypeT;
use crate::syntax::{slot_parameters, ClosureSet, Lit, Name, Node, SlotParameters};

/// What a successor slot is reserved for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotKind {
    /// Witness for the `∃r.C` at this positive closure index.
    Witness { node: usize, filler: Lit },
    /// Path `j` (0-based) of the CD-restriction at this positive closure
    /// index.
    Path { node: usize, path: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotUse {
    pub slot: u32,
    pub role: Name,
    pub kind: SlotKind,
}

/// Positions of successor slots: slot `i` witnesses the i-th `∃r.C` of `M`
/// and slot `off(i, j) = nex + (i − 1)·nar + j` carries path `j` of the i-th
/// CD-restriction.
#[derive(Debug, Clone)]
pub struct SlotLayout {
    pub params: SlotParameters,
    /// Positive closure indices of the `∃r.C`, in closure order.
    pub existentials: Vec<usize>,
    /// Positive closure indices of the CD-restrictions, in closure order.
    pub restrictions: Vec<usize>,
}

impl SlotLayout {
    pub fn new(m: &ClosureSet) -> Self {
        let mut existentials = Vec::new();
        let mut restrictions = Vec::new();
        for (i, n) in m.nodes().iter().enumerate() {
            match n {
                Node::Exists { .. } => existentials.push(i),
                Node::Cd { .. } => restrictions.push(i),
                _ => {}
            }
        }
        SlotLayout {
            params: slot_parameters(m),
            existentials,
            restrictions,
        }
    }

    pub fn nt(&self) -> u32 {
        self.params.nt as u32
    }

    /// `off(i, j)` with 1-based `i` and `j`.
    pub fn off(&self, i: usize, j: usize) -> u32 {
        debug_assert!(i >= 1 && j >= 1 && j <= self.params.nar);
        (self.params.nex + (i - 1) * self.params.nar + j) as u32
    }

    /// The slots a root type uses, in increasing order.
    pub fn uses(&self, m: &ClosureSet, t0: &TypeT) -> Vec<SlotUse> {
        let mut out = Vec::new();
        for (k, &node) in self.existentials.iter().enumerate() {
            if let Node::Exists { role, filler } = m.node(node) {
                if t0.has_positive(node) {
                    out.push(SlotUse {
                        slot: (k + 1) as u32,
                        role: role.clone(),
                        kind: SlotKind::Witness {
                            node,
                            filler: *filler,
                        },
                    });
                }
            }
        }
        for (k, &node) in self.restrictions.iter().enumerate() {
            if let Node::Cd { paths, .. } = m.node(node) {
                if !t0.has_positive(node) {
                    continue;
                }
                for (j, p) in paths.iter().enumerate() {
                    if let Some(r) = &p.role {
                        out.push(SlotUse {
                            slot: self.off(k + 1, j + 1),
                            role: r.clone(),
                            kind: SlotKind::Path { node, path: j },
                        });
                    }
                }
            }
        }
        out
    }
}

/// `σ`: role name to the slots holding that role's successors.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuccessorFunction {
    map: BTreeMap<Name, BTreeSet<u32>>,
}

static NO_SLOTS: BTreeSet<u32> = BTreeSet::new();

impl SuccessorFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, role: Name, slot: u32) {
        self.map.entry(role).or_default().insert(slot);
    }

    pub fn slots(&self, role: &str) -> &BTreeSet<u32> {
        self.map.get(role).unwrap_or(&NO_SLOTS)
    }

    pub fn roles(&self) -> impl Iterator<Item = (&Name, &BTreeSet<u32>)> {
        self.map.iter()
    }

    pub fn used_slots(&self) -> BTreeSet<u32> {
        self.map.values().flatten().copied().collect()
    }

    pub fn role_of(&self, slot: u32) -> Option<&Name> {
        self.map
            .iter()
            .find(|(_, s)| s.contains(&slot))
            .map(|(r, _)| r)
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(BTreeSet::is_empty)
    }
}

/// The witness-slot successor function of a root type.
pub fn canonical_successor_function(
    m: &ClosureSet,
    layout: &SlotLayout,
    t0: &TypeT,
) -> SuccessorFunction {
    let mut sigma = SuccessorFunction::new();
    for u in layout.uses(m, t0) {
        sigma.insert(u.role, u.slot);
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{normalize, two_ordered_successors, subconcept_closure, Concept, Gci, Ontology};
    use crate::typesys::types::enumerate_types;
    use crate::DomainTag;

    #[test]
    fn two_ordered_successors_uses_both_path_slots() {
        let o = normalize(&two_ordered_successors());
        let m = subconcept_closure(&o);
        let layout = SlotLayout::new(&m);
        let t = &enumerate_types(&m, &o.tbox)[0];
        let sigma = canonical_successor_function(&m, &layout, t);
        let expected: BTreeSet<u32> = [1, 2].into_iter().collect();
        assert_eq!(sigma.slots("r"), &expected);
    }

    #[test]
    fn no_positive_restrictions_no_slots() {
        let mut o = Ontology::new(DomainTag::Q);
        o.tbox.push(Gci::new(
            Concept::exists("r", Concept::atomic("A")),
            Concept::atomic("B"),
        ));
        let o = normalize(&o);
        let m = subconcept_closure(&o);
        let layout = SlotLayout::new(&m);
        let ex = m.lit(&Concept::exists("r", Concept::atomic("A"))).unwrap();
        for t in enumerate_types(&m, &o.tbox) {
            let sigma = canonical_successor_function(&m, &layout, &t);
            if t.holds(ex) {
                assert_eq!(sigma.slots("r").iter().copied().collect::<Vec<_>>(), [1]);
            } else {
                assert!(sigma.is_empty());
            }
        }
    }

    #[test]
    fn slots_are_injective_and_in_range() {
        let mut o = two_ordered_successors();
        o.tbox.push(Gci::new(
            Concept::Top,
            Concept::and(
                Concept::exists("s", Concept::atomic("A")),
                Concept::exists("r", Concept::atomic("B")),
            ),
        ));
        let o = normalize(&o);
        let m = subconcept_closure(&o);
        let layout = SlotLayout::new(&m);
        for t in enumerate_types(&m, &o.tbox) {
            let uses = layout.uses(&m, &t);
            let slots: BTreeSet<u32> = uses.iter().map(|u| u.slot).collect();
            assert_eq!(slots.len(), uses.len());
            assert!(slots.iter().all(|&s| s >= 1 && s <= layout.nt()));
            let sigma = canonical_successor_function(&m, &layout, &t);
            for u in &uses {
                assert_eq!(sigma.role_of(u.slot), Some(&u.role));
            }
        }
    }
}
