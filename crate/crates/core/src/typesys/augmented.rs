use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::layout::{canonical_successor_function, SlotKind, SlotLayout, SlotUse, SuccessorFunction};
use super::types::{TypeSpace, TypeT};
use crate::cdomain::{
    csp_satisfiable, merge_at, Atom, ConcreteDomain, ConstraintSystem, LocalVar, Pred,
};
use crate::error::{OntologyError, ReasonerError};
use crate::syntax::{subconcept_closure, Assertion, ClosureSet, FeaturePath, Lit, Name, Node, Ontology};

/// The part of a local system that talks about one position: which
/// features are defined there and the complete system over them, with
/// variables numbered by feature index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile {
    pub defined: Vec<u32>,
    pub atoms: Vec<Atom<u32>>,
}

impl Profile {
    pub fn empty() -> Self {
        Profile {
            defined: Vec::new(),
            atoms: Vec::new(),
        }
    }

    /// The profile of position `slot` in a local system.
    pub fn of_slot(system: &ConstraintSystem<LocalVar>, slot: u32) -> Self {
        let at = |v: &LocalVar| v.slot == slot;
        let mut defined: Vec<u32> = system
            .iter()
            .flat_map(|a| a.args.iter())
            .filter(|v| at(v))
            .map(|v| v.feature)
            .collect();
        defined.sort_unstable();
        defined.dedup();
        let atoms = system
            .iter()
            .filter(|a| a.args.iter().all(at))
            .map(|a| a.map(|v| v.feature))
            .collect();
        Profile { defined, atoms }
    }

    pub fn is_defined(&self, feature: u32) -> bool {
        self.defined.binary_search(&feature).is_ok()
    }

    pub fn contains(&self, atom: &Atom<u32>) -> bool {
        self.atoms.binary_search(atom).is_ok()
    }

    /// The profile's atoms placed at position `slot`.
    pub fn at_slot(&self, slot: u32) -> impl Iterator<Item = Atom<LocalVar>> + '_ {
        self.atoms
            .iter()
            .map(move |a| a.map(|&f| LocalVar::new(slot, f)))
    }
}

/// Root type, types of the used successor slots, a complete local system
/// over `f^i` variables, and the successor function tying slots to roles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AugmentedType {
    pub root: TypeT,
    pub slots: BTreeMap<u32, TypeT>,
    pub system: ConstraintSystem<LocalVar>,
    pub sigma: SuccessorFunction,
}

impl AugmentedType {
    pub fn root_profile(&self) -> Profile {
        Profile::of_slot(&self.system, 0)
    }

    pub fn slot_profile(&self, slot: u32) -> Profile {
        Profile::of_slot(&self.system, slot)
    }

    fn defined(&self) -> BTreeSet<LocalVar> {
        self.system.variables()
    }
}

/// Everything derived from a normalized, reduced ontology that the
/// elimination procedure works with.
pub struct TypeSystem {
    pub ontology: Ontology,
    pub closure: ClosureSet,
    pub layout: SlotLayout,
    pub space: TypeSpace,
    /// Features occurring in CD-restrictions of the closure, sorted; local
    /// variables refer to features by index into this list.
    pub features: Vec<Name>,
    domain: &'static dyn ConcreteDomain,
}

impl TypeSystem {
    /// The ontology must be normalized and contain only concept and role
    /// assertions.
    pub fn new(o: &Ontology) -> Result<Self, ReasonerError> {
        o.validate()?;
        if o.abox.iter().any(|a| {
            matches!(
                a,
                Assertion::Predicate { .. } | Assertion::Feature { .. }
            )
        }) {
            return Err(OntologyError::Precondition("predicate and feature assertions reduced").into());
        }
        if !o.concepts().all(|c| c.is_normal()) {
            return Err(OntologyError::Precondition("a normalized ontology").into());
        }
        let closure = subconcept_closure(o);
        let space = TypeSpace::new(&closure, &o.tbox);
        Ok(TypeSystem {
            ontology: o.clone(),
            layout: SlotLayout::new(&closure),
            features: closure.features(),
            space,
            closure,
            domain: o.domain.domain(),
        })
    }

    pub fn domain(&self) -> &'static dyn ConcreteDomain {
        self.domain
    }

    pub fn feature_index(&self, f: &str) -> Option<u32> {
        self.features
            .binary_search_by(|g| (**g).cmp(f))
            .ok()
            .map(|i| i as u32)
    }

    pub fn enumerate_types(&self) -> Vec<TypeT> {
        let mut out = Vec::new();
        let _ = self.space.for_each(&[], &mut |t| {
            out.push(t.clone());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn sigma(&self, t0: &TypeT) -> SuccessorFunction {
        canonical_successor_function(&self.closure, &self.layout, t0)
    }

    pub fn uses(&self, t0: &TypeT) -> Vec<SlotUse> {
        self.layout.uses(&self.closure, t0)
    }

    /// Paths and predicate of the CD-restriction at a positive index.
    pub fn restriction(&self, node: usize) -> (&[FeaturePath], Pred) {
        match self.closure.node(node) {
            Node::Cd { paths, pred } => (paths, *pred),
            other => panic!("closure node {node} is not a CD-restriction: {other:?}"),
        }
    }

    /// Feature index of path `j` of a CD-restriction.
    pub fn path_feature(&self, node: usize, j: usize) -> u32 {
        let (paths, _) = self.restriction(node);
        self.feature_index(&paths[j].feature)
            .expect("restriction features are in F_M")
    }

    /// Sorted features reached through `role` by some CD-restriction path.
    pub fn role_features(&self, role: &Name) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for &node in &self.layout.restrictions {
            let (paths, _) = self.restriction(node);
            for (j, p) in paths.iter().enumerate() {
                if p.role.as_ref() == Some(role) {
                    out.push(self.path_feature(node, j));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Literals fixed by a root profile: a CD-restriction over plain paths
    /// holds exactly when its atom is in the profile.
    pub fn profile_literals(&self, p: &Profile) -> Vec<Lit> {
        let mut out = Vec::new();
        for &node in &self.layout.restrictions {
            let (paths, pred) = self.restriction(node);
            if paths.iter().any(|p| p.role.is_some()) {
                continue;
            }
            let args: Vec<u32> = (0..paths.len()).map(|j| self.path_feature(node, j)).collect();
            let holds = args.iter().all(|&f| p.is_defined(f)) && p.contains(&Atom::new(pred, args));
            let l = Lit::positive(node);
            out.push(if holds { l } else { l.negate() });
        }
        out
    }

    /// Variables a path can take at the root, given σ and the defined
    /// variables.
    pub fn admissible(
        &self,
        path: &FeaturePath,
        sigma: &SuccessorFunction,
        defined: &BTreeSet<LocalVar>,
    ) -> Vec<LocalVar> {
        let f = self.feature_index(&path.feature).expect("feature in F_M");
        let positions: Vec<u32> = match &path.role {
            None => vec![0],
            Some(r) => sigma.slots(r).iter().copied().collect(),
        };
        positions
            .into_iter()
            .map(|s| LocalVar::new(s, f))
            .filter(|v| defined.contains(v))
            .collect()
    }

    fn tuples(&self, node: usize, sigma: &SuccessorFunction, defined: &BTreeSet<LocalVar>) -> Vec<Vec<LocalVar>> {
        let (paths, _) = self.restriction(node);
        let mut out: Vec<Vec<LocalVar>> = vec![Vec::new()];
        for p in paths {
            let choices = self.admissible(p, sigma, defined);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&v| {
                        let mut t = prefix.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Atoms the local system must avoid: `P` on every admissible tuple of
    /// each CD-restriction `∃p̄.P` that the root type negates.
    fn forbidden(
        &self,
        root: &TypeT,
        sigma: &SuccessorFunction,
        defined: &BTreeSet<LocalVar>,
    ) -> ConstraintSystem<LocalVar> {
        let mut out = ConstraintSystem::new();
        for &node in &self.layout.restrictions {
            if !root.has_negative(node) {
                continue;
            }
            let (_, pred) = self.restriction(node);
            for t in self.tuples(node, sigma, defined) {
                out.insert(Atom::new(pred, t));
            }
        }
        out
    }

    /// Both local biconditionals: CD-restrictions of the root are witnessed
    /// by the system exactly when present, and `∃r.C` is in the root exactly
    /// when some r-slot type contains `C`. Concepts a partial root leaves
    /// undecided are unconstrained; for a negated `∃r.C` every r-slot type
    /// must contain `¬C`.
    fn biconditionals_hold(
        &self,
        root: &TypeT,
        slots: &BTreeMap<u32, TypeT>,
        sigma: &SuccessorFunction,
        system: &ConstraintSystem<LocalVar>,
    ) -> bool {
        let defined = system.variables();
        for &node in &self.layout.restrictions {
            let (_, pred) = self.restriction(node);
            let witnessed = self
                .tuples(node, sigma, &defined)
                .into_iter()
                .any(|t| system.contains(&Atom::new(pred, t)));
            if (root.has_positive(node) && !witnessed) || (root.has_negative(node) && witnessed) {
                return false;
            }
        }
        for &node in &self.layout.existentials {
            let Node::Exists { role, filler } = self.closure.node(node) else {
                unreachable!()
            };
            let r_slots = sigma.slots(role);
            let witnessed = r_slots
                .iter()
                .any(|s| slots.get(s).is_some_and(|t| t.holds(*filler)));
            let excluded = r_slots
                .iter()
                .all(|s| slots.get(s).is_some_and(|t| t.holds(filler.negate())));
            if (root.has_positive(node) && !witnessed) || (root.has_negative(node) && !excluded) {
                return false;
            }
        }
        true
    }

    /// Types allowed in a used slot of `t0`: witness slots need their
    /// filler, and no r-slot may contain a `C` with `¬∃r.C` in `t0`.
    pub fn slot_literals(&self, t0: &TypeT, u: &SlotUse) -> Vec<Lit> {
        let mut lits = Vec::new();
        if let SlotKind::Witness { filler, .. } = u.kind {
            lits.push(filler);
        }
        for &node in &self.layout.existentials {
            let Node::Exists { role, filler } = self.closure.node(node) else {
                unreachable!()
            };
            if *role == u.role && t0.has_negative(node) {
                lits.push(filler.negate());
            }
        }
        lits
    }

    /// Every augmented type with root `t0` and slot types drawn from
    /// `all_types`: for each slot assignment and each choice of defined
    /// features per position, each complete satisfiable local system that
    /// avoids the negated restrictions' tuples and witnesses the positive
    /// ones.
    pub fn enumerate_augmented_types(
        &self,
        t0: &TypeT,
        all_types: &[TypeT],
        visit: &mut dyn FnMut(AugmentedType) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let sigma = self.sigma(t0);
        let uses = self.uses(t0);
        let candidates: Vec<Vec<&TypeT>> = uses
            .iter()
            .map(|u| {
                let lits = self.slot_literals(t0, u);
                all_types
                    .iter()
                    .filter(|t| lits.iter().all(|&l| t.holds(l)))
                    .collect()
            })
            .collect();
        let mut chosen: Vec<&TypeT> = Vec::with_capacity(uses.len());
        self.assign_slots(t0, &sigma, &uses, &candidates, &mut chosen, visit)
    }

    fn assign_slots<'a>(
        &self,
        t0: &TypeT,
        sigma: &SuccessorFunction,
        uses: &[SlotUse],
        candidates: &[Vec<&'a TypeT>],
        chosen: &mut Vec<&'a TypeT>,
        visit: &mut dyn FnMut(AugmentedType) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let k = chosen.len();
        if k == uses.len() {
            let slots: BTreeMap<u32, TypeT> = uses
                .iter()
                .zip(chosen.iter())
                .map(|(u, t)| (u.slot, (*t).clone()))
                .collect();
            return self.assign_definedness(t0, sigma, &slots, visit);
        }
        for &t in &candidates[k] {
            chosen.push(t);
            let flow = self.assign_slots(t0, sigma, uses, candidates, chosen, visit);
            chosen.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn assign_definedness(
        &self,
        t0: &TypeT,
        sigma: &SuccessorFunction,
        slots: &BTreeMap<u32, TypeT>,
        visit: &mut dyn FnMut(AugmentedType) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let positions: Vec<u32> = core::iter::once(0).chain(slots.keys().copied()).collect();
        let nf = self.features.len();
        let total_bits = positions.len() * nf;
        assert!(total_bits < 32, "literal enumeration is limited to small instances");
        for mask in 0u32..(1 << total_bits) {
            let defined: BTreeSet<LocalVar> = positions
                .iter()
                .enumerate()
                .flat_map(|(k, &s)| {
                    (0..nf)
                        .filter(move |f| mask >> (k * nf + f) & 1 == 1)
                        .map(move |f| LocalVar::new(s, f as u32))
                })
                .collect();
            let forbidden = self.forbidden(t0, sigma, &defined);
            crate::cdomain::enumerate_complete_satisfiable(
                self.domain,
                &defined,
                &ConstraintSystem::new(),
                &forbidden,
                |system| {
                    if self.biconditionals_hold(t0, slots, sigma, &system) {
                        visit(AugmentedType {
                            root: t0.clone(),
                            slots: slots.clone(),
                            system,
                            sigma: sigma.clone(),
                        })
                    } else {
                        ControlFlow::Continue(())
                    }
                },
            )?;
        }
        ControlFlow::Continue(())
    }

    /// Whether the local system is complete, satisfiable, only uses the
    /// root and σ's slots, and both biconditionals hold under the stored σ.
    pub fn is_locally_realizable(&self, t: &AugmentedType) -> bool {
        let used = t.sigma.used_slots();
        if t.slots.keys().copied().collect::<BTreeSet<u32>>() != used {
            return false;
        }
        let defined = t.defined();
        let nf = self.features.len() as u32;
        if defined
            .iter()
            .any(|v| v.feature >= nf || (v.slot != 0 && !used.contains(&v.slot)))
        {
            return false;
        }
        if !t.system.is_complete_binary(&defined) {
            return false;
        }
        if !csp_satisfiable(self.domain, &t.system).unwrap_or(false) {
            return false;
        }
        self.biconditionals_hold(&t.root, &t.slots, &t.sigma, &t.system)
    }

    /// `t2` patches `t` at slot `i`: roots match and the merged system is
    /// satisfiable. Both systems being complete and satisfiable, amalgamation
    /// reduces the merge check to comparing the slot-`i` part of `t` with the
    /// root part of `t2`.
    pub fn patches(&self, t: &AugmentedType, i: u32, t2: &AugmentedType) -> Result<bool, ReasonerError> {
        let slot_type = t.slots.get(&i).ok_or(ReasonerError::UnusedSlot(i))?;
        Ok(*slot_type == t2.root && t.slot_profile(i) == t2.root_profile())
    }

    /// [`patches`](Self::patches) decided by a CSP call on `t ⋈ᵢ t2`. The
    /// same features must be defined at slot `i` of `t` and at the root of
    /// `t2`, since both stand for the same element.
    pub fn patches_direct(
        &self,
        t: &AugmentedType,
        i: u32,
        t2: &AugmentedType,
    ) -> Result<bool, ReasonerError> {
        let slot_type = t.slots.get(&i).ok_or(ReasonerError::UnusedSlot(i))?;
        if *slot_type != t2.root {
            return Ok(false);
        }
        if t.slot_profile(i).defined != t2.root_profile().defined {
            return Ok(false);
        }
        Ok(csp_satisfiable(self.domain, &merge_at(&t.system, &t2.system, i))?)
    }
}
