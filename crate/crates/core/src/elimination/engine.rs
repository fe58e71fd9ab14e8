//! Elimination over node signatures.
//!
//! Whether an augmented type is patched at slot `i` only depends on the
//! slot's signature: its type and the part of the local system at `i`
//! (defined features and their atoms). So the greatest fixpoint of type
//! elimination can be computed over signatures: a signature is alive iff some
//! augmented type with that root signature has only alive slot signatures.
//! Signatures are explored on demand, starting from the ones the ABox or the
//! caller asks about, and witnesses are built with canonical successor slots.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DropReason, TraceEntry};
use crate::cdomain::{Atom, ConstraintSystem, Csp, LocalVar};
use crate::syntax::{Lit, Name};
use crate::typesys::{AugmentedType, Profile, SlotKind, SlotUse, TypeKind, TypeSystem, TypeT};

pub type SigId = u32;

/// A node signature: type and root profile, both interned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sig {
    pub ty: u32,
    pub profile: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Unexplored,
    Queued,
    /// Has a witness; final once the worklist is empty.
    Alive,
    Dead,
}

/// A locally realizable augmented type for a signature, in engine terms.
#[derive(Debug, Clone)]
pub struct Witness {
    /// Used slot and the signature placed there, by increasing slot.
    pub slots: Vec<(u32, SigId)>,
    /// Complete local system over encoded variables (see [`Engine::var`]).
    pub system: Vec<Atom<u32>>,
}

struct SigNode {
    sig: Sig,
    status: Status,
    witness: Option<Witness>,
    dependents: Vec<SigId>,
}

/// Named neighbours of an ABox individual, seen as extra positions of its
/// local system. Position `k` is encoded as slot `nt + 1 + k`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context {
    /// Roles from the individual to the neighbour, and the neighbour's
    /// profile.
    pub positions: Vec<(Vec<Name>, u32)>,
    /// Roles `r` with `r(a, a)` asserted.
    pub self_roles: Vec<Name>,
    /// Complete atoms over the root and context positions.
    pub fixed: Vec<Atom<u32>>,
}

impl Context {
    pub fn is_trivial(&self) -> bool {
        self.positions.is_empty() && self.self_roles.is_empty()
    }
}

pub struct Engine<'a> {
    ts: &'a TypeSystem,
    kind: TypeKind,
    pub(crate) csp: Csp,
    profiles: Vec<Profile>,
    profile_index: BTreeMap<Profile, u32>,
    profile_lits: Vec<Vec<Lit>>,
    types: Vec<TypeT>,
    type_index: BTreeMap<TypeT, u32>,
    /// Per role, the class of every profile (see [`Engine::classes`]).
    role_classes: BTreeMap<Name, Vec<u32>>,
    /// Answers of [`Engine::live_type`]; they stay valid while not dead,
    /// since signatures never come back to life.
    live_memo: BTreeMap<(Vec<Lit>, u32, bool), SigId>,
    nodes: Vec<SigNode>,
    sig_index: BTreeMap<Sig, SigId>,
    current: Vec<SigId>,
    next: Vec<SigId>,
    rng: ChaCha8Rng,
    round: u32,
    pub(crate) trace: Vec<TraceEntry>,
    pub(crate) witnesses_built: u64,
}

impl<'a> Engine<'a> {
    /// An engine over partial types.
    pub fn new(ts: &'a TypeSystem, seed: u64) -> Self {
        Self::with_kind(ts, seed, TypeKind::Partial)
    }

    /// An engine over the given kind of types. Full types make signatures
    /// correspond one to one to the explicit elimination in
    /// [`literal`](super::literal); partial types are far fewer.
    pub fn with_kind(ts: &'a TypeSystem, seed: u64, kind: TypeKind) -> Self {
        let mut engine = Engine {
            ts,
            kind,
            csp: Csp::new(ts.domain()),
            profiles: Vec::new(),
            profile_index: BTreeMap::new(),
            profile_lits: Vec::new(),
            types: Vec::new(),
            type_index: BTreeMap::new(),
            role_classes: BTreeMap::new(),
            live_memo: BTreeMap::new(),
            nodes: Vec::new(),
            sig_index: BTreeMap::new(),
            current: Vec::new(),
            next: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            round: 0,
            trace: Vec::new(),
            witnesses_built: 0,
        };
        engine.enumerate_profiles();
        engine
    }

    pub fn type_system(&self) -> &'a TypeSystem {
        self.ts
    }

    pub fn type_kind(&self) -> TypeKind {
        self.kind
    }

    fn enumerate_profiles(&mut self) {
        let nf = self.ts.features.len();
        assert!(nf < 16, "too many concrete features for profile enumeration");
        let d = self.ts.domain();
        for mask in 0u32..(1 << nf) {
            let defined: Vec<u32> = (0..nf as u32).filter(|f| mask >> f & 1 == 1).collect();
            let mut found = Vec::new();
            let _ = d.for_each_complete(&defined, &[], &[], &mut |c| {
                found.push(c.to_vec());
                ControlFlow::Continue(())
            });
            for atoms in found {
                let p = Profile {
                    defined: defined.clone(),
                    atoms,
                };
                let lits = self.ts.profile_literals(&p);
                self.profile_index.insert(p.clone(), self.profiles.len() as u32);
                self.profiles.push(p);
                self.profile_lits.push(lits);
            }
        }
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn profile(&self, id: u32) -> &Profile {
        &self.profiles[id as usize]
    }

    pub fn profile_id(&self, p: &Profile) -> Option<u32> {
        self.profile_index.get(p).copied()
    }

    pub fn profile_literals(&self, id: u32) -> &[Lit] {
        &self.profile_lits[id as usize]
    }

    pub fn type_of(&self, id: u32) -> &TypeT {
        &self.types[id as usize]
    }

    pub fn types_seen(&self) -> usize {
        self.types.len()
    }

    pub fn signatures_seen(&self) -> usize {
        self.nodes.len()
    }

    pub fn intern_type(&mut self, t: &TypeT) -> u32 {
        if let Some(&id) = self.type_index.get(t) {
            return id;
        }
        let id = self.types.len() as u32;
        self.types.push(t.clone());
        self.type_index.insert(t.clone(), id);
        id
    }

    pub fn intern_sig(&mut self, sig: Sig) -> SigId {
        if let Some(&id) = self.sig_index.get(&sig) {
            return id;
        }
        let id = self.nodes.len() as SigId;
        self.nodes.push(SigNode {
            sig,
            status: Status::Unexplored,
            witness: None,
            dependents: Vec::new(),
        });
        self.sig_index.insert(sig, id);
        id
    }

    pub fn sig(&self, id: SigId) -> Sig {
        self.nodes[id as usize].sig
    }

    pub fn is_dead(&self, id: SigId) -> bool {
        self.nodes[id as usize].status == Status::Dead
    }

    pub fn witness(&self, id: SigId) -> Option<&Witness> {
        self.nodes[id as usize].witness.as_ref()
    }

    pub fn rounds(&self) -> u32 {
        self.round
    }

    /// Ids of signatures known to be alive. Only meaningful between calls to
    /// [`ensure`](Self::ensure).
    pub fn alive(&self) -> impl Iterator<Item = SigId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.status == Status::Alive)
            .map(|(i, _)| i as SigId)
    }

    /// Encoded local variable: feature `f` at position `pos`.
    pub fn var(&self, pos: u32, f: u32) -> u32 {
        pos * self.ts.features.len() as u32 + f
    }

    pub fn unvar(&self, v: u32) -> LocalVar {
        let nf = self.ts.features.len() as u32;
        LocalVar::new(v / nf, v % nf)
    }

    /// Decides whether the signature survives elimination, exploring
    /// whatever it depends on.
    pub fn ensure(&mut self, id: SigId) -> bool {
        match self.nodes[id as usize].status {
            Status::Dead => return false,
            Status::Alive if self.current.is_empty() && self.next.is_empty() => return true,
            Status::Unexplored => {
                self.nodes[id as usize].status = Status::Queued;
                self.next.push(id);
            }
            _ => {}
        }
        self.run();
        !self.is_dead(id)
    }

    fn run(&mut self) {
        loop {
            if self.current.is_empty() {
                if self.next.is_empty() {
                    return;
                }
                core::mem::swap(&mut self.current, &mut self.next);
                self.current.shuffle(&mut self.rng);
                self.round += 1;
            }
            let id = self.current.pop().expect("non-empty");
            self.process(id);
        }
    }

    fn process(&mut self, id: SigId) {
        let node = &self.nodes[id as usize];
        if node.status == Status::Dead {
            return;
        }
        if let Some(w) = &node.witness {
            if w.slots.iter().all(|&(_, s)| !self.is_dead(s)) {
                self.nodes[id as usize].status = Status::Alive;
                return;
            }
        }
        let sig = node.sig;
        match self.search(sig, &Context::default(), false) {
            Some(w) => self.adopt(id, w),
            None => self.kill(id),
        }
    }

    fn adopt(&mut self, id: SigId, w: Witness) {
        for &(_, s) in &w.slots {
            self.nodes[s as usize].dependents.push(id);
            if self.nodes[s as usize].status == Status::Unexplored {
                self.nodes[s as usize].status = Status::Queued;
                self.next.push(s);
            }
        }
        self.witnesses_built += 1;
        let node = &mut self.nodes[id as usize];
        node.witness = Some(w);
        node.status = Status::Alive;
    }

    fn kill(&mut self, id: SigId) {
        let reason = self.drop_reason(id);
        let node = &mut self.nodes[id as usize];
        node.status = Status::Dead;
        node.witness = None;
        let dependents = core::mem::take(&mut node.dependents);
        self.trace.push(TraceEntry {
            iteration: self.round,
            dropped: id,
            reason,
        });
        for d in dependents {
            let dn = &self.nodes[d as usize];
            let uses_id = dn
                .witness
                .as_ref()
                .is_some_and(|w| w.slots.iter().any(|&(_, s)| s == id));
            if dn.status == Status::Alive && uses_id {
                self.nodes[d as usize].status = Status::Queued;
                self.next.push(d);
            }
        }
    }

    fn drop_reason(&mut self, id: SigId) -> DropReason {
        let node = &self.nodes[id as usize];
        let witness = match &node.witness {
            Some(w) => Some(w.clone()),
            None => self.search(node.sig, &Context::default(), true),
        };
        let Some(w) = witness else {
            return DropReason::Local;
        };
        let t0 = self.types[self.nodes[id as usize].sig.ty as usize].clone();
        let sigma = self.ts.sigma(&t0);
        let dead = w
            .slots
            .iter()
            .find(|&&(_, s)| s == id || self.is_dead(s))
            .map(|&(slot, _)| slot)
            .unwrap_or(w.slots.first().map_or(0, |&(slot, _)| slot));
        DropReason::Patch {
            role: sigma.role_of(dead).cloned().unwrap_or_else(|| Name::from("")),
            slot: dead,
        }
    }

    /// First type (in enumeration order) containing `lits` whose signature
    /// with `profile` is not dead.
    fn live_type(&mut self, lits: &[Lit], profile: u32, ignore_dead: bool) -> Option<SigId> {
        let key = (lits.to_vec(), profile, ignore_dead);
        if let Some(&s) = self.live_memo.get(&key) {
            if ignore_dead || !self.is_dead(s) {
                return Some(s);
            }
        }
        let found = self.first_live_type(lits, profile, ignore_dead);
        match found {
            Some(s) => self.live_memo.insert(key, s),
            None => self.live_memo.remove(&key),
        };
        found
    }

    fn first_live_type(&mut self, lits: &[Lit], profile: u32, ignore_dead: bool) -> Option<SigId> {
        let mut all = lits.to_vec();
        all.extend_from_slice(&self.profile_lits[profile as usize]);
        let mut found = None;
        let space = &self.ts.space;
        let mut pending: Vec<TypeT> = Vec::new();
        let _ = space.for_each_of_kind(self.kind, &all, &mut |t| {
            let known = self.type_index.get(t).and_then(|&ty| {
                self.sig_index.get(&Sig { ty, profile }).copied()
            });
            match known {
                Some(s) if !ignore_dead && self.nodes[s as usize].status == Status::Dead => {
                    ControlFlow::Continue(())
                }
                Some(s) => {
                    found = Some(s);
                    ControlFlow::Break(())
                }
                None => {
                    pending.push(t.clone());
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(t) = pending.pop() {
            let ty = self.intern_type(&t);
            found = Some(self.intern_sig(Sig { ty, profile }));
        }
        found
    }

    /// For every profile, its restriction to the features reached through
    /// `role`.
    fn classes(&mut self, role: &Name) -> Vec<u32> {
        if let Some(c) = self.role_classes.get(role) {
            return c.clone();
        }
        let visible = self.ts.role_features(role);
        let keep = |f: &u32| visible.binary_search(f).is_ok();
        let classes: Vec<u32> = self
            .profiles
            .iter()
            .map(|p| {
                let projected = Profile {
                    defined: p.defined.iter().copied().filter(keep).collect(),
                    atoms: p.atoms.iter().filter(|a| a.args.iter().all(keep)).cloned().collect(),
                };
                self.profile_id(&projected)
                    .expect("restrictions of complete systems are complete")
            })
            .collect();
        self.role_classes.insert(role.clone(), classes.clone());
        classes
    }

    /// Searches a locally realizable augmented type for `sig` whose slot
    /// signatures are not dead (or arbitrary, with `ignore_dead`), relative
    /// to a context of named neighbours.
    pub fn search(&mut self, sig: Sig, ctx: &Context, ignore_dead: bool) -> Option<Witness> {
        let ts = self.ts;
        let t0 = self.types[sig.ty as usize].clone();
        let p0 = self.profiles[sig.profile as usize].clone();
        let uses = ts.uses(&t0);
        // Plain paths of positive restrictions are witnessed at the root.
        for &node in &ts.layout.restrictions {
            if !t0.has_positive(node) {
                continue;
            }
            let (paths, _) = ts.restriction(node);
            for (j, p) in paths.iter().enumerate() {
                if p.role.is_none() && !p0.is_defined(ts.path_feature(node, j)) {
                    return None;
                }
            }
        }
        // Candidates per use, one per profile class: only the features on
        // paths along the slot's role meet other positions in the local
        // system, so profiles agreeing on them are interchangeable there.
        let mut candidates: Vec<Vec<Candidate>> = Vec::with_capacity(uses.len());
        for u in &uses {
            let lits = ts.slot_literals(&t0, u);
            if !ts.space.satisfiable(&lits) {
                return None;
            }
            let needs = match u.kind {
                SlotKind::Path { node, path } => Some(ts.path_feature(node, path)),
                SlotKind::Witness { .. } => None,
            };
            let classes = self.classes(&u.role);
            let mut cands: Vec<Candidate> = Vec::new();
            let mut taken = vec![false; self.profiles.len()];
            for q in 0..self.profiles.len() as u32 {
                let class = classes[q as usize];
                if taken[class as usize] || needs.is_some_and(|f| !self.profiles[q as usize].is_defined(f)) {
                    continue;
                }
                if let Some(sig) = self.live_type(&lits, q, ignore_dead) {
                    taken[class as usize] = true;
                    cands.push(Candidate { class, profile: q, sig });
                }
            }
            if cands.is_empty() {
                return None;
            }
            candidates.push(cands);
        }
        let mut order: Vec<usize> = (0..uses.len()).collect();
        order.sort_by_key(|&k| (candidates[k].len(), uses[k].slot));
        let problem = Problem {
            engine: self,
            t0: &t0,
            p0: &p0,
            uses: &uses,
            candidates: &candidates,
            ctx,
        };
        let mut chosen: Vec<Option<usize>> = vec![None; uses.len()];
        let system = problem.backtrack(&order, 0, &mut chosen)?;
        let mut slots: Vec<(u32, SigId)> = uses
            .iter()
            .zip(&chosen)
            .enumerate()
            .map(|(k, (u, c))| (u.slot, candidates[k][c.expect("all slots chosen")].sig))
            .collect();
        slots.sort();
        Some(Witness { slots, system })
    }

    /// The augmented type described by a witness of `sig` (context
    /// positions dropped).
    pub fn augmented(&self, sig: Sig, w: &Witness) -> AugmentedType {
        let t0 = self.types[sig.ty as usize].clone();
        let nt = self.ts.layout.nt();
        let system: ConstraintSystem<LocalVar> = w
            .system
            .iter()
            .map(|a| a.map(|&v| self.unvar(v)))
            .filter(|a: &Atom<LocalVar>| a.args.iter().all(|v| v.slot <= nt))
            .collect();
        AugmentedType {
            sigma: self.ts.sigma(&t0),
            root: t0,
            slots: w
                .slots
                .iter()
                .map(|&(slot, s)| (slot, self.types[self.sig(s).ty as usize].clone()))
                .collect(),
            system,
        }
    }

    /// Settles every signature; the alive ones are the greatest fixpoint.
    pub fn explore_all(&mut self) {
        for p in 0..self.profiles.len() as u32 {
            let lits = self.profile_lits[p as usize].clone();
            let mut all = Vec::new();
            let _ = self.ts.space.for_each_of_kind(self.kind, &lits, &mut |t| {
                all.push(t.clone());
                ControlFlow::Continue(())
            });
            for t in all {
                let ty = self.intern_type(&t);
                let id = self.intern_sig(Sig { ty, profile: p });
                self.ensure(id);
            }
        }
    }

    /// Some alive signature, trying types in enumeration order.
    pub fn any_alive(&mut self) -> Option<SigId> {
        for p in 0..self.profiles.len() as u32 {
            let lits = self.profile_lits[p as usize].clone();
            let mut result = None;
            let mut skip = 0usize;
            loop {
                let mut nth = None;
                let mut k = 0usize;
                let _ = self.ts.space.for_each_of_kind(self.kind, &lits, &mut |t| {
                    if k == skip {
                        nth = Some(t.clone());
                        return ControlFlow::Break(());
                    }
                    k += 1;
                    ControlFlow::Continue(())
                });
                let Some(t) = nth else { break };
                skip += 1;
                let ty = self.intern_type(&t);
                let id = self.intern_sig(Sig { ty, profile: p });
                if self.ensure(id) {
                    result = Some(id);
                    break;
                }
            }
            if result.is_some() {
                return result;
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    /// Profile seen by the local system.
    class: u32,
    profile: u32,
    sig: SigId,
}

/// One local witness search.
struct Problem<'e, 'a> {
    engine: &'e Engine<'a>,
    t0: &'e TypeT,
    p0: &'e Profile,
    uses: &'e [SlotUse],
    candidates: &'e [Vec<Candidate>],
    ctx: &'e Context,
}

impl Problem<'_, '_> {
    fn backtrack(
        &self,
        order: &[usize],
        depth: usize,
        chosen: &mut Vec<Option<usize>>,
    ) -> Option<Vec<Atom<u32>>> {
        if depth == order.len() {
            return self.solve(chosen, true);
        }
        let k = order[depth];
        for c in 0..self.candidates[k].len() {
            chosen[k] = Some(c);
            if self.solve(chosen, false).is_some() {
                let found = if depth + 1 == order.len() {
                    self.solve(chosen, true)
                } else {
                    self.backtrack(order, depth + 1, chosen)
                };
                if found.is_some() {
                    return found;
                }
            }
        }
        chosen[k] = None;
        None
    }

    /// A complete system over the root, the context and the chosen slots,
    /// if one exists. Slots carry their full profiles when `full`, their
    /// classes otherwise.
    fn solve(&self, chosen: &[Option<usize>], full: bool) -> Option<Vec<Atom<u32>>> {
        let e = self.engine;
        let ts = e.ts;
        let nt = ts.layout.nt();
        let mut positions: Vec<(u32, &Profile)> = vec![(0, self.p0)];
        for (k, (_, q)) in self.ctx.positions.iter().enumerate() {
            positions.push((nt + 1 + k as u32, e.profile(*q)));
        }
        for (k, (u, c)) in self.uses.iter().zip(chosen).enumerate() {
            if let Some(c) = c {
                let cand = self.candidates[k][*c];
                let q = if full { cand.profile } else { cand.class };
                positions.push((u.slot, e.profile(q)));
            }
        }
        let profile_at = |pos: u32| positions.iter().find(|(p, _)| *p == pos).map(|(_, p)| *p);
        let defined = |pos: u32, f: u32| profile_at(pos).is_some_and(|p| p.is_defined(f));
        let mut vars = Vec::new();
        let mut required = Vec::new();
        for &(pos, p) in &positions {
            vars.extend(p.defined.iter().map(|&f| e.var(pos, f)));
            required.extend(p.atoms.iter().map(|a| a.map(|&f| e.var(pos, f))));
        }
        required.extend(self.ctx.fixed.iter().cloned());
        let mut forbidden = Vec::new();
        for (k, &node) in ts.layout.restrictions.iter().enumerate() {
            let (paths, pred) = ts.restriction(node);
            if self.t0.has_positive(node) {
                // The canonical tuple: plain paths at the root, role paths at
                // their own slot.
                let mut args = Vec::with_capacity(paths.len());
                let mut present = true;
                for (j, p) in paths.iter().enumerate() {
                    let pos = if p.role.is_some() {
                        ts.layout.off(k + 1, j + 1)
                    } else {
                        0
                    };
                    present &= profile_at(pos).is_some();
                    args.push(e.var(pos, ts.path_feature(node, j)));
                }
                if present {
                    required.push(Atom::new(pred, args));
                }
                continue;
            }
            if !self.t0.has_negative(node) {
                continue;
            }
            let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
            for (j, p) in paths.iter().enumerate() {
                let f = ts.path_feature(node, j);
                let mut options = Vec::new();
                match &p.role {
                    None => options.push(0),
                    Some(r) => {
                        options.extend(self.uses.iter().filter(|u| &u.role == r).map(|u| u.slot));
                        for (i, (roles, _)) in self.ctx.positions.iter().enumerate() {
                            if roles.contains(r) {
                                options.push(nt + 1 + i as u32);
                            }
                        }
                        if self.ctx.self_roles.contains(r) {
                            options.push(0);
                        }
                    }
                }
                options.retain(|&pos| defined(pos, f));
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        options.iter().map(move |&pos| {
                            let mut t = t.clone();
                            t.push(e.var(pos, f));
                            t
                        })
                    })
                    .collect();
            }
            forbidden.extend(tuples.into_iter().map(|t| Atom::new(pred, t)));
        }
        e.csp.find_complete(&vars, &required, &forbidden)
    }
}
