//! Search for an ABox type over the surviving signatures.
//!
//! Individuals are assigned in two steps. First each one gets a projection:
//! a root profile and the truth values of the closure members that interact
//! with its role assertions (existentials along outgoing roles, fillers of
//! existentials along incoming roles). Projections are chosen by
//! backtracking against the cross-individual existential condition. Then a
//! complete root-level system over all individuals is enumerated, and every
//! individual needs a surviving type and a local system agreeing with it on
//! its named neighbours. Negated CD-restrictions along asserted roles are
//! enforced by those local systems; the ones refuted by a projection's
//! literals already forbid tuples of the root-level system.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;
use core::ops::ControlFlow;

use super::engine::{Context, Engine, Sig, SigId, Witness};
use crate::cdomain::{ground_eval, Atom, ConstraintSystem};
use crate::syntax::{Assertion, Lit, Name, Node};
use crate::typesys::{AugmentedType, TypeSystem};

/// `f^{a,i}`: feature `f` at position `i` of individual `a`'s local system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalVar {
    pub individual: u32,
    pub slot: u32,
    pub feature: u32,
}

impl fmt::Display for GlobalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}^{{{},{}}}", self.feature, self.individual, self.slot)
    }
}

#[derive(Debug, Clone)]
pub struct AboxType {
    pub individuals: Vec<Name>,
    pub sigs: Vec<SigId>,
    /// Per individual, its augmented type (anonymous slots only).
    pub types: Vec<AugmentedType>,
    /// Asserted role assertions `(r, a, b)` over individual indices.
    pub roles: Vec<(Name, u32, u32)>,
    /// Complete and satisfiable, over the root and used slots of every
    /// individual.
    pub global: ConstraintSystem<GlobalVar>,
    /// Per individual, the named neighbours standing at context positions
    /// `nt + 1 + k` of its local system.
    pub neighbours: Vec<Vec<u32>>,
    /// Per individual, the local system including context positions.
    pub locals: Vec<Witness>,
}

#[derive(Debug, Clone)]
struct Projection {
    profile: u32,
    /// Positive closure index to truth value.
    values: BTreeMap<usize, bool>,
    lits: Vec<Lit>,
    /// CD restrictions false in every type containing `lits`.
    refuted: OnceCell<Vec<usize>>,
}

impl Projection {
    fn holds(&self, l: Lit) -> Option<bool> {
        match self.values.get(&l.base()) {
            Some(&v) => Some(v != l.is_negated()),
            None if self.lits.contains(&l) => Some(true),
            None if self.lits.contains(&l.negate()) => Some(false),
            None => None,
        }
    }

    fn refutes(&self, ts: &TypeSystem, node: usize) -> bool {
        let refuted = self.refuted.get_or_init(|| {
            let mut lits = self.lits.clone();
            ts.layout
                .restrictions
                .iter()
                .copied()
                .filter(|&node| {
                    lits.push(Lit::positive(node));
                    let sat = ts.space.satisfiable(&lits);
                    lits.pop();
                    !sat
                })
                .collect()
        });
        refuted.binary_search(&node).is_ok()
    }
}

struct Instance {
    individuals: Vec<Name>,
    asserted: Vec<Vec<Lit>>,
    roles: Vec<(Name, u32, u32)>,
    /// Per individual: relevant positive closure indices.
    relevant: Vec<Vec<usize>>,
}

fn instance(engine: &Engine<'_>) -> Instance {
    let ts = engine.type_system();
    let o = &ts.ontology;
    // Individuals with more outgoing role assertions are assigned first, so
    // their root-level tuples prune the choices of their neighbours.
    let mut individuals = o.individuals();
    let out_degree = |a: &Name| {
        o.abox
            .iter()
            .filter(|x| matches!(x, Assertion::Role { from, .. } if from == a))
            .count()
    };
    individuals.sort_by_key(|a| core::cmp::Reverse(out_degree(a)));
    let index = |a: &Name| individuals.iter().position(|b| b == a).expect("known individual") as u32;
    let mut asserted = vec![Vec::new(); individuals.len()];
    let mut roles = BTreeSet::new();
    for a in &o.abox {
        match a {
            Assertion::Concept { individual, concept } => {
                let lit = ts.closure.lit(concept).expect("asserted concepts are in the closure");
                asserted[index(individual) as usize].push(lit);
            }
            Assertion::Role { role, from, to } => {
                roles.insert((role.clone(), index(from), index(to)));
            }
            _ => unreachable!("reduced ontology"),
        }
    }
    let roles: Vec<_> = roles.into_iter().collect();
    let mut relevant = vec![BTreeSet::new(); individuals.len()];
    for (k, node) in ts.closure.nodes().iter().enumerate() {
        if let Node::Exists { role, filler } = node {
            for (r, a, b) in &roles {
                if r == role {
                    relevant[*a as usize].insert(k);
                    relevant[*b as usize].insert(filler.base());
                }
            }
        }
    }
    Instance {
        individuals,
        asserted,
        roles,
        relevant: relevant.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// The first surviving signature with type containing `lits` and the given
/// profile, skipping the first `skip` surviving ones.
fn alive_sig(engine: &mut Engine<'_>, lits: &[Lit], profile: u32, skip: usize) -> Option<SigId> {
    let ts = engine.type_system();
    let mut all = lits.to_vec();
    all.extend_from_slice(engine.profile_literals(profile));
    let mut seen = 0usize;
    let mut found = None;
    let _ = ts.space.for_each_of_kind(engine.type_kind(), &all, &mut |t| {
        let ty = engine.intern_type(t);
        let id = engine.intern_sig(Sig { ty, profile });
        if engine.ensure(id) {
            if seen == skip {
                found = Some(id);
                return ControlFlow::Break(());
            }
            seen += 1;
        }
        ControlFlow::Continue(())
    });
    found
}

/// Candidate projections of individual `a`, in profile order. Whether a
/// surviving signature realises one is checked when it is tried.
fn projections(engine: &Engine<'_>, inst: &Instance, a: usize) -> Vec<Projection> {
    let ts = engine.type_system();
    let mut out = Vec::new();
    for q in 0..engine.profiles().len() as u32 {
        let mut lits = inst.asserted[a].clone();
        lits.extend_from_slice(engine.profile_literals(q));
        if !ts.space.satisfiable(&lits) {
            continue;
        }
        let mut values = BTreeMap::new();
        extend_projection(ts, &inst.relevant[a], 0, q, &mut lits, &mut values, &mut out);
    }
    out
}

fn extend_projection(
    ts: &TypeSystem,
    relevant: &[usize],
    k: usize,
    profile: u32,
    lits: &mut Vec<Lit>,
    values: &mut BTreeMap<usize, bool>,
    out: &mut Vec<Projection>,
) {
    if k == relevant.len() {
        out.push(Projection {
            profile,
            values: values.clone(),
            lits: lits.clone(),
            refuted: OnceCell::new(),
        });
        return;
    }
    for v in [false, true] {
        let l = Lit::positive(relevant[k]);
        lits.push(if v { l } else { l.negate() });
        if ts.space.satisfiable(lits) {
            values.insert(relevant[k], v);
            extend_projection(ts, relevant, k + 1, profile, lits, values, out);
            values.remove(&relevant[k]);
        }
        lits.pop();
    }
}

/// The cross-individual existential condition between two projections
/// along `r(a, b)`.
fn compatible(engine: &Engine<'_>, role: &Name, pa: &Projection, pb: &Projection) -> bool {
    let ts = engine.type_system();
    for (k, node) in ts.closure.nodes().iter().enumerate() {
        if let Node::Exists { role: r, filler } = node {
            if r == role && pa.values.get(&k) == Some(&false) && pb.holds(*filler) == Some(true) {
                return false;
            }
        }
    }
    true
}

struct Search<'s, 'e, 'a> {
    engine: &'s mut Engine<'a>,
    inst: &'e Instance,
    projections: Vec<Vec<Projection>>,
    /// Per projection, whether some surviving signature realises it.
    realised: Vec<Vec<Option<bool>>>,
    /// Per individual, how many of its projections are known unrealised.
    unrealised: Vec<usize>,
    memo: BTreeMap<(SigId, Context), Option<Witness>>,
}

enum Outcome {
    Found(AboxType),
    /// A signature used by a local system died; start over.
    Stale,
    None,
}

/// Searches an ABox type whose individuals have surviving types. For an
/// empty ABox, succeeds iff some signature survives.
pub fn find_abox_type(engine: &mut Engine<'_>) -> Option<AboxType> {
    let inst = instance(engine);
    if inst.individuals.is_empty() {
        engine.any_alive()?;
        return Some(AboxType {
            individuals: Vec::new(),
            sigs: Vec::new(),
            types: Vec::new(),
            roles: Vec::new(),
            global: ConstraintSystem::new(),
            neighbours: Vec::new(),
            locals: Vec::new(),
        });
    }
    loop {
        let projections: Vec<Vec<Projection>> = (0..inst.individuals.len())
            .map(|a| projections(engine, &inst, a))
            .collect();
        let realised = projections.iter().map(|ps| vec![None; ps.len()]).collect();
        let mut search = Search {
            engine,
            inst: &inst,
            projections,
            realised,
            unrealised: vec![0; inst.individuals.len()],
            memo: BTreeMap::new(),
        };
        let mut chosen = Vec::new();
        match search.assign(&mut chosen) {
            Outcome::Found(at) => return Some(at),
            Outcome::None => return None,
            Outcome::Stale => {}
        }
    }
}

impl Search<'_, '_, '_> {
    fn assign(&mut self, chosen: &mut Vec<usize>) -> Outcome {
        let a = chosen.len();
        if a == self.inst.individuals.len() {
            return self.global(chosen);
        }
        if (0..self.projections.len()).any(|b| self.unrealised[b] == self.projections[b].len()) {
            return Outcome::None;
        }
        for p in 0..self.projections[a].len() {
            if self.realised[a][p] == Some(false) {
                continue;
            }
            let ok = self.inst.roles.iter().all(|(r, x, y)| {
                let (x, y) = (*x as usize, *y as usize);
                let get = |i: usize| {
                    if i == a {
                        Some(&self.projections[a][p])
                    } else if i < a {
                        Some(&self.projections[i][chosen[i]])
                    } else {
                        None
                    }
                };
                match (get(x), get(y)) {
                    (Some(px), Some(py)) if x == a || y == a => compatible(self.engine, r, px, py),
                    _ => true,
                }
            });
            if !ok {
                continue;
            }
            chosen.push(p);
            if a + 1 < self.inst.individuals.len() && !self.feasible(chosen) || !self.is_realised(a, p) {
                chosen.pop();
                continue;
            }
            match self.assign(chosen) {
                Outcome::None => {}
                other => return other,
            }
            chosen.pop();
        }
        Outcome::None
    }

    fn is_realised(&mut self, a: usize, p: usize) -> bool {
        if let Some(known) = self.realised[a][p] {
            return known;
        }
        let proj = &self.projections[a][p];
        let known = alive_sig(self.engine, &proj.lits, proj.profile, 0).is_some();
        self.realised[a][p] = Some(known);
        self.unrealised[a] += !known as usize;
        known
    }

    fn nf(&self) -> u32 {
        self.engine.type_system().features.len() as u32
    }

    fn gvar(&self, a: usize, f: u32) -> u32 {
        a as u32 * self.nf() + f
    }

    /// Root-level variables, required atoms and forbidden tuples of the
    /// individuals `0..proj.len()`. Tuples reaching later individuals are
    /// left out.
    fn root_system(&self, proj: &[Projection]) -> (Vec<u32>, Vec<Atom<u32>>, Vec<Atom<u32>>) {
        let ts = self.engine.type_system();
        let mut vars = Vec::new();
        let mut required = Vec::new();
        for (a, p) in proj.iter().enumerate() {
            let profile = self.engine.profile(p.profile);
            vars.extend(profile.defined.iter().map(|&f| self.gvar(a, f)));
            required.extend(profile.atoms.iter().map(|x| x.map(|&f| self.gvar(a, f))));
        }
        // Root-level tuples of negated restrictions along asserted roles.
        let mut forbidden = Vec::new();
        for (a, p) in proj.iter().enumerate() {
            for &node in &ts.layout.restrictions {
                if p.holds(Lit::positive(node)) != Some(false) && !p.refutes(ts, node) {
                    continue;
                }
                let (paths, pred) = ts.restriction(node);
                let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
                for (j, path) in paths.iter().enumerate() {
                    let f = ts.path_feature(node, j);
                    let options: Vec<usize> = match &path.role {
                        None => vec![a],
                        Some(r) => self
                            .inst
                            .roles
                            .iter()
                            .filter(|(s, x, y)| s == r && *x as usize == a && (*y as usize) < proj.len())
                            .map(|(_, _, y)| *y as usize)
                            .collect(),
                    };
                    let options: Vec<u32> = options
                        .into_iter()
                        .filter(|&b| self.engine.profile(proj[b].profile).is_defined(f))
                        .map(|b| self.gvar(b, f))
                        .collect();
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            options.iter().map(move |&v| {
                                let mut t = t.clone();
                                t.push(v);
                                t
                            })
                        })
                        .collect();
                }
                forbidden.extend(tuples.into_iter().map(|t| Atom::new(pred, t)));
            }
        }
        (vars, required, forbidden)
    }

    /// Whether the root-level system of the chosen individuals has a
    /// complete satisfiable extension.
    fn feasible(&self, chosen: &[usize]) -> bool {
        let proj: Vec<Projection> = chosen
            .iter()
            .enumerate()
            .map(|(a, &p)| self.projections[a][p].clone())
            .collect();
        let (vars, required, forbidden) = self.root_system(&proj);
        let d = self.engine.type_system().domain();
        d.find_complete(&vars, &required, &forbidden).is_some()
    }

    fn global(&mut self, chosen: &[usize]) -> Outcome {
        let ts = self.engine.type_system();
        let n = self.inst.individuals.len();
        let proj: Vec<Projection> = (0..n).map(|a| self.projections[a][chosen[a]].clone()).collect();
        let (vars, required, forbidden) = self.root_system(&proj);
        let d = ts.domain();
        let mut outcome = Outcome::None;
        let _ = d.for_each_complete(&vars, &required, &forbidden, &mut |g| {
            match self.locals(&proj, g) {
                Outcome::None => ControlFlow::Continue(()),
                other => {
                    outcome = other;
                    ControlFlow::Break(())
                }
            }
        });
        outcome
    }

    /// Local systems for every individual agreeing with the root-level
    /// system `g`.
    fn locals(&mut self, proj: &[Projection], g: &[Atom<u32>]) -> Outcome {
        let ts = self.engine.type_system();
        let nt = ts.layout.nt();
        let n = self.inst.individuals.len();
        let nf = self.nf();
        let mut sigs = Vec::with_capacity(n);
        let mut witnesses = Vec::with_capacity(n);
        let mut neighbours_all = Vec::with_capacity(n);
        for a in 0..n {
            let mut neighbours: Vec<u32> = Vec::new();
            let mut roles_to: BTreeMap<u32, Vec<Name>> = BTreeMap::new();
            let mut self_roles = Vec::new();
            for (r, x, y) in &self.inst.roles {
                if *x as usize != a {
                    continue;
                }
                if *y as usize == a {
                    self_roles.push(r.clone());
                } else {
                    roles_to.entry(*y).or_default().push(r.clone());
                }
            }
            let mut positions = Vec::new();
            for (b, roles) in roles_to {
                neighbours.push(b);
                positions.push((roles, proj[b as usize].profile));
            }
            let position = |individual: u32| -> Option<u32> {
                if individual as usize == a {
                    Some(0)
                } else {
                    neighbours
                        .iter()
                        .position(|&b| b == individual)
                        .map(|k| nt + 1 + k as u32)
                }
            };
            let fixed: Vec<Atom<u32>> = g
                .iter()
                .filter_map(|atom| {
                    let mut args = smallvec::SmallVec::<[u32; 2]>::new();
                    for &v in &atom.args {
                        let pos = position(v / nf)?;
                        args.push(self.engine.var(pos, v % nf));
                    }
                    Some(Atom { pred: atom.pred, args })
                })
                .collect();
            let ctx = Context {
                positions,
                self_roles,
                fixed,
            };
            let Some((sig, w)) = self.local(&proj[a], ctx) else {
                return Outcome::None;
            };
            for &(_, s) in &w.slots {
                if !self.engine.ensure(s) {
                    return Outcome::Stale;
                }
            }
            sigs.push(sig);
            witnesses.push(w);
            neighbours_all.push(neighbours);
        }
        Outcome::Found(self.assemble(sigs, witnesses, neighbours_all))
    }

    fn local(&mut self, p: &Projection, ctx: Context) -> Option<(SigId, Witness)> {
        let mut skip = 0;
        while let Some(id) = alive_sig(self.engine, &p.lits, p.profile, skip) {
            skip += 1;
            let key = (id, ctx.clone());
            let found = match self.memo.get(&key) {
                Some(hit) => hit.clone(),
                None => {
                    let sig = self.engine.sig(id);
                    let w = self.engine.search(sig, &ctx, false);
                    self.memo.insert(key, w.clone());
                    w
                }
            };
            if let Some(w) = found {
                return Some((id, w));
            }
        }
        None
    }

    fn assemble(&mut self, sigs: Vec<SigId>, locals: Vec<Witness>, neighbours: Vec<Vec<u32>>) -> AboxType {
        let ts = self.engine.type_system();
        let nt = ts.layout.nt();
        // Union of the local systems over global variables. They overlap
        // only on named roots, where they agree, so the union is
        // satisfiable; its completion is read off a solution.
        let mut union: ConstraintSystem<GlobalVar> = ConstraintSystem::new();
        for (a, w) in locals.iter().enumerate() {
            for atom in &w.system {
                union.insert(atom.map(|&v| {
                    let lv = self.engine.unvar(v);
                    if lv.slot > nt {
                        let b = neighbours[a][(lv.slot - nt - 1) as usize];
                        GlobalVar {
                            individual: b,
                            slot: 0,
                            feature: lv.feature,
                        }
                    } else {
                        GlobalVar {
                            individual: a as u32,
                            slot: lv.slot,
                            feature: lv.feature,
                        }
                    }
                }));
            }
        }
        let global = complete_by_solution(ts.domain(), &union);
        let types = sigs
            .iter()
            .zip(&locals)
            .map(|(&s, w)| self.engine.augmented(self.engine.sig(s), w))
            .collect();
        AboxType {
            individuals: self.inst.individuals.clone(),
            sigs,
            types,
            roles: self.inst.roles.clone(),
            global,
            neighbours,
            locals,
        }
    }
}

/// The complete system over the variables of `c` that a solution of `c`
/// satisfies.
pub(crate) fn complete_by_solution<V: Ord + Clone>(
    d: &dyn crate::cdomain::ConcreteDomain,
    c: &ConstraintSystem<V>,
) -> ConstraintSystem<V> {
    let solution = crate::cdomain::solve(d, c).expect("satisfiable union of agreeing local systems");
    let vars: Vec<&V> = solution.keys().collect();
    let mut out = ConstraintSystem::new();
    if vars.is_empty() {
        return out;
    }
    let desc = d.descriptor();
    for pred in desc.preds() {
        let k = desc.arity(pred);
        let mut idx = vec![0usize; k];
        'tuples: loop {
            let args: Vec<_> = idx.iter().map(|&i| solution[vars[i]].clone()).collect();
            if ground_eval(d, pred, &args).expect("values of the domain") {
                out.insert(Atom::new(pred, idx.iter().map(|&i| vars[i].clone()).collect::<Vec<_>>()));
            }
            for pos in (0..k).rev() {
                idx[pos] += 1;
                if idx[pos] < vars.len() {
                    continue 'tuples;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    out
}
