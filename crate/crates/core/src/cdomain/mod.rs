//! Concrete domains: constraint systems, the domain plugin trait, and the
//! two built-in domains (`Q` and `Allen`).
//!
//! Plugins work on atoms over `u32` variables. The generic helpers in this
//! module translate between [`ConstraintSystem`]s over arbitrary ordered
//! variable types and the plugin interface.

pub mod allen;
mod csp;
pub mod rationals;
mod system;
mod value;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

pub use csp::Csp;
pub use system::{merge_at, Atom, ConstraintSystem, LocalVar, MergedVar, Pred};
pub use value::{Rational, Value};

use crate::error::DomainError;
use crate::syntax::{Concept, FeaturePath, Name, PredRef};

/// The concrete domain an ontology is interpreted over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomainTag {
    Q,
    Allen,
}

impl DomainTag {
    pub fn from_name(name: &str) -> Option<DomainTag> {
        match name {
            "Q" => Some(DomainTag::Q),
            "Allen" => Some(DomainTag::Allen),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainTag::Q => "Q",
            DomainTag::Allen => "Allen",
        }
    }

    pub fn domain(self) -> &'static dyn ConcreteDomain {
        match self {
            DomainTag::Q => &rationals::Rationals,
            DomainTag::Allen => &allen::Allen,
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredicateSym {
    pub name: &'static str,
    pub arity: usize,
}

impl PredicateSym {
    pub const fn new(name: &'static str, arity: usize) -> Self {
        PredicateSym { name, arity }
    }
}

/// Argument of an equality template atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqArg {
    X,
    Y,
}

#[derive(Debug)]
pub struct DomainDescriptor {
    pub tag: DomainTag,
    pub predicates: &'static [PredicateSym],
    /// Every isomorphism between finite substructures extends to an
    /// automorphism.
    pub homogeneous: bool,
    /// Atoms whose conjunction defines `x = y`.
    pub equality: &'static [(Pred, [EqArg; 2])],
}

impl DomainDescriptor {
    pub fn symbol(&self, pred: Pred) -> Result<&PredicateSym, DomainError> {
        self.predicates
            .get(pred.0 as usize)
            .ok_or(DomainError::UnknownPredicate(pred.0, self.tag))
    }

    pub fn lookup(&self, name: &str) -> Option<Pred> {
        self.predicates
            .iter()
            .position(|p| p.name == name)
            .map(|i| Pred(i as u8))
    }

    pub fn name(&self, pred: Pred) -> &'static str {
        self.predicates[pred.0 as usize].name
    }

    pub fn arity(&self, pred: Pred) -> usize {
        self.predicates[pred.0 as usize].arity
    }

    pub fn max_arity(&self) -> usize {
        self.predicates.iter().map(|p| p.arity).max().unwrap_or(0)
    }

    pub fn min_arity(&self) -> usize {
        self.predicates.iter().map(|p| p.arity).min().unwrap_or(0)
    }

    pub fn preds(&self) -> impl Iterator<Item = Pred> + '_ {
        (0..self.predicates.len()).map(|i| Pred(i as u8))
    }

    pub fn preds_of_arity(&self, k: usize) -> impl Iterator<Item = Pred> + '_ {
        self.preds().filter(move |&p| self.arity(p) == k)
    }
}

/// Checks that every atom names a predicate of `d` with the right arity.
pub fn check_atoms<V>(d: &DomainDescriptor, atoms: &[Atom<V>]) -> Result<(), DomainError> {
    for a in atoms {
        let sym = d.symbol(a.pred)?;
        if sym.arity != a.args.len() {
            return Err(DomainError::Arity {
                name: sym.name,
                expected: sym.arity,
                found: a.args.len(),
            });
        }
    }
    Ok(())
}

/// An ω-admissible concrete domain.
///
/// Implementations must be jointly exhaustive and pairwise disjoint per
/// arity, have the amalgamation property, and define equality atomically
/// through [`DomainDescriptor::equality`]. Homomorphism ω-compactness is
/// assumed, not checked.
pub trait ConcreteDomain: Sync {
    fn descriptor(&self) -> &DomainDescriptor;

    /// Rejects constants that are not elements of the domain.
    fn check_value(&self, v: &Value) -> Result<(), DomainError>;

    /// Membership of a ground tuple in the relation of `pred`.
    fn holds(&self, pred: Pred, args: &[Value]) -> Result<bool, DomainError>;

    /// Whether the atoms have a solution. Atoms must be well-formed.
    fn satisfiable(&self, atoms: &[Atom<u32>]) -> bool;

    /// A solution, or `None` if the atoms are unsatisfiable.
    fn solve(&self, atoms: &[Atom<u32>]) -> Option<BTreeMap<u32, Value>>;

    /// Calls `visit` with every complete satisfiable system over `vars`
    /// that contains `required` and avoids `forbidden`, as a sorted atom
    /// list. Stops early when `visit` breaks.
    fn for_each_complete(
        &self,
        vars: &[u32],
        required: &[Atom<u32>],
        forbidden: &[Atom<u32>],
        visit: &mut dyn FnMut(&[Atom<u32>]) -> ControlFlow<()>,
    ) -> ControlFlow<()>;

    /// Some complete satisfiable system as in
    /// [`for_each_complete`](Self::for_each_complete).
    fn find_complete(
        &self,
        vars: &[u32],
        required: &[Atom<u32>],
        forbidden: &[Atom<u32>],
    ) -> Option<Vec<Atom<u32>>> {
        let mut found = None;
        let _ = self.for_each_complete(vars, required, forbidden, &mut |c| {
            found = Some(c.to_vec());
            ControlFlow::Break(())
        });
        found
    }
}

/// Translates systems over `V` to dense `u32` variables and back.
struct Interner<V> {
    vars: Vec<V>,
}

impl<V: Ord + Clone> Interner<V> {
    fn new(vars: impl IntoIterator<Item = V>) -> Self {
        let set: BTreeSet<V> = vars.into_iter().collect();
        Interner {
            vars: set.into_iter().collect(),
        }
    }

    fn id(&self, v: &V) -> u32 {
        self.vars
            .binary_search(v)
            .expect("variable outside the interned universe") as u32
    }

    fn atoms<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom<V>>) -> Vec<Atom<u32>>
    where
        V: 'a,
    {
        atoms.into_iter().map(|a| a.map(|v| self.id(v))).collect()
    }

    fn back(&self, atoms: &[Atom<u32>]) -> ConstraintSystem<V> {
        atoms
            .iter()
            .map(|a| a.map(|&i| self.vars[i as usize].clone()))
            .collect()
    }

    fn ids(&self) -> Vec<u32> {
        (0..self.vars.len() as u32).collect()
    }
}

pub fn csp_satisfiable<V: Ord + Clone>(
    d: &dyn ConcreteDomain,
    c: &ConstraintSystem<V>,
) -> Result<bool, DomainError> {
    let (atoms, _) = c.intern();
    check_atoms(d.descriptor(), &atoms)?;
    Ok(d.satisfiable(&atoms))
}

pub fn solve<V: Ord + Clone>(
    d: &dyn ConcreteDomain,
    c: &ConstraintSystem<V>,
) -> Result<BTreeMap<V, Value>, DomainError> {
    let (atoms, vars) = c.intern();
    check_atoms(d.descriptor(), &atoms)?;
    let sol = d.solve(&atoms).ok_or(DomainError::Unsatisfiable)?;
    Ok(sol
        .into_iter()
        .map(|(i, v)| (vars[i as usize].clone(), v))
        .collect())
}

/// Streams the complete satisfiable systems over `vars` that include
/// `required` and exclude `forbidden`.
pub fn enumerate_complete_satisfiable<V: Ord + Clone>(
    d: &dyn ConcreteDomain,
    vars: &BTreeSet<V>,
    required: &ConstraintSystem<V>,
    forbidden: &ConstraintSystem<V>,
    mut visit: impl FnMut(ConstraintSystem<V>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let names = Interner::new(vars.iter().cloned());
    let req = names.atoms(required);
    let forb = names.atoms(forbidden);
    d.for_each_complete(&names.ids(), &req, &forb, &mut |c| visit(names.back(c)))
}

pub fn complete_satisfiable_systems<V: Ord + Clone>(
    d: &dyn ConcreteDomain,
    vars: &BTreeSet<V>,
    required: &ConstraintSystem<V>,
    forbidden: &ConstraintSystem<V>,
) -> Vec<ConstraintSystem<V>> {
    let mut out = Vec::new();
    let _ = enumerate_complete_satisfiable(d, vars, required, forbidden, |c| {
        out.push(c);
        ControlFlow::Continue(())
    });
    out
}

pub fn find_complete<V: Ord + Clone>(
    d: &dyn ConcreteDomain,
    vars: &BTreeSet<V>,
    required: &ConstraintSystem<V>,
    forbidden: &ConstraintSystem<V>,
) -> Option<ConstraintSystem<V>> {
    let names = Interner::new(vars.iter().cloned());
    d.find_complete(&names.ids(), &names.atoms(required), &names.atoms(forbidden))
        .map(|c| names.back(&c))
}

pub fn ground_eval(d: &dyn ConcreteDomain, pred: Pred, args: &[Value]) -> Result<bool, DomainError> {
    d.holds(pred, args)
}

/// All predicates of the same arity as `pred`, except `pred`.
pub fn jepd_complement(d: &DomainDescriptor, pred: Pred) -> Vec<Pred> {
    let k = d.arity(pred);
    d.preds_of_arity(k).filter(|&p| p != pred).collect()
}

/// `∃f,…,f.P₁ ⊔ … ⊔ ∃f,…,f.P_m` over the predicates of the smallest arity:
/// by joint exhaustiveness exactly one of them holds on `(d,…,d)`, so the
/// disjunction holds iff `f` has a value.
pub fn defined_concept(d: &DomainDescriptor, feature: &Name) -> Concept {
    let k = d.min_arity();
    let paths: Vec<FeaturePath> = (0..k).map(|_| FeaturePath::plain(feature.clone())).collect();
    d.preds_of_arity(k)
        .map(|p| Concept::CdExists(paths.clone(), PredRef::Domain(p)))
        .reduce(|a, b| Concept::Or(Box::new(a), Box::new(b)))
        .expect("domain signature is non-empty")
}

#[cfg(test)]
mod tests {
    use super::rationals::{EQ, GT, LT};
    use super::*;
    use alloc::sync::Arc;

    #[test]
    fn complements() {
        let q = DomainTag::Q.domain().descriptor();
        assert_eq!(jepd_complement(q, LT), alloc::vec![EQ, GT]);
        assert_eq!(jepd_complement(q, EQ), alloc::vec![LT, GT]);
        let a = DomainTag::Allen.domain().descriptor();
        let equals = a.lookup("equals").unwrap();
        let rest = jepd_complement(a, equals);
        assert_eq!(rest.len(), 12);
        assert!(!rest.contains(&equals));
    }

    #[test]
    fn defined_concept_repeats_the_feature() {
        let q = DomainTag::Q.domain().descriptor();
        let f: Name = Arc::from("f");
        let c = defined_concept(q, &f);
        let ff = alloc::vec![FeaturePath::plain(f.clone()), FeaturePath::plain(f.clone())];
        let leaf = |p| Box::new(Concept::CdExists(ff.clone(), PredRef::Domain(p)));
        assert_eq!(
            c,
            Concept::Or(Box::new(Concept::Or(leaf(LT), leaf(EQ))), leaf(GT))
        );
    }

    #[test]
    fn generic_helpers_round_trip_variables() {
        let q = DomainTag::Q.domain();
        let c: ConstraintSystem<&str> = [Atom::binary(LT, "x", "y")].into_iter().collect();
        assert!(csp_satisfiable(q, &c).unwrap());
        let s = solve(q, &c).unwrap();
        assert_eq!(s["x"], Value::int(0));
        assert_eq!(s["y"], Value::int(1));
        let vars: BTreeSet<&str> = ["x", "y"].into_iter().collect();
        let all = complete_satisfiable_systems(q, &vars, &c, &ConstraintSystem::new());
        assert_eq!(all.len(), 1);
        assert!(all[0].is_complete_binary(&vars));
    }

    #[test]
    fn unknown_predicate_is_an_error() {
        let q = DomainTag::Q.domain();
        let c: ConstraintSystem<u8> = [Atom::binary(Pred(9), 0, 1)].into_iter().collect();
        assert!(csp_satisfiable(q, &c).is_err());
    }
}
