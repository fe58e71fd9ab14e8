use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use smallvec::SmallVec;

/// Index of a predicate inside its domain's signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pred(pub u8);

/// A constraint `P(v1, ..., vk)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom<V> {
    pub pred: Pred,
    pub args: SmallVec<[V; 2]>,
}

impl<V> Atom<V> {
    pub fn new(pred: Pred, args: impl IntoIterator<Item = V>) -> Self {
        Atom {
            pred,
            args: args.into_iter().collect(),
        }
    }

    pub fn binary(pred: Pred, x: V, y: V) -> Self {
        let mut args = SmallVec::new();
        args.push(x);
        args.push(y);
        Atom { pred, args }
    }

    pub fn map<W>(&self, mut f: impl FnMut(&V) -> W) -> Atom<W> {
        Atom {
            pred: self.pred,
            args: self.args.iter().map(&mut f).collect(),
        }
    }
}

/// A finite set of atoms over variables of type `V`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintSystem<V: Ord> {
    atoms: BTreeSet<Atom<V>>,
}

impl<V: Ord> Default for ConstraintSystem<V> {
    fn default() -> Self {
        ConstraintSystem {
            atoms: BTreeSet::new(),
        }
    }
}

impl<V: Ord + fmt::Debug> fmt::Debug for ConstraintSystem<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms.iter()).finish()
    }
}

impl<V: Ord> FromIterator<Atom<V>> for ConstraintSystem<V> {
    fn from_iter<I: IntoIterator<Item = Atom<V>>>(iter: I) -> Self {
        ConstraintSystem {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl<V: Ord> Extend<Atom<V>> for ConstraintSystem<V> {
    fn extend<I: IntoIterator<Item = Atom<V>>>(&mut self, iter: I) {
        self.atoms.extend(iter);
    }
}

impl<'a, V: Ord> IntoIterator for &'a ConstraintSystem<V> {
    type Item = &'a Atom<V>;
    type IntoIter = alloc::collections::btree_set::Iter<'a, Atom<V>>;
    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}

impl<V: Ord> ConstraintSystem<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: Atom<V>) -> bool {
        self.atoms.insert(atom)
    }

    pub fn contains(&self, atom: &Atom<V>) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom<V>> {
        self.atoms.iter()
    }

    pub fn union(&self, other: &Self) -> Self
    where
        V: Clone,
    {
        self.atoms.union(&other.atoms).cloned().collect()
    }
}

impl<V: Ord + Clone> ConstraintSystem<V> {
    /// `V(C)`: every variable occurring in some atom.
    pub fn variables(&self) -> BTreeSet<V> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter().cloned())
            .collect()
    }

    pub fn map_vars<W: Ord>(&self, mut f: impl FnMut(&V) -> W) -> ConstraintSystem<W> {
        self.atoms.iter().map(|a| a.map(&mut f)).collect()
    }

    /// Atoms whose arguments all satisfy `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&V) -> bool) -> Self {
        self.atoms
            .iter()
            .filter(|a| a.args.iter().all(&mut keep))
            .cloned()
            .collect()
    }

    /// Numbers the variables densely (in `Ord` order) so a domain plugin can
    /// work on `u32` identifiers. Returns the renamed atoms and the table
    /// mapping numbers back to variables.
    pub fn intern(&self) -> (Vec<Atom<u32>>, Vec<V>) {
        let vars: Vec<V> = self.variables().into_iter().collect();
        let index: BTreeMap<&V, u32> = vars.iter().zip(0u32..).collect();
        let atoms = self.atoms.iter().map(|a| a.map(|v| index[v])).collect();
        (atoms, vars)
    }

    /// Whether the system is complete over `vars` for binary signatures: every
    /// ordered pair (diagonal included) carries exactly one atom.
    pub fn is_complete_binary(&self, vars: &BTreeSet<V>) -> bool {
        let mut seen: BTreeMap<(&V, &V), usize> = BTreeMap::new();
        for atom in &self.atoms {
            if atom.args.len() != 2 || !atom.args.iter().all(|v| vars.contains(v)) {
                return false;
            }
            *seen.entry((&atom.args[0], &atom.args[1])).or_default() += 1;
        }
        seen.len() == vars.len() * vars.len() && seen.values().all(|&n| n == 1)
    }
}

/// The variable `f^i` of a local system: feature `feature` at position
/// `slot` (0 is the root, `1..=nt` the successor slots).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalVar {
    pub slot: u32,
    pub feature: u32,
}

impl LocalVar {
    pub fn new(slot: u32, feature: u32) -> Self {
        LocalVar { slot, feature }
    }
}

impl fmt::Display for LocalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}^{}", self.feature, self.slot)
    }
}

/// Variables of a merged system: `Left` comes from the first system, `Primed`
/// from the renamed copy of the second one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MergedVar {
    Left(LocalVar),
    Primed(LocalVar),
}

/// `c ⋈_i c2`: rename every `f^j` of `c2` to a fresh `f^j'`, then identify
/// `f^0'` with `f^i`, and take the union.
pub fn merge_at(
    c: &ConstraintSystem<LocalVar>,
    c2: &ConstraintSystem<LocalVar>,
    i: u32,
) -> ConstraintSystem<MergedVar> {
    let mut merged = c.map_vars(|v| MergedVar::Left(*v));
    merged.extend(c2.iter().map(|a| {
        a.map(|v| {
            if v.slot == 0 {
                MergedVar::Left(LocalVar::new(i, v.feature))
            } else {
                MergedVar::Primed(*v)
            }
        })
    }));
    merged
}
