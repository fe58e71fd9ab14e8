use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::syntax::{ClosureSet, Concept, Gci, Lit, Node};

/// A type: a set of closure elements, stored as one bit per positive
/// closure concept for membership and one for membership of its negation.
/// Full types decide every concept; partial types (see
/// [`TypeSpace::for_each_partial`]) leave some undecided.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeT {
    pos: Vec<u64>,
    neg: Vec<u64>,
    len: usize,
}

fn bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

impl TypeT {
    fn empty(len: usize) -> Self {
        TypeT {
            pos: vec![0; len.div_ceil(64)],
            neg: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn set(&mut self, i: usize, v: Option<bool>) {
        let m = 1u64 << (i % 64);
        self.pos[i / 64] &= !m;
        self.neg[i / 64] &= !m;
        match v {
            Some(true) => self.pos[i / 64] |= m,
            Some(false) => self.neg[i / 64] |= m,
            None => {}
        }
    }

    pub fn has_positive(&self, i: usize) -> bool {
        bit(&self.pos, i)
    }

    pub fn has_negative(&self, i: usize) -> bool {
        bit(&self.neg, i)
    }

    /// Whether `lit` is a member.
    pub fn holds(&self, lit: Lit) -> bool {
        if lit.is_negated() {
            self.has_negative(lit.base())
        } else {
            self.has_positive(lit.base())
        }
    }

    pub fn is_full(&self) -> bool {
        (0..self.len).all(|i| self.has_positive(i) || self.has_negative(i))
    }

    /// The closure elements in this type, in closure order.
    pub fn members(&self) -> impl Iterator<Item = Lit> + '_ {
        (0..self.len).filter_map(|i| {
            let l = Lit::positive(i);
            if self.has_positive(i) {
                Some(l)
            } else if self.has_negative(i) {
                Some(l.negate())
            } else {
                None
            }
        })
    }

    pub fn concepts(&self, m: &ClosureSet) -> Vec<Concept> {
        self.members().map(|l| m.concept(l)).collect()
    }

    /// The full type with exactly these positive concepts.
    pub fn from_positive(len: usize, positives: impl IntoIterator<Item = usize>) -> Self {
        let mut t = TypeT::empty(len);
        for i in 0..len {
            t.set(i, Some(false));
        }
        for i in positives {
            t.set(i, Some(true));
        }
        t
    }

    fn from_values(values: &[Option<bool>]) -> Self {
        let mut t = TypeT::empty(values.len());
        for (i, v) in values.iter().enumerate() {
            t.set(i, *v);
        }
        t
    }
}

impl fmt::Debug for TypeT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let full = self.is_full();
        let mut first = true;
        for l in self.members() {
            if full && l.is_negated() {
                continue;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if l.is_negated() {
                f.write_str("-")?;
            }
            write!(f, "{}", l.base())?;
        }
        f.write_str("}")
    }
}

/// Which types an enumeration produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Full,
    Partial,
}

/// The types of a closure under a TBox, enumerated on demand.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    nodes: Vec<Node>,
    gcis: Vec<(Lit, Lit)>,
    /// GCIs to check once positive index `i` is decided.
    check_at: Vec<Vec<usize>>,
}

impl TypeSpace {
    /// The TBox must be normalized and its concepts part of `m`.
    pub fn new(m: &ClosureSet, tbox: &[Gci]) -> Self {
        let n = m.nodes().len();
        let gcis: Vec<(Lit, Lit)> = tbox
            .iter()
            .map(|g| {
                (
                    m.lit(&g.lhs).expect("GCI side in closure"),
                    m.lit(&g.rhs).expect("GCI side in closure"),
                )
            })
            .collect();
        let mut check_at = vec![Vec::new(); n];
        for (k, (l, r)) in gcis.iter().enumerate() {
            check_at[l.base().max(r.base())].push(k);
        }
        TypeSpace {
            nodes: m.nodes().to_vec(),
            gcis,
            check_at,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The four type conditions on a full type: GCIs, `⊤`, negation pairs
    /// (by construction), and conjunctions.
    pub fn is_type(&self, t: &TypeT) -> bool {
        t.len == self.nodes.len()
            && t.is_full()
            && self.nodes.iter().enumerate().all(|(i, n)| match n {
                Node::Top => t.has_positive(i),
                Node::And(a, b) => t.has_positive(i) == (t.holds(*a) && t.holds(*b)),
                _ => true,
            })
            && self.gcis.iter().all(|&(l, r)| !t.holds(l) || t.holds(r))
    }

    /// Whether `t` is a partial type: consistent, containing `⊤` if the
    /// closure has it, closed under conjunction, with a member of
    /// `¬C ⊔ D` for each GCI `C ⊑ D` and of `¬C ⊔ ¬D` for each `¬(C ⊓ D)`.
    pub fn is_partial_type(&self, t: &TypeT) -> bool {
        t.len == self.nodes.len()
            && (0..t.len).all(|i| !(t.has_positive(i) && t.has_negative(i)))
            && self.nodes.iter().enumerate().all(|(i, n)| match n {
                Node::Top => t.has_positive(i),
                Node::And(a, b) => {
                    (!t.has_positive(i) || (t.holds(*a) && t.holds(*b)))
                        && (!t.has_negative(i) || t.holds(a.negate()) || t.holds(b.negate()))
                }
                _ => true,
            })
            && self.gcis.iter().all(|&(l, r)| t.holds(l.negate()) || t.holds(r))
    }

    /// Propagates forced literals down through conjunctions. `None` if they
    /// contradict each other.
    fn forced(&self, lits: &[Lit]) -> Option<Vec<Option<bool>>> {
        let mut forced = vec![None; self.nodes.len()];
        let mut stack: Vec<Lit> = lits.to_vec();
        while let Some(l) = stack.pop() {
            let v = !l.is_negated();
            match forced[l.base()] {
                Some(w) if w != v => return None,
                Some(_) => continue,
                None => forced[l.base()] = Some(v),
            }
            match self.nodes[l.base()] {
                Node::And(a, b) if v => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Top if !v => return None,
                _ => {}
            }
        }
        Some(forced)
    }

    /// Calls `visit` on every full type containing all of `lits`, in a fixed
    /// order (free concepts decided false before true).
    pub fn for_each(
        &self,
        lits: &[Lit],
        visit: &mut dyn FnMut(&TypeT) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(forced) = self.forced(lits) else {
            return ControlFlow::Continue(());
        };
        let mut values = vec![None; self.nodes.len()];
        self.extend(0, &forced, &mut values, visit)
    }

    pub fn for_each_of_kind(
        &self,
        kind: TypeKind,
        lits: &[Lit],
        visit: &mut dyn FnMut(&TypeT) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        match kind {
            TypeKind::Full => self.for_each(lits, visit),
            TypeKind::Partial => self.for_each_partial(lits, visit),
        }
    }

    /// Whether some type contains all of `lits`.
    pub fn satisfiable(&self, lits: &[Lit]) -> bool {
        self.for_each_partial(lits, &mut |_| ControlFlow::Break(())).is_break()
    }

    /// The first full type containing `lits`, if any.
    pub fn first(&self, lits: &[Lit]) -> Option<TypeT> {
        let mut found = None;
        let _ = self.for_each(lits, &mut |t| {
            found = Some(t.clone());
            ControlFlow::Break(())
        });
        found
    }

    fn extend(
        &self,
        i: usize,
        forced: &[Option<bool>],
        values: &mut Vec<Option<bool>>,
        visit: &mut dyn FnMut(&TypeT) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.nodes.len() {
            return visit(&TypeT::from_values(values));
        }
        let holds = |values: &[Option<bool>], l: Lit| values[l.base()] == Some(!l.is_negated());
        let options: &[bool] = match self.nodes[i] {
            Node::Top => &[true],
            Node::And(a, b) => {
                if holds(values, a) && holds(values, b) {
                    &[true]
                } else {
                    &[false]
                }
            }
            _ => match forced[i] {
                Some(true) => &[true],
                Some(false) => &[false],
                None => &[false, true],
            },
        };
        for &v in options {
            if forced[i].is_some_and(|f| f != v) {
                continue;
            }
            values[i] = Some(v);
            let ok = self.check_at[i].iter().all(|&k| {
                let (l, r) = self.gcis[k];
                !holds(values, l) || holds(values, r)
            });
            if ok {
                self.extend(i + 1, forced, values, visit)?;
            }
        }
        values[i] = None;
        ControlFlow::Continue(())
    }

    /// Calls `visit` on the partial types containing `lits` that only hold
    /// what `lits`, `⊤`, the GCIs and conjunctions force, one disjunct
    /// chosen per open disjunction (left before right) after unit
    /// propagation. Every full type containing `lits` includes one of them.
    /// No type is visited twice.
    pub fn for_each_partial(
        &self,
        lits: &[Lit],
        visit: &mut dyn FnMut(&TypeT) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut values = vec![None; self.nodes.len()];
        let mut trail = Vec::new();
        let top = self.nodes.iter().position(|n| matches!(n, Node::Top));
        let ok = top.is_none_or(|i| self.assign(&mut values, &mut trail, Lit::positive(i)))
            && lits.iter().all(|&l| self.assign(&mut values, &mut trail, l))
            && self.propagate(&mut values, &mut trail);
        if !ok {
            return ControlFlow::Continue(());
        }
        let mut seen = BTreeSet::new();
        self.branch(&mut values, &mut trail, &mut seen, visit)
    }

    /// Adds `l` and what conjunctions force. False on a clash; the trail
    /// records every newly decided index either way.
    fn assign(&self, values: &mut [Option<bool>], trail: &mut Vec<usize>, l: Lit) -> bool {
        let mut stack = vec![l];
        while let Some(l) = stack.pop() {
            let v = !l.is_negated();
            let i = l.base();
            match values[i] {
                Some(w) if w != v => return false,
                Some(_) => continue,
                None => {
                    values[i] = Some(v);
                    trail.push(i);
                }
            }
            match self.nodes[i] {
                Node::And(a, b) if v => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Top if !v => return false,
                _ => {}
            }
        }
        true
    }

    /// The disjunctions to satisfy: one per GCI and per conjunction
    /// decided false.
    fn disjunctions<'s>(&'s self, values: &'s [Option<bool>]) -> impl Iterator<Item = (Lit, Lit)> + 's {
        let gcis = self.gcis.iter().map(|&(l, r)| (l.negate(), r));
        let ands = self.nodes.iter().enumerate().filter_map(move |(i, n)| match n {
            Node::And(a, b) if values[i] == Some(false) => Some((a.negate(), b.negate())),
            _ => None,
        });
        gcis.chain(ands)
    }

    /// Assigns the remaining member of every disjunction whose other member
    /// is false, until nothing changes. False on a clash.
    fn propagate(&self, values: &mut [Option<bool>], trail: &mut Vec<usize>) -> bool {
        let value = |values: &[Option<bool>], l: Lit| values[l.base()].map(|v| v != l.is_negated());
        loop {
            let mut units = Vec::new();
            for (x, y) in self.disjunctions(values) {
                match (value(values, x), value(values, y)) {
                    (Some(false), Some(false)) => return false,
                    (Some(false), None) => units.push(y),
                    (None, Some(false)) => units.push(x),
                    _ => {}
                }
            }
            if units.is_empty() {
                return true;
            }
            for l in units {
                if !self.assign(values, trail, l) {
                    return false;
                }
            }
        }
    }

    /// The first disjunction none of whose members is decided true.
    fn open_disjunction(&self, values: &[Option<bool>]) -> Option<(Lit, Lit)> {
        let holds = |l: Lit| values[l.base()] == Some(!l.is_negated());
        self.disjunctions(values).find(|&(x, y)| !holds(x) && !holds(y))
    }

    fn branch(
        &self,
        values: &mut Vec<Option<bool>>,
        trail: &mut Vec<usize>,
        seen: &mut BTreeSet<TypeT>,
        visit: &mut dyn FnMut(&TypeT) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((x, y)) = self.open_disjunction(values) else {
            let t = TypeT::from_values(values);
            if seen.insert(t.clone()) {
                return visit(&t);
            }
            return ControlFlow::Continue(());
        };
        for l in [x, y] {
            let mark = trail.len();
            if self.assign(values, trail, l) && self.propagate(values, trail) {
                let flow = self.branch(values, trail, seen, visit);
                for i in trail.drain(mark..) {
                    values[i] = None;
                }
                flow?;
            } else {
                for i in trail.drain(mark..) {
                    values[i] = None;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Every type of `m` under the TBox.
pub fn enumerate_types(m: &ClosureSet, tbox: &[Gci]) -> Vec<TypeT> {
    let space = TypeSpace::new(m, tbox);
    let mut out = Vec::new();
    let _ = space.for_each(&[], &mut |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{normalize, two_ordered_successors, subconcept_closure, Ontology};
    use crate::DomainTag;

    fn types_of(o: &Ontology) -> (ClosureSet, Vec<TypeT>) {
        let o = normalize(o);
        let m = subconcept_closure(&o);
        let ts = enumerate_types(&m, &o.tbox);
        (m, ts)
    }

    #[test]
    fn two_ordered_successors_has_one_type() {
        let (m, ts) = types_of(&two_ordered_successors());
        assert_eq!(ts.len(), 1);
        let concepts = ts[0].concepts(&m);
        assert!(concepts.contains(&Concept::Top));
        assert!(concepts.contains(&m.positives()[1]));
    }

    #[test]
    fn top_only() {
        let mut o = Ontology::new(DomainTag::Q);
        o.tbox.push(Gci::new(Concept::Top, Concept::Top));
        let (_, ts) = types_of(&o);
        assert_eq!(ts.len(), 1);
    }

    #[test]
    fn self_negating_name_is_excluded() {
        let mut o = Ontology::new(DomainTag::Q);
        let a = Concept::atomic("A");
        o.tbox.push(Gci::new(a.clone(), Concept::not(a.clone())));
        let (m, ts) = types_of(&o);
        let la = m.lit(&a).unwrap();
        assert!(!ts.is_empty());
        assert!(ts.iter().all(|t| !t.holds(la)));
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        let mut o = Ontology::new(DomainTag::Q);
        let (a, b, c) = (
            Concept::atomic("A"),
            Concept::atomic("B"),
            Concept::atomic("C"),
        );
        o.tbox.push(Gci::new(a.clone(), Concept::and(b.clone(), Concept::not(c.clone()))));
        o.tbox.push(Gci::new(Concept::or(b, c), Concept::exists("r", a)));
        let o = normalize(&o);
        let m = subconcept_closure(&o);
        let space = TypeSpace::new(&m, &o.tbox);
        let n = m.nodes().len();
        let brute: Vec<TypeT> = (0u32..(1 << n))
            .map(|mask| TypeT::from_positive(n, (0..n).filter(|&i| mask >> i & 1 == 1)))
            .filter(|t| space.is_type(t))
            .collect();
        let mut fast = enumerate_types(&m, &o.tbox);
        let mut brute = brute;
        fast.sort();
        brute.sort();
        assert_eq!(fast, brute);

        let mut partial = Vec::new();
        let _ = space.for_each_partial(&[], &mut |t| {
            partial.push(t.clone());
            ControlFlow::Continue(())
        });
        let within = |p: &TypeT, t: &TypeT| p.members().all(|l| t.holds(l));
        assert!(partial.len() < fast.len());
        for p in &partial {
            assert!(space.is_partial_type(p), "{p:?}");
            assert!(fast.iter().any(|t| within(p, t)), "{p:?} extends to no type");
        }
        for t in &fast {
            assert!(partial.iter().any(|p| within(p, t)), "{t:?} covers no partial type");
        }
    }

    #[test]
    fn forced_literals_restrict_the_enumeration() {
        let mut o = Ontology::new(DomainTag::Q);
        let (a, b) = (Concept::atomic("A"), Concept::atomic("B"));
        o.tbox.push(Gci::new(a.clone(), b.clone()));
        let o = normalize(&o);
        let m = subconcept_closure(&o);
        let space = TypeSpace::new(&m, &o.tbox);
        let la = m.lit(&a).unwrap();
        let lb = m.lit(&b).unwrap();
        let t = space.first(&[la]).unwrap();
        assert!(t.holds(lb));
        assert!(space.first(&[la, lb.negate()]).is_none());
    }
}
