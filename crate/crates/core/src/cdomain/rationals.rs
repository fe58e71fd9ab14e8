//! `(ℚ, <, =, >)`.
//!
//! Satisfiability is `<`-cycle detection over the classes of the `=`
//! relation. Complete systems over a variable set are exactly the weak orders
//! (ordered set partitions) of that set, which is what the enumerator walks.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::ops::ControlFlow;

use super::value::rational_from_index;
use super::{
    check_atoms, Atom, ConcreteDomain, DomainDescriptor, DomainTag, Pred, PredicateSym, Value,
};
use crate::error::DomainError;

pub const LT: Pred = Pred(0);
pub const EQ: Pred = Pred(1);
pub const GT: Pred = Pred(2);

static PREDICATES: [PredicateSym; 3] = [
    PredicateSym::new("lt", 2),
    PredicateSym::new("eq", 2),
    PredicateSym::new("gt", 2),
];

static DESCRIPTOR: DomainDescriptor = DomainDescriptor {
    tag: DomainTag::Q,
    predicates: &PREDICATES,
    homogeneous: true,
    equality: &[(EQ, [super::EqArg::X, super::EqArg::Y])],
};

#[derive(Debug, Default, Clone, Copy)]
pub struct Rationals;

/// Relation masks used by the enumerator: bit 0 `<`, bit 1 `=`, bit 2 `>`.
const ALL: u8 = 0b111;

fn bit(p: Pred) -> u8 {
    1 << p.0
}

fn converse(p: Pred) -> Pred {
    Pred(2 - p.0)
}

fn pred_of(ord: core::cmp::Ordering) -> Pred {
    match ord {
        core::cmp::Ordering::Less => LT,
        core::cmp::Ordering::Equal => EQ,
        core::cmp::Ordering::Greater => GT,
    }
}

/// Sorted, deduplicated variable table for dense indexing.
pub(crate) struct Dense {
    vars: Vec<u32>,
}

impl Dense {
    pub(crate) fn of_atoms(atoms: &[Atom<u32>]) -> Dense {
        let mut vars: Vec<u32> = atoms.iter().flat_map(|a| a.args.iter().copied()).collect();
        vars.sort_unstable();
        vars.dedup();
        Dense { vars }
    }

    pub(crate) fn of_vars(vars: &[u32]) -> Dense {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        Dense { vars }
    }

    pub(crate) fn len(&self) -> usize {
        self.vars.len()
    }

    pub(crate) fn index(&self, v: u32) -> usize {
        self.vars
            .binary_search(&v)
            .expect("atom mentions a variable outside the universe")
    }

    pub(crate) fn var(&self, i: usize) -> u32 {
        self.vars[i]
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as representative so orders are canonical.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Ranks the `=`-classes of a system in a topological order of `<`, or
/// returns `None` on a `<`-cycle. Ties are broken by smallest variable.
fn class_ranks(atoms: &[Atom<u32>]) -> Option<(Dense, Vec<usize>)> {
    let dense = Dense::of_atoms(atoms);
    let n = dense.len();
    let mut uf = UnionFind::new(n);
    for a in atoms.iter().filter(|a| a.pred == EQ) {
        uf.union(dense.index(a.args[0]), dense.index(a.args[1]));
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for a in atoms.iter().filter(|a| a.pred != EQ) {
        let (x, y) = (uf.find(dense.index(a.args[0])), uf.find(dense.index(a.args[1])));
        let (lo, hi) = if a.pred == LT { (x, y) } else { (y, x) };
        if lo == hi {
            return None;
        }
        succ[lo].push(hi);
        indeg[hi] += 1;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| uf.find(i) == i).collect();
    let mut heap: BinaryHeap<Reverse<usize>> =
        roots.iter().filter(|&&r| indeg[r] == 0).map(|&r| Reverse(r)).collect();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    while let Some(Reverse(r)) = heap.pop() {
        rank[r] = next;
        next += 1;
        for &s in &succ[r] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse(s));
            }
        }
    }
    if next != roots.len() {
        return None;
    }
    let ranks = (0..n).map(|i| rank[uf.find(i)]).collect();
    Some((dense, ranks))
}

/// Builds the pairwise relation masks imposed by `required` and `forbidden`.
/// `None` if some pair (or diagonal) has no admissible relation left.
fn relation_masks(
    dense: &Dense,
    required: &[Atom<u32>],
    forbidden: &[Atom<u32>],
) -> Option<Vec<Vec<u8>>> {
    let n = dense.len();
    let mut allowed = vec![vec![ALL; n]; n];
    for (i, row) in allowed.iter_mut().enumerate() {
        row[i] = bit(EQ);
    }
    for a in required {
        let (i, j) = (dense.index(a.args[0]), dense.index(a.args[1]));
        allowed[i][j] &= bit(a.pred);
        allowed[j][i] &= bit(converse(a.pred));
    }
    for a in forbidden {
        let (i, j) = (dense.index(a.args[0]), dense.index(a.args[1]));
        allowed[i][j] &= !bit(a.pred);
        allowed[j][i] &= !bit(converse(a.pred));
    }
    if allowed.iter().flatten().any(|&m| m == 0) {
        None
    } else {
        Some(allowed)
    }
}

fn complete_from_ranks(dense: &Dense, rank: impl Fn(usize) -> usize) -> Vec<Atom<u32>> {
    let n = dense.len();
    let mut atoms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            atoms.push(Atom::binary(
                pred_of(rank(i).cmp(&rank(j))),
                dense.var(i),
                dense.var(j),
            ));
        }
    }
    atoms.sort();
    atoms
}

struct WeakOrders<'a, 'f> {
    dense: &'a Dense,
    allowed: Vec<Vec<u8>>,
    /// Block index per placed variable; blocks are kept in increasing order.
    block: Vec<usize>,
    blocks: usize,
    visit: &'a mut (dyn FnMut(&[Atom<u32>]) -> ControlFlow<()> + 'f),
}

impl WeakOrders<'_, '_> {
    fn consistent(&self, k: usize) -> bool {
        (0..k).all(|j| {
            let rel = pred_of(self.block[k].cmp(&self.block[j]));
            self.allowed[k][j] & bit(rel) != 0
        })
    }

    fn place(&mut self, k: usize) -> ControlFlow<()> {
        if k == self.dense.len() {
            let block = &self.block;
            let atoms = complete_from_ranks(self.dense, |i| block[i]);
            return (self.visit)(&atoms);
        }
        // Join an existing block.
        for b in 0..self.blocks {
            self.block[k] = b;
            if self.consistent(k) {
                self.place(k + 1)?;
            }
        }
        // Open a new block at position p, shifting later blocks up.
        for p in 0..=self.blocks {
            for j in 0..k {
                if self.block[j] >= p {
                    self.block[j] += 1;
                }
            }
            self.block[k] = p;
            self.blocks += 1;
            let flow = if self.consistent(k) {
                self.place(k + 1)
            } else {
                ControlFlow::Continue(())
            };
            self.blocks -= 1;
            for j in 0..k {
                if self.block[j] > p {
                    self.block[j] -= 1;
                }
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Strongly connected components (Tarjan) of a small digraph.
fn components(succ: &[Vec<usize>]) -> Vec<usize> {
    struct Tarjan<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.next_index);
            self.low[v] = self.next_index;
            self.next_index += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for &w in &self.succ[v] {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                    _ => {}
                }
            }
            if Some(self.low[v]) == self.index[v] {
                while let Some(w) = self.stack.pop() {
                    self.on_stack[w] = false;
                    self.comp[w] = self.next_comp;
                    if w == v {
                        break;
                    }
                }
                self.next_comp += 1;
            }
        }
    }
    let n = succ.len();
    let mut t = Tarjan {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.comp
}

impl Rationals {
    /// Decides a point-algebra network given as relation masks and returns a
    /// rank per variable. A network is consistent iff no strongly connected
    /// component of its `≤`/`<` graph contains a strict edge or a `≠` pair;
    /// then ranking the components topologically is a solution.
    fn point_algebra(allowed: &[Vec<u8>]) -> Option<Vec<usize>> {
        let n = allowed.len();
        let mut succ = vec![Vec::new(); n];
        let mut strict = Vec::new();
        let mut distinct = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                match allowed[i][j] {
                    0 => return None,
                    0b001 => {
                        succ[i].push(j);
                        strict.push((i, j));
                    }
                    0b010 => {
                        succ[i].push(j);
                        succ[j].push(i);
                    }
                    0b100 => {
                        succ[j].push(i);
                        strict.push((j, i));
                    }
                    0b011 => succ[i].push(j),
                    0b110 => succ[j].push(i),
                    0b101 => distinct.push((i, j)),
                    _ => {}
                }
            }
        }
        let comp = components(&succ);
        if strict
            .iter()
            .chain(distinct.iter())
            .any(|&(i, j)| comp[i] == comp[j])
        {
            return None;
        }
        // Tarjan numbers components in reverse topological order.
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        Some(comp.iter().map(|&c| ncomp - 1 - c).collect())
    }
}

impl ConcreteDomain for Rationals {
    fn descriptor(&self) -> &DomainDescriptor {
        &DESCRIPTOR
    }

    fn check_value(&self, v: &Value) -> Result<(), DomainError> {
        match v {
            Value::Rational(_) => Ok(()),
            other => Err(DomainError::WrongValue(alloc::format!("{other}"), DomainTag::Q)),
        }
    }

    fn holds(&self, pred: Pred, args: &[Value]) -> Result<bool, DomainError> {
        let sym = DESCRIPTOR.symbol(pred)?;
        if args.len() != sym.arity {
            return Err(DomainError::Arity {
                name: sym.name,
                expected: sym.arity,
                found: args.len(),
            });
        }
        match (&args[0], &args[1]) {
            (Value::Rational(x), Value::Rational(y)) => Ok(pred_of(x.cmp(y)) == pred),
            (Value::Rational(_), other) | (other, _) => Err(DomainError::WrongValue(
                alloc::format!("{other}"),
                DomainTag::Q,
            )),
        }
    }

    fn satisfiable(&self, atoms: &[Atom<u32>]) -> bool {
        debug_assert!(check_atoms(&DESCRIPTOR, atoms).is_ok());
        class_ranks(atoms).is_some()
    }

    fn solve(&self, atoms: &[Atom<u32>]) -> Option<BTreeMap<u32, Value>> {
        let (dense, ranks) = class_ranks(atoms)?;
        Some(
            ranks
                .iter()
                .enumerate()
                .map(|(i, &r)| (dense.var(i), Value::Rational(rational_from_index(r))))
                .collect(),
        )
    }

    fn for_each_complete(
        &self,
        vars: &[u32],
        required: &[Atom<u32>],
        forbidden: &[Atom<u32>],
        visit: &mut dyn FnMut(&[Atom<u32>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let dense = Dense::of_vars(vars);
        let Some(allowed) = relation_masks(&dense, required, forbidden) else {
            return ControlFlow::Continue(());
        };
        let n = dense.len();
        let mut walk = WeakOrders {
            dense: &dense,
            allowed,
            block: vec![0; n],
            blocks: 0,
            visit,
        };
        walk.place(0)
    }

    fn find_complete(
        &self,
        vars: &[u32],
        required: &[Atom<u32>],
        forbidden: &[Atom<u32>],
    ) -> Option<Vec<Atom<u32>>> {
        let dense = Dense::of_vars(vars);
        let allowed = relation_masks(&dense, required, forbidden)?;
        let rank = Self::point_algebra(&allowed)?;
        Some(complete_from_ranks(&dense, |i| rank[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec as StdVec;

    fn a(p: Pred, x: u32, y: u32) -> Atom<u32> {
        Atom::binary(p, x, y)
    }

    #[test]
    fn three_clique_is_unsatisfiable() {
        let q = Rationals;
        assert!(!q.satisfiable(&[a(LT, 1, 2), a(LT, 2, 3), a(LT, 3, 1)]));
        assert!(q.satisfiable(&[a(LT, 1, 2), a(LT, 2, 3), a(LT, 1, 3)]));
    }

    #[test]
    fn equality_classes_cannot_be_ordered() {
        let q = Rationals;
        assert!(!q.satisfiable(&[a(EQ, 1, 2), a(GT, 1, 2)]));
        assert!(!q.satisfiable(&[a(LT, 4, 4)]));
        assert!(q.satisfiable(&[a(EQ, 4, 4)]));
    }

    #[test]
    fn solve_assigns_topological_ranks() {
        let q = Rationals;
        let s = q.solve(&[a(LT, 0, 1)]).unwrap();
        assert_eq!(s[&0], Value::int(0));
        assert_eq!(s[&1], Value::int(1));
        let s = q.solve(&[a(EQ, 0, 1)]).unwrap();
        assert_eq!(s[&0], Value::int(0));
        assert_eq!(s[&1], Value::int(0));
        let s = q.solve(&[a(GT, 5, 7), a(EQ, 7, 9)]).unwrap();
        assert_eq!(s[&7], Value::int(0));
        assert_eq!(s[&9], Value::int(0));
        assert_eq!(s[&5], Value::int(1));
    }

    fn count(n: u32) -> usize {
        let vars: StdVec<u32> = (0..n).collect();
        let mut k = 0;
        let _ = Rationals.for_each_complete(&vars, &[], &[], &mut |_| {
            k += 1;
            ControlFlow::Continue(())
        });
        k
    }

    #[test]
    fn weak_order_counts() {
        assert_eq!(count(0), 1);
        assert_eq!(count(1), 1);
        assert_eq!(count(2), 3);
        assert_eq!(count(3), 13);
    }

    #[test]
    fn required_atom_forces_converse_and_diagonal() {
        let mut out = StdVec::new();
        let _ = Rationals.for_each_complete(&[0, 1], &[a(LT, 0, 1)], &[], &mut |c| {
            out.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(out.len(), 1);
        let mut expected = alloc::vec![a(LT, 0, 1), a(GT, 1, 0), a(EQ, 0, 0), a(EQ, 1, 1)];
        expected.sort();
        assert_eq!(out[0], expected);
    }

    #[test]
    fn point_algebra_matches_enumeration_on_small_networks() {
        // Every combination of one required and one forbidden atom over
        // three variables.
        let preds = [LT, EQ, GT];
        let mut atoms = StdVec::new();
        for &p in &preds {
            for x in 0..3 {
                for y in 0..3 {
                    atoms.push(a(p, x, y));
                }
            }
        }
        for r in &atoms {
            for f in &atoms {
                for g in &atoms {
                    let req = [r.clone()];
                    let forb = [f.clone(), g.clone()];
                    let mut first = None;
                    let _ = Rationals.for_each_complete(&[0, 1, 2], &req, &forb, &mut |c| {
                        first = Some(c.to_vec());
                        ControlFlow::Break(())
                    });
                    let found = Rationals.find_complete(&[0, 1, 2], &req, &forb);
                    assert_eq!(first.is_some(), found.is_some(), "{req:?} {forb:?}");
                    if let Some(c) = found {
                        assert!(Rationals.satisfiable(&c));
                        assert!(c.contains(r));
                        assert!(!c.contains(f) && !c.contains(g));
                    }
                }
            }
        }
    }

    #[test]
    fn ground_evaluation_is_exact() {
        let q = Rationals;
        assert!(q.holds(LT, &[Value::ratio(1, 2), Value::ratio(2, 3)]).unwrap());
        assert!(q.holds(EQ, &[Value::ratio(1, 2), Value::ratio(2, 4)]).unwrap());
        assert!(q.holds(LT, &[Value::int(0), Value::interval(0, 1)]).is_err());
    }
}
