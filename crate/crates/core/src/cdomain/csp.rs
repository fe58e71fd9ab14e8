use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use super::{Atom, ConcreteDomain};

/// A memoizing front end to a domain's CSP procedures, owned by one worker.
///
/// Satisfiability answers are cached on a canonical form of the system
/// (sorted atoms over variables renumbered by first occurrence), so
/// isomorphic systems share one entry. Completion queries are cached on the
/// exact query.
pub struct Csp {
    domain: &'static dyn ConcreteDomain,
    sat: RefCell<BTreeMap<Vec<Atom<u32>>, bool>>,
    complete: RefCell<BTreeMap<CompletionKey, Option<Vec<Atom<u32>>>>>,
    calls: Cell<u64>,
}

type CompletionKey = (Vec<u32>, Vec<Atom<u32>>, Vec<Atom<u32>>);

/// Cached completions are dropped past this many entries.
const COMPLETION_CACHE_LIMIT: usize = 1 << 16;

/// Renumbers variables by order of first occurrence in the sorted atoms and
/// re-sorts, to a fixpoint of at most a few rounds.
fn canonical(atoms: &[Atom<u32>]) -> Vec<Atom<u32>> {
    let mut cur: Vec<Atom<u32>> = atoms.to_vec();
    cur.sort();
    cur.dedup();
    for _ in 0..4 {
        let mut order: BTreeMap<u32, u32> = BTreeMap::new();
        for a in &cur {
            for &v in &a.args {
                let next = order.len() as u32;
                order.entry(v).or_insert(next);
            }
        }
        let mut next: Vec<Atom<u32>> = cur.iter().map(|a| a.map(|v| order[v])).collect();
        next.sort();
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

impl Csp {
    pub fn new(domain: &'static dyn ConcreteDomain) -> Self {
        Csp {
            domain,
            sat: RefCell::new(BTreeMap::new()),
            complete: RefCell::new(BTreeMap::new()),
            calls: Cell::new(0),
        }
    }

    pub fn domain(&self) -> &'static dyn ConcreteDomain {
        self.domain
    }

    /// Number of queries answered, cached or not.
    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn satisfiable(&self, atoms: &[Atom<u32>]) -> bool {
        self.calls.set(self.calls.get() + 1);
        let key = canonical(atoms);
        if let Some(&hit) = self.sat.borrow().get(&key) {
            return hit;
        }
        let answer = self.domain.satisfiable(&key);
        self.sat.borrow_mut().insert(key, answer);
        answer
    }

    pub fn find_complete(
        &self,
        vars: &[u32],
        required: &[Atom<u32>],
        forbidden: &[Atom<u32>],
    ) -> Option<Vec<Atom<u32>>> {
        self.calls.set(self.calls.get() + 1);
        let mut key: CompletionKey = (vars.to_vec(), required.to_vec(), forbidden.to_vec());
        key.0.sort_unstable();
        key.0.dedup();
        key.1.sort();
        key.1.dedup();
        key.2.sort();
        key.2.dedup();
        if let Some(hit) = self.complete.borrow().get(&key) {
            return hit.clone();
        }
        let answer = self.domain.find_complete(&key.0, &key.1, &key.2);
        let mut cache = self.complete.borrow_mut();
        if cache.len() >= COMPLETION_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, answer.clone());
        answer
    }
}
