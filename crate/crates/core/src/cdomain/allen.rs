//! Allen's interval algebra over rational-endpoint intervals.
//!
//! Every base relation fixes how the four endpoints of two intervals compare,
//! so a system of base relations translates exactly into a point system over
//! `Q` with two variables (start, end) per interval.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering::{self, Equal, Greater, Less};
use core::ops::ControlFlow;

use super::rationals::{Dense, Rationals, EQ, GT, LT};
use super::{
    check_atoms, Atom, ConcreteDomain, DomainDescriptor, DomainTag, EqArg, Pred, PredicateSym,
    Value,
};
use crate::error::DomainError;

pub const BEFORE: Pred = Pred(0);
pub const AFTER: Pred = Pred(1);
pub const MEETS: Pred = Pred(2);
pub const MET_BY: Pred = Pred(3);
pub const OVERLAPS: Pred = Pred(4);
pub const OVERLAPPED_BY: Pred = Pred(5);
pub const STARTS: Pred = Pred(6);
pub const STARTED_BY: Pred = Pred(7);
pub const DURING: Pred = Pred(8);
pub const CONTAINS: Pred = Pred(9);
pub const FINISHES: Pred = Pred(10);
pub const FINISHED_BY: Pred = Pred(11);
pub const EQUALS: Pred = Pred(12);

const N: usize = 13;

static PREDICATES: [PredicateSym; N] = [
    PredicateSym::new("before", 2),
    PredicateSym::new("after", 2),
    PredicateSym::new("meets", 2),
    PredicateSym::new("met_by", 2),
    PredicateSym::new("overlaps", 2),
    PredicateSym::new("overlapped_by", 2),
    PredicateSym::new("starts", 2),
    PredicateSym::new("started_by", 2),
    PredicateSym::new("during", 2),
    PredicateSym::new("contains", 2),
    PredicateSym::new("finishes", 2),
    PredicateSym::new("finished_by", 2),
    PredicateSym::new("equals", 2),
];

static DESCRIPTOR: DomainDescriptor = DomainDescriptor {
    tag: DomainTag::Allen,
    predicates: &PREDICATES,
    homogeneous: true,
    equality: &[(EQUALS, [EqArg::X, EqArg::Y])],
};

/// Endpoint comparisons `[s_i ? s_j, s_i ? e_j, e_i ? s_j, e_i ? e_j]` for
/// `R(i, j)`, indexed like [`PREDICATES`].
const ENDPOINTS: [[Ordering; 4]; N] = [
    [Less, Less, Less, Less],             // before
    [Greater, Greater, Greater, Greater], // after
    [Less, Less, Equal, Less],            // meets
    [Greater, Equal, Greater, Greater],   // met_by
    [Less, Less, Greater, Less],          // overlaps
    [Greater, Less, Greater, Greater],    // overlapped_by
    [Equal, Less, Greater, Less],         // starts
    [Equal, Less, Greater, Greater],      // started_by
    [Greater, Less, Greater, Less],       // during
    [Less, Less, Greater, Greater],       // contains
    [Greater, Less, Greater, Equal],      // finishes
    [Less, Less, Greater, Equal],         // finished_by
    [Equal, Less, Greater, Equal],        // equals
];

pub fn converse(p: Pred) -> Pred {
    if p == EQUALS {
        p
    } else {
        Pred(p.0 ^ 1)
    }
}

/// The base relation between two intervals given as endpoint pairs.
pub fn relation_of<T: Ord>(i: (&T, &T), j: (&T, &T)) -> Pred {
    let sig = [i.0.cmp(j.0), i.0.cmp(j.1), i.1.cmp(j.0), i.1.cmp(j.1)];
    let k = ENDPOINTS
        .iter()
        .position(|row| *row == sig)
        .expect("intervals with start < end are related by a base relation");
    Pred(k as u8)
}

fn point_pred(o: Ordering) -> Pred {
    match o {
        Less => LT,
        Equal => EQ,
        Greater => GT,
    }
}

fn start(v: u32) -> u32 {
    2 * v
}

fn end(v: u32) -> u32 {
    2 * v + 1
}

/// Endpoint atoms of `R(i, j)`.
fn endpoint_atoms(p: Pred, i: u32, j: u32, out: &mut Vec<Atom<u32>>) {
    let row = &ENDPOINTS[p.0 as usize];
    let pairs = [
        (start(i), start(j)),
        (start(i), end(j)),
        (end(i), start(j)),
        (end(i), end(j)),
    ];
    for (o, (x, y)) in row.iter().zip(pairs) {
        out.push(Atom::binary(point_pred(*o), x, y));
    }
}

/// The point system equivalent to a system of base relations: one
/// `start < end` per interval plus the endpoint atoms of every relation.
pub fn translate(atoms: &[Atom<u32>]) -> Vec<Atom<u32>> {
    let dense = Dense::of_atoms(atoms);
    let mut out = Vec::with_capacity(dense.len() + 4 * atoms.len());
    for k in 0..dense.len() {
        let v = dense.var(k);
        out.push(Atom::binary(LT, start(v), end(v)));
    }
    for a in atoms {
        endpoint_atoms(a.pred, a.args[0], a.args[1], &mut out);
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Allen;

const fn cmp_u8(a: u8, b: u8) -> i8 {
    if a < b {
        -1
    } else if a > b {
        1
    } else {
        0
    }
}

const fn relation_index(i: (u8, u8), j: (u8, u8)) -> usize {
    let sig = [cmp_u8(i.0, j.0), cmp_u8(i.0, j.1), cmp_u8(i.1, j.0), cmp_u8(i.1, j.1)];
    let mut k = 0;
    while k < N {
        let row = &ENDPOINTS[k];
        if row[0] as i8 == sig[0] && row[1] as i8 == sig[1] && row[2] as i8 == sig[2] && row[3] as i8 == sig[3] {
            return k;
        }
        k += 1;
    }
    panic!("intervals with start < end are related by a base relation")
}

/// Entry `[p][q]`: the relations `R(i, k)` compatible with `p(i, j)` and
/// `q(j, k)`, as a bitmask. Read off all triples of intervals with
/// endpoints in `0..6`, which realise every endpoint configuration.
const COMPOSITION: [[u16; N]; N] = {
    let mut table = [[0u16; N]; N];
    let mut ivs = [(0u8, 0u8); 15];
    let mut n = 0;
    let mut s = 0;
    while s < 6 {
        let mut e = s + 1;
        while e < 6 {
            ivs[n] = (s, e);
            n += 1;
            e += 1;
        }
        s += 1;
    }
    let mut a = 0;
    while a < ivs.len() {
        let mut b = 0;
        while b < ivs.len() {
            let p = relation_index(ivs[a], ivs[b]);
            let mut c = 0;
            while c < ivs.len() {
                let q = relation_index(ivs[b], ivs[c]);
                let r = relation_index(ivs[a], ivs[c]);
                table[p][q] |= 1 << r;
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    table
};

fn compose(a: u16, b: u16) -> u16 {
    let mut out = 0;
    for p in 0..N {
        if a & (1 << p) == 0 {
            continue;
        }
        for q in 0..N {
            if b & (1 << q) != 0 {
                out |= COMPOSITION[p][q];
            }
        }
    }
    out
}

fn converse_mask(m: u16) -> u16 {
    (0..N as u8)
        .filter(|&p| m & (1 << p) != 0)
        .fold(0, |acc, p| acc | (1 << converse(Pred(p)).0))
}

/// Backtracking over base relations per pair with path consistency after
/// every choice. A path-consistent network of base relations is
/// satisfiable, so every leaf is a distinct satisfiable complete network.
struct Networks<'a, 'f> {
    dense: &'a Dense,
    visit: &'a mut (dyn FnMut(&[Atom<u32>]) -> ControlFlow<()> + 'f),
}

impl Networks<'_, '_> {
    /// Tightens `m` to path consistency. False if some pair becomes empty.
    fn propagate(&self, m: &mut [Vec<u16>]) -> bool {
        let n = m.len();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for k in 0..n {
                        if k == i || k == j {
                            continue;
                        }
                        let tight = m[i][k] & compose(m[i][j], m[j][k]);
                        if tight != m[i][k] {
                            if tight == 0 {
                                return false;
                            }
                            m[i][k] = tight;
                            m[k][i] = converse_mask(tight);
                            changed = true;
                        }
                    }
                }
            }
        }
        true
    }

    fn emit(&mut self, m: &[Vec<u16>]) -> ControlFlow<()> {
        let n = self.dense.len();
        let mut atoms = Vec::with_capacity(n * n);
        for (i, row) in m.iter().enumerate() {
            for (j, &mask) in row.iter().enumerate() {
                let p = Pred(mask.trailing_zeros() as u8);
                atoms.push(Atom::binary(p, self.dense.var(i), self.dense.var(j)));
            }
        }
        atoms.sort();
        (self.visit)(&atoms)
    }

    fn step(&mut self, m: &[Vec<u16>]) -> ControlFlow<()> {
        // The open pair with the fewest candidates, first in index order.
        let n = m.len();
        let mut best: Option<(u32, usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                let c = m[i][j].count_ones();
                if c > 1 && best.is_none_or(|(b, _, _)| c < b) {
                    best = Some((c, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else {
            return self.emit(m);
        };
        for p in 0..N as u8 {
            if m[i][j] & (1 << p) == 0 {
                continue;
            }
            let mut next = m.to_vec();
            next[i][j] = 1 << p;
            next[j][i] = 1 << converse(Pred(p)).0;
            if self.propagate(&mut next) {
                self.step(&next)?;
            }
        }
        ControlFlow::Continue(())
    }
}

impl ConcreteDomain for Allen {
    fn descriptor(&self) -> &DomainDescriptor {
        &DESCRIPTOR
    }

    fn check_value(&self, v: &Value) -> Result<(), DomainError> {
        match v {
            Value::Interval(s, e) if s < e => Ok(()),
            Value::Interval(s, e) => Err(DomainError::EmptyInterval(
                alloc::format!("{}", Value::Rational(s.clone())),
                alloc::format!("{}", Value::Rational(e.clone())),
            )),
            other => Err(DomainError::WrongValue(
                alloc::format!("{other}"),
                DomainTag::Allen,
            )),
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
        for v in args {
            self.check_value(v)?;
        }
        match (&args[0], &args[1]) {
            (Value::Interval(s1, e1), Value::Interval(s2, e2)) => {
                Ok(relation_of((s1, e1), (s2, e2)) == pred)
            }
            _ => unreachable!("checked above"),
        }
    }

    fn satisfiable(&self, atoms: &[Atom<u32>]) -> bool {
        debug_assert!(check_atoms(&DESCRIPTOR, atoms).is_ok());
        Rationals.satisfiable(&translate(atoms))
    }

    fn solve(&self, atoms: &[Atom<u32>]) -> Option<BTreeMap<u32, Value>> {
        let points = Rationals.solve(&translate(atoms))?;
        let dense = Dense::of_atoms(atoms);
        let value = |p: u32| match &points[&p] {
            Value::Rational(q) => q.clone(),
            Value::Interval(..) => unreachable!("point solutions are rationals"),
        };
        Some(
            (0..dense.len())
                .map(|k| {
                    let v = dense.var(k);
                    (v, Value::Interval(value(start(v)), value(end(v))))
                })
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
        let n = dense.len();
        let all: u16 = (1 << N) - 1;
        let mut allowed = vec![vec![all; n]; n];
        for (i, row) in allowed.iter_mut().enumerate() {
            row[i] = 1 << EQUALS.0;
        }
        for a in required {
            let (i, j) = (dense.index(a.args[0]), dense.index(a.args[1]));
            allowed[i][j] &= 1 << a.pred.0;
            allowed[j][i] &= 1 << converse(a.pred).0;
        }
        for a in forbidden {
            let (i, j) = (dense.index(a.args[0]), dense.index(a.args[1]));
            allowed[i][j] &= !(1 << a.pred.0);
            allowed[j][i] &= !(1 << converse(a.pred).0);
        }
        if allowed.iter().flatten().any(|&m| m == 0) {
            return ControlFlow::Continue(());
        }
        let mut walk = Networks {
            dense: &dense,
            visit,
        };
        if !walk.propagate(&mut allowed) {
            return ControlFlow::Continue(());
        }
        walk.step(&allowed)
    }
}
