//! Line-oriented debug dumps. The formats are stable and used by golden
//! tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use alcd_core::cdomain::{Atom, LocalVar};
use alcd_core::elimination::FinitePrefixModel;
use alcd_core::oracle::FiniteInterpretation;
use alcd_core::typesys::{AugmentedType, TypeSystem, TypeT};

fn atom_list<V>(ts: &TypeSystem, atoms: impl Iterator<Item = Atom<V>>, var: impl Fn(&V) -> String) -> String {
    let d = ts.domain().descriptor();
    let parts: Vec<String> = atoms
        .map(|a| {
            let args: Vec<String> = a.args.iter().map(&var).collect();
            format!("{}({})", d.name(a.pred), args.join(","))
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

/// One augmented type: root type index, slot map and sorted atom list, e.g.
/// `root=0 slots={1:0,2:0} atoms=[lt(f^1,f^2)]`. Type indices refer to
/// `types`.
pub fn augmented_type_line(ts: &TypeSystem, types: &[TypeT], t: &AugmentedType) -> String {
    let index = |ty: &TypeT| {
        types
            .iter()
            .position(|x| x == ty)
            .map_or_else(|| "?".to_string(), |i| i.to_string())
    };
    let slots: Vec<String> = t.slots.iter().map(|(s, ty)| format!("{s}:{}", index(ty))).collect();
    let atoms = atom_list(ts, t.system.iter().cloned(), |v: &LocalVar| {
        format!("{}^{}", ts.features[v.feature as usize], v.slot)
    });
    format!("root={} slots={{{}}} atoms={}", index(&t.root), slots.join(","), atoms)
}

pub fn augmented_types(ts: &TypeSystem, types: &[TypeT], all: &[AugmentedType]) -> String {
    let mut out = String::new();
    for t in all {
        out.push_str(&augmented_type_line(ts, types, t));
        out.push('\n');
    }
    out
}

fn set<T: std::fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// A finite interpretation, one fact per line.
pub fn interpretation(i: &FiniteInterpretation, leaves: Option<&BTreeSet<usize>>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", i.domain);
    let _ = writeln!(out, "elements {}", i.size);
    for (a, e) in &i.individuals {
        let _ = writeln!(out, "individual {a} = {e}");
    }
    for (c, ext) in &i.concepts {
        let _ = writeln!(out, "concept {c} = {}", set(ext));
    }
    for (r, ext) in &i.roles {
        let _ = writeln!(out, "role {r} = {}", set(ext.iter().map(|(x, y)| format!("({x}, {y})"))));
    }
    for ((e, f), v) in &i.features {
        let _ = writeln!(out, "feature {e}.{f} = {v}");
    }
    if let Some(leaves) = leaves {
        let _ = writeln!(out, "leaves {}", set(leaves));
    }
    out
}

/// The elements of a witness prefix with their words, then the
/// interpretation.
pub fn witness(m: &FinitePrefixModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "depth {}", m.depth);
    let names: BTreeMap<usize, &str> = m
        .elements
        .iter()
        .enumerate()
        .filter_map(|(x, el)| el.individual.as_deref().map(|a| (x, a)))
        .collect();
    for (x, el) in m.elements.iter().enumerate() {
        let word: Vec<String> = el.word.iter().map(|(s, i)| format!("{s}@{i}")).collect();
        let _ = write!(out, "element {x} sig={}", el.sig);
        match names.get(&x) {
            Some(a) => {
                let _ = write!(out, " individual={a}");
            }
            None => {
                let _ = write!(out, " root={} word={}", el.root, word.join("."));
            }
        }
        out.push('\n');
    }
    out.push_str(&interpretation(&m.interpretation, Some(&m.leaves)));
    out
}
