//! Type elimination over explicitly enumerated augmented types. Exponential in
//! the closure; meant for small inputs and as a reference for [`Engine`].
//!
//! [`Engine`]: super::Engine

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DropReason, TraceEntry};
use crate::typesys::{AugmentedType, Profile, TypeSystem, TypeT};

/// Every augmented type of the ontology.
pub fn enumerate_all(ts: &TypeSystem) -> Vec<AugmentedType> {
    let types = ts.enumerate_types();
    let mut out = Vec::new();
    for t in &types {
        let _ = ts.enumerate_augmented_types(t, &types, &mut |a| {
            out.push(a);
            ControlFlow::Continue(())
        });
    }
    out
}

type Key = (TypeT, Profile);

#[derive(Debug, Clone)]
pub struct Elimination {
    pub types: Vec<AugmentedType>,
    pub alive: Vec<bool>,
    pub trace: Vec<TraceEntry>,
    pub rounds: u32,
}

impl Elimination {
    pub fn survivors(&self) -> impl Iterator<Item = &AugmentedType> {
        self.types.iter().zip(&self.alive).filter(|(_, a)| **a).map(|(t, _)| t)
    }

    pub fn survivor_indices(&self) -> Vec<usize> {
        (0..self.types.len()).filter(|&i| self.alive[i]).collect()
    }
}

/// Removes augmented types that are not locally realizable or not patched
/// at some used slot, until nothing changes. Types are visited in an order
/// shuffled by `seed`; the survivors do not depend on it.
pub fn eliminate(ts: &TypeSystem, types: Vec<AugmentedType>, seed: u64) -> Elimination {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = |t: &AugmentedType| -> Key { (t.root.clone(), t.root_profile()) };
    let mut count: BTreeMap<Key, usize> = BTreeMap::new();
    let mut dependents: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    let mut needs: Vec<Vec<(u32, Key)>> = Vec::with_capacity(types.len());
    for (i, t) in types.iter().enumerate() {
        *count.entry(key(t)).or_default() += 1;
        let slots: Vec<(u32, Key)> = t
            .slots
            .iter()
            .map(|(&s, ty)| (s, (ty.clone(), t.slot_profile(s))))
            .collect();
        for (_, k) in &slots {
            dependents.entry(k.clone()).or_default().push(i);
        }
        needs.push(slots);
    }
    let mut alive = alloc::vec![true; types.len()];
    let mut trace = Vec::new();
    let mut next: Vec<usize> = (0..types.len()).collect();
    let mut rounds = 0;
    while !next.is_empty() {
        rounds += 1;
        let mut current = core::mem::take(&mut next);
        current.sort_unstable();
        current.dedup();
        current.shuffle(&mut rng);
        for i in current {
            if !alive[i] {
                continue;
            }
            let reason = if !ts.is_locally_realizable(&types[i]) {
                Some(DropReason::Local)
            } else {
                needs[i]
                    .iter()
                    .find(|(_, k)| count.get(k).copied().unwrap_or(0) == 0)
                    .map(|(slot, _)| DropReason::Patch {
                        role: types[i].sigma.role_of(*slot).cloned().expect("used slot"),
                        slot: *slot,
                    })
            };
            let Some(reason) = reason else { continue };
            alive[i] = false;
            trace.push(TraceEntry {
                iteration: rounds,
                dropped: i as u32,
                reason,
            });
            let k = key(&types[i]);
            let c = count.get_mut(&k).expect("counted");
            *c -= 1;
            if *c == 0 {
                if let Some(ds) = dependents.get(&k) {
                    next.extend(ds.iter().copied().filter(|&d| alive[d]));
                }
            }
        }
    }
    Elimination {
        types,
        alive,
        trace,
        rounds,
    }
}
