//! Bounded model search by backtracking over partial structures.
//!
//! The structure is decided first (concept names, definedness of features,
//! role edges, one element at a time), pruned whenever some GCI or
//! assertion already evaluates to false. Then a complete constraint network
//! over the defined feature variables is grown one variable at a time, and
//! the first network under which everything holds is solved for values.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::eval::{assertion_truth, check_model, evaluate, FiniteInterpretation, Truth, View};
use crate::cdomain::{Atom, ConcreteDomain};
use crate::error::DomainError;
use crate::syntax::{Concept, Name, Ontology, PredRef};

/// Result of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(FiniteInterpretation),
    /// The whole space up to the bound was searched.
    NoModel,
    /// The node budget ran out first.
    GaveUp,
}

impl SearchOutcome {
    pub fn model(self) -> Option<FiniteInterpretation> {
        match self {
            SearchOutcome::Found(m) => Some(m),
            _ => None,
        }
    }
}

const DEFAULT_BUDGET: u64 = 2_000_000;

/// Searches a model with at most `kmax` elements. Individuals are mapped to
/// distinct elements. The ontology must be free of singleton predicates and
/// feature assertions.
pub fn bounded_model_search(o: &Ontology, kmax: usize) -> Option<FiniteInterpretation> {
    bounded_model_search_with_budget(o, kmax, DEFAULT_BUDGET).model()
}

pub fn bounded_model_search_with_budget(o: &Ontology, kmax: usize, budget: u64) -> SearchOutcome {
    assert!(
        !o.has_singletons() && !o.has_feature_assertions(),
        "bounded model search needs singleton predicates and feature assertions reduced"
    );
    let individuals = o.individuals();
    let mut gave_up = false;
    for n in individuals.len().max(1)..=kmax {
        let mut s = Search::new(o, n, budget);
        match s.run() {
            Some(m) => return SearchOutcome::Found(m),
            None => gave_up |= s.exhausted(),
        }
    }
    if gave_up {
        SearchOutcome::GaveUp
    } else {
        SearchOutcome::NoModel
    }
}

#[derive(Debug, Clone, Copy)]
enum Decision {
    Name(usize, usize),
    Defined(usize, usize),
    Edge(usize, usize, usize),
}

struct Partial {
    domain: &'static dyn ConcreteDomain,
    n: usize,
    names: Vec<Name>,
    roles: Vec<Name>,
    features: Vec<Name>,
    name_val: Vec<Option<bool>>,
    edge_val: Vec<Option<bool>>,
    defined_val: Vec<Option<bool>>,
    /// Network variable of each (element, feature), once placed.
    var_of: BTreeMap<(usize, usize), u32>,
    network: Vec<Atom<u32>>,
}

impl Partial {
    fn name_index(&self, a: &Name) -> Option<usize> {
        self.names.iter().position(|b| b == a)
    }

    fn role_index(&self, r: &Name) -> Option<usize> {
        self.roles.iter().position(|b| b == r)
    }

    fn feature_index(&self, f: &Name) -> Option<usize> {
        self.features.iter().position(|b| b == f)
    }

    fn opt(v: Option<bool>) -> Truth {
        v.map_or(Truth::Unknown, Truth::of)
    }
}

impl View for Partial {
    fn size(&self) -> usize {
        self.n
    }

    fn domain(&self) -> &'static dyn ConcreteDomain {
        self.domain
    }

    fn name(&self, concept: &Name, e: usize) -> Truth {
        match self.name_index(concept) {
            Some(k) => Self::opt(self.name_val[k * self.n + e]),
            None => Truth::False,
        }
    }

    fn edge(&self, role: &Name, from: usize, to: usize) -> Truth {
        match self.role_index(role) {
            Some(k) => Self::opt(self.edge_val[(k * self.n + from) * self.n + to]),
            None => Truth::False,
        }
    }

    fn defined(&self, e: usize, feature: &Name) -> Truth {
        match self.feature_index(feature) {
            Some(f) => Self::opt(self.defined_val[e * self.features.len() + f]),
            None => Truth::False,
        }
    }

    fn holds(&self, pred: &PredRef, args: &[(usize, &Name)]) -> Result<Truth, DomainError> {
        let PredRef::Domain(p) = pred else {
            unreachable!("singletons are reduced before the search");
        };
        let mut vars = Vec::with_capacity(args.len());
        for (e, f) in args {
            let Some(f) = self.feature_index(f) else {
                return Ok(Truth::False);
            };
            match self.var_of.get(&(*e, f)) {
                Some(&v) => vars.push(v),
                None => return Ok(Truth::Unknown),
            }
        }
        let atom = Atom::new(*p, vars);
        Ok(Truth::of(self.network.binary_search(&atom).is_ok()))
    }
}

struct Search<'o> {
    o: &'o Ontology,
    gcis: Vec<Concept>,
    individuals: Vec<Name>,
    partial: Partial,
    decisions: Vec<Decision>,
    nodes: u64,
    budget: u64,
}

impl<'o> Search<'o> {
    fn new(o: &'o Ontology, n: usize, budget: u64) -> Self {
        let (names, roles, features) = (o.concept_names(), o.roles(), o.features());
        let mut decisions = Vec::new();
        for e in 0..n {
            for k in 0..names.len() {
                decisions.push(Decision::Name(k, e));
            }
            for f in 0..features.len() {
                decisions.push(Decision::Defined(e, f));
            }
            for k in 0..roles.len() {
                for x in 0..n {
                    decisions.push(Decision::Edge(k, e, x));
                }
            }
        }
        Search {
            o,
            gcis: o
                .tbox
                .iter()
                .map(|g| Concept::or(Concept::not(g.lhs.clone()), g.rhs.clone()))
                .collect(),
            individuals: o.individuals(),
            partial: Partial {
                domain: o.domain.domain(),
                n,
                name_val: vec![None; names.len() * n],
                edge_val: vec![None; roles.len() * n * n],
                defined_val: vec![None; features.len() * n],
                names,
                roles,
                features,
                var_of: BTreeMap::new(),
                network: Vec::new(),
            },
            decisions,
            nodes: 0,
            budget,
        }
    }

    fn exhausted(&self) -> bool {
        self.nodes > self.budget
    }

    fn run(&mut self) -> Option<FiniteInterpretation> {
        self.structure(0)
    }

    /// False if some obligation is already violated.
    fn viable(&self) -> bool {
        let none = BTreeSet::new();
        for c in &self.gcis {
            for e in 0..self.partial.n {
                if evaluate(&self.partial, c, e, &none).expect("well-formed ontology") == Truth::False {
                    return false;
                }
            }
        }
        let individuals = &self.individuals;
        let lookup = |a: &Name| individuals.iter().position(|b| b == a);
        self.o.abox.iter().all(|a| {
            assertion_truth(&self.partial, a, &lookup, &none).expect("well-formed ontology")
                != Truth::False
        })
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    fn set(&mut self, d: Decision, v: Option<bool>) {
        let p = &mut self.partial;
        match d {
            Decision::Name(k, e) => p.name_val[k * p.n + e] = v,
            Decision::Defined(e, f) => p.defined_val[e * p.features.len() + f] = v,
            Decision::Edge(k, e, x) => p.edge_val[(k * p.n + e) * p.n + x] = v,
        }
    }

    fn structure(&mut self, k: usize) -> Option<FiniteInterpretation> {
        if k == self.decisions.len() {
            let vars: Vec<(usize, usize)> = (0..self.partial.n)
                .flat_map(|e| (0..self.partial.features.len()).map(move |f| (e, f)))
                .filter(|&(e, f)| self.partial.defined_val[e * self.partial.features.len() + f] == Some(true))
                .collect();
            return self.network(&vars, 0);
        }
        let d = self.decisions[k];
        for v in [false, true] {
            if !self.tick() {
                return None;
            }
            self.set(d, Some(v));
            if self.viable() {
                if let Some(m) = self.structure(k + 1) {
                    return Some(m);
                }
            }
            if self.exhausted() {
                self.set(d, None);
                return None;
            }
        }
        self.set(d, None);
        None
    }

    fn network(&mut self, vars: &[(usize, usize)], k: usize) -> Option<FiniteInterpretation> {
        if k == vars.len() {
            return self.finish(vars);
        }
        self.partial.var_of.insert(vars[k], k as u32);
        let ids: Vec<u32> = (0..=k as u32).collect();
        let required = self.partial.network.clone();
        let mut extensions = Vec::new();
        let _ = self
            .partial
            .domain
            .for_each_complete(&ids, &required, &[], &mut |c| {
                extensions.push(c.to_vec());
                ControlFlow::Continue(())
            });
        for ext in extensions {
            if !self.tick() {
                break;
            }
            self.partial.network = ext;
            if self.viable() {
                if let Some(m) = self.network(vars, k + 1) {
                    return Some(m);
                }
            }
            if self.exhausted() {
                break;
            }
        }
        self.partial.network = required;
        self.partial.var_of.remove(&vars[k]);
        None
    }

    fn finish(&self, vars: &[(usize, usize)]) -> Option<FiniteInterpretation> {
        let p = &self.partial;
        let solution = p.domain.solve(&p.network)?;
        let mut m = FiniteInterpretation::new(self.o.domain, p.n);
        for (k, a) in p.names.iter().enumerate() {
            let ext: BTreeSet<usize> = (0..p.n).filter(|&e| p.name_val[k * p.n + e] == Some(true)).collect();
            if !ext.is_empty() {
                m.concepts.insert(a.clone(), ext);
            }
        }
        for (k, r) in p.roles.iter().enumerate() {
            let mut edges = BTreeSet::new();
            for e in 0..p.n {
                for x in 0..p.n {
                    if p.edge_val[(k * p.n + e) * p.n + x] == Some(true) {
                        edges.insert((e, x));
                    }
                }
            }
            if !edges.is_empty() {
                m.roles.insert(r.clone(), edges);
            }
        }
        for (i, a) in self.individuals.iter().enumerate() {
            m.individuals.insert(a.clone(), i);
        }
        for (k, &(e, f)) in vars.iter().enumerate() {
            m.features.insert((e, p.features[f].clone()), solution[&(k as u32)].clone());
        }
        // The network decides every CD-restriction; the final check
        // re-evaluates with actual values.
        check_model(&m, self.o, None).ok()?.then_some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdomain::rationals::LT;
    use crate::syntax::{name, normalize, two_ordered_successors, Assertion, FeaturePath, Gci};
    use crate::DomainTag;

    #[test]
    fn two_ordered_successors_has_a_small_model() {
        let o = normalize(&two_ordered_successors());
        let m = bounded_model_search(&o, 3).expect("model within three elements");
        assert!(check_model(&m, &o, None).unwrap());
    }

    #[test]
    fn contradiction_has_no_model() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::and(Concept::atomic("A"), Concept::not(Concept::atomic("A"))),
        });
        assert_eq!(bounded_model_search_with_budget(&o, 3, 1 << 20), SearchOutcome::NoModel);
    }

    #[test]
    fn irreflexive_demand_has_no_model() {
        let mut o = Ontology::new(DomainTag::Q);
        let f = FeaturePath::plain(name("f"));
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::CdExists(vec![f.clone(), f], PredRef::Domain(LT)),
        });
        assert_eq!(bounded_model_search_with_budget(&o, 2, 1 << 20), SearchOutcome::NoModel);
    }

    #[test]
    fn gci_needing_two_elements() {
        let mut o = Ontology::new(DomainTag::Q);
        o.tbox.push(Gci::new(Concept::Top, Concept::atomic("A")));
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::exists("r", Concept::not(Concept::atomic("A"))),
        });
        assert!(bounded_model_search(&o, 3).is_none());
        let mut o2 = Ontology::new(DomainTag::Q);
        o2.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::and(Concept::atomic("A"), Concept::exists("r", Concept::not(Concept::atomic("A")))),
        });
        let m = bounded_model_search(&o2, 3).unwrap();
        assert_eq!(m.size, 2);
    }
}
