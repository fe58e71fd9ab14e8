//! Consistency-preserving rewrites that remove singleton predicates, feature
//! assertions and predicate assertions, in that order.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cdomain::{defined_concept, DomainDescriptor, EqArg, Value};
use crate::error::ReasonerError;
use crate::syntax::{name, Assertion, Concept, FeaturePath, Gci, Name, Ontology, PredRef};

/// Prefix of every generated name.
pub const RESERVED_PREFIX: &str = "__";

/// Generates names that occur nowhere in the input ontology.
pub struct FreshNames {
    taken: BTreeSet<Name>,
}

impl FreshNames {
    pub fn new(o: &Ontology) -> Self {
        FreshNames {
            taken: o.names().into_keys().collect(),
        }
    }

    /// `__<stem>`, with underscores appended until unused.
    pub fn fresh(&mut self, stem: &str) -> Name {
        let mut candidate = format!("{RESERVED_PREFIX}{stem}");
        while self.taken.contains(candidate.as_str()) {
            candidate.push('_');
        }
        let n = name(&candidate);
        self.taken.insert(n.clone());
        n
    }
}

/// `α(x, y)` of the domain as a CD-restriction over the paths standing for
/// `x` and `y`.
fn equality(d: &DomainDescriptor, x: &FeaturePath, y: &FeaturePath, universal: bool) -> Concept {
    let atoms = d.equality.iter().map(|(p, args)| {
        let paths = args
            .iter()
            .map(|a| match a {
                EqArg::X => x.clone(),
                EqArg::Y => y.clone(),
            })
            .collect();
        if universal {
            Concept::CdForall(paths, PredRef::Domain(*p))
        } else {
            Concept::CdExists(paths, PredRef::Domain(*p))
        }
    });
    Concept::conjunction(atoms)
}

/// Replaces singleton predicates `=c` by comparisons with a feature `f_c`
/// that holds `c` at every element connected to an individual.
pub fn reduce_singleton_predicates(o: &Ontology) -> Ontology {
    let mut constants: Vec<Value> = Vec::new();
    for c in o.concepts() {
        c.visit_post(&mut |x| {
            if let Concept::CdExists(_, PredRef::Singleton(v)) | Concept::CdForall(_, PredRef::Singleton(v)) = x {
                if !constants.contains(v) {
                    constants.push(v.clone());
                }
            }
        });
    }
    if constants.is_empty() {
        return o.clone();
    }
    let d = o.domain.domain().descriptor();
    let mut fresh = FreshNames::new(o);
    let holders: Vec<Name> = (0..constants.len()).map(|k| fresh.fresh(&format!("c{k}"))).collect();
    let rewrite = |c: &Concept| rewrite_singletons(c, d, &constants, &holders);
    let mut out = Ontology::new(o.domain);
    out.tbox = o
        .tbox
        .iter()
        .map(|g| Gci::new(rewrite(&g.lhs), rewrite(&g.rhs)))
        .collect();
    out.abox = o
        .abox
        .iter()
        .map(|a| match a {
            Assertion::Concept { individual, concept } => Assertion::Concept {
                individual: individual.clone(),
                concept: rewrite(concept),
            },
            other => other.clone(),
        })
        .collect();
    let mut individuals = o.individuals();
    if individuals.is_empty() {
        individuals.push(fresh.fresh("i"));
    }
    let roles = o.roles();
    for (c, f) in constants.iter().zip(&holders) {
        out.tbox.push(Gci::new(Concept::Top, defined_concept(d, f)));
        let here = FeaturePath::plain(f.clone());
        for r in &roles {
            let there = FeaturePath::via(r.clone(), f.clone());
            out.tbox.push(Gci::new(Concept::Top, equality(d, &here, &there, true)));
        }
        for a in &individuals {
            out.abox.push(Assertion::Feature {
                individual: a.clone(),
                feature: f.clone(),
                value: c.clone(),
            });
        }
    }
    out
}

fn rewrite_singletons(c: &Concept, d: &DomainDescriptor, constants: &[Value], holders: &[Name]) -> Concept {
    let go = |x: &Concept| rewrite_singletons(x, d, constants, holders);
    let holder = |v: &Value| -> FeaturePath {
        let k = constants.iter().position(|w| w == v).expect("collected constant");
        FeaturePath::plain(holders[k].clone())
    };
    // ∃f.=c
    let exists_plain = |f: &Name, v: &Value| equality(d, &holder(v), &FeaturePath::plain(f.clone()), false);
    match c {
        Concept::Top | Concept::Bottom | Concept::Atomic(_) => c.clone(),
        Concept::Not(x) => Concept::not(go(x)),
        Concept::And(a, b) => Concept::and(go(a), go(b)),
        Concept::Or(a, b) => Concept::or(go(a), go(b)),
        Concept::Exists(r, x) => Concept::Exists(r.clone(), Box::new(go(x))),
        Concept::Forall(r, x) => Concept::Forall(r.clone(), Box::new(go(x))),
        Concept::CdExists(paths, PredRef::Singleton(v)) => {
            let p = &paths[0];
            let local = exists_plain(&p.feature, v);
            match &p.role {
                None => local,
                Some(r) => Concept::Exists(r.clone(), Box::new(local)),
            }
        }
        Concept::CdForall(paths, PredRef::Singleton(v)) => {
            // f is functional: ∀f.=c holds iff f is undefined or equals c.
            let p = &paths[0];
            let local = Concept::or(
                Concept::not(defined_concept(d, &p.feature)),
                exists_plain(&p.feature, v),
            );
            match &p.role {
                None => local,
                Some(r) => Concept::Forall(r.clone(), Box::new(local)),
            }
        }
        Concept::CdExists(_, PredRef::Domain(_)) | Concept::CdForall(_, PredRef::Domain(_)) => c.clone(),
    }
}

/// Replaces feature assertions by every predicate assertion that holds on
/// the asserted values (ordered tuples, repetitions allowed). Needs a
/// homogeneous domain.
pub fn reduce_feature_assertions(o: &Ontology) -> Result<Ontology, ReasonerError> {
    if !o.has_feature_assertions() {
        return Ok(o.clone());
    }
    let dom = o.domain.domain();
    let d = dom.descriptor();
    if !d.homogeneous {
        return Err(ReasonerError::NotHomogeneous(o.domain));
    }
    let mut values: Vec<(Name, Name, Value)> = Vec::new();
    let mut out = Ontology::new(o.domain);
    out.tbox = o.tbox.clone();
    for a in &o.abox {
        match a {
            Assertion::Feature {
                individual,
                feature,
                value,
            } => {
                dom.check_value(value)?;
                let entry = (individual.clone(), feature.clone(), value.clone());
                if !values.contains(&entry) {
                    values.push(entry);
                }
            }
            other => out.abox.push(other.clone()),
        }
    }
    for pred in d.preds() {
        let k = d.arity(pred);
        let mut idx = vec![0usize; k];
        loop {
            let args: Vec<Value> = idx.iter().map(|&i| values[i].2.clone()).collect();
            if dom.holds(pred, &args)? {
                let a = Assertion::Predicate {
                    pred,
                    args: idx
                        .iter()
                        .map(|&i| (values[i].0.clone(), values[i].1.clone()))
                        .collect(),
                };
                if !out.abox.contains(&a) {
                    out.abox.push(a);
                }
            }
            if !advance(&mut idx, values.len()) {
                break;
            }
        }
    }
    Ok(out)
}

/// Next tuple in lexicographic order; false after the last one.
fn advance(idx: &mut [usize], n: usize) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < n {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

/// Replaces predicate assertions `P(f₁(a₁),…,f_k(a_k))` by a fresh
/// individual `a*` linked to each `aᵢ` through a fresh role `r_{aᵢ}`, with
/// `(∀r_{a₁}f₁,…,r_{a_k}f_k.P)(a*)` and `(∃fᵢ.⊤)(aᵢ)`.
pub fn reduce_predicate_assertions(o: &Ontology) -> Ontology {
    if !o.has_predicate_assertions() {
        return o.clone();
    }
    let d = o.domain.domain().descriptor();
    let mut fresh = FreshNames::new(o);
    let star = fresh.fresh("a");
    let mut links: Vec<(Name, Name)> = Vec::new();
    let mut out = Ontology::new(o.domain);
    out.tbox = o.tbox.clone();
    let mut added = Vec::new();
    let mut defined: BTreeSet<(Name, Name)> = BTreeSet::new();
    for a in &o.abox {
        let Assertion::Predicate { pred, args } = a else {
            out.abox.push(a.clone());
            continue;
        };
        let mut paths = Vec::with_capacity(args.len());
        for (ind, f) in args {
            let role = match links.iter().find(|(i, _)| i == ind) {
                Some((_, r)) => r.clone(),
                None => {
                    let r = fresh.fresh(&format!("r_{ind}"));
                    links.push((ind.clone(), r.clone()));
                    added.push(Assertion::Role {
                        role: r.clone(),
                        from: star.clone(),
                        to: ind.clone(),
                    });
                    r
                }
            };
            if defined.insert((ind.clone(), f.clone())) {
                added.push(Assertion::Concept {
                    individual: ind.clone(),
                    concept: defined_concept(d, f),
                });
            }
            paths.push(FeaturePath::via(role, f.clone()));
        }
        added.push(Assertion::Concept {
            individual: star.clone(),
            concept: Concept::CdForall(paths, PredRef::Domain(*pred)),
        });
    }
    out.abox.extend(added);
    out
}

/// Singleton predicates, then feature assertions, then predicate
/// assertions. The result has only concept and role assertions.
pub fn reduction_pipeline(o: &Ontology) -> Result<Ontology, ReasonerError> {
    let o = reduce_singleton_predicates(o);
    let o = reduce_feature_assertions(&o)?;
    Ok(reduce_predicate_assertions(&o))
}

/// Whether a name was generated by a reduction.
pub fn is_generated(n: &str) -> bool {
    n.starts_with(RESERVED_PREFIX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdomain::Pred;
    use crate::cdomain::rationals::{EQ, GT, LT};
    use crate::DomainTag;

    fn feature(a: &str, f: &str, v: Value) -> Assertion {
        Assertion::Feature {
            individual: name(a),
            feature: name(f),
            value: v,
        }
    }

    fn predicates(o: &Ontology) -> Vec<(Pred, Vec<(Name, Name)>)> {
        o.abox
            .iter()
            .filter_map(|a| match a {
                Assertion::Predicate { pred, args } => Some((*pred, args.clone())),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn single_feature_assertion_gives_reflexive_equality() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(feature("a", "f", Value::int(0)));
        let r = reduce_feature_assertions(&o).unwrap();
        assert_eq!(predicates(&r), vec![(EQ, vec![(name("a"), name("f")), (name("a"), name("f"))])]);
        assert!(!r.has_feature_assertions());
    }

    #[test]
    fn two_values_give_every_true_ground_atom() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(feature("mary", "age", Value::ratio(1, 2)));
        o.abox.push(feature("bob", "age", Value::ratio(3, 4)));
        let got = predicates(&reduce_feature_assertions(&o).unwrap());
        let m = (name("mary"), name("age"));
        let b = (name("bob"), name("age"));
        assert_eq!(got.len(), 4);
        assert!(got.contains(&(LT, vec![m.clone(), b.clone()])));
        assert!(got.contains(&(GT, vec![b.clone(), m.clone()])));
        assert!(got.contains(&(EQ, vec![m.clone(), m])));
        assert!(got.contains(&(EQ, vec![b.clone(), b])));
    }

    #[test]
    fn equal_constants_are_compared_exactly() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(feature("a", "f", Value::ratio(1, 2)));
        o.abox.push(feature("b", "g", Value::ratio(2, 4)));
        let got = predicates(&reduce_feature_assertions(&o).unwrap());
        assert!(got.contains(&(EQ, vec![(name("a"), name("f")), (name("b"), name("g"))])));
    }

    #[test]
    fn predicate_assertion_shape() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(Assertion::Predicate {
            pred: LT,
            args: vec![(name("mary"), name("age")), (name("bob"), name("age"))],
        });
        let r = reduce_predicate_assertions(&o);
        assert!(!r.has_predicate_assertions());
        let star = name("__a");
        let d = DomainTag::Q.domain().descriptor();
        let expected = vec![
            Assertion::Role {
                role: name("__r_mary"),
                from: star.clone(),
                to: name("mary"),
            },
            Assertion::Concept {
                individual: name("mary"),
                concept: defined_concept(d, &name("age")),
            },
            Assertion::Role {
                role: name("__r_bob"),
                from: star.clone(),
                to: name("bob"),
            },
            Assertion::Concept {
                individual: name("bob"),
                concept: defined_concept(d, &name("age")),
            },
            Assertion::Concept {
                individual: star,
                concept: Concept::CdForall(
                    vec![
                        FeaturePath::via(name("__r_mary"), name("age")),
                        FeaturePath::via(name("__r_bob"), name("age")),
                    ],
                    PredRef::Domain(LT),
                ),
            },
        ];
        assert_eq!(r.abox, expected);
    }

    #[test]
    fn singleton_reduction_matches_the_recipe() {
        let mut o = Ontology::new(DomainTag::Q);
        let f = FeaturePath::plain(name("f"));
        o.tbox.push(Gci::new(
            Concept::atomic("A"),
            Concept::exists("r", Concept::CdExists(vec![f.clone()], PredRef::Singleton(Value::ratio(1, 2)))),
        ));
        let r = reduce_singleton_predicates(&o);
        assert!(!r.has_singletons());
        let c = FeaturePath::plain(name("__c0"));
        let d = DomainTag::Q.domain().descriptor();
        assert_eq!(
            r.tbox[0].rhs,
            Concept::exists("r", Concept::CdExists(vec![c.clone(), f], PredRef::Domain(EQ)))
        );
        assert_eq!(r.tbox[1].rhs, defined_concept(d, &name("__c0")));
        assert_eq!(
            r.tbox[2].rhs,
            Concept::CdForall(vec![c, FeaturePath::via(name("r"), name("__c0"))], PredRef::Domain(EQ))
        );
        assert_eq!(r.abox, vec![feature("__i", "__c0", Value::ratio(1, 2))]);
    }

    #[test]
    fn fresh_names_avoid_the_input() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(Assertion::Role {
            role: name("r"),
            from: name("__a"),
            to: name("b"),
        });
        let mut fresh = FreshNames::new(&o);
        assert_eq!(&*fresh.fresh("a"), "__a_");
        assert_eq!(&*fresh.fresh("a"), "__a__");
    }

    #[test]
    fn pipeline_leaves_only_concept_and_role_assertions() {
        let mut o = Ontology::new(DomainTag::Q);
        let f = FeaturePath::plain(name("f"));
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::CdExists(vec![f], PredRef::Singleton(Value::int(3))),
        });
        o.abox.push(feature("b", "g", Value::int(1)));
        o.abox.push(Assertion::Predicate {
            pred: LT,
            args: vec![(name("a"), name("g")), (name("b"), name("g"))],
        });
        let r = reduction_pipeline(&o).unwrap();
        assert!(r
            .abox
            .iter()
            .all(|a| matches!(a, Assertion::Concept { .. } | Assertion::Role { .. })));
        assert!(!r.has_singletons());
        assert!(r.validate().is_ok());
    }

    #[test]
    fn allen_feature_assertions_are_accepted() {
        let mut o = Ontology::new(DomainTag::Allen);
        o.abox.push(feature("a", "f", Value::interval(0, 1)));
        assert!(reduce_feature_assertions(&o).is_ok());
    }
}
