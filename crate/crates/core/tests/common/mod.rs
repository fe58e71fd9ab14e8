#![allow(dead_code)]

use alcd_core::cdomain::rationals::{EQ, GT, LT};
use alcd_core::syntax::name;
use alcd_core::{Assertion, Concept, DomainTag, FeaturePath, Gci, Ontology, PredRef};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Concept> {
    let path = prop_oneof![
        Just(FeaturePath::plain(name("f"))),
        Just(FeaturePath::via(name("r"), name("f"))),
    ];
    let pred = prop_oneof![Just(LT), Just(EQ), Just(GT)];
    prop_oneof![
        Just(Concept::Top),
        Just(Concept::Bottom),
        Just(Concept::atomic("A")),
        (path.clone(), path, pred, any::<bool>()).prop_map(|(p, q, pred, exists)| {
            let paths = vec![p, q];
            if exists {
                Concept::CdExists(paths, PredRef::Domain(pred))
            } else {
                Concept::CdForall(paths, PredRef::Domain(pred))
            }
        }),
    ]
}

/// Concepts over one concept name, one role and one feature in `Q`.
pub fn concept() -> impl Strategy<Value = Concept> {
    leaf().prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Concept::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
            inner.clone().prop_map(|c| Concept::exists("r", c)),
            inner.prop_map(|c| Concept::forall("r", c)),
        ]
    })
}

pub fn tbox_ontology() -> impl Strategy<Value = Ontology> {
    prop::collection::vec((concept(), concept(), any::<bool>()), 1..=2).prop_map(|gcis| {
        let mut o = Ontology::new(DomainTag::Q);
        for (lhs, rhs, from_top) in gcis {
            let lhs = if from_top { Concept::Top } else { lhs };
            o.tbox.push(Gci::new(lhs, rhs));
        }
        o
    })
}

fn assertion() -> impl Strategy<Value = Assertion> {
    let ind = prop_oneof![Just(name("a")), Just(name("b"))];
    prop_oneof![
        (ind.clone(), concept()).prop_map(|(individual, concept)| Assertion::Concept { individual, concept }),
        (ind.clone(), ind).prop_map(|(from, to)| Assertion::Role {
            role: name("r"),
            from,
            to,
        }),
    ]
}

pub fn ontology() -> impl Strategy<Value = Ontology> {
    (tbox_ontology(), prop::collection::vec(assertion(), 0..=2)).prop_map(|(mut o, abox)| {
        o.abox = abox;
        o
    })
}

/// `top <= some [r f, r f] lt`: two r-successors with ordered f-values.
pub fn two_ordered_successors() -> Ontology {
    let mut o = Ontology::new(DomainTag::Q);
    let rf = FeaturePath::via(name("r"), name("f"));
    o.tbox.push(Gci::new(
        Concept::Top,
        Concept::CdExists(vec![rf.clone(), rf], PredRef::Domain(LT)),
    ));
    o
}
