use alloc::vec::Vec;

use super::ast::{Assertion, Concept, Gci, Ontology, PredRef};
use crate::cdomain::{jepd_complement, DomainDescriptor};

/// Rewrites a concept into the `⊤ / name / ¬ / ⊓ / ∃r / ∃p̄.P` fragment:
/// `⊥ = ¬⊤`, `C ⊔ D = ¬(¬C ⊓ ¬D)`, `∀r.C = ¬∃r.¬C`, and `∀p̄.P` becomes
/// `⊓ⱼ ¬∃p̄.Pⱼ` over the other predicates of P's arity.
///
/// Singleton predicates must have been reduced away.
pub fn normalize_concept(c: &Concept, d: &DomainDescriptor) -> Concept {
    match c {
        Concept::Top | Concept::Atomic(_) | Concept::CdExists(..) => c.clone(),
        Concept::Bottom => Concept::not(Concept::Top),
        Concept::Not(inner) => Concept::not(normalize_concept(inner, d)),
        Concept::And(a, b) => Concept::and(normalize_concept(a, d), normalize_concept(b, d)),
        Concept::Or(a, b) => Concept::not(Concept::and(
            Concept::not(normalize_concept(a, d)),
            Concept::not(normalize_concept(b, d)),
        )),
        Concept::Exists(r, inner) => {
            Concept::Exists(r.clone(), alloc::boxed::Box::new(normalize_concept(inner, d)))
        }
        Concept::Forall(r, inner) => Concept::not(Concept::Exists(
            r.clone(),
            alloc::boxed::Box::new(Concept::not(normalize_concept(inner, d))),
        )),
        Concept::CdForall(paths, PredRef::Domain(p)) => {
            Concept::conjunction(jepd_complement(d, *p).into_iter().map(|q| {
                Concept::not(Concept::CdExists(paths.clone(), PredRef::Domain(q)))
            }))
        }
        Concept::CdForall(_, PredRef::Singleton(_)) => {
            panic!("singleton restrictions must be reduced before normalization")
        }
    }
}

/// Normalizes every concept of the ontology. Assertions other than concept
/// assertions are copied unchanged.
pub fn normalize(o: &Ontology) -> Ontology {
    let d = o.domain.domain().descriptor();
    Ontology {
        domain: o.domain,
        tbox: o
            .tbox
            .iter()
            .map(|g| Gci::new(normalize_concept(&g.lhs, d), normalize_concept(&g.rhs, d)))
            .collect(),
        abox: o
            .abox
            .iter()
            .map(|a| match a {
                Assertion::Concept {
                    individual,
                    concept,
                } => Assertion::Concept {
                    individual: individual.clone(),
                    concept: normalize_concept(concept, d),
                },
                other => other.clone(),
            })
            .collect::<Vec<_>>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdomain::rationals::{EQ, GT, LT};
    use crate::cdomain::DomainTag;
    use crate::syntax::ast::{name, FeaturePath};

    fn q() -> &'static DomainDescriptor {
        DomainTag::Q.domain().descriptor()
    }

    #[test]
    fn universal_cd_restriction_uses_the_complement() {
        let paths = alloc::vec![
            FeaturePath::via(name("r"), name("f")),
            FeaturePath::plain(name("f"))
        ];
        let all = Concept::CdForall(paths.clone(), PredRef::Domain(LT));
        let expected = Concept::and(
            Concept::not(Concept::CdExists(paths.clone(), PredRef::Domain(EQ))),
            Concept::not(Concept::CdExists(paths, PredRef::Domain(GT))),
        );
        assert_eq!(normalize_concept(&all, q()), expected);
    }

    #[test]
    fn de_morgan_and_value_restrictions() {
        let (a, b) = (Concept::atomic("A"), Concept::atomic("B"));
        assert_eq!(
            normalize_concept(&Concept::or(a.clone(), b.clone()), q()),
            Concept::not(Concept::and(Concept::not(a.clone()), Concept::not(b)))
        );
        assert_eq!(
            normalize_concept(&Concept::forall("r", a.clone()), q()),
            Concept::not(Concept::exists("r", Concept::not(a.clone())))
        );
        let ex = Concept::exists("r", a);
        assert_eq!(normalize_concept(&ex, q()), ex);
        assert_eq!(
            normalize_concept(&Concept::Bottom, q()),
            Concept::not(Concept::Top)
        );
    }

    #[test]
    fn normal_form_is_idempotent_and_normal() {
        let c = Concept::forall(
            "r",
            Concept::or(
                Concept::Bottom,
                Concept::not(Concept::forall("s", Concept::atomic("A"))),
            ),
        );
        let n = normalize_concept(&c, q());
        assert!(n.is_normal());
        assert_eq!(normalize_concept(&n, q()), n);
    }
}
