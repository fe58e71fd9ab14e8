use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cdomain::{DomainTag, Pred, Value};
use crate::error::OntologyError;

/// An interned name (concept, role, feature or individual).
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// `f` or `r f`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeaturePath {
    pub role: Option<Name>,
    pub feature: Name,
}

impl FeaturePath {
    pub fn plain(feature: Name) -> Self {
        FeaturePath {
            role: None,
            feature,
        }
    }

    pub fn via(role: Name, feature: Name) -> Self {
        FeaturePath {
            role: Some(role),
            feature,
        }
    }
}

/// The predicate of a CD-restriction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredRef {
    Domain(Pred),
    /// The unary predicate `=c`.
    Singleton(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(Name),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(Name, Box<Concept>),
    Forall(Name, Box<Concept>),
    CdExists(Vec<FeaturePath>, PredRef),
    CdForall(Vec<FeaturePath>, PredRef),
}

impl Concept {
    pub fn atomic(n: &str) -> Concept {
        Concept::Atomic(name(n))
    }

    /// Negation with `¬¬C` collapsed to `C`.
    pub fn not(c: Concept) -> Concept {
        match c {
            Concept::Not(inner) => *inner,
            other => Concept::Not(Box::new(other)),
        }
    }

    pub fn and(a: Concept, b: Concept) -> Concept {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Concept {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(role: &str, c: Concept) -> Concept {
        Concept::Exists(name(role), Box::new(c))
    }

    pub fn forall(role: &str, c: Concept) -> Concept {
        Concept::Forall(name(role), Box::new(c))
    }

    /// Left-nested conjunction; `⊤` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Concept>) -> Concept {
        parts.into_iter().reduce(Concept::and).unwrap_or(Concept::Top)
    }

    /// Calls `f` on this concept and every subconcept, children first.
    pub fn visit_post<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        match self {
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => c.visit_post(f),
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.visit_post(f);
                b.visit_post(f);
            }
            Concept::Top
            | Concept::Bottom
            | Concept::Atomic(_)
            | Concept::CdExists(..)
            | Concept::CdForall(..) => {}
        }
        f(self);
    }

    /// Whether the concept only uses names, `⊤`, `¬`, `⊓`, `∃r.C` and
    /// existential CD-restrictions.
    pub fn is_normal(&self) -> bool {
        let mut ok = true;
        self.visit_post(&mut |c| {
            ok &= matches!(
                c,
                Concept::Top
                    | Concept::Atomic(_)
                    | Concept::Not(_)
                    | Concept::And(..)
                    | Concept::Exists(..)
                    | Concept::CdExists(..)
            )
        });
        ok
    }

    pub fn has_singleton(&self) -> bool {
        let mut found = false;
        self.visit_post(&mut |c| {
            if let Concept::CdExists(_, PredRef::Singleton(_))
            | Concept::CdForall(_, PredRef::Singleton(_)) = c
            {
                found = true;
            }
        });
        found
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit_post(&mut |c| {
            n += match c {
                Concept::CdExists(p, _) | Concept::CdForall(p, _) => 1 + p.len(),
                _ => 1,
            }
        });
        n
    }
}

/// `lhs ⊑ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gci {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Gci {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        Gci { lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    /// `a : C`
    Concept { individual: Name, concept: Concept },
    /// `(a, b) : r`
    Role { role: Name, from: Name, to: Name },
    /// `P(a₁.f₁, …, a_k.f_k)`, arguments as (individual, feature).
    Predicate { pred: Pred, args: Vec<(Name, Name)> },
    /// `a.f = c`
    Feature {
        individual: Name,
        feature: Name,
        value: Value,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ontology {
    pub domain: DomainTag,
    pub tbox: Vec<Gci>,
    pub abox: Vec<Assertion>,
}

/// Where a name occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NameKind {
    Concept,
    Role,
    Feature,
    Individual,
}

impl Ontology {
    pub fn new(domain: DomainTag) -> Self {
        Ontology {
            domain,
            tbox: Vec::new(),
            abox: Vec::new(),
        }
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.tbox
            .iter()
            .flat_map(|g| [&g.lhs, &g.rhs])
            .chain(self.abox.iter().filter_map(|a| match a {
                Assertion::Concept { concept, .. } => Some(concept),
                _ => None,
            }))
    }

    /// Every name with the kinds it is used as, in sorted order.
    pub fn names(&self) -> BTreeMap<Name, BTreeSet<NameKind>> {
        let mut out: BTreeMap<Name, BTreeSet<NameKind>> = BTreeMap::new();
        let mut add = |n: &Name, k: NameKind| {
            out.entry(n.clone()).or_default().insert(k);
        };
        for c in self.concepts() {
            c.visit_post(&mut |c| match c {
                Concept::Atomic(n) => add(n, NameKind::Concept),
                Concept::Exists(r, _) | Concept::Forall(r, _) => add(r, NameKind::Role),
                Concept::CdExists(paths, _) | Concept::CdForall(paths, _) => {
                    for p in paths {
                        if let Some(r) = &p.role {
                            add(r, NameKind::Role);
                        }
                        add(&p.feature, NameKind::Feature);
                    }
                }
                _ => {}
            });
        }
        for a in &self.abox {
            match a {
                Assertion::Concept { individual, .. } => add(individual, NameKind::Individual),
                Assertion::Role { role, from, to } => {
                    add(role, NameKind::Role);
                    add(from, NameKind::Individual);
                    add(to, NameKind::Individual);
                }
                Assertion::Predicate { args, .. } => {
                    for (i, f) in args {
                        add(i, NameKind::Individual);
                        add(f, NameKind::Feature);
                    }
                }
                Assertion::Feature {
                    individual,
                    feature,
                    ..
                } => {
                    add(individual, NameKind::Individual);
                    add(feature, NameKind::Feature);
                }
            }
        }
        out
    }

    fn names_of(&self, kind: NameKind) -> Vec<Name> {
        self.names()
            .into_iter()
            .filter(|(_, k)| k.contains(&kind))
            .map(|(n, _)| n)
            .collect()
    }

    /// Individuals in order of first occurrence in the ABox.
    pub fn individuals(&self) -> Vec<Name> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut add = |n: &Name| {
            if seen.insert(n.clone()) {
                out.push(n.clone());
            }
        };
        for a in &self.abox {
            match a {
                Assertion::Concept { individual, .. } | Assertion::Feature { individual, .. } => {
                    add(individual)
                }
                Assertion::Role { from, to, .. } => {
                    add(from);
                    add(to);
                }
                Assertion::Predicate { args, .. } => args.iter().for_each(|(i, _)| add(i)),
            }
        }
        out
    }

    pub fn roles(&self) -> Vec<Name> {
        self.names_of(NameKind::Role)
    }

    pub fn features(&self) -> Vec<Name> {
        self.names_of(NameKind::Feature)
    }

    pub fn concept_names(&self) -> Vec<Name> {
        self.names_of(NameKind::Concept)
    }

    pub fn has_singletons(&self) -> bool {
        self.concepts().any(Concept::has_singleton)
    }

    pub fn has_predicate_assertions(&self) -> bool {
        self.abox
            .iter()
            .any(|a| matches!(a, Assertion::Predicate { .. }))
    }

    pub fn has_feature_assertions(&self) -> bool {
        self.abox
            .iter()
            .any(|a| matches!(a, Assertion::Feature { .. }))
    }

    /// Total symbol count, used to bound the growth of rewrites.
    pub fn size(&self) -> usize {
        self.tbox
            .iter()
            .map(|g| g.lhs.size() + g.rhs.size())
            .sum::<usize>()
            + self
                .abox
                .iter()
                .map(|a| match a {
                    Assertion::Concept { concept, .. } => 1 + concept.size(),
                    Assertion::Role { .. } => 3,
                    Assertion::Predicate { args, .. } => 1 + 2 * args.len(),
                    Assertion::Feature { .. } => 3,
                })
                .sum::<usize>()
    }

    /// Checks arities, constants and the role/feature separation.
    pub fn validate(&self) -> Result<(), OntologyError> {
        let domain = self.domain.domain();
        let d = domain.descriptor();
        let mut result = Ok(());
        for c in self.concepts() {
            c.visit_post(&mut |c| {
                if result.is_err() {
                    return;
                }
                if let Concept::CdExists(paths, p) | Concept::CdForall(paths, p) = c {
                    result = match p {
                        PredRef::Domain(p) => d.symbol(*p).map_err(Into::into).and_then(|sym| {
                            if sym.arity == paths.len() {
                                Ok(())
                            } else {
                                Err(OntologyError::RestrictionArity {
                                    pred: sym.name.to_string(),
                                    arity: sym.arity,
                                    paths: paths.len(),
                                })
                            }
                        }),
                        PredRef::Singleton(v) => {
                            domain.check_value(v).map_err(Into::into).and_then(|()| {
                                if paths.len() == 1 {
                                    Ok(())
                                } else {
                                    Err(OntologyError::RestrictionArity {
                                        pred: alloc::format!("={v}"),
                                        arity: 1,
                                        paths: paths.len(),
                                    })
                                }
                            })
                        }
                    };
                }
            });
        }
        result?;
        for a in &self.abox {
            match a {
                Assertion::Predicate { pred, args } => {
                    let sym = d.symbol(*pred)?;
                    if sym.arity != args.len() {
                        return Err(OntologyError::AssertionArity {
                            pred: sym.name.to_string(),
                            arity: sym.arity,
                            found: args.len(),
                        });
                    }
                }
                Assertion::Feature { value, .. } => domain.check_value(value)?,
                _ => {}
            }
        }
        for (n, kinds) in self.names() {
            if kinds.contains(&NameKind::Role) && kinds.contains(&NameKind::Feature) {
                return Err(OntologyError::RoleFeatureClash(n.to_string()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdomain::rationals::LT;

    #[test]
    fn double_negation_collapses() {
        let a = Concept::atomic("A");
        assert_eq!(Concept::not(Concept::not(a.clone())), a);
    }

    #[test]
    fn role_feature_clash_is_rejected() {
        let mut o = Ontology::new(DomainTag::Q);
        let r = name("r");
        o.tbox.push(Gci::new(
            Concept::exists("r", Concept::Top),
            Concept::CdExists(
                alloc::vec![FeaturePath::plain(r.clone()), FeaturePath::plain(r)],
                PredRef::Domain(LT),
            ),
        ));
        assert!(matches!(o.validate(), Err(OntologyError::RoleFeatureClash(_))));
    }

    #[test]
    fn arity_is_checked() {
        let mut o = Ontology::new(DomainTag::Q);
        let f = FeaturePath::plain(name("f"));
        o.tbox.push(Gci::new(
            Concept::Top,
            Concept::CdExists(alloc::vec![f.clone(), f.clone(), f], PredRef::Domain(LT)),
        ));
        assert!(matches!(
            o.validate(),
            Err(OntologyError::RestrictionArity { .. })
        ));
    }

    #[test]
    fn individuals_keep_first_occurrence_order() {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(Assertion::Role {
            role: name("r"),
            from: name("b"),
            to: name("a"),
        });
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: Concept::Top,
        });
        assert_eq!(o.individuals(), alloc::vec![name("b"), name("a")]);
    }
}
