//! Three-valued evaluation of concepts over finite, possibly partial
//! structures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::cdomain::{ConcreteDomain, DomainTag, Value};
use crate::error::DomainError;
use crate::syntax::{Assertion, Concept, FeaturePath, Name, Ontology, PredRef};

/// Kleene truth values, ordered `False < Unknown < True`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    pub fn of(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        self.min(other)
    }

    pub fn or(self, other: Truth) -> Truth {
        self.max(other)
    }
}

/// A finite structure whose parts may be undecided.
pub trait View {
    fn size(&self) -> usize;
    fn domain(&self) -> &'static dyn ConcreteDomain;
    fn name(&self, concept: &Name, e: usize) -> Truth;
    fn edge(&self, role: &Name, from: usize, to: usize) -> Truth;
    fn defined(&self, e: usize, feature: &Name) -> Truth;
    /// Whether the predicate holds on the features' values, assuming all of
    /// them are defined.
    fn holds(&self, pred: &PredRef, args: &[(usize, &Name)]) -> Result<Truth, DomainError>;
}

/// A finite interpretation with a partial feature valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub domain: DomainTag,
    pub size: usize,
    pub concepts: BTreeMap<Name, BTreeSet<usize>>,
    pub roles: BTreeMap<Name, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<Name, usize>,
    pub features: BTreeMap<(usize, Name), Value>,
}

impl FiniteInterpretation {
    pub fn new(domain: DomainTag, size: usize) -> Self {
        FiniteInterpretation {
            domain,
            size,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            individuals: BTreeMap::new(),
            features: BTreeMap::new(),
        }
    }

    pub fn value(&self, e: usize, f: &Name) -> Option<&Value> {
        self.features.get(&(e, f.clone()))
    }
}

impl View for FiniteInterpretation {
    fn size(&self) -> usize {
        self.size
    }

    fn domain(&self) -> &'static dyn ConcreteDomain {
        self.domain.domain()
    }

    fn name(&self, concept: &Name, e: usize) -> Truth {
        Truth::of(self.concepts.get(concept).is_some_and(|s| s.contains(&e)))
    }

    fn edge(&self, role: &Name, from: usize, to: usize) -> Truth {
        Truth::of(self.roles.get(role).is_some_and(|s| s.contains(&(from, to))))
    }

    fn defined(&self, e: usize, feature: &Name) -> Truth {
        Truth::of(self.value(e, feature).is_some())
    }

    fn holds(&self, pred: &PredRef, args: &[(usize, &Name)]) -> Result<Truth, DomainError> {
        let values: Vec<Value> = args
            .iter()
            .map(|(e, f)| self.value(*e, f).cloned().expect("defined feature"))
            .collect();
        let d = self.domain.domain();
        match pred {
            PredRef::Domain(p) => Ok(Truth::of(d.holds(*p, &values)?)),
            PredRef::Singleton(c) => {
                d.check_value(c)?;
                Ok(Truth::of(values[0] == *c))
            }
        }
    }
}

/// Evaluates `c` at element `e`. Elements in `leaves` have an unknown
/// continuation: restrictions looking at their successors are never false
/// (existential ones) or never true (universal ones) there.
pub fn evaluate<V: View + ?Sized>(
    v: &V,
    c: &Concept,
    e: usize,
    leaves: &BTreeSet<usize>,
) -> Result<Truth, DomainError> {
    let leaf = leaves.contains(&e);
    Ok(match c {
        Concept::Top => Truth::True,
        Concept::Bottom => Truth::False,
        Concept::Atomic(a) => v.name(a, e),
        Concept::Not(d) => evaluate(v, d, e, leaves)?.not(),
        Concept::And(a, b) => evaluate(v, a, e, leaves)?.and(evaluate(v, b, e, leaves)?),
        Concept::Or(a, b) => evaluate(v, a, e, leaves)?.or(evaluate(v, b, e, leaves)?),
        Concept::Exists(r, d) => {
            let mut t = Truth::False;
            for x in 0..v.size() {
                let edge = v.edge(r, e, x);
                if edge == Truth::False {
                    continue;
                }
                t = t.or(edge.and(evaluate(v, d, x, leaves)?));
            }
            if leaf {
                t.max(Truth::Unknown)
            } else {
                t
            }
        }
        Concept::Forall(r, d) => {
            let mut t = Truth::True;
            for x in 0..v.size() {
                let edge = v.edge(r, e, x);
                if edge == Truth::False {
                    continue;
                }
                t = t.and(edge.not().or(evaluate(v, d, x, leaves)?));
            }
            if leaf {
                t.min(Truth::Unknown)
            } else {
                t
            }
        }
        Concept::CdExists(paths, pred) => {
            let t = cd_exists(v, paths, pred, e)?;
            if leaf && paths.iter().any(|p| p.role.is_some()) {
                t.max(Truth::Unknown)
            } else {
                t
            }
        }
        Concept::CdForall(paths, pred) => {
            // ∀p̄.P: every tuple of values satisfies P.
            let t = cd_tuples(v, paths, e, &mut |args, present| {
                Ok(present.not().or(v.holds(pred, args)?))
            }, Truth::True, Truth::and)?;
            if leaf && paths.iter().any(|p| p.role.is_some()) {
                t.min(Truth::Unknown)
            } else {
                t
            }
        }
    })
}

fn cd_exists<V: View + ?Sized>(
    v: &V,
    paths: &[FeaturePath],
    pred: &PredRef,
    e: usize,
) -> Result<Truth, DomainError> {
    cd_tuples(
        v,
        paths,
        e,
        &mut |args, present| Ok(present.and(v.holds(pred, args)?)),
        Truth::False,
        Truth::or,
    )
}

/// Folds `visit(args, present)` over every tuple of path ends from `e`,
/// where `present` says whether the tuple is really there (edges exist and
/// features are defined). Tuples that are certainly absent are skipped.
fn cd_tuples<V: View + ?Sized>(
    v: &V,
    paths: &[FeaturePath],
    e: usize,
    visit: &mut dyn FnMut(&[(usize, &Name)], Truth) -> Result<Truth, DomainError>,
    init: Truth,
    fold: fn(Truth, Truth) -> Truth,
) -> Result<Truth, DomainError> {
    let mut ends: Vec<Vec<(usize, Truth)>> = Vec::with_capacity(paths.len());
    for p in paths {
        let mut options = Vec::new();
        match &p.role {
            None => options.push((e, v.defined(e, &p.feature))),
            Some(r) => {
                for x in 0..v.size() {
                    options.push((x, v.edge(r, e, x).and(v.defined(x, &p.feature))));
                }
            }
        }
        options.retain(|&(_, t)| t != Truth::False);
        ends.push(options);
    }
    let mut acc = init;
    let mut idx = vec![0usize; paths.len()];
    if ends.iter().any(|o| o.is_empty()) {
        return Ok(acc);
    }
    loop {
        let mut present = Truth::True;
        let mut args = Vec::with_capacity(paths.len());
        for (j, p) in paths.iter().enumerate() {
            let (x, t) = ends[j][idx[j]];
            present = present.and(t);
            args.push((x, &p.feature));
        }
        acc = fold(acc, visit(&args, present)?);
        let mut j = paths.len();
        loop {
            if j == 0 {
                return Ok(acc);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < ends[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// The truth of an assertion; `individual` maps names to elements.
pub(crate) fn assertion_truth<V: View + ?Sized>(
    v: &V,
    a: &Assertion,
    individual: &dyn Fn(&Name) -> Option<usize>,
    leaves: &BTreeSet<usize>,
) -> Result<Truth, DomainError> {
    let el = |n: &Name| individual(n).expect("individuals are mapped");
    Ok(match a {
        Assertion::Concept { individual, concept } => evaluate(v, concept, el(individual), leaves)?,
        Assertion::Role { role, from, to } => v.edge(role, el(from), el(to)),
        Assertion::Predicate { pred, args } => {
            let ends: Vec<(usize, &Name)> = args.iter().map(|(a, f)| (el(a), f)).collect();
            let mut present = Truth::True;
            for &(x, f) in &ends {
                present = present.and(v.defined(x, f));
            }
            if present == Truth::False {
                Truth::False
            } else {
                present.and(v.holds(&PredRef::Domain(*pred), &ends)?)
            }
        }
        Assertion::Feature {
            individual,
            feature,
            value,
        } => {
            let x = el(individual);
            let present = v.defined(x, feature);
            if present == Truth::False {
                Truth::False
            } else {
                present.and(v.holds(&PredRef::Singleton(value.clone()), &[(x, feature)])?)
            }
        }
    })
}

/// Whether `i` is a model of `o`: every GCI holds at every element and every
/// assertion holds. Elements in `leaves` are excused from obligations about
/// their successors.
pub fn check_model(
    i: &FiniteInterpretation,
    o: &Ontology,
    leaves: Option<&BTreeSet<usize>>,
) -> Result<bool, DomainError> {
    let empty = BTreeSet::new();
    let leaves = leaves.unwrap_or(&empty);
    for value in i.features.values() {
        i.domain.domain().check_value(value)?;
    }
    for g in &o.tbox {
        let c = Concept::or(Concept::not(g.lhs.clone()), g.rhs.clone());
        for e in 0..i.size {
            if evaluate(i, &c, e, leaves)? == Truth::False {
                return Ok(false);
            }
        }
    }
    let lookup = |n: &Name| i.individuals.get(n).copied();
    for a in &o.abox {
        let mapped = match a {
            Assertion::Concept { individual, .. } | Assertion::Feature { individual, .. } => {
                lookup(individual).is_some()
            }
            Assertion::Role { from, to, .. } => lookup(from).is_some() && lookup(to).is_some(),
            Assertion::Predicate { args, .. } => args.iter().all(|(a, _)| lookup(a).is_some()),
        };
        if !mapped || assertion_truth(i, a, &lookup, leaves)? == Truth::False {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdomain::rationals::{EQ, GT, LT};
    use crate::syntax::{name, Gci};

    fn one_element(value: Value) -> FiniteInterpretation {
        let mut i = FiniteInterpretation::new(DomainTag::Q, 1);
        i.individuals.insert(name("a"), 0);
        i.features.insert((0, name("f")), value);
        i
    }

    fn assert_a(c: Concept) -> Ontology {
        let mut o = Ontology::new(DomainTag::Q);
        o.abox.push(Assertion::Concept {
            individual: name("a"),
            concept: c,
        });
        o
    }

    fn ff(p: crate::cdomain::Pred) -> Concept {
        let f = FeaturePath::plain(name("f"));
        Concept::CdExists(vec![f.clone(), f], PredRef::Domain(p))
    }

    #[test]
    fn reflexive_equality_holds_and_strict_order_fails() {
        let i = one_element(Value::int(0));
        assert!(check_model(&i, &assert_a(ff(EQ)), None).unwrap());
        assert!(!check_model(&i, &assert_a(ff(LT)), None).unwrap());
    }

    #[test]
    fn role_path_compares_with_successor() {
        let mut i = FiniteInterpretation::new(DomainTag::Q, 2);
        i.individuals.insert(name("a"), 0);
        i.roles.entry(name("r")).or_default().insert((0, 1));
        i.features.insert((0, name("f")), Value::int(1));
        i.features.insert((1, name("f")), Value::int(0));
        let c = Concept::CdExists(
            vec![FeaturePath::plain(name("f")), FeaturePath::via(name("r"), name("f"))],
            PredRef::Domain(GT),
        );
        assert!(check_model(&i, &assert_a(c.clone()), None).unwrap());
        let swapped = Concept::CdExists(
            vec![FeaturePath::via(name("r"), name("f")), FeaturePath::plain(name("f"))],
            PredRef::Domain(GT),
        );
        assert!(!check_model(&i, &assert_a(swapped), None).unwrap());
    }

    #[test]
    fn leaves_are_excused_from_successor_obligations() {
        let i = one_element(Value::int(0));
        let mut o = Ontology::new(DomainTag::Q);
        o.tbox.push(Gci::new(Concept::Top, Concept::exists("r", Concept::Top)));
        assert!(!check_model(&i, &o, None).unwrap());
        let leaves: BTreeSet<usize> = [0].into_iter().collect();
        assert!(check_model(&i, &o, Some(&leaves)).unwrap());
        o.tbox.push(Gci::new(Concept::Top, Concept::atomic("A")));
        assert!(!check_model(&i, &o, Some(&leaves)).unwrap());
    }

    #[test]
    fn singleton_compares_exactly() {
        let i = one_element(Value::ratio(1, 2));
        let c = Concept::CdExists(
            vec![FeaturePath::plain(name("f"))],
            PredRef::Singleton(Value::ratio(2, 4)),
        );
        assert!(check_model(&i, &assert_a(c), None).unwrap());
    }

    #[test]
    fn undefined_feature_makes_universal_restriction_vacuous() {
        let i = FiniteInterpretation::new(DomainTag::Q, 1);
        let f = FeaturePath::plain(name("f"));
        let mut o = Ontology::new(DomainTag::Q);
        o.tbox.push(Gci::new(
            Concept::Top,
            Concept::CdForall(vec![f.clone(), f.clone()], PredRef::Domain(LT)),
        ));
        assert!(check_model(&i, &o, None).unwrap());
        o.tbox.push(Gci::new(Concept::Top, Concept::CdExists(vec![f.clone(), f], PredRef::Domain(EQ))));
        assert!(!check_model(&i, &o, None).unwrap());
    }
}
