#![allow(dead_code)]

use std::path::PathBuf;

use alcd::parse_ontology;
use alcd_core::cdomain::{allen, rationals, DomainTag, Pred, Value};
use alcd_core::syntax::name;
use alcd_core::{Assertion, Concept, FeaturePath, Gci, Ontology, PredRef};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub name: String,
    pub ontology: Ontology,
    pub consistent: bool,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../ontologies")
}

fn load(sub: &str, consistent: bool) -> Vec<Case> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "alcd"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            Case {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                ontology: parse_ontology(&src).unwrap_or_else(|e| panic!("{}: {e}", p.display())),
                consistent,
            }
        })
        .collect()
}

pub fn consistent_suite() -> Vec<Case> {
    load("consistent", true)
}

pub fn inconsistent_suite() -> Vec<Case> {
    load("inconsistent", false)
}

pub fn full_suite() -> Vec<Case> {
    let mut all = consistent_suite();
    all.extend(inconsistent_suite());
    all
}

/// Random ontologies with at most 2 features, 2 roles, 4 axioms and 2
/// individuals.
pub struct Generator {
    domain: DomainTag,
    features: Vec<&'static str>,
    roles: Vec<&'static str>,
    individuals: Vec<&'static str>,
}

impl Generator {
    pub fn new(rng: &mut ChaCha8Rng) -> Self {
        let domain = if rng.random_bool(0.8) { DomainTag::Q } else { DomainTag::Allen };
        Generator {
            domain,
            features: ["f", "g"][..rng.random_range(1..=2)].to_vec(),
            roles: ["r", "s"][..rng.random_range(1..=2)].to_vec(),
            individuals: ["a", "b"][..rng.random_range(0..=2)].to_vec(),
        }
    }

    fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
        xs[rng.random_range(0..xs.len())].clone()
    }

    fn pred(&self, rng: &mut ChaCha8Rng) -> Pred {
        match self.domain {
            DomainTag::Q => Self::pick(rng, &[rationals::LT, rationals::EQ, rationals::GT]),
            DomainTag::Allen => Self::pick(
                rng,
                &[allen::BEFORE, allen::MEETS, allen::OVERLAPS, allen::DURING, allen::EQUALS, allen::STARTS],
            ),
        }
    }

    fn constant(&self, rng: &mut ChaCha8Rng) -> Value {
        match self.domain {
            DomainTag::Q => Self::pick(rng, &[Value::int(0), Value::int(1), Value::ratio(1, 2)]),
            DomainTag::Allen => Self::pick(rng, &[Value::interval(0, 1), Value::interval(1, 2)]),
        }
    }

    fn path(&self, rng: &mut ChaCha8Rng) -> FeaturePath {
        let f = name(Self::pick(rng, &self.features));
        if rng.random_bool(0.5) {
            FeaturePath::via(name(Self::pick(rng, &self.roles)), f)
        } else {
            FeaturePath::plain(f)
        }
    }

    fn leaf(&self, rng: &mut ChaCha8Rng) -> Concept {
        match rng.random_range(0..10) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            2..=4 => Concept::atomic(Self::pick(rng, &["A", "B"])),
            5 if self.domain == DomainTag::Q || rng.random_bool(0.5) => {
                let path = FeaturePath::plain(name(Self::pick(rng, &self.features)));
                let p = PredRef::Singleton(self.constant(rng));
                if rng.random_bool(0.5) {
                    Concept::CdExists(vec![path], p)
                } else {
                    Concept::CdForall(vec![path], p)
                }
            }
            _ => {
                let paths = vec![self.path(rng), self.path(rng)];
                let p = PredRef::Domain(self.pred(rng));
                if rng.random_bool(0.6) {
                    Concept::CdExists(paths, p)
                } else {
                    Concept::CdForall(paths, p)
                }
            }
        }
    }

    pub fn concept(&self, rng: &mut ChaCha8Rng, depth: u32) -> Concept {
        if depth == 0 || rng.random_bool(0.35) {
            return self.leaf(rng);
        }
        match rng.random_range(0..5) {
            0 => Concept::not(self.concept(rng, depth - 1)),
            1 => Concept::and(self.concept(rng, depth - 1), self.concept(rng, depth - 1)),
            2 => Concept::or(self.concept(rng, depth - 1), self.concept(rng, depth - 1)),
            3 => {
                let role = name(Self::pick(rng, &self.roles));
                Concept::Exists(role, Box::new(self.concept(rng, depth - 1)))
            }
            _ => {
                let role = name(Self::pick(rng, &self.roles));
                Concept::Forall(role, Box::new(self.concept(rng, depth - 1)))
            }
        }
    }

    fn assertion(&self, rng: &mut ChaCha8Rng) -> Assertion {
        let ind = |rng: &mut ChaCha8Rng| name(Self::pick(rng, &self.individuals));
        let feat = |rng: &mut ChaCha8Rng| name(Self::pick(rng, &self.features));
        match rng.random_range(0..10) {
            0..=4 => Assertion::Concept {
                individual: ind(rng),
                concept: self.concept(rng, 2),
            },
            5 | 6 => Assertion::Role {
                role: name(Self::pick(rng, &self.roles)),
                from: ind(rng),
                to: ind(rng),
            },
            7 | 8 => Assertion::Predicate {
                pred: self.pred(rng),
                args: vec![(ind(rng), feat(rng)), (ind(rng), feat(rng))],
            },
            _ => Assertion::Feature {
                individual: ind(rng),
                feature: feat(rng),
                value: self.constant(rng),
            },
        }
    }

    pub fn ontology(&self, rng: &mut ChaCha8Rng) -> Ontology {
        let mut o = Ontology::new(self.domain);
        for _ in 0..rng.random_range(1..=4) {
            if self.individuals.is_empty() || rng.random_bool(0.5) {
                let lhs = if rng.random_bool(0.5) { Concept::Top } else { self.concept(rng, 1) };
                o.tbox.push(Gci::new(lhs, self.concept(rng, 2)));
            } else {
                o.abox.push(self.assertion(rng));
            }
        }
        o
    }
}

pub fn random_ontology(rng: &mut ChaCha8Rng) -> Ontology {
    Generator::new(rng).ontology(rng)
}
