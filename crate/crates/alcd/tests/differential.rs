//! Random ontologies: whenever the bounded search finds a model, the
//! reasoner must answer consistent.

mod common;

use std::time::Instant;

use alcd::print_ontology;
use alcd_core::decide_consistency;
use alcd_core::oracle::{bounded_model_search_with_budget, check_model, SearchOutcome};
use alcd_core::reductions::{reduce_feature_assertions, reduce_singleton_predicates};
use alcd_core::Ontology;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 200_000;

fn searchable(o: &Ontology) -> Ontology {
    reduce_feature_assertions(&reduce_singleton_predicates(o)).unwrap()
}

#[test]
fn models_found_by_search_imply_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut found, mut consistent) = (0, 0);
    let start = Instant::now();
    for k in 0..150 {
        let o = common::random_ontology(&mut rng);
        let text = print_ontology(&o);
        let verdict = decide_consistency(&o).unwrap_or_else(|e| panic!("case {k}: {e}\n{text}"));
        let reduced = searchable(&o);
        let outcome = bounded_model_search_with_budget(&reduced, 3, BUDGET);
        consistent += verdict.consistent as usize;
        if let SearchOutcome::Found(m) = outcome {
            found += 1;
            assert!(check_model(&m, &reduced, None).unwrap());
            assert!(verdict.consistent, "case {k}: model found but judged inconsistent\n{text}");
        }
    }
    eprintln!("found {found}, consistent {consistent}, {:?}", start.elapsed());
    assert!(found >= 50, "too few models found ({found}) for the comparison to mean much");
}
