//! Depth-2 witnesses of consistent ontologies are models up to their
//! leaves, and their valuations satisfy the assembled constraint system.

mod common;

use alcd::print_ontology;
use alcd_core::cdomain::ground_eval;
use alcd_core::elimination::FinitePrefixModel;
use alcd_core::oracle::check_model;
use alcd_core::{Ontology, Reasoner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn witness_problems(o: &Ontology, depth: usize) -> Option<String> {
    let reasoner = Reasoner::new(o).unwrap();
    let (verdict, model) = reasoner.witness(depth).unwrap();
    if !verdict.consistent {
        return None;
    }
    let m: FinitePrefixModel = model.expect("consistent verdicts come with a witness");
    let reduced = &reasoner.type_system().ontology;
    if !check_model(&m.interpretation, reduced, Some(&m.leaves)).unwrap() {
        return Some("interpretation is not a model up to its leaves".into());
    }
    let d = o.domain.domain();
    for atom in m.system.iter() {
        let args: Vec<_> = atom
            .args
            .iter()
            .map(|v| m.solution.get(v).cloned().expect("every variable is valued"))
            .collect();
        if !ground_eval(d, atom.pred, &args).unwrap() {
            return Some(format!("atom {atom:?} is violated"));
        }
    }
    None
}

#[test]
fn corpus_witnesses_are_models() {
    for case in common::consistent_suite() {
        if let Some(problem) = witness_problems(&case.ontology, 2) {
            panic!("{}: {problem}", case.name);
        }
    }
}

#[test]
fn random_witnesses_are_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..300 {
        let o = common::random_ontology(&mut rng);
        for depth in [1, 2] {
            if let Some(problem) = witness_problems(&o, depth) {
                panic!("case {k}, depth {depth}: {problem}\n{}", print_ontology(&o));
            }
        }
    }
}
