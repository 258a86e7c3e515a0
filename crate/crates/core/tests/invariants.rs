mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use geoproof::formula::{Atom, Substitution, Term};
use geoproof::prover::{check_proof, prove, CheckResult, Proof, ProofStep, SearchLimits};
use geoproof::tptp::{load_problem, parse_tptp, Problem, SupportAxiomOptions};

const I11: &str = include_str!("../fixtures/euclid_i11.p");
const EXAMPLE1: &str = include_str!("../fixtures/example1.p");
const EXISTENCE: &str = include_str!("../assets/existence.p");

fn distinct_pair() -> String {
    format!("{EXISTENCE}fof(swapped,conjecture,(? [X,Y] : (Y != X))).\n")
}

fn load(src: &str) -> Problem {
    load_problem(src, &SupportAxiomOptions::default()).unwrap()
}

fn small_limits() -> SearchLimits {
    SearchLimits {
        max_mp_steps: 6,
        ..Default::default()
    }
}

proptest! {
    #[test]
    fn substitution_composes(
        args in prop::collection::vec(prop::sample::select(vec!["X", "Y", "Z", "W", "a", "b"]), 1..4),
        s1 in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 2),
        s2 in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 2),
    ) {
        let atom = Atom::new("p", args.iter().map(|a| Term::parse(a)).collect());
        let first = Substitution::from_pairs([("X", s1[0]), ("Y", s1[1])]);
        let second = Substitution::from_pairs([("Z", s2[0]), ("W", s2[1])]);
        let stepwise = atom.apply_partial(&first).apply_partial(&second);
        let composed = atom.apply_partial(&first.compose(&second));
        prop_assert_eq!(stepwise, composed);
    }
}

#[test]
fn fixture_formulas_are_well_formed() {
    for src in [I11, EXAMPLE1, EXISTENCE] {
        let p = load(src);
        let mut names = HashSet::new();
        for f in p.theory.axioms.iter().chain(&p.conjectures) {
            f.validate().unwrap();
            assert!(names.insert(f.name.clone()), "duplicate {}", f.name);
            for a in f.atoms() {
                assert_eq!(p.theory.signature.arity(&a.pred), Some(a.args.len()));
            }
        }
    }
}

#[test]
fn proposition_11_listing_shape() {
    let entries = parse_tptp(I11).unwrap();
    let p = load(I11);
    assert_eq!(entries.len(), 20);
    assert_eq!(p.conjectures.len(), 1);
    assert_eq!(p.conjectures[0].name, "proposition_11");
    assert!(p.theory.axiom("lemma_extension").is_some());
}

#[test]
fn renaming_preserves_provability() {
    for src in [EXAMPLE1.to_string(), distinct_pair()] {
        let p = load(&src);
        let c = p.conjecture(None).unwrap();
        let avoid: BTreeSet<String> = c.universals.iter().chain(&c.existentials).cloned().collect();
        let renamed = c.rename_apart(&avoid);
        assert_ne!(&renamed, c);
        let a = prove(&p.theory, c, &small_limits());
        let b = prove(&p.theory, &renamed, &small_limits()).unwrap();
        assert!(a.is_ok());
        assert_eq!(check_proof(&p.theory, &renamed, &b), CheckResult::Valid);
    }
}

#[test]
fn deepening_level_is_minimal() {
    for src in [EXAMPLE1.to_string(), distinct_pair()] {
        let p = load(&src);
        let c = p.conjecture(None).unwrap();
        let proof = prove(&p.theory, c, &small_limits()).unwrap();
        if let Some(below) = proof.stats.deepening_level.checked_sub(1) {
            let lim = SearchLimits {
                max_mp_steps: below,
                ..Default::default()
            };
            assert!(prove(&p.theory, c, &lim).is_err());
        }
    }
}

#[test]
fn tampered_instantiation_is_rejected() {
    let p = load(EXAMPLE1);
    let c = p.conjecture(None).unwrap();
    let mut proof = prove(&p.theory, c, &small_limits()).unwrap();
    let ProofStep::Mp { instantiation, .. } = &mut proof.body[0] else {
        panic!("first step is MP");
    };
    *instantiation = Substitution::from_pairs([("X", "b")]);
    assert!(matches!(
        check_proof(&p.theory, c, &proof),
        CheckResult::Invalid { step_index: 0, .. }
    ));
}

#[test]
fn transcribed_proposition_11_replays() {
    let p = load(I11);
    let mut proof = Proof::from_json(include_str!("../fixtures/i11_transcribed.json")).unwrap();
    proof.recount();
    assert_eq!(check_proof(&p.theory, &p.conjectures[0], &proof), CheckResult::Valid);
    assert_eq!(proof.stats.mp_count, 17);
}

#[test]
fn translation_is_conservative_on_small_domains() {
    for src in [I11, EXAMPLE1] {
        common::fof::translation_agrees(src).unwrap();
    }
}
