mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rasm::asm::{apply_update_set, collapse, Env, Evaluator, Location, OpRegistry};
use rasm::conformance::{generate, run_states};
use rasm::frontend::{parse_rule, parse_state};
use rasm::reflection::{
    beta, beta_rule, drop_rule, raise_program, raise_rule, step, tree_diff_theta, AlgebraTerm, StepError,
};
use rasm::tree::NodePath;
use rasm::Value;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_diff_reaches_the_target(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Err(e) = support::diff_instance(&mut rng) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn beta_is_stable_under_normalisation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = generate::rule(&mut rng, generate::RuleShape { depth: 4, partials: true });
        let normal = raise_rule(&drop_rule(&r)).unwrap();
        prop_assert_eq!(beta(&drop_rule(&r)).unwrap(), beta_rule(&normal));
    }
}

#[test]
fn demos_match_their_oracles() {
    for name in ["increment", "self_rewrite", "grow_signature"] {
        let n = support::check_expect(name).unwrap_or_else(|e| panic!("{e}"));
        assert!(n > 0, "{name} has an empty oracle");
    }
}

#[test]
fn static_program_runs_like_its_raised_rule() {
    let s0 = support::load_demo("increment");
    let (_, rule) = raise_program(&s0).unwrap();
    let ops = OpRegistry::default();
    let mut direct = s0.clone();
    for reflective in run_states(&s0, 6).iter().skip(1) {
        let um = Evaluator::new(&direct, &direct.signature, &ops).rule(&Env::new(), &rule).unwrap();
        direct = apply_update_set(&direct, &collapse(&direct, &um, &ops));
        assert_eq!(&direct, reflective);
    }
}

#[test]
fn signatures_grow_along_demo_runs() {
    for name in ["increment", "self_rewrite", "grow_signature"] {
        let run = run_states(&support::load_demo(name), 5);
        for w in run.windows(2) {
            assert!(w[0].signature.is_subset_of(&w[1].signature));
        }
    }
}

#[test]
fn identical_programs_diff_to_the_root() {
    let s = support::load_demo("increment");
    let Value::Tree(t) = s.pgm() else { panic!() };
    assert_eq!(tree_diff_theta(&t, &t).unwrap(), AlgebraTerm::Subtree(NodePath::root()));
    assert_eq!(tree_diff_theta(&t, &t).unwrap().to_string(), "subtree@root");
}

#[test]
fn dropping_a_symbol_from_pgm_is_rejected() {
    let s = parse_state(
        "symbol f/0 symbol g/0 program pgm := #pgm⟨signature⟨func⟨name=⟨@pgm⟩ arity=⟨0⟩⟩⟩ rule⟨par⟩⟩ end",
    )
    .unwrap();
    assert!(matches!(step(&s, &OpRegistry::default()), Err(StepError::SignatureShrunk(_))));
}

#[test]
fn new_symbols_must_come_from_the_reserve() {
    let s = parse_state(
        "symbol f/0 program pgm <<= right_extend((0,), label_hedge<func>(leaf<name>(@fresh), leaf<arity>(0))) end",
    )
    .unwrap();
    assert!(matches!(step(&s, &OpRegistry::default()), Err(StepError::NotReserve(_))));
}

#[test]
fn malformed_program_is_reported() {
    let s = parse_state(
        "symbol f/0 program pgm := #pgm⟨signature⟨func⟨name=⟨@pgm⟩ arity=⟨0⟩⟩ func⟨name=⟨@f⟩ arity=⟨0⟩⟩⟩ rule⟨oops⟩⟩ end",
    )
    .unwrap();
    let s1 = step(&s, &OpRegistry::default()).unwrap().next;
    assert!(matches!(step(&s1, &OpRegistry::default()), Err(StepError::Malformed(_))));
}

#[test]
fn inconsistent_steps_stutter() {
    let s = parse_state("symbol f/0 f = 0 program PAR f := 1 f := 2 ENDPAR end").unwrap();
    let r = step(&s, &OpRegistry::default()).unwrap();
    assert!(!r.consistent);
    assert_eq!(r.next, s);
    assert_eq!(r.next.get(&Location::nullary("f")), Value::Nat(0));
}

#[test]
fn pgm_reraises_after_self_rewrite() {
    let run = run_states(&support::load_demo("self_rewrite"), 2);
    let (_, rule) = raise_program(&run[2]).unwrap();
    assert_eq!(rule, parse_rule("f := 2").unwrap());
}
