mod support;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rasm::asm::{collapse, eval_rule, Env, OpRegistry, UpdateMultiset};
use rasm::conformance::{self, generate, naive};
use rasm::frontend::{parse_rule, parse_state};
use rasm::Value;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn evaluator_matches_reference(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Err(e) = support::naive_instance(&mut rng) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn commutative_groups_fold_in_any_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Err(e) = support::collapse_group_instance(&mut rng) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn evaluation_is_deterministic_and_collapse_ignores_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = generate::rule(&mut rng, generate::RuleShape { depth: 4, partials: true });
        let s = generate::state(&mut rng, 5);
        let a = eval_rule(&s, &Env::new(), &r);
        prop_assert_eq!(&a, &eval_rule(&s, &Env::new(), &r));
        if let Ok(um) = a {
            let ops = OpRegistry::default();
            let mut items = um.items().to_vec();
            items.shuffle(&mut rng);
            prop_assert_eq!(collapse(&s, &um, &ops), collapse(&s, &UpdateMultiset::from_vec(items), &ops));
        }
    }
}

#[test]
fn reference_agrees_on_most_generated_pairs_without_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ok = (0..300).filter(|_| support::naive_instance(&mut rng).unwrap()).count();
    assert!(ok >= 150, "only {ok} of 300 pairs evaluated without error");
}

#[test]
fn trivial_reference_cases() {
    let s = parse_state("symbol f/0 symbol g/1 universe 1 2 3 program f := 0 end").unwrap();
    let empty = parse_rule("PAR ENDPAR").unwrap();
    assert!(naive::update_set(&s, &empty).unwrap().is_empty());
    let never = parse_rule("FORALL x WITH false DO g(x) := x ENDDO").unwrap();
    assert!(naive::update_set(&s, &never).unwrap().is_empty());
    assert!(conformance::check_naive_equivalence(&s, &never).passed());
    let all = parse_rule("FORALL x WITH x > 1 DO g(x) := x + 1 ENDDO").unwrap();
    let us = naive::update_set(&s, &all).unwrap();
    assert_eq!(us.len(), 2);
    assert!(conformance::check_naive_equivalence(&s, &all).passed());
}

#[test]
fn clashing_assignments_are_inconsistent_in_both() {
    let s = parse_state("symbol f/0 program f := 0 end").unwrap();
    let r = parse_rule("PAR f := 1 f := 2 ENDPAR").unwrap();
    let us = naive::update_set(&s, &r).unwrap();
    assert!(!us.is_consistent());
    assert!(conformance::check_naive_equivalence(&s, &r).passed());
}

#[test]
fn mixed_shared_and_ordinary_updates_clash() {
    let s = parse_state("symbol f/0 f = 1 program f := 0 end").unwrap();
    let r = parse_rule("PAR f := 3 f <<= add(2) ENDPAR").unwrap();
    let um = eval_rule(&s, &Env::new(), &r).unwrap();
    assert!(!collapse(&s, &um, &OpRegistry::default()).is_consistent());
    let r = parse_rule("PAR f <<= add(2) f <<= add(5) ENDPAR").unwrap();
    let um = eval_rule(&s, &Env::new(), &r).unwrap();
    let us = collapse(&s, &um, &OpRegistry::default());
    assert_eq!(us.updates.iter().next().unwrap().1, Value::Nat(8));
}
