//! Executable versions of the behavioural postulates, checked on concrete
//! states and runs, plus an independent reference evaluator.

pub mod controls;
pub mod generate;
pub mod naive;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asm::{
    collapse, Env, EvalError, Evaluator, Location, OpRegistry, Reserve, Rule, State, Term,
    UpdateMultiset, PGM,
};
use crate::reflection::{beta_rule, import_placeholder, raise_program, step, StepError};
use crate::value::{Name, Value};

/// A transition function under test.
pub type StepFn<'a> = dyn Fn(&State) -> Result<State, StepError> + 'a;

/// Computes the update multiset of a raised rule in a state, drawing
/// imported atoms from `reserve`.
pub type MultisetFn<'a> = dyn Fn(&State, &Rule, &Reserve) -> Result<UpdateMultiset, EvalError> + 'a;

/// The machine's own transition function.
pub fn reflective_step(s: &State) -> Result<State, StepError> {
    step(s, &OpRegistry::default()).map(|r| r.next)
}

/// The machine's own update multiset.
pub fn reflective_multiset(s: &State, r: &Rule, reserve: &Reserve) -> Result<UpdateMultiset, EvalError> {
    let ops = OpRegistry::default();
    let sig = match raise_program(s) {
        Ok((sig, _)) => sig,
        Err(_) => s.signature.clone(),
    };
    let mut ev = Evaluator::new(s, &sig, &ops);
    ev.reserve = reserve.clone();
    ev.rule(&Env::new(), r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub instance: usize,
    pub message: String,
    /// The states needed to replay the failure.
    pub states: Vec<State>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    /// Instances whose precondition did not hold, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), instances: 0, skipped: Vec::new(), violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Instances whose precondition held.
    pub fn checked(&self) -> usize {
        self.instances - self.skipped.len()
    }

    fn violation(&mut self, instance: usize, message: impl Into<String>, states: Vec<State>) {
        self.violations.push(Violation { instance, message: message.into(), states });
    }

    /// Folds another report of the same check into this one, renumbering its
    /// instances.
    pub fn absorb(&mut self, other: CheckReport) {
        let base = self.instances;
        self.instances += other.instances;
        self.skipped.extend(other.skipped.into_iter().map(|(i, m)| (i + base, m)));
        self.violations.extend(other.violations.into_iter().map(|mut v| {
            v.instance += base;
            v
        }));
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} checked, {} violations",
            self.name,
            self.instances,
            self.checked(),
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n  instance {}: {}", v.instance, v.message)?;
        }
        Ok(())
    }
}

/// Atoms an isomorphism may move: everything except symbol names (which the
/// program encoding stores as atoms), operator names and reserve atoms.
pub fn movable_atoms(s: &State) -> BTreeSet<Name> {
    let ops = OpRegistry::default();
    let fixed: BTreeSet<&str> = s
        .signature
        .iter()
        .map(|f| f.name.as_str())
        .chain(ops.names().map(Name::as_str))
        .collect();
    let mut program_symbols = BTreeSet::new();
    if let Ok((sig, _)) = raise_program(s) {
        program_symbols.extend(sig.iter().map(|f| f.name.clone()));
    }
    s.atoms()
        .into_iter()
        .filter(|a| {
            !fixed.contains(a.as_str())
                && !program_symbols.contains(a)
                && !a.as_str().starts_with('$')
        })
        .collect()
}

/// A random bijection on the movable atoms: a permutation of them, with
/// some images replaced by fresh atoms.
pub fn random_bijection(s: &State, rng: &mut impl Rng, tag: usize) -> BTreeMap<Name, Name> {
    let movable: Vec<Name> = movable_atoms(s).into_iter().collect();
    let taken = s.atoms();
    let mut images = movable.clone();
    images.shuffle(rng);
    for (k, img) in images.iter_mut().enumerate() {
        if rng.gen_bool(0.5) {
            let fresh = Name::new(format!("iso{tag}_{k}"));
            if !taken.contains(&fresh) {
                *img = fresh;
            }
        }
    }
    movable.into_iter().zip(images).collect()
}

/// `step(π(s)) = π(step(s))` for `trials` random bijections π.
pub fn check_isomorphism_closure(s: &State, trials: usize, seed: u64) -> CheckReport {
    check_isomorphism_closure_with(s, trials, seed, &reflective_step)
}

pub fn check_isomorphism_closure_with(
    s: &State,
    trials: usize,
    seed: u64,
    step_fn: &StepFn<'_>,
) -> CheckReport {
    let mut report = CheckReport::new("isomorphism closure");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direct = step_fn(s);
    for trial in 0..trials {
        report.instances += 1;
        let pi = random_bijection(s, &mut rng, trial);
        let renamed = match s.rename(&pi) {
            Ok(r) => r,
            Err(e) => {
                report.skipped.push((trial, e.to_string()));
                continue;
            }
        };
        let lhs = step_fn(&renamed);
        let rhs = direct.as_ref().map(|n| n.rename(&pi));
        let ok = match (&lhs, &rhs) {
            (Ok(a), Ok(Ok(b))) => a == b,
            (Err(a), Err(b)) => std::mem::discriminant(a) == std::mem::discriminant(b),
            _ => false,
        };
        if !ok {
            let pairs: Vec<String> = pi.iter().map(|(a, b)| format!("@{a}->@{b}")).collect();
            report.violation(
                trial,
                format!("step does not commute with [{}]", pairs.join(", ")),
                vec![s.clone(), renamed],
            );
        }
    }
    report
}

/// Signature containment between consecutive states of a run.
pub fn check_signature_monotonicity(run: &[State]) -> CheckReport {
    let mut report = CheckReport::new("signature monotonicity");
    for (i, w) in run.windows(2).enumerate() {
        report.instances += 1;
        let missing = w[0].signature.missing_from(&w[1].signature);
        if !missing.is_empty() {
            let names: Vec<String> = missing.iter().map(|f| f.to_string()).collect();
            report.violation(i, format!("step {} drops {}", i + 1, names.join(", ")), w.to_vec());
        }
    }
    report
}

/// All initial states hold the same program.
pub fn check_initial_agreement(inits: &[State]) -> CheckReport {
    let mut report = CheckReport::new("initial agreement");
    let Some(first) = inits.first() else { return report };
    for (i, s) in inits.iter().enumerate() {
        report.instances += 1;
        if s.pgm() != first.pgm() {
            report.violation(i, format!("initial state {i} holds a different pgm"), vec![first.clone(), s.clone()]);
        }
    }
    report
}

/// Values of the extracted terms of `r` in `s`. Variables left free by
/// `IMPORT` are bound to a fixed placeholder.
pub fn beta_values(s: &State, r: &Rule) -> Vec<Result<Value, EvalError>> {
    let ops = OpRegistry::default();
    let sig = match raise_program(s) {
        Ok((sig, _)) => sig,
        Err(_) => s.signature.clone(),
    };
    let ev = Evaluator::new(s, &sig, &ops);
    beta_rule(r)
        .iter()
        .map(|t: &Term| {
            let env = t
                .free_vars()
                .into_iter()
                .fold(Env::new(), |env, x| env.bind(x, import_placeholder()));
            ev.term(&env, t)
        })
        .collect()
}

/// Strong coincidence over `{pgm}`: equal programs and equal values of every
/// extracted term. When it holds, the update multisets must agree.
pub fn check_bounded_exploration(pairs: &[(State, State)]) -> CheckReport {
    check_bounded_exploration_with(pairs, &reflective_multiset)
}

pub fn check_bounded_exploration_with(pairs: &[(State, State)], multiset: &MultisetFn<'_>) -> CheckReport {
    let mut report = CheckReport::new("bounded exploration");
    for (i, (s1, s2)) in pairs.iter().enumerate() {
        report.instances += 1;
        if s1.signature != s2.signature {
            report.skipped.push((i, "states do not share a signature".into()));
            continue;
        }
        if s1.pgm() != s2.pgm() {
            report.skipped.push((i, "coincidence precondition failed: pgm differs".into()));
            continue;
        }
        let rule = match raise_program(s1) {
            Ok((_, r)) => r,
            Err(e) => {
                report.skipped.push((i, format!("malformed program: {e}")));
                continue;
            }
        };
        if beta_values(s1, &rule) != beta_values(s2, &rule) {
            report.skipped.push((i, "coincidence precondition failed: extracted terms differ".into()));
            continue;
        }
        let m1 = multiset(s1, &rule, &s1.reserve);
        let m2 = multiset(s2, &rule, &s1.reserve);
        if m1 != m2 {
            report.violation(i, "coinciding states yield different update multisets", vec![s1.clone(), s2.clone()]);
        }
    }
    report
}

/// Pairs for the bounded-exploration check built from a run: identical
/// copies, copies with an extra universe value, copies differing on a
/// location the program never mentions, and pairs of run states.
pub fn exploration_pairs(run: &[State], n: usize, seed: u64) -> Vec<(State, State)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    if run.is_empty() {
        return out;
    }
    for i in 0..n {
        let s1 = run[i % run.len()].clone();
        let mut s2 = s1.clone();
        match i % 4 {
            0 => {}
            1 => {
                let taken = s1.atoms();
                let fresh = (0..).map(|k| Name::new(format!("extra{i}_{k}"))).find(|a| !taken.contains(a)).unwrap();
                s2.universe.insert(Value::Atom(fresh));
            }
            2 => {
                let read = raise_program(&s1).map(|(_, r)| r.symbols()).unwrap_or_default();
                let spare = s1
                    .signature
                    .iter()
                    .filter(|f| f.name.as_str() != PGM && !read.contains(&f.name))
                    .map(|f| (f.name.clone(), f.arity))
                    .collect::<Vec<_>>();
                match spare.choose(&mut rng) {
                    Some((name, arity)) => {
                        let args = (0..*arity).map(|_| Value::Nat(rng.gen_range(0..3))).collect();
                        let loc = Location { symbol: name.clone(), args, path: Default::default() };
                        let _ = s2.set(loc, Value::Nat(rng.gen_range(100..200)));
                    }
                    None => {
                        s2.universe.insert(Value::Nat(rng.gen_range(1000..2000)));
                    }
                }
            }
            _ => {
                s2 = run[rng.gen_range(0..run.len())].clone();
            }
        }
        out.push((s1, s2));
    }
    out
}

/// `evalRule` followed by `collapse` against the reference evaluator.
pub fn check_naive_equivalence(s: &State, r: &Rule) -> CheckReport {
    let mut report = CheckReport::new("naive equivalence");
    report.instances = 1;
    if r.contains_partial() {
        report.skipped.push((0, "rule contains a partial assignment".into()));
        return report;
    }
    let ops = OpRegistry::default();
    let fast = Evaluator::new(s, &s.signature, &ops)
        .rule(&Env::new(), r)
        .map(|um| collapse(s, &um, &ops));
    let slow = naive::update_set(s, r);
    let agree = match (&fast, &slow) {
        (Ok(a), Ok(b)) => a == b,
        (Err(_), Err(_)) => true,
        _ => false,
    };
    if !agree {
        report.violation(
            0,
            format!(
                "rule {} gives {:?} but the reference gives {:?}",
                crate::frontend::print_rule_compact(r),
                fast,
                slow
            ),
            vec![s.clone()],
        );
    }
    report
}

/// Runs `steps` transitions (fewer if a step fails or a fixpoint is
/// reached) and returns every state visited, the initial one included.
pub fn run_states(s: &State, steps: usize) -> Vec<State> {
    let mut out = vec![s.clone()];
    for _ in 0..steps {
        let Ok(next) = reflective_step(out.last().unwrap()) else { break };
        let fix = next.same_content(out.last().unwrap());
        out.push(next);
        if fix {
            break;
        }
    }
    out
}

/// Every postulate check on one initial state: isomorphism closure along the
/// run, signature monotonicity, and bounded exploration on constructed pairs.
pub fn check_demo(s: &State, steps: usize, iso_trials: usize, pairs: usize, seed: u64) -> Vec<CheckReport> {
    let run = run_states(s, steps);
    let mut iso = CheckReport::new("isomorphism closure");
    for k in 0..iso_trials {
        let state = &run[k % run.len()];
        iso.absorb(check_isomorphism_closure(state, 1, seed.wrapping_add(k as u64)));
    }
    vec![
        iso,
        check_signature_monotonicity(&run),
        check_bounded_exploration(&exploration_pairs(&run, pairs, seed)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_state;

    fn counter() -> State {
        parse_state("universe @a @b @c symbol f/0 symbol g/1 f = 0 g(@a) = @b program f := f + 1 end").unwrap()
    }

    #[test]
    fn identity_bijection_is_harmless() {
        let s = counter();
        let next = reflective_step(&s).unwrap();
        assert_eq!(reflective_step(&s.rename(&BTreeMap::new()).unwrap()).unwrap(), next);
    }

    #[test]
    fn counter_is_closed_under_isomorphism() {
        let r = check_isomorphism_closure(&counter(), 50, 1);
        assert!(r.passed(), "{r}");
        assert_eq!(r.checked(), 50);
    }

    #[test]
    fn movable_atoms_exclude_symbols() {
        let m = movable_atoms(&counter());
        assert_eq!(m, ["a", "b", "c"].into_iter().map(Name::new).collect());
    }

    #[test]
    fn equal_states_coincide() {
        let s = counter();
        let r = check_bounded_exploration(&[(s.clone(), s)]);
        assert!(r.passed());
        assert_eq!(r.checked(), 1);
    }

    #[test]
    fn differing_read_location_fails_precondition() {
        let s1 = counter();
        let s2 = reflective_step(&s1).unwrap();
        let r = check_bounded_exploration(&[(s1, s2)]);
        assert!(r.passed());
        assert_eq!(r.skipped.len(), 1);
        assert!(r.skipped[0].1.contains("coincidence precondition failed"));
    }

    #[test]
    fn unread_location_keeps_coincidence() {
        let s1 = counter();
        let mut s2 = s1.clone();
        s2.set(Location::new("g", vec![Value::atom("c")]), Value::Nat(4)).unwrap();
        let r = check_bounded_exploration(&[(s1, s2)]);
        assert!(r.passed());
        assert_eq!(r.checked(), 1);
    }

    #[test]
    fn different_programs_disagree() {
        let a = counter();
        let b = parse_state("symbol f/0 program f := 7 end").unwrap();
        assert!(check_initial_agreement(&[a.clone(), a.clone()]).passed());
        assert!(!check_initial_agreement(&[a, b]).passed());
    }

    #[test]
    fn empty_par_and_unsatisfiable_forall_agree_with_reference() {
        let s = counter();
        assert!(check_naive_equivalence(&s, &Rule::skip()).passed());
        let r = Rule::forall("x", Term::lit(false), Rule::assign("f", vec![], Term::var("x")));
        assert!(check_naive_equivalence(&s, &r).passed());
    }
}
