//! The transition function of a reflective machine.

use thiserror::Error;

use super::encode::{ProgramTree, ReflectError};
use crate::asm::{
    apply_update_set, collapse, Env, EvalError, Evaluator, FunctionSymbol, OpRegistry, Rule,
    Signature, SignatureError, State, UpdateMultiset, UpdateSet,
};
use crate::value::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Malformed(#[from] ReflectError),
    #[error("signature shrunk: {} missing", fmt_symbols(.0))]
    SignatureShrunk(Vec<FunctionSymbol>),
    #[error("new symbol {0} is not a reserve atom")]
    NotReserve(Name),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn fmt_symbols(syms: &[FunctionSymbol]) -> String {
    syms.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub next: State,
    pub raised_rule: Rule,
    pub update_multiset: UpdateMultiset,
    pub update_set: UpdateSet,
    pub consistent: bool,
}

/// The rule and signature currently encoded in `pgm`.
pub fn raise_program(s: &State) -> Result<(Signature, Rule), ReflectError> {
    let p = ProgramTree::from_value(&s.pgm())?;
    Ok((p.signature()?, p.rule()?))
}

/// One step: raise, evaluate against `s`, collapse against `s`, apply.
pub fn step(s: &State, ops: &OpRegistry) -> Result<StepReport, StepError> {
    let (raised_sig, rule) = raise_program(s)?;
    let missing = s.signature.missing_from(&raised_sig);
    if !missing.is_empty() {
        return Err(StepError::SignatureShrunk(missing));
    }
    let mut ev = Evaluator::new(s, &raised_sig, ops);
    let um = ev.rule(&Env::new(), &rule)?;
    let reserve = ev.reserve.clone();
    let us = collapse(s, &um, ops);
    let consistent = us.is_consistent();
    let mut next = apply_update_set(s, &us);
    if consistent {
        next.reserve = reserve;
        next.signature = grown_signature(s, &next)?;
    }
    Ok(StepReport { next, raised_rule: rule, update_multiset: um, update_set: us, consistent })
}

/// The current signature extended by whatever the new `pgm` lists.
fn grown_signature(s: &State, next: &State) -> Result<Signature, StepError> {
    let p = ProgramTree::from_value(&next.pgm())?;
    let listed = p.signature()?;
    let missing = s.signature.missing_from(&listed);
    if !missing.is_empty() {
        return Err(StepError::SignatureShrunk(missing));
    }
    for sym in listed.iter() {
        if !s.signature.contains_name(sym.name.as_str()) && !sym.name.as_str().starts_with('$') {
            return Err(StepError::NotReserve(sym.name.clone()));
        }
    }
    Ok(s.signature.union(&listed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{BackgroundOp, Location, Term};
    use crate::reflection::drop_program;
    use crate::value::Value;

    fn machine(rule: &Rule, extra: &[(&str, usize)]) -> State {
        let mut sig = Signature::from_iter(extra.iter().map(|(n, a)| FunctionSymbol::new(n, *a)));
        sig.insert(FunctionSymbol::new("pgm", 0)).unwrap();
        let mut s = State::new(sig.clone());
        s.set(Location::nullary("pgm"), Value::Tree(drop_program(&sig, rule))).unwrap();
        s
    }

    #[test]
    fn increment_step() {
        let inc = Rule::assign(
            "f",
            vec![],
            Term::op(BackgroundOp::Add, vec![Term::constant("f"), Term::lit(1u64)]),
        );
        let mut s = machine(&inc, &[("f", 0)]);
        s.set(Location::nullary("f"), Value::Nat(0)).unwrap();
        let r = step(&s, &OpRegistry::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.next.get(&Location::nullary("f")), Value::Nat(1));
        assert_eq!(r.next.pgm(), s.pgm());
    }

    #[test]
    fn empty_par_is_a_fixpoint() {
        let s = machine(&Rule::skip(), &[]);
        let r = step(&s, &OpRegistry::default()).unwrap();
        assert_eq!(r.next, s);
    }

    #[test]
    fn self_rewrite_takes_effect_next_step() {
        let sig = Signature::from_iter([FunctionSymbol::new("f", 0), FunctionSymbol::new("pgm", 0)]);
        let second = Rule::assign("f", vec![], Term::lit(2u64));
        let first = Rule::Par(vec![
            Rule::assign("f", vec![], Term::lit(1u64)),
            Rule::assign("pgm", vec![], Term::lit(Value::Tree(drop_program(&sig, &second)))),
        ]);
        let s0 = machine(&first, &[("f", 0)]);
        let s1 = step(&s0, &OpRegistry::default()).unwrap().next;
        assert_eq!(s1.get(&Location::nullary("f")), Value::Nat(1));
        let r2 = step(&s1, &OpRegistry::default()).unwrap();
        assert_eq!(r2.raised_rule, second);
        assert_eq!(r2.next.get(&Location::nullary("f")), Value::Nat(2));
    }

    #[test]
    fn shrinking_the_signature_is_rejected() {
        let small = Signature::from_iter([FunctionSymbol::new("pgm", 0)]);
        let rule = Rule::assign("pgm", vec![], Term::lit(Value::Tree(drop_program(&small, &Rule::skip()))));
        let s = machine(&rule, &[("f", 0)]);
        assert!(matches!(step(&s, &OpRegistry::default()), Err(StepError::SignatureShrunk(_))));
    }
}
