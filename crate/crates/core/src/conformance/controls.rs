//! Deliberately broken transition functions. Each one must be caught by the
//! check it targets.

use crate::asm::{EvalError, Reserve, Rule, State, UpdateMultiset};
use crate::reflection::StepError;
use crate::value::Value;

use super::{reflective_multiset, reflective_step};

/// Records, as a universe value, how many atoms are spelled with a leading
/// `a`. Isomorphisms do not preserve spelling.
pub fn spelling_step(s: &State) -> Result<State, StepError> {
    let mut next = reflective_step(s)?;
    let n = s.atoms().iter().filter(|a| a.as_str().starts_with('a')).count();
    next.universe.insert(Value::Tuple(vec![Value::atom("spelling"), Value::Nat(n as u64)]));
    Ok(next)
}

/// Discards every update once the universe holds more than `limit`
/// values, a quantity no extracted term observes.
pub fn universe_peeking_multiset(limit: usize) -> impl Fn(&State, &Rule, &Reserve) -> Result<UpdateMultiset, EvalError> {
    move |s, r, reserve| {
        if s.universe.len() > limit {
            Ok(UpdateMultiset::new())
        } else {
            reflective_multiset(s, r, reserve)
        }
    }
}
