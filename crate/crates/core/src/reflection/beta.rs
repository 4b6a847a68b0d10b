//! The extraction function β: the multiset comprehension terms whose values
//! determine the behaviour of an encoded rule.

use super::encode::{raise_rule, ReflectError};
use crate::asm::{BackgroundOp, Rule, Term};
use crate::tree::Tree;
use crate::value::{Name, Value};

/// β of a rule tree (the tree below `rule⟨·⟩`).
pub fn beta(t: &Tree) -> Result<Vec<Term>, ReflectError> {
    Ok(beta_rule(&raise_rule(t)?))
}

fn tuple_or_single(mut items: Vec<Term>) -> Term {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Term::Op(BackgroundOp::Tuple, items)
    }
}

fn guardless(head: Term) -> Term {
    Term::comprehension(head, Vec::new(), Term::truth())
}

fn conjoin(guard: Term, extra: Term) -> Term {
    if guard == Term::truth() {
        extra
    } else {
        Term::and(guard, extra)
    }
}

/// Adds binders and a conjunct to an extracted term. Terms that are not
/// comprehensions (let bindings) become the head of a new one.
fn restrict(item: &Term, binder: Option<&Name>, extra: Term) -> Term {
    match item {
        Term::Comprehension { head, binders, guard } => {
            let mut bs: Vec<Name> = binder.cloned().into_iter().collect();
            bs.extend(binders.iter().cloned());
            Term::comprehension((**head).clone(), bs, conjoin((**guard).clone(), extra))
        }
        raw => Term::comprehension(raw.clone(), binder.cloned().into_iter().collect(), extra),
    }
}

/// β computed on the raised rule, clause by clause.
pub fn beta_rule(r: &Rule) -> Vec<Term> {
    match r {
        Rule::Assign { args, rhs, .. } => {
            let mut items = vec![rhs.clone()];
            items.extend(args.iter().cloned());
            vec![guardless(tuple_or_single(items))]
        }
        Rule::Partial { func, args, op, operands } => {
            let mut op_args = vec![Term::Apply(func.clone(), args.clone())];
            op_args.extend(operands.iter().cloned());
            let mut items = args.clone();
            items.push(Term::Op(BackgroundOp::Shared(op.clone()), op_args));
            vec![guardless(tuple_or_single(items))]
        }
        Rule::Par(rs) => rs.iter().flat_map(beta_rule).collect(),
        Rule::If { cond, then, otherwise } => {
            let mut out = vec![guardless(cond.clone())];
            out.extend(beta_rule(then).iter().map(|c| restrict(c, None, cond.clone())));
            out.extend(beta_rule(otherwise).iter().map(|c| restrict(c, None, Term::not(cond.clone()))));
            out
        }
        Rule::Forall { var, guard, body } => {
            let inner = beta_rule(body);
            let mut out: Vec<Term> = inner.iter().map(|c| restrict(c, Some(var), guard.clone())).collect();
            out.extend(inner.iter().map(|c| restrict(c, Some(var), Term::not(guard.clone()))));
            out
        }
        Rule::Let { var, binding, body } => {
            let mut out = vec![binding.clone()];
            out.extend(beta_rule(&body.substitute(var, binding)));
            out
        }
        Rule::Import { body, .. } => beta_rule(body),
    }
}

/// Placeholder value for variables left free by `IMPORT` when β terms are
/// evaluated.
pub fn import_placeholder() -> Value {
    Value::atom("$import")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reflection::drop_rule;

    #[test]
    fn update_clause() {
        let r = Rule::assign("f", vec![], Term::constant("c"));
        assert_eq!(
            beta(&drop_rule(&r)).unwrap(),
            vec![Term::comprehension(Term::constant("c"), vec![], Term::truth())]
        );
    }

    #[test]
    fn import_is_transparent() {
        let body = Rule::assign("f", vec![], Term::var("x"));
        let r = Rule::import("x", body.clone());
        assert_eq!(beta(&drop_rule(&r)).unwrap(), beta(&drop_rule(&body)).unwrap());
    }

    #[test]
    fn par_concatenates() {
        let a = Rule::assign("f", vec![], Term::lit(1u64));
        let b = Rule::assign("g", vec![Term::lit(2u64)], Term::lit(3u64));
        let mut expected = beta_rule(&a);
        expected.extend(beta_rule(&b));
        assert_eq!(beta(&drop_rule(&Rule::Par(vec![a, b]))).unwrap(), expected);
    }

    #[test]
    fn if_adds_condition_and_guards() {
        let phi = Term::constant("p");
        let r = Rule::if_then_else(
            phi.clone(),
            Rule::assign("f", vec![], Term::lit(1u64)),
            Rule::assign("f", vec![], Term::lit(2u64)),
        );
        let b = beta_rule(&r);
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], Term::comprehension(phi.clone(), vec![], Term::truth()));
        assert_eq!(b[1], Term::comprehension(Term::lit(1u64), vec![], phi.clone()));
        assert_eq!(b[2], Term::comprehension(Term::lit(2u64), vec![], Term::not(phi)));
    }

    #[test]
    fn forall_binds_its_variable() {
        let r = Rule::forall(
            "x",
            Term::constant("p"),
            Rule::assign("f", vec![Term::var("x")], Term::lit(0u64)),
        );
        for t in beta_rule(&r) {
            assert!(t.free_vars().is_empty(), "{t:?}");
        }
    }
}
