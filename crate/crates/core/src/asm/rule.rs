use std::collections::BTreeSet;

use super::term::{fresh_name, Term};
use crate::value::Name;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// `f(t1, …, tn) := t0`
    Assign { func: Name, args: Vec<Term>, rhs: Term },
    /// `f(t1, …, tn) <<= op(t'1, …, t'm)`
    Partial { func: Name, args: Vec<Term>, op: Name, operands: Vec<Term> },
    If { cond: Term, then: Box<Rule>, otherwise: Box<Rule> },
    Par(Vec<Rule>),
    Forall { var: Name, guard: Term, body: Box<Rule> },
    Let { var: Name, binding: Term, body: Box<Rule> },
    Import { var: Name, body: Box<Rule> },
}

impl Rule {
    pub fn skip() -> Rule {
        Rule::Par(Vec::new())
    }

    pub fn assign(func: impl AsRef<str>, args: Vec<Term>, rhs: Term) -> Rule {
        Rule::Assign { func: Name::new(func), args, rhs }
    }

    pub fn partial(func: impl AsRef<str>, args: Vec<Term>, op: impl AsRef<str>, operands: Vec<Term>) -> Rule {
        Rule::Partial { func: Name::new(func), args, op: Name::new(op), operands }
    }

    pub fn if_then_else(cond: Term, then: Rule, otherwise: Rule) -> Rule {
        Rule::If { cond, then: Box::new(then), otherwise: Box::new(otherwise) }
    }

    pub fn forall(var: impl AsRef<str>, guard: Term, body: Rule) -> Rule {
        Rule::Forall { var: Name::new(var), guard, body: Box::new(body) }
    }

    pub fn let_in(var: impl AsRef<str>, binding: Term, body: Rule) -> Rule {
        Rule::Let { var: Name::new(var), binding, body: Box::new(body) }
    }

    pub fn import(var: impl AsRef<str>, body: Rule) -> Rule {
        Rule::Import { var: Name::new(var), body: Box::new(body) }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            Rule::Assign { args, rhs, .. } => {
                let mut out = rhs.free_vars();
                args.iter().for_each(|a| out.extend(a.free_vars()));
                out
            }
            Rule::Partial { args, operands, .. } => {
                let mut out = BTreeSet::new();
                args.iter().chain(operands).for_each(|a| out.extend(a.free_vars()));
                out
            }
            Rule::If { cond, then, otherwise } => {
                let mut out = cond.free_vars();
                out.extend(then.free_vars());
                out.extend(otherwise.free_vars());
                out
            }
            Rule::Par(rs) => rs.iter().flat_map(|r| r.free_vars()).collect(),
            Rule::Forall { var, guard, body } => {
                let mut out = guard.free_vars();
                out.extend(body.free_vars());
                out.remove(var);
                out
            }
            Rule::Let { var, binding, body } => {
                let mut out = body.free_vars();
                out.remove(var);
                out.extend(binding.free_vars());
                out
            }
            Rule::Import { var, body } => {
                let mut out = body.free_vars();
                out.remove(var);
                out
            }
        }
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `x`.
    pub fn substitute(&self, x: &Name, t: &Term) -> Rule {
        let sub = |u: &Term| u.substitute(x, t);
        match self {
            Rule::Assign { func, args, rhs } => Rule::Assign {
                func: func.clone(),
                args: args.iter().map(sub).collect(),
                rhs: sub(rhs),
            },
            Rule::Partial { func, args, op, operands } => Rule::Partial {
                func: func.clone(),
                args: args.iter().map(sub).collect(),
                op: op.clone(),
                operands: operands.iter().map(sub).collect(),
            },
            Rule::If { cond, then, otherwise } => Rule::If {
                cond: sub(cond),
                then: Box::new(then.substitute(x, t)),
                otherwise: Box::new(otherwise.substitute(x, t)),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.substitute(x, t)).collect()),
            Rule::Forall { var, guard, body } => {
                if var == x {
                    return self.clone();
                }
                let (var, guard, body) = self.avoid_capture(var, Some(guard), body, t);
                let guard = guard.expect("guard present");
                Rule::Forall { var, guard: sub(&guard), body: Box::new(body.substitute(x, t)) }
            }
            Rule::Let { var, binding, body } => {
                let binding = sub(binding);
                if var == x {
                    return Rule::Let { var: var.clone(), binding, body: body.clone() };
                }
                let (var, _, body) = self.avoid_capture(var, None, body, t);
                Rule::Let { var, binding, body: Box::new(body.substitute(x, t)) }
            }
            Rule::Import { var, body } => {
                if var == x {
                    return self.clone();
                }
                let (var, _, body) = self.avoid_capture(var, None, body, t);
                Rule::Import { var, body: Box::new(body.substitute(x, t)) }
            }
        }
    }

    fn avoid_capture(
        &self,
        var: &Name,
        guard: Option<&Term>,
        body: &Rule,
        t: &Term,
    ) -> (Name, Option<Term>, Rule) {
        let fv = t.free_vars();
        if !fv.contains(var) {
            return (var.clone(), guard.cloned(), body.clone());
        }
        let mut avoid = fv;
        avoid.extend(body.free_vars());
        if let Some(g) = guard {
            avoid.extend(g.free_vars());
        }
        let fresh = fresh_name(var, &avoid);
        let v = Term::Var(fresh.clone());
        (fresh, guard.map(|g| g.substitute(var, &v)), body.substitute(var, &v))
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        self.terms().into_iter().for_each(|t| t.atoms(out));
    }

    /// Every term occurring directly in this rule or its subrules.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Rule::Assign { args, rhs, .. } => {
                out.extend(args);
                out.push(rhs);
            }
            Rule::Partial { args, operands, .. } => {
                out.extend(args);
                out.extend(operands);
            }
            Rule::If { cond, then, otherwise } => {
                out.push(cond);
                then.collect_terms(out);
                otherwise.collect_terms(out);
            }
            Rule::Par(rs) => rs.iter().for_each(|r| r.collect_terms(out)),
            Rule::Forall { guard, body, .. } => {
                out.push(guard);
                body.collect_terms(out);
            }
            Rule::Let { binding, body, .. } => {
                out.push(binding);
                body.collect_terms(out);
            }
            Rule::Import { body, .. } => body.collect_terms(out),
        }
    }

    pub fn rename_atoms(&self, f: &impl Fn(&Name) -> Name) -> Rule {
        let ren = |t: &Term| t.rename_atoms(f);
        match self {
            Rule::Assign { func, args, rhs } => Rule::Assign {
                func: func.clone(),
                args: args.iter().map(ren).collect(),
                rhs: ren(rhs),
            },
            Rule::Partial { func, args, op, operands } => Rule::Partial {
                func: func.clone(),
                args: args.iter().map(ren).collect(),
                op: op.clone(),
                operands: operands.iter().map(ren).collect(),
            },
            Rule::If { cond, then, otherwise } => Rule::If {
                cond: ren(cond),
                then: Box::new(then.rename_atoms(f)),
                otherwise: Box::new(otherwise.rename_atoms(f)),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.rename_atoms(f)).collect()),
            Rule::Forall { var, guard, body } => Rule::Forall {
                var: var.clone(),
                guard: ren(guard),
                body: Box::new(body.rename_atoms(f)),
            },
            Rule::Let { var, binding, body } => Rule::Let {
                var: var.clone(),
                binding: ren(binding),
                body: Box::new(body.rename_atoms(f)),
            },
            Rule::Import { var, body } => {
                Rule::Import { var: var.clone(), body: Box::new(body.rename_atoms(f)) }
            }
        }
    }

    pub fn contains_partial(&self) -> bool {
        match self {
            Rule::Partial { .. } => true,
            Rule::Assign { .. } => false,
            Rule::If { then, otherwise, .. } => then.contains_partial() || otherwise.contains_partial(),
            Rule::Par(rs) => rs.iter().any(Rule::contains_partial),
            Rule::Forall { body, .. } | Rule::Let { body, .. } | Rule::Import { body, .. } => {
                body.contains_partial()
            }
        }
    }

    /// Function symbols updated or read anywhere in the rule.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.terms().into_iter().for_each(|t| t.symbols(&mut out));
        self.collect_targets(&mut out);
        out
    }

    fn collect_targets(&self, out: &mut BTreeSet<Name>) {
        match self {
            Rule::Assign { func, .. } | Rule::Partial { func, .. } => {
                out.insert(func.clone());
            }
            Rule::If { then, otherwise, .. } => {
                then.collect_targets(out);
                otherwise.collect_targets(out);
            }
            Rule::Par(rs) => rs.iter().for_each(|r| r.collect_targets(out)),
            Rule::Forall { body, .. } | Rule::Let { body, .. } | Rule::Import { body, .. } => {
                body.collect_targets(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn let_substitution_avoids_forall_capture() {
        // FORALL y WITH true DO f(y) := x, with x ↦ y
        let r = Rule::forall(
            "y",
            Term::truth(),
            Rule::assign("f", vec![Term::var("y")], Term::var("x")),
        );
        let s = r.substitute(&Name::new("x"), &Term::var("y"));
        assert_eq!(s.free_vars(), BTreeSet::from([Name::new("y")]));
    }

    #[test]
    fn shadowed_variable_is_untouched() {
        let r = Rule::import("x", Rule::assign("f", vec![], Term::var("x")));
        assert_eq!(r.substitute(&Name::new("x"), &Term::lit(3u64)), r);
    }
}
