use std::collections::BTreeSet;

use crate::value::{Name, Value};

/// Operators with a fixed meaning in every state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BackgroundOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    And,
    Or,
    Not,
    Implies,
    /// Tuple constructor.
    Tuple,
    /// Multiset constructor.
    Multiset,
    /// Number of elements of a tuple or multiset.
    Card,
    /// `proj(t, i)`: the i-th component of a tuple, 0-based.
    Proj,
    /// `defined(t)`: whether `t` is not `undef`.
    Defined,
    /// `subtree(t, path)`.
    Subtree,
    /// `leaf<a>(v)` or `leaf<a>()`.
    Leaf(Name),
    /// `label_hedge<a>(t1, …, tn)`.
    LabelHedge(Name),
    /// A registered partial-assignment operator used as a function on values.
    Shared(Name),
}

impl BackgroundOp {
    pub fn infix(&self) -> Option<&'static str> {
        Some(match self {
            BackgroundOp::Eq => "=",
            BackgroundOp::Ne => "!=",
            BackgroundOp::Lt => "<",
            BackgroundOp::Le => "<=",
            BackgroundOp::Gt => ">",
            BackgroundOp::Ge => ">=",
            BackgroundOp::Add => "+",
            BackgroundOp::Sub => "-",
            BackgroundOp::Mul => "*",
            BackgroundOp::And => "and",
            BackgroundOp::Or => "or",
            BackgroundOp::Implies => "=>",
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    /// Application of a function symbol of the state's signature.
    Apply(Name, Vec<Term>),
    Op(BackgroundOp, Vec<Term>),
    /// `{| head | binders : guard |}`.
    Comprehension { head: Box<Term>, binders: Vec<Name>, guard: Box<Term> },
    Lit(Value),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Name::new(name))
    }

    pub fn apply(name: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::Apply(Name::new(name), args)
    }

    pub fn constant(name: impl AsRef<str>) -> Term {
        Term::Apply(Name::new(name), Vec::new())
    }

    pub fn lit(v: impl Into<Value>) -> Term {
        Term::Lit(v.into())
    }

    pub fn op(op: BackgroundOp, args: Vec<Term>) -> Term {
        Term::Op(op, args)
    }

    pub fn truth() -> Term {
        Term::Lit(Value::Bool(true))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::Op(BackgroundOp::And, vec![a, b])
    }

    pub fn not(a: Term) -> Term {
        Term::Op(BackgroundOp::Not, vec![a])
    }

    pub fn comprehension(head: Term, binders: Vec<Name>, guard: Term) -> Term {
        Term::Comprehension { head: Box::new(head), binders, guard: Box::new(guard) }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Apply(_, args) | Term::Op(_, args) => {
                args.iter().for_each(|a| a.collect_free(bound, out))
            }
            Term::Comprehension { head, binders, guard } => {
                let n = bound.len();
                bound.extend(binders.iter().cloned());
                head.collect_free(bound, out);
                guard.collect_free(bound, out);
                bound.truncate(n);
            }
            Term::Lit(_) => {}
        }
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `x`.
    pub fn substitute(&self, x: &Name, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) | Term::Lit(_) => self.clone(),
            Term::Apply(f, args) => {
                Term::Apply(f.clone(), args.iter().map(|a| a.substitute(x, t)).collect())
            }
            Term::Op(op, args) => {
                Term::Op(op.clone(), args.iter().map(|a| a.substitute(x, t)).collect())
            }
            Term::Comprehension { head, binders, guard } => {
                if binders.contains(x) {
                    return self.clone();
                }
                let fv = t.free_vars();
                let mut head = (**head).clone();
                let mut guard = (**guard).clone();
                let mut binders = binders.clone();
                for b in binders.iter_mut() {
                    if fv.contains(b) {
                        let mut avoid = fv.clone();
                        avoid.extend(head.free_vars());
                        avoid.extend(guard.free_vars());
                        avoid.insert(x.clone());
                        let fresh = fresh_name(b, &avoid);
                        let v = Term::Var(fresh.clone());
                        head = head.substitute(b, &v);
                        guard = guard.substitute(b, &v);
                        *b = fresh;
                    }
                }
                Term::Comprehension {
                    head: Box::new(head.substitute(x, t)),
                    binders,
                    guard: Box::new(guard.substitute(x, t)),
                }
            }
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(_) => {}
            Term::Apply(_, args) | Term::Op(_, args) => args.iter().for_each(|a| a.atoms(out)),
            Term::Comprehension { head, guard, .. } => {
                head.atoms(out);
                guard.atoms(out);
            }
            Term::Lit(v) => v.atoms(out),
        }
    }

    pub fn rename_atoms(&self, f: &impl Fn(&Name) -> Name) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Apply(g, args) => {
                Term::Apply(g.clone(), args.iter().map(|a| a.rename_atoms(f)).collect())
            }
            Term::Op(op, args) => {
                Term::Op(op.clone(), args.iter().map(|a| a.rename_atoms(f)).collect())
            }
            Term::Comprehension { head, binders, guard } => Term::Comprehension {
                head: Box::new(head.rename_atoms(f)),
                binders: binders.clone(),
                guard: Box::new(guard.rename_atoms(f)),
            },
            Term::Lit(v) => Term::Lit(v.rename_atoms(f)),
        }
    }

    /// Function symbols applied anywhere in the term.
    pub fn symbols(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Apply(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.symbols(out));
            }
            Term::Op(_, args) => args.iter().for_each(|a| a.symbols(out)),
            Term::Comprehension { head, guard, .. } => {
                head.symbols(out);
                guard.symbols(out);
            }
            Term::Var(_) | Term::Lit(_) => {}
        }
    }
}

/// `base_1`, `base_2`, … – the first one not in `avoid`.
pub(crate) fn fresh_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.as_str().trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| Name::new(format!("{stem}_{i}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}
