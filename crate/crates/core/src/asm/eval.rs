//! Term evaluation and the update multiset of a rule.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;

use super::ops::OpRegistry;
use super::rule::Rule;
use super::term::{BackgroundOp, Term};
use super::update::{UpdateItem, UpdateMultiset};
use super::{Location, Reserve, Signature, State, SymbolKind};
use crate::tree::{self, Hedge, Label, NodePath, Tree};
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("unknown function symbol {0}")]
    UnknownSymbol(Name),
    #[error("{name} expects {expected} arguments, got {found}")]
    ArityMismatch { name: Name, expected: usize, found: usize },
    #[error("operator {0} applied to the wrong number of operands")]
    OpArity(String),
    #[error("condition evaluated to undef: {0}")]
    ConditionUndef(String),
    #[error("guard is not boolean: {0}")]
    NonBooleanGuard(String),
    #[error("unknown partial-assignment operator {0}")]
    UnknownOperator(Name),
    #[error("variable {0} cannot be used as a location")]
    VariableAsLocation(Name),
    #[error("static symbol {0} cannot be updated")]
    UpdateOfStatic(Name),
    #[error("operator {op} needs a node path as first operand, got {found}")]
    InvalidNodeAddress { op: Name, found: String },
}

/// Variable assignment. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    vars: Vec<(Name, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn bind(&self, name: Name, value: Value) -> Env {
        let mut vars = self.vars.clone();
        vars.push((name, value));
        Env { vars }
    }

    pub fn lookup(&self, name: &Name) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn is_bound(&self, name: &Name) -> bool {
        self.lookup(name).is_some()
    }
}

/// Every value occurring in the state: location arguments, bound values and
/// their components (tuple and multiset elements, tree leaf values), plus the
/// declared universe. Quantifiers range over this set in ascending order.
pub fn active_domain(s: &State) -> BTreeSet<Value> {
    let mut out = BTreeSet::new();
    let mut add = |v: &Value| {
        v.visit(&mut |x| {
            out.insert(x.clone());
        })
    };
    for (loc, v) in s.bindings() {
        loc.args.iter().for_each(&mut add);
        add(v);
    }
    s.universe.iter().for_each(&mut add);
    out.remove(&Value::Undef);
    out
}

/// Evaluates terms and rules in a fixed state.
pub struct Evaluator<'a> {
    pub state: &'a State,
    pub signature: &'a Signature,
    pub ops: &'a OpRegistry,
    pub reserve: Reserve,
    domain: OnceLock<Vec<Value>>,
    used_atoms: OnceLock<BTreeSet<Name>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(state: &'a State, signature: &'a Signature, ops: &'a OpRegistry) -> Self {
        Evaluator {
            state,
            signature,
            ops,
            reserve: state.reserve.clone(),
            domain: OnceLock::new(),
            used_atoms: OnceLock::new(),
        }
    }

    pub fn domain(&self) -> &[Value] {
        self.domain.get_or_init(|| active_domain(self.state).into_iter().collect())
    }

    pub fn term(&self, env: &Env, t: &Term) -> Result<Value, EvalError> {
        match t {
            Term::Var(x) => env.lookup(x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Term::Lit(v) => Ok(v.clone()),
            Term::Apply(f, args) => {
                let sym = self
                    .signature
                    .get(f.as_str())
                    .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                if sym.arity != args.len() {
                    return Err(EvalError::ArityMismatch {
                        name: f.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                let vals = args.iter().map(|a| self.term(env, a)).collect::<Result<Vec<_>, _>>()?;
                if vals.iter().any(Value::is_undef) {
                    return Ok(Value::Undef);
                }
                let kind = self.state.signature.get(f.as_str()).map_or(sym.kind, |s| s.kind);
                let v = self.state.get(&Location { symbol: f.clone(), args: vals, path: NodePath::root() });
                Ok(match (v, kind) {
                    (Value::Undef, SymbolKind::Relational) => Value::Bool(false),
                    (Value::Undef, SymbolKind::Static) if args.is_empty() => Value::Atom(f.clone()),
                    (v, _) => v,
                })
            }
            Term::Op(op, args) => {
                let vals = args.iter().map(|a| self.term(env, a)).collect::<Result<Vec<_>, _>>()?;
                apply_background(op, &vals, self.ops)
            }
            Term::Comprehension { head, binders, guard } => {
                let mut out = Vec::new();
                self.comprehend(env, binders, head, guard, &mut out)?;
                Ok(Value::multiset(out))
            }
        }
    }

    fn comprehend(
        &self,
        env: &Env,
        binders: &[Name],
        head: &Term,
        guard: &Term,
        out: &mut Vec<Value>,
    ) -> Result<(), EvalError> {
        match binders.split_first() {
            None => {
                if self.guard(env, guard)? {
                    out.push(self.term(env, head)?);
                }
                Ok(())
            }
            Some((x, rest)) => {
                for v in self.domain() {
                    self.comprehend(&env.bind(x.clone(), v.clone()), rest, head, guard, out)?;
                }
                Ok(())
            }
        }
    }

    /// Quantifier guards: `undef` counts as not satisfied.
    fn guard(&self, env: &Env, g: &Term) -> Result<bool, EvalError> {
        match self.term(env, g)? {
            Value::Bool(b) => Ok(b),
            Value::Undef => Ok(false),
            _ => Err(EvalError::NonBooleanGuard(crate::frontend::print_term(g))),
        }
    }

    pub fn rule(&mut self, env: &Env, r: &Rule) -> Result<UpdateMultiset, EvalError> {
        let mut out = Vec::new();
        self.rule_into(env, r, &mut out)?;
        Ok(UpdateMultiset::from_vec(out))
    }

    fn location(&self, env: &Env, func: &Name, args: &[Term]) -> Result<Location, EvalError> {
        if env.is_bound(func) {
            return Err(EvalError::VariableAsLocation(func.clone()));
        }
        let sym = self
            .signature
            .get(func.as_str())
            .ok_or_else(|| EvalError::UnknownSymbol(func.clone()))?;
        if sym.arity != args.len() {
            return Err(EvalError::ArityMismatch {
                name: func.clone(),
                expected: sym.arity,
                found: args.len(),
            });
        }
        let kind = self.state.signature.get(func.as_str()).map_or(sym.kind, |s| s.kind);
        if kind == SymbolKind::Static {
            return Err(EvalError::UpdateOfStatic(func.clone()));
        }
        let args = args.iter().map(|a| self.term(env, a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Location { symbol: func.clone(), args, path: NodePath::root() })
    }

    fn rule_into(&mut self, env: &Env, r: &Rule, out: &mut Vec<UpdateItem>) -> Result<(), EvalError> {
        match r {
            Rule::Assign { func, args, rhs } => {
                let loc = self.location(env, func, args)?;
                out.push(UpdateItem::Ordinary(loc, self.term(env, rhs)?));
            }
            Rule::Partial { func, args, op, operands } => {
                let shared = self.ops.get(op.as_str()).ok_or_else(|| EvalError::UnknownOperator(op.clone()))?;
                let loc = self.location(env, func, args)?;
                let mut vals =
                    operands.iter().map(|a| self.term(env, a)).collect::<Result<Vec<_>, _>>()?;
                let loc = if shared.is_addressed() {
                    let first = if vals.is_empty() { Value::Undef } else { vals.remove(0) };
                    let path = NodePath::from_value(&first).ok_or_else(|| {
                        EvalError::InvalidNodeAddress { op: op.clone(), found: first.to_string() }
                    })?;
                    loc.at(path)
                } else {
                    loc
                };
                out.push(UpdateItem::Shared { location: loc, op: op.clone(), operands: vals });
            }
            Rule::If { cond, then, otherwise } => match self.term(env, cond)? {
                Value::Bool(true) => self.rule_into(env, then, out)?,
                Value::Bool(false) => self.rule_into(env, otherwise, out)?,
                Value::Undef => {
                    return Err(EvalError::ConditionUndef(crate::frontend::print_term(cond)))
                }
                _ => return Err(EvalError::NonBooleanGuard(crate::frontend::print_term(cond))),
            },
            Rule::Par(rs) => {
                for r in rs {
                    self.rule_into(env, r, out)?;
                }
            }
            Rule::Forall { var, guard, body } => {
                let domain = self.domain().to_vec();
                for v in domain {
                    let inner = env.bind(var.clone(), v);
                    if self.guard(&inner, guard)? {
                        self.rule_into(&inner, body, out)?;
                    }
                }
            }
            Rule::Let { var, binding, body } => {
                self.rule_into(env, &body.substitute(var, binding), out)?;
            }
            Rule::Import { var, body } => {
                let used = self.used_atoms.get_or_init(|| self.state.atoms());
                let atom = self.reserve.draw(used);
                self.rule_into(&env.bind(var.clone(), Value::Atom(atom)), body, out)?;
            }
        }
        Ok(())
    }
}

/// Evaluates a term over the state's own signature.
pub fn eval_term(s: &State, env: &Env, t: &Term) -> Result<Value, EvalError> {
    let ops = OpRegistry::default();
    Evaluator::new(s, &s.signature, &ops).term(env, t)
}

/// The update multiset of a rule over the state's own signature.
pub fn eval_rule(s: &State, env: &Env, r: &Rule) -> Result<UpdateMultiset, EvalError> {
    let ops = OpRegistry::default();
    Evaluator::new(s, &s.signature, &ops).rule(env, r)
}

fn arity(op: &BackgroundOp, vals: &[Value], n: usize) -> Result<(), EvalError> {
    if vals.len() == n {
        Ok(())
    } else {
        Err(EvalError::OpArity(format!("{op:?}")))
    }
}

/// The fixed meaning of the background operators. Type mismatches yield
/// `undef`; equality is the only operator that is not strict.
pub fn apply_background(op: &BackgroundOp, vals: &[Value], ops: &OpRegistry) -> Result<Value, EvalError> {
    use BackgroundOp as B;
    let nat2 = |f: fn(u64, u64) -> Option<Value>| -> Result<Value, EvalError> {
        arity(op, vals, 2)?;
        Ok(match (&vals[0], &vals[1]) {
            (Value::Nat(a), Value::Nat(b)) => f(*a, *b).unwrap_or(Value::Undef),
            _ => Value::Undef,
        })
    };
    let bool2 = |f: fn(bool, bool) -> bool| -> Result<Value, EvalError> {
        arity(op, vals, 2)?;
        Ok(match (&vals[0], &vals[1]) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(f(*a, *b)),
            _ => Value::Undef,
        })
    };
    match op {
        B::Eq => {
            arity(op, vals, 2)?;
            Ok(Value::Bool(vals[0] == vals[1]))
        }
        B::Ne => {
            arity(op, vals, 2)?;
            Ok(Value::Bool(vals[0] != vals[1]))
        }
        B::Lt => nat2(|a, b| Some(Value::Bool(a < b))),
        B::Le => nat2(|a, b| Some(Value::Bool(a <= b))),
        B::Gt => nat2(|a, b| Some(Value::Bool(a > b))),
        B::Ge => nat2(|a, b| Some(Value::Bool(a >= b))),
        B::Add => nat2(|a, b| a.checked_add(b).map(Value::Nat)),
        B::Sub => nat2(|a, b| a.checked_sub(b).map(Value::Nat)),
        B::Mul => nat2(|a, b| a.checked_mul(b).map(Value::Nat)),
        B::And => bool2(|a, b| a && b),
        B::Or => bool2(|a, b| a || b),
        B::Implies => bool2(|a, b| !a || b),
        B::Not => {
            arity(op, vals, 1)?;
            Ok(vals[0].as_bool().map_or(Value::Undef, |b| Value::Bool(!b)))
        }
        B::Tuple => Ok(Value::Tuple(vals.to_vec())),
        B::Multiset => Ok(Value::multiset(vals.iter().cloned())),
        B::Card => {
            arity(op, vals, 1)?;
            Ok(match &vals[0] {
                Value::Tuple(xs) => Value::Nat(xs.len() as u64),
                Value::Multiset(m) => Value::Nat(m.len() as u64),
                _ => Value::Undef,
            })
        }
        B::Proj => {
            arity(op, vals, 2)?;
            Ok(match (&vals[0], &vals[1]) {
                (Value::Tuple(xs), Value::Nat(i)) => xs.get(*i as usize).cloned().unwrap_or(Value::Undef),
                _ => Value::Undef,
            })
        }
        B::Defined => {
            arity(op, vals, 1)?;
            Ok(Value::Bool(!vals[0].is_undef()))
        }
        B::Subtree => {
            arity(op, vals, 2)?;
            let (Value::Tree(t), Some(path)) = (&vals[0], NodePath::from_value(&vals[1])) else {
                return Ok(Value::Undef);
            };
            Ok(t.index_at_path(&path).map_or(Value::Undef, |i| Value::Tree(t.subtree_at_index(i))))
        }
        B::Leaf(label) => {
            let value = match vals {
                [] => None,
                [v] => Some(v.clone()),
                _ => return Err(EvalError::OpArity(format!("{op:?}"))),
            };
            Ok(Tree::leaf(Label::Name(label.clone()), value).map_or(Value::Undef, Value::Tree))
        }
        B::LabelHedge(label) => {
            let Some(trees) = vals.iter().map(|v| v.as_tree().cloned()).collect::<Option<Vec<_>>>() else {
                return Ok(Value::Undef);
            };
            Ok(tree::label_hedge(&Label::Name(label.clone()), &Hedge(trees))
                .map_or(Value::Undef, Value::Tree))
        }
        B::Shared(name) => {
            let shared = ops.get(name.as_str()).ok_or_else(|| EvalError::UnknownOperator(name.clone()))?;
            let Some((base, rest)) = vals.split_first() else {
                return Err(EvalError::OpArity(name.to_string()));
            };
            let (path, operands) = if shared.is_addressed() {
                let Some((p, rest)) = rest.split_first() else {
                    return Err(EvalError::OpArity(name.to_string()));
                };
                match NodePath::from_value(p) {
                    Some(path) => (path, rest),
                    None => return Ok(Value::Undef),
                }
            } else {
                (NodePath::root(), rest)
            };
            Ok(shared.apply(base, &path, operands).unwrap_or(Value::Undef))
        }
    }
}
