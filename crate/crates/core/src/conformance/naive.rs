//! A deliberately direct evaluator: update sets are built by set union over
//! the rule's clauses, with no intermediate multiset and no collapse. Only
//! the background operators are shared with the main evaluator.

use std::collections::BTreeSet;

use crate::asm::{
    apply_background, EvalError, Location, OpRegistry, Reserve, Rule, State, SymbolKind, Term,
    UpdateSet,
};
use crate::tree::NodePath;
use crate::value::{Name, Value};

type Binding = Vec<(Name, Value)>;

fn lookup<'a>(zeta: &'a Binding, x: &Name) -> Option<&'a Value> {
    zeta.iter().rev().find(|(n, _)| n == x).map(|(_, v)| v)
}

fn with(zeta: &Binding, x: &Name, v: Value) -> Binding {
    let mut z = zeta.clone();
    z.push((x.clone(), v));
    z
}

/// Everything a quantifier may range over.
pub fn domain(s: &State) -> Vec<Value> {
    fn collect(v: &Value, out: &mut BTreeSet<Value>) {
        if !v.is_undef() {
            out.insert(v.clone());
        }
        match v {
            Value::Tuple(xs) => xs.iter().for_each(|x| collect(x, out)),
            Value::Multiset(m) => m.iter().for_each(|x| collect(x, out)),
            Value::Tree(t) => {
                for n in t.node_ids() {
                    if let Some(x) = t.value(n) {
                        collect(x, out);
                    }
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    for (loc, v) in s.bindings() {
        for a in &loc.args {
            collect(a, &mut out);
        }
        collect(v, &mut out);
    }
    for v in &s.universe {
        collect(v, &mut out);
    }
    out.into_iter().collect()
}

struct Naive<'a> {
    s: &'a State,
    dom: Vec<Value>,
    ops: OpRegistry,
    reserve: Reserve,
    used: BTreeSet<Name>,
}

impl Naive<'_> {
    fn val(&self, zeta: &Binding, t: &Term) -> Result<Value, EvalError> {
        match t {
            Term::Lit(v) => Ok(v.clone()),
            Term::Var(x) => lookup(zeta, x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Term::Apply(f, ts) => {
                let sym = self.s.signature.get(f.as_str()).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                if sym.arity != ts.len() {
                    return Err(EvalError::ArityMismatch { name: f.clone(), expected: sym.arity, found: ts.len() });
                }
                let mut args = Vec::new();
                for a in ts {
                    args.push(self.val(zeta, a)?);
                }
                if args.contains(&Value::Undef) {
                    return Ok(Value::Undef);
                }
                let v = self.s.get(&Location::new(f.as_str(), args));
                if !v.is_undef() {
                    return Ok(v);
                }
                Ok(match sym.kind {
                    SymbolKind::Relational => Value::Bool(false),
                    SymbolKind::Static if ts.is_empty() => Value::Atom(f.clone()),
                    _ => Value::Undef,
                })
            }
            Term::Op(op, ts) => {
                let mut vals = Vec::new();
                for a in ts {
                    vals.push(self.val(zeta, a)?);
                }
                apply_background(op, &vals, &self.ops)
            }
            Term::Comprehension { head, binders, guard } => {
                let mut zetas = vec![zeta.clone()];
                for x in binders {
                    zetas = zetas
                        .into_iter()
                        .flat_map(|z| self.dom.iter().map(move |d| with(&z, x, d.clone())))
                        .collect();
                }
                let mut items = Vec::new();
                for z in &zetas {
                    if self.holds(z, guard)? {
                        items.push(self.val(z, head)?);
                    }
                }
                Ok(Value::multiset(items))
            }
        }
    }

    fn holds(&self, zeta: &Binding, g: &Term) -> Result<bool, EvalError> {
        match self.val(zeta, g)? {
            Value::Bool(b) => Ok(b),
            Value::Undef => Ok(false),
            _ => Err(EvalError::NonBooleanGuard(String::new())),
        }
    }

    fn delta(&mut self, zeta: &Binding, r: &Rule) -> Result<BTreeSet<(Location, Value)>, EvalError> {
        match r {
            Rule::Assign { func, args, rhs } => {
                if lookup(zeta, func).is_some() {
                    return Err(EvalError::VariableAsLocation(func.clone()));
                }
                let sym = self.s.signature.get(func.as_str()).ok_or_else(|| EvalError::UnknownSymbol(func.clone()))?;
                if sym.arity != args.len() {
                    return Err(EvalError::ArityMismatch { name: func.clone(), expected: sym.arity, found: args.len() });
                }
                if sym.kind == SymbolKind::Static {
                    return Err(EvalError::UpdateOfStatic(func.clone()));
                }
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.val(zeta, a)?);
                }
                let v = self.val(zeta, rhs)?;
                Ok(BTreeSet::from([(Location { symbol: func.clone(), args: vals, path: NodePath::root() }, v)]))
            }
            Rule::Partial { op, .. } => Err(EvalError::UnknownOperator(op.clone())),
            Rule::Par(rs) => {
                let mut out = BTreeSet::new();
                for r in rs {
                    out.extend(self.delta(zeta, r)?);
                }
                Ok(out)
            }
            Rule::If { cond, then, otherwise } => match self.val(zeta, cond)? {
                Value::Bool(true) => self.delta(zeta, then),
                Value::Bool(false) => self.delta(zeta, otherwise),
                Value::Undef => Err(EvalError::ConditionUndef(String::new())),
                _ => Err(EvalError::NonBooleanGuard(String::new())),
            },
            Rule::Forall { var, guard, body } => {
                let mut out = BTreeSet::new();
                for d in self.dom.clone() {
                    let z = with(zeta, var, d);
                    if self.holds(&z, guard)? {
                        out.extend(self.delta(&z, body)?);
                    }
                }
                Ok(out)
            }
            Rule::Let { var, binding, body } => {
                let v = self.val(zeta, binding)?;
                self.delta(&with(zeta, var, v), body)
            }
            Rule::Import { var, body } => {
                let a = self.reserve.draw(&self.used);
                self.delta(&with(zeta, var, Value::Atom(a)), body)
            }
        }
    }
}

/// The update set of `r` in `s`, or the first error met. Partial
/// assignments are outside this evaluator's scope.
pub fn update_set(s: &State, r: &Rule) -> Result<UpdateSet, EvalError> {
    let mut n = Naive {
        s,
        dom: domain(s),
        ops: OpRegistry::default(),
        reserve: s.reserve.clone(),
        used: s.atoms(),
    };
    Ok(UpdateSet::from_pairs(n.delta(&Vec::new(), r)?))
}
