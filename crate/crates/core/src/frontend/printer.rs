//! Canonical rendering of values, terms and rules.

use std::fmt::Write;

use crate::asm::{BackgroundOp, Rule, Term};
use crate::value::{Name, Value};

pub fn print_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_list<T>(out: &mut String, items: &[T], mut f: impl FnMut(&mut String, &T)) {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        f(out, x);
    }
}

pub(crate) fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Undef => out.push_str("undef"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Nat(n) => write!(out, "{n}").unwrap(),
        Value::Atom(a) => write!(out, "@{a}").unwrap(),
        Value::Tuple(items) => {
            out.push('(');
            write_list(out, items, write_value);
            if items.len() == 1 {
                out.push(',');
            }
            out.push(')');
        }
        Value::Multiset(m) => {
            out.push_str("{|");
            let items: Vec<&Value> = m.iter().collect();
            if !items.is_empty() {
                out.push(' ');
                write_list(out, &items, |o, x| write_value(o, x));
            }
            out.push_str(" |}");
        }
        Value::Tree(t) => write!(out, "#{t}").unwrap(),
        Value::DroppedTerm(t) => {
            out.push_str("'(");
            Printer::new().term(out, t, 0);
            out.push(')');
        }
        Value::DroppedRule(r) => {
            out.push_str("'[");
            out.push_str(&print_rule_compact(r));
            out.push(']');
        }
        Value::DroppedSymbol(s) => write!(out, "'{}/{}", s.name, s.arity).unwrap(),
    }
}

/// A term with every variable written `?x` except comprehension binders.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    Printer::new().term(&mut out, t, 0);
    out
}

/// A term in a scope where `bound` variables may be written bare.
pub fn print_term_in(t: &Term, bound: &[Name]) -> String {
    let mut out = String::new();
    Printer { scope: bound.to_vec(), compact: true }.term(&mut out, t, 0);
    out
}

/// Indented, multi-line rendering.
pub fn print_rule(r: &Rule) -> String {
    let mut out = String::new();
    Printer { scope: Vec::new(), compact: false }.rule(&mut out, r, 0);
    out.push('\n');
    out
}

/// Single-line rendering used inside quotes and for hashing.
pub fn print_rule_compact(r: &Rule) -> String {
    let mut out = String::new();
    Printer::new().rule(&mut out, r, 0);
    out
}

pub(crate) fn precedence(op: &BackgroundOp) -> Option<u8> {
    use BackgroundOp as B;
    Some(match op {
        B::Implies => 1,
        B::Or => 2,
        B::And => 3,
        B::Not => 4,
        B::Eq | B::Ne | B::Lt | B::Le | B::Gt | B::Ge => 5,
        B::Add | B::Sub => 6,
        B::Mul => 7,
        _ => return None,
    })
}

pub(crate) fn builtin_name(op: &BackgroundOp) -> Option<String> {
    use BackgroundOp as B;
    Some(match op {
        B::Card => "card".into(),
        B::Proj => "proj".into(),
        B::Defined => "defined".into(),
        B::Subtree => "subtree".into(),
        B::Leaf(a) => format!("leaf<{a}>"),
        B::LabelHedge(a) => format!("label_hedge<{a}>"),
        B::Shared(name) => name.to_string(),
        _ => return None,
    })
}

struct Printer {
    scope: Vec<Name>,
    compact: bool,
}

impl Printer {
    fn new() -> Self {
        Printer { scope: Vec::new(), compact: true }
    }

    fn term(&mut self, out: &mut String, t: &Term, min: u8) {
        match t {
            Term::Var(x) => {
                if self.scope.contains(x) {
                    out.push_str(x.as_str());
                } else {
                    write!(out, "?{x}").unwrap();
                }
            }
            Term::Lit(v) => {
                if matches!(v, Value::Tuple(_) | Value::Multiset(_)) {
                    out.push('%');
                }
                write_value(out, v);
            }
            Term::Apply(f, args) => {
                out.push_str(f.as_str());
                if !args.is_empty() || self.scope.contains(f) {
                    out.push('(');
                    self.terms(out, args);
                    out.push(')');
                }
            }
            Term::Op(BackgroundOp::Tuple, args) => {
                out.push('(');
                self.terms(out, args);
                if args.len() == 1 {
                    out.push(',');
                }
                out.push(')');
            }
            Term::Op(BackgroundOp::Multiset, args) => {
                out.push_str("{|");
                if !args.is_empty() {
                    out.push(' ');
                    self.terms(out, args);
                }
                out.push_str(" |}");
            }
            Term::Op(BackgroundOp::Not, args) if args.len() == 1 => {
                let p = 4;
                if p < min {
                    out.push('(');
                }
                out.push_str("not ");
                self.term(out, &args[0], p);
                if p < min {
                    out.push(')');
                }
            }
            Term::Op(op, args) if args.len() == 2 && op.infix().is_some() => {
                let p = precedence(op).expect("infix operators have a precedence");
                let (lmin, rmin) = match p {
                    1 => (p + 1, p),
                    5 => (p + 1, p + 1),
                    _ => (p, p + 1),
                };
                if p < min {
                    out.push('(');
                }
                self.term(out, &args[0], lmin);
                write!(out, " {} ", op.infix().unwrap()).unwrap();
                self.term(out, &args[1], rmin);
                if p < min {
                    out.push(')');
                }
            }
            Term::Op(op, args) => {
                let name = builtin_name(op).unwrap_or_else(|| format!("{op:?}"));
                out.push_str(&name);
                out.push('(');
                self.terms(out, args);
                out.push(')');
            }
            Term::Comprehension { head, binders, guard } => {
                let n = self.scope.len();
                self.scope.extend(binders.iter().cloned());
                out.push_str("{| ");
                self.term(out, head, 0);
                out.push_str(" | ");
                if !binders.is_empty() {
                    write_list(out, binders, |o, b| o.push_str(b.as_str()));
                    out.push_str(" : ");
                }
                self.term(out, guard, 0);
                out.push_str(" |}");
                self.scope.truncate(n);
            }
        }
    }

    fn terms(&mut self, out: &mut String, ts: &[Term]) {
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.term(out, t, 0);
        }
    }

    fn newline(&self, out: &mut String, indent: usize) {
        if self.compact {
            out.push(' ');
        } else {
            out.push('\n');
            for _ in 0..indent {
                out.push_str("  ");
            }
        }
    }

    fn target(&mut self, out: &mut String, func: &Name, args: &[Term]) {
        out.push_str(func.as_str());
        if !args.is_empty() {
            out.push('(');
            self.terms(out, args);
            out.push(')');
        }
    }

    fn scoped(&mut self, var: &Name, f: impl FnOnce(&mut Self)) {
        self.scope.push(var.clone());
        f(self);
        self.scope.pop();
    }

    fn rule(&mut self, out: &mut String, r: &Rule, indent: usize) {
        match r {
            Rule::Assign { func, args, rhs } => {
                self.target(out, func, args);
                out.push_str(" := ");
                self.term(out, rhs, 0);
            }
            Rule::Partial { func, args, op, operands } => {
                self.target(out, func, args);
                write!(out, " <<= {op}(").unwrap();
                self.terms(out, operands);
                out.push(')');
            }
            Rule::If { cond, then, otherwise } => {
                out.push_str("IF ");
                self.term(out, cond, 0);
                out.push_str(" THEN");
                self.newline(out, indent + 1);
                self.rule(out, then, indent + 1);
                if **otherwise != Rule::skip() {
                    self.newline(out, indent);
                    out.push_str("ELSE");
                    self.newline(out, indent + 1);
                    self.rule(out, otherwise, indent + 1);
                }
                self.newline(out, indent);
                out.push_str("ENDIF");
            }
            Rule::Par(rs) => {
                out.push_str("PAR");
                for r in rs {
                    self.newline(out, indent + 1);
                    self.rule(out, r, indent + 1);
                }
                self.newline(out, indent);
                out.push_str("ENDPAR");
            }
            Rule::Forall { var, guard, body } => {
                write!(out, "FORALL {var} WITH ").unwrap();
                self.scoped(var, |p| {
                    p.term(out, guard, 0);
                    out.push_str(" DO");
                    p.newline(out, indent + 1);
                    p.rule(out, body, indent + 1);
                });
                self.newline(out, indent);
                out.push_str("ENDDO");
            }
            Rule::Let { var, binding, body } => {
                write!(out, "LET {var} = ").unwrap();
                self.term(out, binding, 0);
                out.push_str(" IN");
                self.scoped(var, |p| {
                    p.newline(out, indent + 1);
                    p.rule(out, body, indent + 1);
                });
            }
            Rule::Import { var, body } => {
                write!(out, "IMPORT {var} DO").unwrap();
                self.scoped(var, |p| {
                    p.newline(out, indent + 1);
                    p.rule(out, body, indent + 1);
                });
            }
        }
    }
}
