//! Universe elements.
//!
//! A [`Value`] is anything a location can hold: the background constants
//! (booleans, naturals, `undef`), reserve and user atoms, tuples, multisets,
//! trees, and the reflective values produced by `drop` (terms, rules and
//! function symbols treated as data).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::asm::{FunctionSymbol, Rule, Term};
use crate::tree::Tree;

/// An interned-by-sharing identifier used for symbols, atoms, variables and labels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A finite multiset, kept as a sorted vector so that equality ignores
/// insertion order but respects multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset(Vec<Value>);

impl Multiset {
    pub fn new() -> Self {
        Multiset(Vec::new())
    }

    pub fn from_vec(mut items: Vec<Value>) -> Self {
        items.sort();
        Multiset(items)
    }

    pub fn insert(&mut self, v: Value) {
        let at = self.0.partition_point(|x| x <= &v);
        self.0.insert(at, v);
    }

    /// Multiset sum: multiplicities add up.
    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        Multiset::from_vec(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Value> {
        self.0.iter()
    }

    pub fn count(&self, v: &Value) -> usize {
        self.0.iter().filter(|x| *x == v).count()
    }
}

impl FromIterator<Value> for Multiset {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        Multiset::from_vec(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Undef,
    Bool(bool),
    Nat(u64),
    Atom(Name),
    Tuple(Vec<Value>),
    Multiset(Multiset),
    Tree(Tree),
    /// A term turned into data by `drop`.
    DroppedTerm(Arc<Term>),
    /// A rule turned into data by `drop`.
    DroppedRule(Arc<Rule>),
    /// A function symbol turned into data.
    DroppedSymbol(FunctionSymbol),
}

impl Value {
    pub fn atom(name: impl AsRef<str>) -> Value {
        Value::Atom(Name::new(name))
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Tuple(items.into_iter().collect())
    }

    pub fn multiset(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Multiset(items.into_iter().collect())
    }

    pub fn dropped_term(t: Term) -> Value {
        Value::DroppedTerm(Arc::new(t))
    }

    pub fn is_undef(&self) -> bool {
        matches!(self, Value::Undef)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&Tree> {
        match self {
            Value::Tree(t) => Some(t),
            _ => None,
        }
    }

    /// Calls `f` on this value and, recursively, on every value nested in
    /// tuples, multisets and tree leaves. Dropped terms and rules are opaque.
    pub fn visit(&self, f: &mut impl FnMut(&Value)) {
        f(self);
        match self {
            Value::Tuple(items) => items.iter().for_each(|v| v.visit(f)),
            Value::Multiset(m) => m.iter().for_each(|v| v.visit(f)),
            Value::Tree(t) => {
                for id in t.node_ids() {
                    if let Some(v) = t.value(id) {
                        v.visit(f);
                    }
                }
            }
            _ => {}
        }
    }

    /// Every atom occurring anywhere in this value, including inside dropped
    /// terms and rules.
    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Value::Atom(a) => {
                out.insert(a.clone());
            }
            Value::Tuple(items) => items.iter().for_each(|v| v.atoms(out)),
            Value::Multiset(m) => m.iter().for_each(|v| v.atoms(out)),
            Value::Tree(t) => {
                for id in t.node_ids() {
                    if let Some(v) = t.value(id) {
                        v.atoms(out);
                    }
                }
            }
            Value::DroppedTerm(t) => t.atoms(out),
            Value::DroppedRule(r) => r.atoms(out),
            Value::Undef | Value::Bool(_) | Value::Nat(_) | Value::DroppedSymbol(_) => {}
        }
    }

    /// Applies an atom renaming everywhere, including inside dropped syntax.
    pub fn rename_atoms(&self, f: &impl Fn(&Name) -> Name) -> Value {
        match self {
            Value::Atom(a) => Value::Atom(f(a)),
            Value::Tuple(items) => Value::Tuple(items.iter().map(|v| v.rename_atoms(f)).collect()),
            Value::Multiset(m) => Value::Multiset(m.iter().map(|v| v.rename_atoms(f)).collect()),
            Value::Tree(t) => Value::Tree(t.map_values(&mut |v| v.rename_atoms(f))),
            Value::DroppedTerm(t) => Value::DroppedTerm(Arc::new(t.rename_atoms(f))),
            Value::DroppedRule(r) => Value::DroppedRule(Arc::new(r.rename_atoms(f))),
            other => other.clone(),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Nat(n)
    }
}

impl From<Tree> for Value {
    fn from(t: Tree) -> Self {
        Value::Tree(t)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print_value(self))
    }
}
