//! Operators usable in partial assignments.

use std::collections::BTreeMap;

use crate::tree::{self, Hedge, NodePath, Tree};
use crate::value::{Multiset, Name, Value};

/// How shared updates with this operator combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpClass {
    /// Any two applications commute.
    Commutative,
    /// Acts on one tree node: applications at nodes where neither path is a
    /// prefix of the other commute; all other groups are checked by trying
    /// every order.
    Node,
}

#[derive(Clone, Debug)]
pub struct SharedOp {
    pub name: Name,
    pub class: OpClass,
    apply: fn(&Value, &NodePath, &[Value]) -> Option<Value>,
}

impl SharedOp {
    /// Node operators take the target path as their first operand.
    pub fn is_addressed(&self) -> bool {
        self.class == OpClass::Node
    }

    /// Applies the operator to `base` at `path`; `None` when the operands do
    /// not fit.
    pub fn apply(&self, base: &Value, path: &NodePath, operands: &[Value]) -> Option<Value> {
        (self.apply)(base, path, operands)
    }
}

#[derive(Clone, Debug)]
pub struct OpRegistry(BTreeMap<Name, SharedOp>);

impl Default for OpRegistry {
    fn default() -> Self {
        let mut r = OpRegistry(BTreeMap::new());
        r.register("add", OpClass::Commutative, add);
        r.register("union", OpClass::Commutative, union);
        r.register("replace", OpClass::Node, replace);
        r.register("right_extend", OpClass::Node, |b, p, o| extend(b, p, o, true));
        r.register("left_extend", OpClass::Node, |b, p, o| extend(b, p, o, false));
        r
    }
}

impl OpRegistry {
    pub fn register(
        &mut self,
        name: &str,
        class: OpClass,
        apply: fn(&Value, &NodePath, &[Value]) -> Option<Value>,
    ) {
        self.0.insert(Name::new(name), SharedOp { name: Name::new(name), class, apply });
    }

    pub fn get(&self, name: &str) -> Option<&SharedOp> {
        self.0.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }
}

fn add(base: &Value, path: &NodePath, operands: &[Value]) -> Option<Value> {
    if !path.is_root() {
        return None;
    }
    let mut acc = match base {
        Value::Undef => 0,
        v => v.as_nat()?,
    };
    for o in operands {
        acc = acc.checked_add(o.as_nat()?)?;
    }
    Some(Value::Nat(acc))
}

fn union(base: &Value, path: &NodePath, operands: &[Value]) -> Option<Value> {
    if !path.is_root() {
        return None;
    }
    let mut acc = match base {
        Value::Undef => Multiset::new(),
        Value::Multiset(m) => m.clone(),
        _ => return None,
    };
    for o in operands {
        match o {
            Value::Multiset(m) => acc = acc.union(m),
            _ => return None,
        }
    }
    Some(Value::Multiset(acc))
}

fn replace(base: &Value, path: &NodePath, operands: &[Value]) -> Option<Value> {
    let [v] = operands else { return None };
    if path.is_root() {
        return Some(v.clone());
    }
    let (Value::Tree(t), Value::Tree(new)) = (base, v) else { return None };
    let id = t.node_at(path).ok()?;
    tree::subst_tt(t, id, new).ok().map(Value::Tree)
}

fn extend(base: &Value, path: &NodePath, operands: &[Value], right: bool) -> Option<Value> {
    let Value::Tree(t) = base else { return None };
    let hedge = Hedge(
        operands
            .iter()
            .map(|o| o.as_tree().cloned())
            .collect::<Option<Vec<Tree>>>()?,
    );
    let id = t.node_at(path).ok()?;
    let target = tree::subtree(t, id).ok()?;
    let grown = if right {
        tree::right_extend_tree(&hedge, &target)
    } else {
        tree::left_extend_tree(&hedge, &target)
    }
    .ok()?;
    tree::subst_tt(t, id, &grown).ok().map(Value::Tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_treats_undef_as_zero() {
        let r = OpRegistry::default();
        let add = r.get("add").unwrap();
        assert_eq!(add.apply(&Value::Undef, &NodePath::root(), &[Value::Nat(2)]), Some(Value::Nat(2)));
        assert_eq!(add.apply(&Value::Bool(true), &NodePath::root(), &[Value::Nat(2)]), None);
    }

    #[test]
    fn extend_at_node() {
        let r = OpRegistry::default();
        let t = Tree::node("a", vec![Tree::node("b", vec![Tree::atom_leaf("x")])]);
        let out = r
            .get("right_extend")
            .unwrap()
            .apply(&Value::Tree(t), &NodePath(vec![0]), &[Value::Tree(Tree::atom_leaf("y"))])
            .unwrap();
        assert_eq!(out.as_tree().unwrap().to_string(), "a⟨b⟨x y⟩⟩");
    }
}
