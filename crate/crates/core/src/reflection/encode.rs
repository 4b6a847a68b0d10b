//! Rules, terms and signatures as trees, and back.

use std::sync::Arc;

use thiserror::Error;

use crate::asm::{FunctionSymbol, Rule, Signature, Term, PGM};
use crate::tree::{Label, NodePath, Tree};
use crate::value::{Name, Value};

/// The fixed label vocabulary of program trees.
pub mod labels {
    pub const PGM: &str = "pgm";
    pub const SIGNATURE: &str = "signature";
    pub const RULE: &str = "rule";
    pub const FUNC: &str = "func";
    pub const NAME: &str = "name";
    pub const ARITY: &str = "arity";
    pub const UPDATE: &str = "update";
    pub const TERM: &str = "term";
    pub const IF: &str = "if";
    pub const BOOL: &str = "bool";
    pub const FORALL: &str = "forall";
    pub const PAR: &str = "par";
    pub const LET: &str = "let";
    pub const PARTIAL: &str = "partial";
    pub const IMPORT: &str = "import";
}

use labels as L;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReflectError {
    #[error("malformed encoding at {path}: {reason}")]
    MalformedEncoding { path: NodePath, reason: String },
    #[error("malformed program tree: {0}")]
    MalformedProgram(String),
}

fn malformed(path: &NodePath, reason: impl Into<String>) -> ReflectError {
    ReflectError::MalformedEncoding { path: path.clone(), reason: reason.into() }
}

pub fn drop_term(t: &Term) -> Value {
    Value::DroppedTerm(Arc::new(t.clone()))
}

/// Dropped terms raise to themselves; every other value is a literal.
pub fn raise_term(v: &Value) -> Term {
    match v {
        Value::DroppedTerm(t) => (**t).clone(),
        other => Term::Lit(other.clone()),
    }
}

/// The name of a symbol as an atom.
pub fn drop_symbol(f: &FunctionSymbol) -> Value {
    Value::Atom(f.name.clone())
}

fn func_leaf(name: &Name) -> Tree {
    Tree::value_leaf(L::FUNC, Value::Atom(name.clone()))
}

fn term_leaf(t: &Term) -> Tree {
    Tree::value_leaf(L::TERM, drop_term(t))
}

/// `term⟨t1 … tn⟩` as a leaf holding the tuple of dropped terms; no value
/// when there are no terms.
fn terms_leaf(ts: &[Term]) -> Tree {
    if ts.is_empty() {
        Tree::atom_leaf(L::TERM)
    } else {
        Tree::value_leaf(L::TERM, Value::Tuple(ts.iter().map(drop_term).collect()))
    }
}

fn var_leaf(x: &Name) -> Tree {
    term_leaf(&Term::Var(x.clone()))
}

fn rule_node(r: &Rule) -> Tree {
    Tree::node(L::RULE, vec![drop_rule(r)])
}

pub fn drop_rule(r: &Rule) -> Tree {
    match r {
        Rule::Assign { func, args, rhs } => {
            Tree::node(L::UPDATE, vec![func_leaf(func), terms_leaf(args), term_leaf(rhs)])
        }
        Rule::Partial { func, args, op, operands } => Tree::node(
            L::PARTIAL,
            vec![func_leaf(func), func_leaf(op), terms_leaf(args), terms_leaf(operands)],
        ),
        Rule::If { cond, then, otherwise } => Tree::node(
            L::IF,
            vec![Tree::value_leaf(L::BOOL, drop_term(cond)), rule_node(then), rule_node(otherwise)],
        ),
        Rule::Par(rs) => Tree::node(L::PAR, rs.iter().map(rule_node).collect()),
        Rule::Forall { var, guard, body } => Tree::node(
            L::FORALL,
            vec![var_leaf(var), Tree::value_leaf(L::BOOL, drop_term(guard)), rule_node(body)],
        ),
        Rule::Let { var, binding, body } => {
            Tree::node(L::LET, vec![var_leaf(var), term_leaf(binding), rule_node(body)])
        }
        Rule::Import { var, body } => Tree::node(L::IMPORT, vec![var_leaf(var), rule_node(body)]),
    }
}

/// `func⟨name=⟨@f⟩ arity=⟨n⟩⟩`
pub fn drop_func(f: &FunctionSymbol) -> Tree {
    Tree::node(
        L::FUNC,
        vec![
            Tree::value_leaf(L::NAME, drop_symbol(f)),
            Tree::value_leaf(L::ARITY, Value::Nat(f.arity as u64)),
        ],
    )
}

/// The signature subtree; `pgm` first, the rest by name.
pub fn drop_signature(sig: &Signature) -> Tree {
    let mut funcs: Vec<&FunctionSymbol> = sig.iter().collect();
    funcs.sort_by_key(|f| (f.name.as_str() != PGM, f.name.clone()));
    Tree::node(L::SIGNATURE, funcs.into_iter().map(drop_func).collect())
}

/// `pgm⟨signature⟨…⟩ rule⟨…⟩⟩`; `pgm/0` is added to the signature.
pub fn drop_program(sig: &Signature, r: &Rule) -> Tree {
    let mut sig = sig.clone();
    sig.insert(FunctionSymbol::new(PGM, 0)).expect("pgm is nullary");
    Tree::node(L::PGM, vec![drop_signature(&sig), rule_node(r)])
}

struct Raiser<'a> {
    tree: &'a Tree,
}

impl Raiser<'_> {
    fn children(&self, i: usize, path: &NodePath, expect: &[&str]) -> Result<Vec<usize>, ReflectError> {
        let cs = self.tree.child_indices(i);
        let labels: Vec<&str> = cs.iter().map(|&c| self.tree.nodes()[c].label.as_str()).collect();
        if labels != expect {
            return Err(malformed(
                path,
                format!("expected children [{}], found [{}]", expect.join(" "), labels.join(" ")),
            ));
        }
        Ok(cs)
    }

    fn leaf_value(&self, i: usize, path: &NodePath) -> Result<Option<&Value>, ReflectError> {
        let n = &self.tree.nodes()[i];
        if n.size != 1 {
            return Err(malformed(path, format!("`{}` must be a leaf", n.label)));
        }
        Ok(n.value.as_ref())
    }

    fn name(&self, i: usize, path: &NodePath) -> Result<Name, ReflectError> {
        match self.leaf_value(i, path)? {
            Some(Value::Atom(a)) => Ok(a.clone()),
            _ => Err(malformed(path, "expected an atom naming a symbol")),
        }
    }

    fn term(&self, i: usize, path: &NodePath) -> Result<Term, ReflectError> {
        match self.leaf_value(i, path)? {
            Some(v) => Ok(raise_term(v)),
            None => Err(malformed(path, "expected a term")),
        }
    }

    fn terms(&self, i: usize, path: &NodePath) -> Result<Vec<Term>, ReflectError> {
        match self.leaf_value(i, path)? {
            None => Ok(Vec::new()),
            Some(Value::Tuple(items)) => Ok(items.iter().map(raise_term).collect()),
            Some(_) => Err(malformed(path, "expected a tuple of terms")),
        }
    }

    fn var(&self, i: usize, path: &NodePath) -> Result<Name, ReflectError> {
        match self.leaf_value(i, path)? {
            Some(Value::DroppedTerm(t)) => match &**t {
                Term::Var(x) => Ok(x.clone()),
                _ => Err(malformed(path, "expected a variable")),
            },
            _ => Err(malformed(path, "expected a variable")),
        }
    }

    /// A `rule⟨T⟩` wrapper.
    fn wrapped(&self, i: usize, path: &NodePath) -> Result<Rule, ReflectError> {
        let cs = self.tree.child_indices(i);
        if cs.len() != 1 {
            return Err(malformed(path, "`rule` must have exactly one child"));
        }
        self.rule(cs[0], &path.child(0))
    }

    fn rule(&self, i: usize, path: &NodePath) -> Result<Rule, ReflectError> {
        let label = self.tree.nodes()[i].label.as_str();
        let p = |k: usize| path.child(k);
        match label {
            L::UPDATE => {
                let c = self.children(i, path, &[L::FUNC, L::TERM, L::TERM])?;
                Ok(Rule::Assign {
                    func: self.name(c[0], &p(0))?,
                    args: self.terms(c[1], &p(1))?,
                    rhs: self.term(c[2], &p(2))?,
                })
            }
            L::PARTIAL => {
                let c = self.children(i, path, &[L::FUNC, L::FUNC, L::TERM, L::TERM])?;
                Ok(Rule::Partial {
                    func: self.name(c[0], &p(0))?,
                    op: self.name(c[1], &p(1))?,
                    args: self.terms(c[2], &p(2))?,
                    operands: self.terms(c[3], &p(3))?,
                })
            }
            L::IF => {
                let c = self.children(i, path, &[L::BOOL, L::RULE, L::RULE])?;
                Ok(Rule::If {
                    cond: self.term(c[0], &p(0))?,
                    then: Box::new(self.wrapped(c[1], &p(1))?),
                    otherwise: Box::new(self.wrapped(c[2], &p(2))?),
                })
            }
            L::PAR => {
                let cs = self.tree.child_indices(i);
                let mut rs = Vec::with_capacity(cs.len());
                for (k, c) in cs.into_iter().enumerate() {
                    if self.tree.nodes()[c].label.as_str() != L::RULE {
                        return Err(malformed(&p(k), "`par` children must be `rule` nodes"));
                    }
                    rs.push(self.wrapped(c, &p(k))?);
                }
                Ok(Rule::Par(rs))
            }
            L::FORALL => {
                let c = self.children(i, path, &[L::TERM, L::BOOL, L::RULE])?;
                Ok(Rule::Forall {
                    var: self.var(c[0], &p(0))?,
                    guard: self.term(c[1], &p(1))?,
                    body: Box::new(self.wrapped(c[2], &p(2))?),
                })
            }
            L::LET => {
                let c = self.children(i, path, &[L::TERM, L::TERM, L::RULE])?;
                Ok(Rule::Let {
                    var: self.var(c[0], &p(0))?,
                    binding: self.term(c[1], &p(1))?,
                    body: Box::new(self.wrapped(c[2], &p(2))?),
                })
            }
            L::IMPORT => {
                let c = self.children(i, path, &[L::TERM, L::RULE])?;
                Ok(Rule::Import {
                    var: self.var(c[0], &p(0))?,
                    body: Box::new(self.wrapped(c[1], &p(1))?),
                })
            }
            other => Err(malformed(path, format!("`{other}` does not start a rule"))),
        }
    }

    fn signature(&self, i: usize, path: &NodePath) -> Result<Signature, ReflectError> {
        if self.tree.nodes()[i].label.as_str() != L::SIGNATURE {
            return Err(malformed(path, "expected `signature`"));
        }
        let mut sig = Signature::new();
        for (k, c) in self.tree.child_indices(i).into_iter().enumerate() {
            let fp = path.child(k);
            if self.tree.nodes()[c].label.as_str() != L::FUNC {
                return Err(malformed(&fp, "signature entries must be `func` nodes"));
            }
            let cs = self.children(c, &fp, &[L::NAME, L::ARITY])?;
            let name = self.name(cs[0], &fp.child(0))?;
            let arity = match self.leaf_value(cs[1], &fp.child(1))? {
                Some(Value::Nat(n)) => *n as usize,
                _ => return Err(malformed(&fp.child(1), "expected a natural number")),
            };
            if sig.get(name.as_str()).is_some() {
                return Err(malformed(&fp, format!("symbol {name} listed twice")));
            }
            sig.insert(FunctionSymbol { name, arity, kind: Default::default() })
                .expect("fresh name");
        }
        Ok(sig)
    }
}

/// Inverse of [`drop_rule`]; errors carry the path of the offending node.
pub fn raise_rule(t: &Tree) -> Result<Rule, ReflectError> {
    Raiser { tree: t }.rule(0, &NodePath::root())
}

/// Inverse of [`drop_signature`].
pub fn raise_signature(t: &Tree) -> Result<Signature, ReflectError> {
    Raiser { tree: t }.signature(0, &NodePath::root())
}

/// A tree of the form `pgm⟨signature⟨…⟩ rule⟨…⟩⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProgramTree(Tree);

impl ProgramTree {
    pub fn new(t: Tree) -> Result<Self, ReflectError> {
        if t.root_label() != &Label::new(L::PGM) {
            return Err(ReflectError::MalformedProgram(format!(
                "root is labelled `{}`, expected `pgm`",
                t.root_label()
            )));
        }
        let count = |l: &str| {
            t.child_indices(0).into_iter().filter(|&c| t.nodes()[c].label.as_str() == l).count()
        };
        for l in [L::SIGNATURE, L::RULE] {
            if count(l) != 1 {
                return Err(ReflectError::MalformedProgram(format!(
                    "expected exactly one `{l}` child, found {}",
                    count(l)
                )));
            }
        }
        if t.child_indices(0).len() != 2 {
            return Err(ReflectError::MalformedProgram("`pgm` must have exactly two children".into()));
        }
        Ok(ProgramTree(t))
    }

    pub fn from_value(v: &Value) -> Result<Self, ReflectError> {
        match v {
            Value::Tree(t) => ProgramTree::new(t.clone()),
            other => Err(ReflectError::MalformedProgram(format!("pgm holds {other}, not a tree"))),
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.0
    }

    fn child_with(&self, l: &str) -> usize {
        self.0
            .child_indices(0)
            .into_iter()
            .find(|&c| self.0.nodes()[c].label.as_str() == l)
            .expect("checked on construction")
    }

    /// The `signature⟨…⟩` child.
    pub fn signature_subtree(&self) -> Tree {
        self.0.subtree_at_index(self.child_with(L::SIGNATURE))
    }

    /// The `rule⟨…⟩` child.
    pub fn rule_subtree(&self) -> Tree {
        self.0.subtree_at_index(self.child_with(L::RULE))
    }

    fn child_path(&self, l: &str) -> NodePath {
        let i = self.child_with(l);
        NodePath(vec![self.0.child_indices(0).iter().position(|&c| c == i).unwrap()])
    }

    pub fn signature(&self) -> Result<Signature, ReflectError> {
        let base = self.child_path(L::SIGNATURE);
        let sig = raise_signature(&self.signature_subtree()).map_err(|e| rebase(e, &base))?;
        match sig.get(PGM) {
            Some(f) if f.arity == 0 => Ok(sig),
            _ => Err(ReflectError::MalformedProgram("signature does not list pgm/0".into())),
        }
    }

    pub fn rule(&self) -> Result<Rule, ReflectError> {
        let base = self.child_path(L::RULE);
        Raiser { tree: &self.rule_subtree() }.wrapped(0, &NodePath::root()).map_err(|e| rebase(e, &base))
    }
}

fn rebase(e: ReflectError, base: &NodePath) -> ReflectError {
    match e {
        ReflectError::MalformedEncoding { path, reason } => {
            let mut full = base.0.clone();
            full.extend(path.0);
            ReflectError::MalformedEncoding { path: NodePath(full), reason }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::BackgroundOp;

    #[test]
    fn assignment_encoding() {
        let r = Rule::assign("f", vec![], Term::constant("c"));
        assert_eq!(drop_rule(&r).to_string(), "update⟨func=⟨@f⟩ term term=⟨'(c)⟩⟩");
        let r = Rule::assign("f", vec![Term::lit(1u64)], Term::lit(2u64));
        assert_eq!(drop_rule(&r).to_string(), "update⟨func=⟨@f⟩ term=⟨('(1),)⟩ term=⟨'(2)⟩⟩");
    }

    #[test]
    fn par_and_import_encoding() {
        let a = Rule::assign("f", vec![], Term::lit(1u64));
        let b = Rule::assign("g", vec![], Term::lit(2u64));
        let par = Rule::Par(vec![a.clone(), b.clone()]);
        assert_eq!(
            drop_rule(&par),
            Tree::node("par", vec![Tree::node("rule", vec![drop_rule(&a)]), Tree::node("rule", vec![drop_rule(&b)])])
        );
        let imp = Rule::import("x", a.clone());
        assert_eq!(
            drop_rule(&imp).to_string(),
            format!("import⟨term=⟨'(?x)⟩ rule⟨{}⟩⟩", drop_rule(&a))
        );
    }

    #[test]
    fn raise_inverts_drop() {
        let r = Rule::forall(
            "x",
            Term::op(BackgroundOp::Eq, vec![Term::var("x"), Term::lit(1u64)]),
            Rule::partial("f", vec![Term::var("x")], "add", vec![Term::lit(1u64)]),
        );
        assert_eq!(raise_rule(&drop_rule(&r)).unwrap(), r);
    }

    #[test]
    fn malformed_rule_reports_path() {
        let t = Tree::atom_leaf("bool");
        assert!(matches!(raise_rule(&t), Err(ReflectError::MalformedEncoding { .. })));
        let bad = Tree::node("par", vec![Tree::node("rule", vec![Tree::atom_leaf("oops")])]);
        assert_eq!(
            raise_rule(&bad),
            Err(ReflectError::MalformedEncoding {
                path: NodePath(vec![0, 0]),
                reason: "`oops` does not start a rule".into()
            })
        );
    }

    #[test]
    fn signature_round_trip() {
        let sig = Signature::from_iter([FunctionSymbol::new("pgm", 0)]);
        let t = drop_signature(&sig);
        assert_eq!(t.to_string(), "signature⟨func⟨name=⟨@pgm⟩ arity=⟨0⟩⟩⟩");
        assert_eq!(raise_signature(&t).unwrap(), sig);
    }

    #[test]
    fn program_tree_requires_unique_children() {
        let sig = drop_signature(&Signature::from_iter([FunctionSymbol::new("pgm", 0)]));
        let rule = Tree::node("rule", vec![drop_rule(&Rule::skip())]);
        let two_rules = Tree::node("pgm", vec![sig.clone(), rule.clone(), rule.clone()]);
        assert!(ProgramTree::new(two_rules).is_err());
        let p = ProgramTree::new(Tree::node("pgm", vec![sig.clone(), rule.clone()])).unwrap();
        assert_eq!(p.rule_subtree(), rule);
        assert_eq!(p.signature_subtree(), sig);
    }
}
