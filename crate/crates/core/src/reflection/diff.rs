//! Constructive tree difference between two program trees: an algebra term
//! rebuilding the target from the source, and the shared updates on `pgm`
//! node sublocations that collapse to the whole-tree update.

use std::collections::HashMap;
use std::fmt;

use super::encode::{labels as L, ProgramTree};
use super::step::StepError;
use crate::asm::{FunctionSymbol, Location, UpdateItem, UpdateMultiset, PGM};
use crate::tree::{self, Context, Hedge, Label, Node, NodePath, Tree, TreeError};
use crate::value::{Name, Value};

/// An expression over the tree algebra, evaluated against a source tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraTerm {
    /// The largest subtree of the source at a path.
    Subtree(NodePath),
    /// The context of the source between two paths.
    ContextAt(NodePath, NodePath),
    Literal(Tree),
    Xi,
    Epsilon,
    /// A hedge listing its trees.
    Hedge(Vec<AlgebraTerm>),
    LabelHedge(Label, Box<AlgebraTerm>),
    LabelContext(Label, Box<AlgebraTerm>),
    /// Hedge first; the second operand may be a context or a tree.
    LeftExtend(Box<AlgebraTerm>, Box<AlgebraTerm>),
    RightExtend(Box<AlgebraTerm>, Box<AlgebraTerm>),
    Concat(Box<AlgebraTerm>, Box<AlgebraTerm>),
    InjectHedge(Box<AlgebraTerm>, Box<AlgebraTerm>),
    InjectContext(Box<AlgebraTerm>, Box<AlgebraTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraValue {
    Tree(Tree),
    Context(Context),
    Hedge(Hedge),
}

impl AlgebraValue {
    fn hedge(self) -> Result<Hedge, TreeError> {
        match self {
            AlgebraValue::Hedge(h) => Ok(h),
            AlgebraValue::Tree(t) => Ok(Hedge::single(t)),
            AlgebraValue::Context(c) => Err(TreeError::NotAContext(c.as_tree().hole_count())),
        }
    }

    fn context(self) -> Result<Context, TreeError> {
        match self {
            AlgebraValue::Context(c) => Ok(c),
            AlgebraValue::Tree(_) => Err(TreeError::NotAContext(0)),
            AlgebraValue::Hedge(h) => Err(TreeError::NotAContext(h.len())),
        }
    }
}

impl AlgebraTerm {
    pub fn eval(&self, source: &Tree) -> Result<AlgebraValue, TreeError> {
        use AlgebraTerm as A;
        Ok(match self {
            A::Subtree(p) => AlgebraValue::Tree(tree::subtree(source, source.node_at(p)?)?),
            A::ContextAt(p1, p2) => {
                AlgebraValue::Context(tree::context_at(source, source.node_at(p1)?, source.node_at(p2)?)?)
            }
            A::Literal(t) => AlgebraValue::Tree(t.clone()),
            A::Xi => AlgebraValue::Context(Context::hole()),
            A::Epsilon => AlgebraValue::Hedge(Hedge::empty()),
            A::Hedge(items) => {
                let mut trees = Vec::new();
                for i in items {
                    trees.extend(i.eval(source)?.hedge()?.0);
                }
                AlgebraValue::Hedge(Hedge(trees))
            }
            A::LabelHedge(a, h) => AlgebraValue::Tree(tree::label_hedge(a, &h.eval(source)?.hedge()?)?),
            A::LabelContext(a, c) => {
                AlgebraValue::Context(tree::label_context(a, &c.eval(source)?.context()?)?)
            }
            A::LeftExtend(h, c) | A::RightExtend(h, c) => {
                let h = h.eval(source)?.hedge()?;
                let right = matches!(self, A::RightExtend(..));
                match c.eval(source)? {
                    AlgebraValue::Context(c) if right => AlgebraValue::Context(tree::right_extend(&h, &c)?),
                    AlgebraValue::Context(c) => AlgebraValue::Context(tree::left_extend(&h, &c)?),
                    AlgebraValue::Tree(t) if right => AlgebraValue::Tree(tree::right_extend_tree(&h, &t)?),
                    AlgebraValue::Tree(t) => AlgebraValue::Tree(tree::left_extend_tree(&h, &t)?),
                    AlgebraValue::Hedge(h) => return Err(TreeError::NotAContext(h.len())),
                }
            }
            A::Concat(a, b) => {
                AlgebraValue::Hedge(tree::concat_hedges(&a.eval(source)?.hedge()?, &b.eval(source)?.hedge()?))
            }
            A::InjectHedge(c, h) => AlgebraValue::Tree(tree::inject_hedge(
                &c.eval(source)?.context()?,
                &h.eval(source)?.hedge()?,
            )?),
            A::InjectContext(a, b) => AlgebraValue::Context(tree::inject_context(
                &a.eval(source)?.context()?,
                &b.eval(source)?.context()?,
            )),
        })
    }

    /// Evaluates to a tree, or fails.
    pub fn eval_tree(&self, source: &Tree) -> Result<Tree, TreeError> {
        match self.eval(source)? {
            AlgebraValue::Tree(t) => Ok(t),
            AlgebraValue::Context(c) => Err(TreeError::NotAContext(c.as_tree().hole_count())),
            AlgebraValue::Hedge(h) => inject_hedge_single(h),
        }
    }

    /// Number of operator applications and references.
    pub fn size(&self) -> usize {
        use AlgebraTerm as A;
        match self {
            A::Subtree(_) | A::ContextAt(..) | A::Literal(_) | A::Xi | A::Epsilon => 1,
            A::Hedge(items) => items.iter().map(AlgebraTerm::size).sum(),
            A::LabelHedge(_, a) | A::LabelContext(_, a) => 1 + a.size(),
            A::LeftExtend(a, b)
            | A::RightExtend(a, b)
            | A::Concat(a, b)
            | A::InjectHedge(a, b)
            | A::InjectContext(a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn inject_hedge_single(h: Hedge) -> Result<Tree, TreeError> {
    match h.0.len() {
        1 => Ok(h.0.into_iter().next().unwrap()),
        0 => Err(TreeError::EmptyHedgeAtRoot),
        n => Err(TreeError::HedgeAtRoot(n)),
    }
}

impl fmt::Display for AlgebraTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AlgebraTerm as A;
        match self {
            A::Subtree(p) => write!(f, "subtree@{p}"),
            A::ContextAt(a, b) => write!(f, "context@{a},{b}"),
            A::Literal(t) => write!(f, "#{t}"),
            A::Xi => f.write_str("^"),
            A::Epsilon => f.write_str("ε"),
            A::Hedge(items) => {
                f.write_str("[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            A::LabelHedge(a, h) => write!(f, "label_hedge({a}, {h})"),
            A::LabelContext(a, c) => write!(f, "label_context({a}, {c})"),
            A::LeftExtend(h, c) => write!(f, "left_extend({h}, {c})"),
            A::RightExtend(h, c) => write!(f, "right_extend({h}, {c})"),
            A::Concat(a, b) => write!(f, "concat({a}, {b})"),
            A::InjectHedge(c, h) => write!(f, "inject_hedge({c}, {h})"),
            A::InjectContext(a, b) => write!(f, "inject_context({a}, {b})"),
        }
    }
}

/// Both trees as programs, checking that the target only adds symbols.
fn programs(t: &Tree, t2: &Tree) -> Result<(ProgramTree, ProgramTree), StepError> {
    let p1 = ProgramTree::new(t.clone())?;
    let p2 = ProgramTree::new(t2.clone())?;
    let missing: Vec<FunctionSymbol> = p1.signature()?.missing_from(&p2.signature()?);
    if !missing.is_empty() {
        return Err(StepError::SignatureShrunk(missing));
    }
    Ok((p1, p2))
}

/// When the target's signature entries extend the source's, the appended
/// `func` trees.
fn appended_funcs(sig: &Tree, sig2: &Tree) -> Option<Vec<Tree>> {
    let a = sig.child_trees();
    let b = sig2.child_trees();
    (b.len() >= a.len() && b[..a.len()] == a[..]).then(|| b[a.len()..].to_vec())
}

fn signature_position(p: &ProgramTree) -> usize {
    let t = p.tree();
    t.child_indices(0)
        .iter()
        .position(|&c| t.nodes()[c].label.as_str() == L::SIGNATURE)
        .expect("program tree")
}

struct Reuse<'a> {
    source: &'a Tree,
    index: HashMap<&'a [Node], usize>,
}

impl<'a> Reuse<'a> {
    fn new(source: &'a Tree) -> Self {
        let mut index = HashMap::new();
        for (i, slice) in source.subtree_slices() {
            index.entry(slice).or_insert(i);
        }
        Reuse { source, index }
    }

    fn term(&self, target: &Tree, i: usize) -> AlgebraTerm {
        let n = &target.nodes()[i];
        if let Some(&j) = self.index.get(&target.nodes()[i..i + n.size]) {
            let path = self.source.path_of(self.source.id_at(j)).expect("index in range");
            return AlgebraTerm::Subtree(path);
        }
        let label = n.label.as_str();
        if n.size == 1 || label == L::UPDATE || label == L::PARTIAL {
            return AlgebraTerm::Literal(target.subtree_at_index(i));
        }
        let children = target.child_indices(i).into_iter().map(|c| self.term(target, c)).collect();
        AlgebraTerm::LabelHedge(n.label.clone(), Box::new(AlgebraTerm::Hedge(children)))
    }
}

/// An algebra term θ with `θ(t) = t2`.
pub fn tree_diff_theta(t: &Tree, t2: &Tree) -> Result<AlgebraTerm, StepError> {
    let (p1, p2) = programs(t, t2)?;
    let reuse = Reuse::new(t);
    if t == t2 {
        return Ok(AlgebraTerm::Subtree(NodePath::root()));
    }
    let sig_pos = signature_position(&p1);
    let sig_pos2 = signature_position(&p2);
    let children = t2
        .child_indices(0)
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            if k == sig_pos2 {
                if let Some(extra) = appended_funcs(&p1.signature_subtree(), &p2.signature_subtree()) {
                    let base = AlgebraTerm::Subtree(NodePath(vec![sig_pos]));
                    if extra.is_empty() {
                        return base;
                    }
                    let cs = t2.child_indices(c);
                    let hedge = cs[cs.len() - extra.len()..].iter().map(|&i| reuse.term(t2, i)).collect();
                    return AlgebraTerm::RightExtend(Box::new(AlgebraTerm::Hedge(hedge)), Box::new(base));
                }
            }
            reuse.term(t2, c)
        })
        .collect();
    Ok(AlgebraTerm::LabelHedge(Label::new(L::PGM), Box::new(AlgebraTerm::Hedge(children))))
}

/// Shared updates on node sublocations of `pgm` whose collapse against a
/// state holding `t` is the single update `(pgm, t2)`.
pub fn tree_diff_updates(t: &Tree, t2: &Tree) -> Result<UpdateMultiset, StepError> {
    let (p1, p2) = programs(t, t2)?;
    let mut out = Vec::new();
    if t == t2 {
        return Ok(UpdateMultiset::new());
    }
    let pgm = Location::nullary(PGM);
    let shared = |path: NodePath, op: &str, operands: Vec<Value>| UpdateItem::Shared {
        location: pgm.clone().at(path),
        op: Name::new(op),
        operands,
    };
    let c1 = t.child_indices(0);
    let c2 = t2.child_indices(0);
    let sig_pos = signature_position(&p1);
    if c1.len() != c2.len() || sig_pos != signature_position(&p2) {
        out.push(shared(NodePath::root(), "replace", vec![Value::Tree(t2.clone())]));
        return Ok(UpdateMultiset::from_vec(out));
    }
    for (k, (&a, &b)) in c1.iter().zip(&c2).enumerate() {
        let path = NodePath(vec![k]);
        if k == sig_pos {
            let (s1, s2) = (t.subtree_at_index(a), t2.subtree_at_index(b));
            match appended_funcs(&s1, &s2) {
                Some(extra) if extra.is_empty() => {}
                Some(extra) => out.push(shared(path, "right_extend", extra.into_iter().map(Value::Tree).collect())),
                None => out.push(shared(path, "replace", vec![Value::Tree(s2)])),
            }
            continue;
        }
        walk(t, a, t2, b, path, &mut |p, v| out.push(shared(p, "replace", vec![Value::Tree(v)])));
    }
    Ok(UpdateMultiset::from_vec(out))
}

fn walk(t: &Tree, a: usize, t2: &Tree, b: usize, path: NodePath, emit: &mut impl FnMut(NodePath, Tree)) {
    let (na, nb) = (&t.nodes()[a], &t2.nodes()[b]);
    if t.nodes()[a..a + na.size] == t2.nodes()[b..b + nb.size] {
        return;
    }
    let ca = t.child_indices(a);
    let cb = t2.child_indices(b);
    let label = nb.label.as_str();
    let descend = na.label == nb.label
        && !ca.is_empty()
        && ca.len() == cb.len()
        && label != L::UPDATE
        && label != L::PARTIAL;
    if !descend {
        emit(path, t2.subtree_at_index(b));
        return;
    }
    for (k, (x, y)) in ca.into_iter().zip(cb).enumerate() {
        walk(t, x, t2, y, path.child(k), emit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{collapse, OpRegistry, Rule, Signature, State, Term};
    use crate::reflection::drop_program;

    fn program(sig: &[(&str, usize)], r: &Rule) -> Tree {
        drop_program(&Signature::from_iter(sig.iter().map(|(n, a)| FunctionSymbol::new(n, *a))), r)
    }

    fn state_with(t: &Tree) -> State {
        let raised = ProgramTree::new(t.clone()).unwrap().signature().unwrap();
        let mut s = State::new(raised);
        s.set(Location::nullary(PGM), Value::Tree(t.clone())).unwrap();
        s
    }

    #[test]
    fn identity_diff() {
        let t = program(&[("f", 0)], &Rule::assign("f", vec![], Term::lit(1u64)));
        assert_eq!(tree_diff_theta(&t, &t).unwrap(), AlgebraTerm::Subtree(NodePath::root()));
        assert!(tree_diff_updates(&t, &t).unwrap().is_empty());
    }

    #[test]
    fn signature_growth_uses_right_extend() {
        let r = Rule::assign("f", vec![], Term::lit(1u64));
        let t = program(&[("f", 0)], &r);
        let t2 = program(&[("f", 0), ("g", 1)], &r);
        let theta = tree_diff_theta(&t, &t2).unwrap();
        assert_eq!(
            theta.to_string(),
            "label_hedge(pgm, [right_extend([label_hedge(func, [#name=⟨@g⟩, #arity=⟨1⟩])], subtree@0), subtree@1])"
        );
        assert_eq!(theta.eval_tree(&t).unwrap(), t2);
    }

    #[test]
    fn changed_assignment() {
        let t = program(
            &[("f", 0), ("g", 0)],
            &Rule::Par(vec![Rule::assign("f", vec![], Term::lit(1u64)), Rule::assign("g", vec![], Term::lit(2u64))]),
        );
        let t2 = program(
            &[("f", 0), ("g", 0)],
            &Rule::Par(vec![Rule::assign("f", vec![], Term::lit(1u64)), Rule::assign("g", vec![], Term::lit(3u64))]),
        );
        assert_eq!(tree_diff_theta(&t, &t2).unwrap().eval_tree(&t).unwrap(), t2);
        let um = tree_diff_updates(&t, &t2).unwrap();
        assert_eq!(um.len(), 1);
        let u = collapse(&state_with(&t), &um, &OpRegistry::default());
        assert_eq!(u.updates.into_iter().collect::<Vec<_>>(), vec![(Location::nullary(PGM), Value::Tree(t2))]);
    }

    #[test]
    fn shrinking_is_rejected() {
        let t = program(&[("f", 0)], &Rule::skip());
        let t2 = program(&[], &Rule::skip());
        assert!(matches!(tree_diff_theta(&t, &t2), Err(StepError::SignatureShrunk(_))));
    }
}
