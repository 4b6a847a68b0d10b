//! Unranked labelled trees, contexts and hedges.
//!
//! Trees are stored as a flat preorder arena: every node records its label,
//! an optional leaf value, and the size of the subtree it roots. The subtree
//! at preorder index `i` is therefore the slice `i..i + size`, which keeps the
//! substitution operators to a handful of slice copies.
//!
//! Node identifiers are canonical (the preorder index) for every tree built by
//! an algebra operation. A tree can be given arbitrary identifiers with
//! [`Tree::renumbered`]; equality, ordering and hashing ignore identifiers.

mod algebra;

pub use algebra::*;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::value::{Name, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Position of a node as the sequence of child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn to_value(&self) -> Value {
        Value::Tuple(self.0.iter().map(|&i| Value::Nat(i as u64)).collect())
    }

    pub fn from_value(v: &Value) -> Option<NodePath> {
        match v {
            Value::Tuple(items) => items
                .iter()
                .map(|x| x.as_nat().map(|n| n as usize))
                .collect::<Option<Vec<_>>>()
                .map(NodePath),
            Value::Nat(n) => Some(NodePath(vec![*n as usize])),
            _ => None,
        }
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A node label. `Hole` is the ξ label and only occurs inside contexts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Hole,
    Name(Name),
}

impl Label {
    pub fn new(s: impl AsRef<str>) -> Label {
        Label::Name(Name::new(s))
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Label::Hole)
    }

    pub fn as_str(&self) -> &str {
        match self {
            Label::Hole => "^",
            Label::Name(n) => n.as_str(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no node at path {0}")]
    UnknownPath(NodePath),
    #[error("node {ancestor} is not a proper ancestor of {descendant}")]
    NotAnAncestor { ancestor: NodeId, descendant: NodeId },
    #[error("the hole label ξ cannot be used here")]
    XiLabelForbidden,
    #[error("the trivial context cannot be extended")]
    TrivialContextNotExtendable,
    #[error("cannot inject an empty hedge at a root hole")]
    EmptyHedgeAtRoot,
    #[error("cannot inject a hedge of {0} trees at a root hole")]
    HedgeAtRoot(usize),
    #[error("internal node would carry a value")]
    ValueOnInternalNode,
    #[error("expected exactly one ξ-leaf, found {0}")]
    NotAContext(usize),
    #[error("the ξ-leaf must be a leaf without a value")]
    MalformedHole,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Node {
    pub label: Label,
    pub value: Option<Value>,
    pub size: usize,
}

/// An immutable unranked tree.
#[derive(Clone)]
pub struct Tree {
    nodes: Arc<[Node]>,
    ids: Option<Arc<[NodeId]>>,
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes == other.nodes
    }
}

impl Eq for Tree {}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.nodes.cmp(&other.nodes)
    }
}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.nodes.hash(state)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl Tree {
    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Tree {
        debug_assert!(!nodes.is_empty() && nodes[0].size == nodes.len());
        Tree { nodes: nodes.into(), ids: None }
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// A single-node tree. The value is dropped if it is `undef`.
    pub fn leaf(label: Label, value: Option<Value>) -> Result<Tree, TreeError> {
        if label.is_hole() {
            return Err(TreeError::XiLabelForbidden);
        }
        Ok(Tree::from_nodes(vec![Node { label, value: normalize(value), size: 1 }]))
    }

    /// Shorthand for a leaf with a plain name and no value.
    pub fn atom_leaf(label: &str) -> Tree {
        Tree::leaf(Label::new(label), None).expect("named label")
    }

    /// Shorthand for a leaf carrying a value.
    pub fn value_leaf(label: &str, value: Value) -> Tree {
        Tree::leaf(Label::new(label), Some(value)).expect("named label")
    }

    /// `label⟨children⟩`.
    pub fn node(label: &str, children: Vec<Tree>) -> Tree {
        label_hedge(&Label::new(label), &Hedge(children)).expect("named label")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        self.id_at(0)
    }

    pub fn root_label(&self) -> &Label {
        &self.nodes[0].label
    }

    pub fn root_value(&self) -> Option<&Value> {
        self.nodes[0].value.as_ref()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(|i| self.id_at(i))
    }

    pub(crate) fn id_at(&self, index: usize) -> NodeId {
        match &self.ids {
            None => NodeId(index as u64),
            Some(ids) => ids[index],
        }
    }

    pub(crate) fn index_of(&self, id: NodeId) -> Result<usize, TreeError> {
        match &self.ids {
            None if (id.0 as usize) < self.nodes.len() => Ok(id.0 as usize),
            None => Err(TreeError::UnknownNode(id)),
            Some(ids) => ids.iter().position(|x| *x == id).ok_or(TreeError::UnknownNode(id)),
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index_of(id).is_ok()
    }

    pub fn label(&self, id: NodeId) -> Result<&Label, TreeError> {
        Ok(&self.nodes[self.index_of(id)?].label)
    }

    pub fn value(&self, id: NodeId) -> Option<&Value> {
        self.index_of(id).ok().and_then(|i| self.nodes[i].value.as_ref())
    }

    pub fn is_leaf(&self, id: NodeId) -> Result<bool, TreeError> {
        Ok(self.nodes[self.index_of(id)?].size == 1)
    }

    pub(crate) fn child_indices(&self, i: usize) -> Vec<usize> {
        child_indices(&self.nodes, i)
    }

    pub fn children(&self, id: NodeId) -> Result<Vec<NodeId>, TreeError> {
        let i = self.index_of(id)?;
        Ok(self.child_indices(i).into_iter().map(|c| self.id_at(c)).collect())
    }

    pub fn parent(&self, id: NodeId) -> Result<Option<NodeId>, TreeError> {
        let i = self.index_of(id)?;
        Ok(parent_index(&self.nodes, i).map(|p| self.id_at(p)))
    }

    /// The next sibling, if any.
    pub fn next_sibling(&self, id: NodeId) -> Result<Option<NodeId>, TreeError> {
        let i = self.index_of(id)?;
        let Some(p) = parent_index(&self.nodes, i) else { return Ok(None) };
        let next = i + self.nodes[i].size;
        Ok((next < p + self.nodes[p].size).then(|| self.id_at(next)))
    }

    /// The subtrees rooted at the root's children, in order.
    pub fn child_trees(&self) -> Vec<Tree> {
        self.child_indices(0).into_iter().map(|c| self.subtree_at_index(c)).collect()
    }

    pub(crate) fn subtree_at_index(&self, i: usize) -> Tree {
        if i == 0 && self.ids.is_none() {
            return self.clone();
        }
        Tree::from_nodes(self.nodes[i..i + self.nodes[i].size].to_vec())
    }

    pub fn path_of(&self, id: NodeId) -> Result<NodePath, TreeError> {
        let target = self.index_of(id)?;
        let mut path = Vec::new();
        let mut i = 0;
        while i != target {
            let (k, c) = self
                .child_indices(i)
                .into_iter()
                .enumerate()
                .find(|(_, c)| *c <= target && target < c + self.nodes[*c].size)
                .expect("target lies inside the subtree");
            path.push(k);
            i = c;
        }
        Ok(NodePath(path))
    }

    pub(crate) fn index_at_path(&self, path: &NodePath) -> Result<usize, TreeError> {
        let mut i = 0;
        for &k in &path.0 {
            i = *self
                .child_indices(i)
                .get(k)
                .ok_or_else(|| TreeError::UnknownPath(path.clone()))?;
        }
        Ok(i)
    }

    pub fn node_at(&self, path: &NodePath) -> Result<NodeId, TreeError> {
        Ok(self.id_at(self.index_at_path(path)?))
    }

    /// Same structure, identifiers replaced by `f(preorder index)`. `f` must be
    /// injective; the result is not checked.
    pub fn renumbered(&self, f: impl Fn(usize) -> NodeId) -> Tree {
        Tree {
            nodes: self.nodes.clone(),
            ids: Some((0..self.nodes.len()).map(f).collect()),
        }
    }

    /// Same structure with canonical preorder identifiers.
    pub fn canonical(&self) -> Tree {
        Tree { nodes: self.nodes.clone(), ids: None }
    }

    pub fn hole_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.label.is_hole()).count()
    }

    pub fn map_values(&self, f: &mut impl FnMut(&Value) -> Value) -> Tree {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                label: n.label.clone(),
                value: normalize(n.value.as_ref().map(&mut *f)),
                size: n.size,
            })
            .collect::<Vec<_>>();
        Tree { nodes: nodes.into(), ids: self.ids.clone() }
    }

    /// Hash-consing key of every subtree, by preorder index.
    pub(crate) fn subtree_slices(&self) -> impl Iterator<Item = (usize, &[Node])> {
        (0..self.nodes.len()).map(|i| (i, &self.nodes[i..i + self.nodes[i].size]))
    }
}

pub(crate) fn normalize(v: Option<Value>) -> Option<Value> {
    match v {
        Some(Value::Undef) => None,
        other => other,
    }
}

pub(crate) fn child_indices(nodes: &[Node], i: usize) -> Vec<usize> {
    let end = i + nodes[i].size;
    let mut out = Vec::new();
    let mut c = i + 1;
    while c < end {
        out.push(c);
        c += nodes[c].size;
    }
    out
}

pub(crate) fn parent_index(nodes: &[Node], i: usize) -> Option<usize> {
    (0..i).rev().find(|&j| j + nodes[j].size > i)
}

/// Replaces the subtree at `i` by `replacement` (a sequence of complete
/// subtrees, possibly empty) and fixes up the ancestors' sizes.
pub(crate) fn splice(nodes: &[Node], i: usize, replacement: &[Node]) -> Vec<Node> {
    let old = nodes[i].size;
    let mut out = Vec::with_capacity(nodes.len() - old + replacement.len());
    out.extend_from_slice(&nodes[..i]);
    out.extend_from_slice(replacement);
    out.extend_from_slice(&nodes[i + old..]);
    for j in 0..i {
        if j + nodes[j].size > i {
            out[j].size = out[j].size + replacement.len() - old;
        }
    }
    out
}

/// A tree with exactly one ξ-leaf.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    tree: Tree,
    hole: usize,
}

impl Context {
    /// The trivial context ξ.
    pub fn hole() -> Context {
        Context {
            tree: Tree::from_nodes(vec![Node { label: Label::Hole, value: None, size: 1 }]),
            hole: 0,
        }
    }

    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Result<Context, TreeError> {
        Context::from_tree(Tree::from_nodes(nodes))
    }

    /// Checks the context invariant on an arbitrary labelled tree.
    pub fn from_tree(tree: Tree) -> Result<Context, TreeError> {
        let holes: Vec<usize> =
            (0..tree.len()).filter(|&i| tree.nodes[i].label.is_hole()).collect();
        if holes.len() != 1 {
            return Err(TreeError::NotAContext(holes.len()));
        }
        let hole = holes[0];
        if tree.nodes[hole].size != 1 || tree.nodes[hole].value.is_some() {
            return Err(TreeError::MalformedHole);
        }
        Ok(Context { tree: tree.canonical(), hole })
    }

    pub fn is_trivial(&self) -> bool {
        self.tree.len() == 1
    }

    pub fn as_tree(&self) -> &Tree {
        &self.tree
    }

    pub fn hole_id(&self) -> NodeId {
        NodeId(self.hole as u64)
    }

    pub fn hole_index(&self) -> usize {
        self.hole
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        self.tree.nodes()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tree.fmt(f)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context({})", self.tree)
    }
}

/// A finite sequence of trees; ε is the empty hedge.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hedge(pub Vec<Tree>);

impl Hedge {
    pub fn empty() -> Hedge {
        Hedge(Vec::new())
    }

    pub fn single(t: Tree) -> Hedge {
        Hedge(vec![t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn flat_nodes(&self) -> Vec<Node> {
        self.0.iter().flat_map(|t| t.nodes().iter().cloned()).collect()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_subtree(f, &self.nodes, 0)
    }
}

fn write_subtree(f: &mut fmt::Formatter<'_>, nodes: &[Node], i: usize) -> fmt::Result {
    let n = &nodes[i];
    f.write_str(n.label.as_str())?;
    if n.size == 1 {
        if let Some(v) = &n.value {
            write!(f, "=⟨{v}⟩")?;
        }
        return Ok(());
    }
    f.write_str("⟨")?;
    for (k, c) in child_indices(nodes, i).into_iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write_subtree(f, nodes, c)?;
    }
    f.write_str("⟩")
}
