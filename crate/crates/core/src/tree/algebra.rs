//! Selectors, substitutions and the hedge/context algebra operators.
//!
//! Every result carries canonical preorder identifiers.

use super::{child_indices, parent_index, splice, Context, Hedge, Label, Node, NodeId, Tree, TreeError};

/// The largest subtree rooted at `o`.
pub fn subtree(t: &Tree, o: NodeId) -> Result<Tree, TreeError> {
    Ok(t.subtree_at_index(t.index_of(o)?))
}

/// The subtree at `o1` with the subtree at `o2` replaced by ξ; the trivial
/// context when `o1 = o2`.
pub fn context_at(t: &Tree, o1: NodeId, o2: NodeId) -> Result<Context, TreeError> {
    let i1 = t.index_of(o1)?;
    let i2 = t.index_of(o2)?;
    let nodes = t.nodes();
    if !(i1 <= i2 && i2 < i1 + nodes[i1].size) {
        return Err(TreeError::NotAnAncestor { ancestor: o1, descendant: o2 });
    }
    let sub = &nodes[i1..i1 + nodes[i1].size];
    Ok(Context {
        tree: Tree::from_nodes(splice(sub, i2 - i1, &[hole_node()])),
        hole: i2 - i1,
    })
}

fn hole_node() -> Node {
    Node { label: Label::Hole, value: None, size: 1 }
}

/// `t1[ô ↦ t2]`.
pub fn subst_tt(t1: &Tree, o: NodeId, t2: &Tree) -> Result<Tree, TreeError> {
    let i = t1.index_of(o)?;
    Ok(Tree::from_nodes(splice(t1.nodes(), i, t2.nodes())))
}

/// `t1[ô ↦ c]`.
pub fn subst_tc(t1: &Tree, o: NodeId, c: &Context) -> Result<Context, TreeError> {
    let i = t1.index_of(o)?;
    Ok(Context { tree: Tree::from_nodes(splice(t1.nodes(), i, c.nodes())), hole: i + c.hole })
}

/// `c1[ξ ↦ c2]`.
pub fn subst_cc(c1: &Context, c2: &Context) -> Context {
    Context {
        tree: Tree::from_nodes(splice(c1.nodes(), c1.hole, c2.nodes())),
        hole: c1.hole + c2.hole,
    }
}

/// `c[ξ ↦ t]`.
pub fn subst_ct(c: &Context, t: &Tree) -> Tree {
    Tree::from_nodes(splice(c.nodes(), c.hole, t.nodes()))
}

/// `a⟨h⟩`.
pub fn label_hedge(a: &Label, h: &Hedge) -> Result<Tree, TreeError> {
    if a.is_hole() {
        return Err(TreeError::XiLabelForbidden);
    }
    let mut nodes = vec![Node { label: a.clone(), value: None, size: 0 }];
    nodes.extend(h.flat_nodes());
    nodes[0].size = nodes.len();
    Ok(Tree::from_nodes(nodes))
}

/// `a⟨c⟩`.
pub fn label_context(a: &Label, c: &Context) -> Result<Context, TreeError> {
    if a.is_hole() {
        return Err(TreeError::XiLabelForbidden);
    }
    let mut nodes = vec![Node { label: a.clone(), value: None, size: c.nodes().len() + 1 }];
    nodes.extend_from_slice(c.nodes());
    Ok(Context { tree: Tree::from_nodes(nodes), hole: c.hole + 1 })
}

/// Prepends the hedge to the children of the context's root.
pub fn left_extend(h: &Hedge, c: &Context) -> Result<Context, TreeError> {
    if c.is_trivial() {
        return Err(TreeError::TrivialContextNotExtendable);
    }
    let (nodes, shift) = insert_children(c.nodes(), h, false)?;
    Ok(Context { tree: Tree::from_nodes(nodes), hole: c.hole + shift })
}

/// Appends the hedge to the children of the context's root.
pub fn right_extend(h: &Hedge, c: &Context) -> Result<Context, TreeError> {
    if c.is_trivial() {
        return Err(TreeError::TrivialContextNotExtendable);
    }
    let (nodes, _) = insert_children(c.nodes(), h, true)?;
    Ok(Context { tree: Tree::from_nodes(nodes), hole: c.hole })
}

/// Tree analogue of [`left_extend`], used by the shared-update operators.
pub fn left_extend_tree(h: &Hedge, t: &Tree) -> Result<Tree, TreeError> {
    Ok(Tree::from_nodes(insert_children(t.nodes(), h, false)?.0))
}

/// Tree analogue of [`right_extend`].
pub fn right_extend_tree(h: &Hedge, t: &Tree) -> Result<Tree, TreeError> {
    Ok(Tree::from_nodes(insert_children(t.nodes(), h, true)?.0))
}

fn insert_children(nodes: &[Node], h: &Hedge, at_end: bool) -> Result<(Vec<Node>, usize), TreeError> {
    let extra = h.flat_nodes();
    if extra.is_empty() {
        return Ok((nodes.to_vec(), 0));
    }
    if nodes[0].value.is_some() {
        return Err(TreeError::ValueOnInternalNode);
    }
    let mut out = Vec::with_capacity(nodes.len() + extra.len());
    out.push(Node { size: nodes.len() + extra.len(), ..nodes[0].clone() });
    let shift = extra.len();
    if at_end {
        out.extend_from_slice(&nodes[1..]);
        out.extend(extra);
    } else {
        out.extend(extra);
        out.extend_from_slice(&nodes[1..]);
    }
    Ok((out, shift))
}

pub fn concat_hedges(h1: &Hedge, h2: &Hedge) -> Hedge {
    Hedge(h1.0.iter().chain(h2.0.iter()).cloned().collect())
}

/// Splices the hedge's trees in place of ξ.
pub fn inject_hedge(c: &Context, h: &Hedge) -> Result<Tree, TreeError> {
    if c.hole == 0 {
        return match h.0.as_slice() {
            [] => Err(TreeError::EmptyHedgeAtRoot),
            [t] => Ok(t.canonical()),
            more => Err(TreeError::HedgeAtRoot(more.len())),
        };
    }
    Ok(Tree::from_nodes(splice(c.nodes(), c.hole, &h.flat_nodes())))
}

pub fn inject_context(c1: &Context, c2: &Context) -> Context {
    subst_cc(c1, c2)
}

/// Structural equality up to identifier renaming.
pub fn trees_equal(t1: &Tree, t2: &Tree) -> bool {
    t1 == t2
}

/// The general subtree relation `t1 ⊑ t2` over node identifiers: the nodes of
/// `t1` are nodes of `t2`, with the same labels, the same parent/child and
/// next-sibling relations among them, and the same leaf values.
pub fn is_subtree_of(t1: &Tree, t2: &Tree) -> bool {
    let n1 = t1.nodes();
    let n2 = t2.nodes();
    let mut map = Vec::with_capacity(n1.len());
    for i in 0..n1.len() {
        match t2.index_of(t1.id_at(i)) {
            Ok(j) => map.push(j),
            Err(_) => return false,
        }
    }
    for i in 0..n1.len() {
        let j = map[i];
        if n1[i].label != n2[j].label {
            return false;
        }
        if n1[i].size == 1 && n1[i].value != n2[j].value {
            return false;
        }
    }
    let parent1 = |i: usize| parent_index(n1, i).map(|p| map[p]);
    for a in 0..n1.len() {
        for b in 0..n1.len() {
            let child1 = parent1(b) == Some(map[a]);
            let child2 = parent_index(n2, map[b]) == Some(map[a]);
            if child1 != child2 {
                return false;
            }
            if next_sibling(n1, a) == Some(b) {
                if next_sibling(n2, map[a]) != Some(map[b]) {
                    return false;
                }
            } else if next_sibling(n2, map[a]) == Some(map[b]) {
                return false;
            }
        }
    }
    true
}

fn next_sibling(nodes: &[Node], i: usize) -> Option<usize> {
    let p = parent_index(nodes, i)?;
    child_indices(nodes, p).into_iter().find(|&c| c > i)
}
