use std::collections::{BTreeMap, BTreeSet};

use super::ops::{OpClass, OpRegistry};
use super::{Location, State};
use crate::value::{Name, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpdateItem {
    Ordinary(Location, Value),
    /// A contribution `op(operands)` to the value at `location`, merged with
    /// the other contributions to the same base location at collapse time.
    Shared { location: Location, op: Name, operands: Vec<Value> },
}

impl UpdateItem {
    pub fn location(&self) -> &Location {
        match self {
            UpdateItem::Ordinary(l, _) => l,
            UpdateItem::Shared { location, .. } => location,
        }
    }
}

/// A multiset of updates, kept sorted so that equality ignores order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpdateMultiset(Vec<UpdateItem>);

impl UpdateMultiset {
    pub fn new() -> Self {
        UpdateMultiset(Vec::new())
    }

    pub fn from_vec(mut items: Vec<UpdateItem>) -> Self {
        items.sort();
        UpdateMultiset(items)
    }

    pub fn push(&mut self, item: UpdateItem) {
        let at = self.0.partition_point(|x| x <= &item);
        self.0.insert(at, item);
    }

    pub fn extend(&mut self, other: UpdateMultiset) {
        self.0.extend(other.0);
        self.0.sort();
    }

    pub fn items(&self) -> &[UpdateItem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<UpdateItem> for UpdateMultiset {
    fn from_iter<I: IntoIterator<Item = UpdateItem>>(iter: I) -> Self {
        UpdateMultiset::from_vec(iter.into_iter().collect())
    }
}

/// Collapsed updates on base locations. Clashing locations keep every
/// ordinary value that was proposed for them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UpdateSet {
    pub updates: BTreeSet<(Location, Value)>,
    pub clashes: BTreeSet<Location>,
}

impl UpdateSet {
    pub fn is_consistent(&self) -> bool {
        self.clashes.is_empty()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Location, Value)>) -> Self {
        let updates: BTreeSet<_> = pairs.into_iter().collect();
        let mut seen: BTreeMap<&Location, &Value> = BTreeMap::new();
        let mut clashes = BTreeSet::new();
        for (l, v) in &updates {
            if let Some(prev) = seen.insert(l, v) {
                if prev != v {
                    clashes.insert(l.clone());
                }
            }
        }
        UpdateSet { updates, clashes }
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }
}

/// Groups of shared updates up to this size are checked for order
/// independence by trying every permutation.
pub const MAX_BRUTE_FORCE_GROUP: usize = 6;

/// Collapses an update multiset into an update set against the values in `s`.
pub fn collapse(s: &State, um: &UpdateMultiset, ops: &OpRegistry) -> UpdateSet {
    let mut groups: BTreeMap<Location, Vec<&UpdateItem>> = BTreeMap::new();
    for item in um.items() {
        groups.entry(item.location().base()).or_default().push(item);
    }
    let mut out = UpdateSet::default();
    for (loc, items) in groups {
        let mut ordinary = BTreeSet::new();
        let mut shared = Vec::new();
        for item in items {
            match item {
                UpdateItem::Ordinary(l, v) if !l.is_sublocation() => {
                    ordinary.insert(v.clone());
                }
                UpdateItem::Ordinary(l, v) => shared.push((l, "replace", vec![v.clone()])),
                UpdateItem::Shared { location, op, operands } => {
                    shared.push((location, op.as_str(), operands.clone()))
                }
            }
        }
        if shared.is_empty() {
            if ordinary.len() > 1 {
                out.clashes.insert(loc.clone());
            }
            out.updates.extend(ordinary.into_iter().map(|v| (loc.clone(), v)));
            continue;
        }
        if !ordinary.is_empty() {
            out.clashes.insert(loc.clone());
            out.updates.extend(ordinary.into_iter().map(|v| (loc.clone(), v)));
            continue;
        }
        match fold_shared(&s.get(&loc), &shared, ops) {
            Some(v) => {
                out.updates.insert((loc, v));
            }
            None => {
                out.clashes.insert(loc);
            }
        }
    }
    out
}

type SharedRef<'a> = (&'a Location, &'a str, Vec<Value>);

fn fold_shared(base: &Value, group: &[SharedRef<'_>], ops: &OpRegistry) -> Option<Value> {
    let mut resolved = Vec::with_capacity(group.len());
    for (loc, name, operands) in group {
        resolved.push((*loc, ops.get(name)?, operands));
    }
    let fold = |order: &[usize]| -> Option<Value> {
        let mut acc = base.clone();
        for &i in order {
            let (loc, op, operands) = &resolved[i];
            acc = op.apply(&acc, &loc.path, operands)?;
        }
        Some(acc)
    };
    let identity: Vec<usize> = (0..resolved.len()).collect();
    let first = &resolved[0].1;
    let same_commutative = first.class == OpClass::Commutative
        && resolved.iter().all(|(_, op, _)| op.name == first.name);
    let disjoint_nodes = resolved.iter().all(|(_, op, _)| op.class == OpClass::Node)
        && resolved.iter().enumerate().all(|(i, (a, _, _))| {
            resolved[i + 1..]
                .iter()
                .all(|(b, _, _)| !a.path.is_prefix_of(&b.path) && !b.path.is_prefix_of(&a.path))
        });
    if same_commutative || disjoint_nodes {
        return fold(&identity);
    }
    if resolved.len() > MAX_BRUTE_FORCE_GROUP {
        return None;
    }
    let mut result: Option<Value> = None;
    for order in permutations(resolved.len()) {
        let v = fold(&order)?;
        match &result {
            None => result = Some(v),
            Some(prev) if *prev != v => return None,
            Some(_) => {}
        }
    }
    result
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else { break };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// `S + Δ`: pointwise overwrite when consistent, `S` otherwise.
pub fn apply_update_set(s: &State, u: &UpdateSet) -> State {
    if !u.is_consistent() {
        return s.clone();
    }
    let mut next = s.clone();
    for (loc, v) in &u.updates {
        next.set_unchecked(loc.clone(), v.clone());
    }
    next
}

/// Whether the value at `l1` determines the value at `l2`: true when `l2` is
/// `l1` itself or a node sublocation below it.
pub fn subsumes(l1: &Location, l2: &Location) -> bool {
    l1.symbol == l2.symbol && l1.args == l2.args && l1.path.is_prefix_of(&l2.path)
}

/// `l1` depends on `l2` when `l2` subsumes it.
pub fn depends_on(l1: &Location, l2: &Location) -> bool {
    subsumes(l2, l1)
}
