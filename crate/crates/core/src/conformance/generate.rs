//! Seeded generators for trees, contexts, rules, states and program edits.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::asm::{BackgroundOp, FunctionSymbol, Location, Rule, Signature, State, SymbolKind, Term};
use crate::reflection::{drop_func, drop_program};
use crate::tree::{right_extend_tree, Context, Hedge, Label, Node, Tree};
use crate::value::{Name, Value};

const LABELS: &[&str] = &["a", "b", "c", "d"];

fn leaf_value(rng: &mut impl Rng) -> Option<Value> {
    match rng.gen_range(0..4) {
        0 => None,
        1 => Some(Value::Nat(rng.gen_range(0..5))),
        2 => Some(Value::atom(*LABELS.choose(rng).unwrap())),
        _ => Some(Value::Bool(rng.gen())),
    }
}

/// A tree of depth at most `depth` (a single leaf has depth 1) whose nodes
/// have at most `branching` children.
pub fn tree(rng: &mut impl Rng, depth: usize, branching: usize) -> Tree {
    let label = *LABELS.choose(rng).unwrap();
    if depth <= 1 || rng.gen_bool(0.3) {
        return Tree::leaf(Label::new(label), leaf_value(rng)).expect("named label");
    }
    let n = rng.gen_range(1..=branching.max(1));
    let children = (0..n).map(|_| tree(rng, depth - 1, branching)).collect();
    Tree::node(label, children)
}

/// A context obtained by replacing a random node of a random tree with ξ.
pub fn context(rng: &mut impl Rng, depth: usize, branching: usize) -> Context {
    let t = tree(rng, depth, branching);
    let i = rng.gen_range(0..t.len());
    let hole = [Node { label: Label::Hole, value: None, size: 1 }];
    Context::from_nodes(crate::tree::splice(t.nodes(), i, &hole)).expect("exactly one hole")
}

/// The signature rules and states are generated over: `f/0`, `g/1`,
/// `h/2`, a relational `p/1` and a static `c/0`.
pub fn signature() -> Signature {
    Signature::from_iter([
        FunctionSymbol::new("f", 0),
        FunctionSymbol::new("g", 1),
        FunctionSymbol::new("h", 2),
        FunctionSymbol::new("p", 1).with_kind(SymbolKind::Relational),
        FunctionSymbol::new("c", 0).with_kind(SymbolKind::Static),
    ])
}

const VARS: &[&str] = &["x", "y", "z", "w"];
const ASSIGNABLE: &[(&str, usize)] = &[("f", 0), ("g", 1), ("h", 2), ("p", 1)];

/// Options for [`rule`].
#[derive(Clone, Copy, Debug)]
pub struct RuleShape {
    pub depth: usize,
    pub partials: bool,
}

pub struct Gen<'r, R: Rng> {
    pub rng: &'r mut R,
    scope: Vec<Name>,
}

impl<'r, R: Rng> Gen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        Gen { rng, scope: Vec::new() }
    }

    fn literal(&mut self) -> Value {
        match self.rng.gen_range(0..6) {
            0 | 1 => Value::Nat(self.rng.gen_range(0..3)),
            2 | 3 => Value::atom(["a", "b", "c"].choose(self.rng).unwrap()),
            4 => Value::Bool(self.rng.gen()),
            _ => Value::Tuple(vec![Value::Nat(self.rng.gen_range(0..3)), Value::atom("a")]),
        }
    }

    fn fresh_var(&mut self) -> Name {
        Name::new(*VARS.choose(self.rng).unwrap())
    }

    /// A term of any type.
    pub fn term(&mut self, depth: usize) -> Term {
        let leafy = depth == 0 || self.rng.gen_bool(0.35);
        if leafy {
            return match self.rng.gen_range(0..4) {
                0 if !self.scope.is_empty() => Term::Var(self.scope.choose(self.rng).unwrap().clone()),
                1 => Term::constant("f"),
                2 => Term::constant("c"),
                _ => Term::Lit(self.literal()),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => Term::apply("g", vec![self.term(d)]),
            1 => Term::apply("h", vec![self.term(d), self.term(d)]),
            2 => Term::op(BackgroundOp::Add, vec![self.term(d), self.term(d)]),
            3 => Term::op(BackgroundOp::Sub, vec![self.term(d), self.term(d)]),
            4 => Term::op(BackgroundOp::Tuple, (0..self.rng.gen_range(0..3)).map(|_| self.term(d)).collect()),
            5 => Term::op(BackgroundOp::Proj, vec![self.term(d), Term::lit(self.rng.gen_range(0..2u64))]),
            6 => Term::op(BackgroundOp::Card, vec![self.comprehension(d)]),
            7 => self.comprehension(d),
            8 => Term::op(BackgroundOp::Multiset, (0..self.rng.gen_range(0..3)).map(|_| self.term(d)).collect()),
            _ => self.boolean(d),
        }
    }

    fn comprehension(&mut self, depth: usize) -> Term {
        let n = self.rng.gen_range(0..=2);
        let binders: Vec<Name> = (0..n).map(|_| self.fresh_var()).collect();
        let mark = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let head = self.term(depth);
        let guard = self.boolean(depth);
        self.scope.truncate(mark);
        Term::comprehension(head, binders, guard)
    }

    /// A term whose value is a truth value or `undef`.
    pub fn boolean(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..3) {
                0 => Term::lit(self.rng.gen::<bool>()),
                _ => Term::apply("p", vec![self.term(0)]),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 => Term::op(BackgroundOp::Eq, vec![self.term(d), self.term(d)]),
            1 => Term::op(BackgroundOp::Ne, vec![self.term(d), self.term(d)]),
            2 => Term::op(BackgroundOp::Lt, vec![self.term(d), self.term(d)]),
            3 => Term::op(BackgroundOp::And, vec![self.boolean(d), self.boolean(d)]),
            4 => Term::op(BackgroundOp::Or, vec![self.boolean(d), self.boolean(d)]),
            5 => Term::op(BackgroundOp::Not, vec![self.boolean(d)]),
            6 => Term::op(BackgroundOp::Defined, vec![self.term(d)]),
            _ => Term::apply("p", vec![self.term(d)]),
        }
    }

    fn location(&mut self) -> (Name, Vec<Term>) {
        let (f, n) = *ASSIGNABLE.choose(self.rng).unwrap();
        (Name::new(f), (0..n).map(|_| self.term(1)).collect())
    }

    /// A rule of nesting depth at most `shape.depth`.
    pub fn rule(&mut self, shape: RuleShape) -> Rule {
        let d = shape.depth.saturating_sub(1);
        let kinds = if shape.partials { 8 } else { 7 };
        let k = if shape.depth <= 1 { self.rng.gen_range(0..2) * 7 % kinds } else { self.rng.gen_range(0..kinds) };
        let sub = RuleShape { depth: d, ..shape };
        match k {
            0 => {
                let (func, args) = self.location();
                let rhs = if func.as_str() == "p" { self.boolean(2) } else { self.term(2) };
                Rule::Assign { func, args, rhs }
            }
            1 => Rule::if_then_else(self.boolean(2), self.rule(sub), self.rule(sub)),
            2 => Rule::Par((0..self.rng.gen_range(0..=3)).map(|_| self.rule(sub)).collect()),
            3 => {
                let x = self.fresh_var();
                self.scope.push(x.clone());
                let guard = self.boolean(2);
                let body = self.rule(sub);
                self.scope.pop();
                Rule::Forall { var: x, guard, body: Box::new(body) }
            }
            4 => {
                let x = self.fresh_var();
                let binding = self.term(2);
                self.scope.push(x.clone());
                let body = self.rule(sub);
                self.scope.pop();
                Rule::Let { var: x, binding, body: Box::new(body) }
            }
            5 => {
                let x = self.fresh_var();
                self.scope.push(x.clone());
                let body = self.rule(sub);
                self.scope.pop();
                Rule::Import { var: x, body: Box::new(body) }
            }
            6 => Rule::if_then_else(self.boolean(1), self.rule(sub), Rule::skip()),
            _ => {
                let (func, args) = self.location();
                let op = ["add", "union"].choose(self.rng).unwrap();
                let operands = vec![self.term(1)];
                Rule::partial(func.as_str(), args, op, operands)
            }
        }
    }
}

/// A random rule over [`signature`].
pub fn rule(rng: &mut impl Rng, shape: RuleShape) -> Rule {
    Gen::new(rng).rule(shape)
}

/// A state over [`signature`] whose active domain has at most
/// `max_domain` elements.
pub fn state(rng: &mut impl Rng, max_domain: usize) -> State {
    let pool_all = [
        Value::atom("a"),
        Value::atom("b"),
        Value::atom("c"),
        Value::Nat(0),
        Value::Nat(1),
        Value::Nat(2),
        Value::Bool(true),
    ];
    let size = rng.gen_range(1..=max_domain.max(1));
    let pool: Vec<Value> = pool_all.choose_multiple(rng, size).cloned().collect();
    let mut s = State::new(signature());
    s.universe = pool.iter().cloned().collect();
    let pick = |rng: &mut dyn rand::RngCore| pool[rng.gen_range(0..pool.len())].clone();
    if rng.gen_bool(0.7) {
        s.set(Location::nullary("f"), pick(rng)).unwrap();
    }
    for _ in 0..rng.gen_range(0..4) {
        let a = pick(rng);
        s.set(Location::new("g", vec![a]), pick(rng)).unwrap();
    }
    for _ in 0..rng.gen_range(0..3) {
        let (a, b) = (pick(rng), pick(rng));
        s.set(Location::new("h", vec![a, b]), pick(rng)).unwrap();
    }
    if pool.contains(&Value::Bool(true)) {
        for _ in 0..rng.gen_range(0..3) {
            let a = pick(rng);
            s.set(Location::new("p", vec![a]), Value::Bool(true)).unwrap();
        }
    }
    s
}

fn sub_rules_mut(r: &mut Rule) -> Vec<&mut Rule> {
    match r {
        Rule::If { then, otherwise, .. } => vec![then.as_mut(), otherwise.as_mut()],
        Rule::Par(rs) => rs.iter_mut().collect(),
        Rule::Forall { body, .. } | Rule::Let { body, .. } | Rule::Import { body, .. } => vec![body.as_mut()],
        _ => Vec::new(),
    }
}

fn random_position<'a>(rng: &mut impl Rng, r: &'a mut Rule) -> &'a mut Rule {
    if rng.gen_bool(0.4) {
        return r;
    }
    let is_empty = sub_rules_mut(r).is_empty();
    if is_empty {
        return r;
    }
    let mut subs = sub_rules_mut(r);
    let k = rng.gen_range(0..subs.len());
    random_position(rng, subs.swap_remove(k))
}

/// One random edit of a rule: a replaced subrule, a new rule alongside an
/// existing one, or a changed assignment.
pub fn edit_rule(rng: &mut impl Rng, r: &mut Rule) {
    match rng.gen_range(0..3) {
        0 => {
            let at = random_position(rng, r);
            *at = rule(rng, RuleShape { depth: 2, partials: true });
        }
        1 => {
            let at = random_position(rng, r);
            let extra = rule(rng, RuleShape { depth: 1, partials: false });
            let old = std::mem::replace(at, Rule::skip());
            *at = Rule::Par(vec![old, extra]);
        }
        _ => {
            let at = random_position(rng, r);
            match at {
                Rule::Assign { rhs, .. } => *rhs = Term::lit(rng.gen_range(0..100u64)),
                other => *other = Rule::assign("f", vec![], Term::lit(rng.gen_range(0..100u64))),
            }
        }
    }
}

/// A program tree and the result of `edits` random edits to it. An edit
/// either changes the rule or appends a new symbol to the end of the
/// signature, as a running machine would.
pub fn program_pair(rng: &mut impl Rng, edits: usize) -> (Tree, Tree) {
    let sig = signature();
    let mut r = rule(rng, RuleShape { depth: 3, partials: true });
    let before = drop_program(&sig, &r);
    let mut appended = Vec::new();
    for k in 0..edits {
        if rng.gen_range(0..4) == 0 {
            appended.push(drop_func(&FunctionSymbol::new(format!("$n{k}"), rng.gen_range(0..3))));
        } else {
            edit_rule(rng, &mut r);
        }
    }
    let after = drop_program(&sig, &r);
    if appended.is_empty() {
        return (before, after);
    }
    let parts = after.child_trees();
    let grown = right_extend_tree(&Hedge(appended), &parts[0]).expect("signature is internal");
    (before, Tree::node("pgm", vec![grown, parts[1].clone()]))
}
