//! Oracles and per-instance law checks shared by the integration tests and
//! the acceptance harness.
#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rasm::asm::{
    collapse, eval_term, permutations, Env, Location, OpRegistry, Rule, State, UpdateItem,
    UpdateMultiset, UpdateSet, PGM,
};
use rasm::conformance::{self, generate, generate::RuleShape};
use rasm::frontend::{parse_rule, parse_state, parse_term, parse_value, print_rule, print_rule_compact};
use rasm::reflection::{
    drop_program, drop_rule, raise_program, raise_rule, step, tree_diff_theta, tree_diff_updates,
    ProgramTree,
};
use rasm::tree::{self, Context, Hedge, Label, NodeId, NodePath, Tree};
use rasm::{Multiset, Name, Value};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// ---- a plain recursive tree, used as the oracle for the algebra ----

#[derive(Clone, Debug, PartialEq)]
pub enum Rose {
    Hole,
    Node(String, Option<Value>, Vec<Rose>),
}

pub fn rose(t: &Tree) -> Rose {
    match t.root_label() {
        Label::Hole => Rose::Hole,
        l => Rose::Node(l.as_str().to_string(), t.root_value().cloned(), t.child_trees().iter().map(rose).collect()),
    }
}

pub fn holes(r: &Rose) -> usize {
    match r {
        Rose::Hole => 1,
        Rose::Node(_, _, kids) => kids.iter().map(holes).sum(),
    }
}

pub fn fill(r: &Rose, with: &Rose) -> Rose {
    match r {
        Rose::Hole => with.clone(),
        Rose::Node(l, v, kids) => Rose::Node(l.clone(), v.clone(), kids.iter().map(|k| fill(k, with)).collect()),
    }
}

pub fn at<'a>(r: &'a Rose, path: &[usize]) -> &'a Rose {
    match (r, path.split_first()) {
        (_, None) => r,
        (Rose::Node(_, _, kids), Some((i, rest))) => at(&kids[*i], rest),
        (Rose::Hole, Some(_)) => panic!("path below a hole"),
    }
}

pub fn replace(r: &Rose, path: &[usize], with: Rose) -> Rose {
    match (r, path.split_first()) {
        (_, None) => with,
        (Rose::Node(l, v, kids), Some((i, rest))) => {
            let mut kids = kids.clone();
            kids[*i] = replace(&kids[*i], rest, with);
            Rose::Node(l.clone(), v.clone(), kids)
        }
        (Rose::Hole, Some(_)) => panic!("path below a hole"),
    }
}

fn extend(r: &Rose, hedge: &[Rose], left: bool) -> Rose {
    match r {
        Rose::Node(l, v, kids) => {
            let kids = if left {
                hedge.iter().chain(kids).cloned().collect()
            } else {
                kids.iter().chain(hedge).cloned().collect()
            };
            Rose::Node(l.clone(), v.clone(), kids)
        }
        Rose::Hole => panic!("cannot extend a hole"),
    }
}

/// Replaces the hole with a sequence of trees; only meaningful below the root.
fn splice_hole(r: &Rose, hedge: &[Rose]) -> Rose {
    match r {
        Rose::Hole => panic!("hole at the root"),
        Rose::Node(l, v, kids) => {
            let mut out = Vec::new();
            for k in kids {
                match k {
                    Rose::Hole => out.extend(hedge.iter().cloned()),
                    other => out.push(splice_hole(other, hedge)),
                }
            }
            Rose::Node(l.clone(), v.clone(), out)
        }
    }
}

fn digest<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

fn random_node(rng: &mut ChaCha8Rng, t: &Tree) -> NodeId {
    let ids: Vec<NodeId> = t.node_ids().collect();
    ids[rng.gen_range(0..ids.len())]
}

fn random_hedge(rng: &mut ChaCha8Rng) -> Hedge {
    Hedge((0..rng.gen_range(0..4)).map(|_| generate::tree(rng, 3, 3)).collect())
}

fn hedge_roses(h: &Hedge) -> Vec<Rose> {
    h.0.iter().map(rose).collect()
}

fn is_context(c: &Context) -> Result<(), String> {
    ensure!(c.as_tree().hole_count() == 1, "context with {} holes", c.as_tree().hole_count());
    Ok(())
}

fn is_tree(t: &Tree) -> Result<(), String> {
    ensure!(t.hole_count() == 0, "tree with {} holes", t.hole_count());
    Ok(())
}

/// One instance of every tree-algebra law: decomposition, the oracle
/// definitions of each operator, composition associativity, the hedge
/// monoid, identities, hole counts and purity.
pub fn tree_law_instance(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = generate::tree(rng, 6, 4);
    let c1 = generate::context(rng, 6, 4);
    let c2 = generate::context(rng, 4, 4);
    let c3 = generate::context(rng, 4, 4);
    let (h1, h2, h3) = (random_hedge(rng), random_hedge(rng), random_hedge(rng));
    let inputs = (t.clone(), c1.clone(), c2.clone(), c3.clone(), h1.clone(), h2.clone(), h3.clone());
    let before = digest(&inputs);
    let label = Label::new(["a", "b", "x"][rng.gen_range(0..3)]);

    // decomposition
    let o = random_node(rng, &t);
    let path = t.path_of(o).map_err(err)?;
    let ctx = tree::context_at(&t, t.root(), o).map_err(err)?;
    let sub = tree::subtree(&t, o).map_err(err)?;
    is_context(&ctx)?;
    is_tree(&sub)?;
    ensure!(tree::subst_ct(&ctx, &sub) == t, "decomposition fails at {path} of {t}");
    ensure!(rose(ctx.as_tree()) == replace(&rose(&t), &path.0, Rose::Hole), "context_at disagrees with the oracle");
    ensure!(rose(&sub) == *at(&rose(&t), &path.0), "subtree disagrees with the oracle");

    // a context selected below an inner node
    let o2 = random_node(rng, &t);
    if t.path_of(o).map_err(err)?.is_prefix_of(&t.path_of(o2).map_err(err)?) {
        let inner = tree::context_at(&t, o, o2).map_err(err)?;
        is_context(&inner)?;
        let rel = &t.path_of(o2).map_err(err)?.0[path.0.len()..];
        ensure!(rose(inner.as_tree()) == replace(&rose(&sub), rel, Rose::Hole), "inner context_at disagrees");
    } else {
        ensure!(tree::context_at(&t, o, o2).is_err(), "context_at accepted a non-descendant");
    }

    // substitutions
    let c12 = tree::subst_cc(&c1, &c2);
    is_context(&c12)?;
    ensure!(rose(c12.as_tree()) == fill(&rose(c1.as_tree()), &rose(c2.as_tree())), "subst_cc oracle");
    let left = tree::subst_cc(&c12, &c3);
    let right = tree::subst_cc(&c1, &tree::subst_cc(&c2, &c3));
    ensure!(left == right, "subst_cc is not associative on {c1}, {c2}, {c3}");
    ensure!(tree::subst_cc(&Context::hole(), &c1) == c1, "ξ is not a left identity");
    ensure!(tree::subst_cc(&c1, &Context::hole()) == c1, "ξ is not a right identity");
    ensure!(tree::inject_context(&c1, &Context::hole()) == c1, "inject_context(c, ξ) ≠ c");
    let ct = tree::subst_ct(&c1, &t);
    is_tree(&ct)?;
    ensure!(rose(&ct) == fill(&rose(c1.as_tree()), &rose(&t)), "subst_ct oracle");
    ensure!(tree::subst_ct(&Context::hole(), &t) == t, "subst_ct(ξ, t) ≠ t");
    let tt = tree::subst_tt(&t, o, &sub).map_err(err)?;
    ensure!(tt == t, "replacing a subtree by itself changed the tree");
    let tc = tree::subst_tc(&t, o, &c2).map_err(err)?;
    is_context(&tc)?;
    ensure!(tree::subst_ct(&tc, &sub) == tree::subst_tt(&t, o, &tree::subst_ct(&c2, &sub)).map_err(err)?, "subst_tc then subst_ct");

    // hedge monoid
    let assoc_l = tree::concat_hedges(&tree::concat_hedges(&h1, &h2), &h3);
    let assoc_r = tree::concat_hedges(&h1, &tree::concat_hedges(&h2, &h3));
    ensure!(assoc_l == assoc_r, "concat is not associative");
    ensure!(tree::concat_hedges(&Hedge::empty(), &h1) == h1, "ε is not a left identity");
    ensure!(tree::concat_hedges(&h1, &Hedge::empty()) == h1, "ε is not a right identity");
    ensure!(assoc_l.len() == h1.len() + h2.len() + h3.len(), "concat length");

    // labelling and extension
    let lh = tree::label_hedge(&label, &h1).map_err(err)?;
    is_tree(&lh)?;
    ensure!(rose(&lh) == Rose::Node(label.as_str().into(), None, hedge_roses(&h1)), "label_hedge oracle");
    ensure!(tree::label_hedge(&Label::Hole, &h1).is_err(), "label_hedge accepted ξ");
    let lc = tree::label_context(&label, &c1).map_err(err)?;
    is_context(&lc)?;
    ensure!(rose(lc.as_tree()) == Rose::Node(label.as_str().into(), None, vec![rose(c1.as_tree())]), "label_context oracle");
    if c1.is_trivial() {
        ensure!(tree::left_extend(&h1, &c1).is_err(), "left_extend accepted the trivial context");
        ensure!(tree::right_extend(&h1, &c1).is_err(), "right_extend accepted the trivial context");
    } else {
        let le = tree::left_extend(&h1, &c1).map_err(err)?;
        let re = tree::right_extend(&h1, &c1).map_err(err)?;
        is_context(&le)?;
        is_context(&re)?;
        ensure!(rose(le.as_tree()) == extend(&rose(c1.as_tree()), &hedge_roses(&h1), true), "left_extend oracle");
        ensure!(rose(re.as_tree()) == extend(&rose(c1.as_tree()), &hedge_roses(&h1), false), "right_extend oracle");
    }

    // injection
    let inj = tree::inject_hedge(&c1, &h2);
    if c1.is_trivial() {
        match h2.0.as_slice() {
            [single] => ensure!(inj.as_ref().ok() == Some(single), "inject_hedge(ξ, t) ≠ t"),
            _ => ensure!(inj.is_err(), "inject_hedge put {} trees at the root", h2.len()),
        }
    } else {
        let inj = inj.map_err(err)?;
        is_tree(&inj)?;
        ensure!(rose(&inj) == splice_hole(&rose(c1.as_tree()), &hedge_roses(&h2)), "inject_hedge oracle");
    }
    ensure!(tree::inject_hedge(&Context::hole(), &Hedge::single(t.clone())).map_err(err)? == t, "inject_hedge(ξ, t) ≠ t");

    // renumbering does not affect equality
    let shifted = t.renumbered(|i| NodeId(1000 + 7 * i as u64));
    ensure!(tree::trees_equal(&shifted, &t), "renumbered tree is not equal");

    ensure!(digest(&inputs) == before, "an operation mutated its inputs");
    Ok(())
}

// ---- rules ----

pub fn rule_forms(r: &Rule, out: &mut BTreeSet<&'static str>) {
    match r {
        Rule::Assign { .. } => {
            out.insert("assign");
        }
        Rule::Partial { .. } => {
            out.insert("partial");
        }
        Rule::If { then, otherwise, .. } => {
            out.insert("if");
            rule_forms(then, out);
            rule_forms(otherwise, out);
        }
        Rule::Par(rs) => {
            out.insert("par");
            rs.iter().for_each(|r| rule_forms(r, out));
        }
        Rule::Forall { body, .. } => {
            out.insert("forall");
            rule_forms(body, out);
        }
        Rule::Let { body, .. } => {
            out.insert("let");
            rule_forms(body, out);
        }
        Rule::Import { body, .. } => {
            out.insert("import");
            rule_forms(body, out);
        }
    }
}

/// raise∘drop and parse∘print on one random rule; returns the rule.
pub fn roundtrip_instance(rng: &mut ChaCha8Rng) -> Result<Rule, String> {
    let r = generate::rule(rng, RuleShape { depth: 4, partials: true });
    let raised = raise_rule(&drop_rule(&r)).map_err(err)?;
    ensure!(raised == r, "raise(drop(r)) ≠ r for {}", print_rule_compact(&r));
    let pretty = print_rule(&r);
    let reparsed = parse_rule(&pretty).map_err(|e| format!("{e} in\n{pretty}"))?;
    ensure!(reparsed == r, "parse(print(r)) ≠ r for\n{pretty}");
    let compact = print_rule_compact(&r);
    let reparsed = parse_rule(&compact).map_err(|e| format!("{e} in {compact}"))?;
    ensure!(reparsed == r, "parse(print_compact(r)) ≠ r for {compact}");
    let p = ProgramTree::new(drop_program(&generate::signature(), &r)).map_err(err)?;
    ensure!(p.rule().map_err(err)? == r, "the program encoding does not raise back");
    Ok(r)
}

/// Fast evaluator plus collapse against the reference on one random pair;
/// `Ok(true)` when both produced an update set rather than an error.
pub fn naive_instance(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let r = generate::rule(rng, RuleShape { depth: 4, partials: false });
    let s = generate::state(rng, 5);
    ensure!(rasm::asm::active_domain(&s).len() <= 5, "generated domain too large");
    let report = conformance::check_naive_equivalence(&s, &r);
    ensure!(report.passed(), "{report}");
    Ok(conformance::naive::update_set(&s, &r).is_ok())
}

/// Collapse of one commutative group against every sequential fold and a
/// closed-form total.
pub fn collapse_group_instance(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let ops = OpRegistry::default();
    let k = rng.gen_range(1..=6);
    let add = rng.gen_bool(0.5);
    let mut s = State::new(generate::signature());
    let loc = Location::nullary("f");
    let operand = |rng: &mut ChaCha8Rng| {
        if add {
            Value::Nat(rng.gen_range(0..50))
        } else {
            Value::multiset((0..rng.gen_range(0..3)).map(|_| Value::Nat(rng.gen_range(0..4))))
        }
    };
    let base = if rng.gen_bool(0.25) { Value::Undef } else { operand(rng) };
    s.set(loc.clone(), base.clone()).map_err(err)?;
    let operands: Vec<Value> = (0..k).map(|_| operand(rng)).collect();
    let expected = if add {
        Value::Nat(base.as_nat().unwrap_or(0) + operands.iter().map(|v| v.as_nat().unwrap()).sum::<u64>())
    } else {
        let mut all: Vec<Value> = Vec::new();
        for v in std::iter::once(&base).chain(&operands) {
            if let Value::Multiset(m) = v {
                all.extend(m.iter().cloned());
            }
        }
        Value::Multiset(Multiset::from_vec(all))
    };
    let op = Name::new(if add { "add" } else { "union" });
    let items: Vec<UpdateItem> = operands
        .iter()
        .map(|v| UpdateItem::Shared { location: loc.clone(), op: op.clone(), operands: vec![v.clone()] })
        .collect();
    let us = collapse(&s, &UpdateMultiset::from_vec(items), &ops);
    ensure!(us == UpdateSet::from_pairs([(loc.clone(), expected.clone())]), "collapse gave {us:?}, expected {expected}");
    let shared = ops.get(op.as_str()).unwrap();
    for perm in permutations(k) {
        let mut acc = base.clone();
        for &i in &perm {
            acc = shared.apply(&acc, &NodePath::root(), &operands[i..=i]).ok_or("fold failed")?;
        }
        ensure!(acc == expected, "order {perm:?} folds to {acc}, expected {expected}");
    }
    Ok(k)
}

/// θ and the shared-update multiset for one random edited program pair.
pub fn diff_instance(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let edits = rng.gen_range(1..=5);
    let (t1, t2) = generate::program_pair(rng, edits);
    let theta = tree_diff_theta(&t1, &t2).map_err(err)?;
    let out = theta.eval_tree(&t1).map_err(err)?;
    ensure!(tree::trees_equal(&out, &t2), "θ = {theta} gives {out}, expected {t2}");
    let sig = ProgramTree::new(t1.clone()).map_err(err)?.signature().map_err(err)?;
    let mut s = State::new(sig);
    s.set(Location::nullary(PGM), Value::Tree(t1.clone())).map_err(err)?;
    let um = tree_diff_updates(&t1, &t2).map_err(err)?;
    let us = collapse(&s, &um, &OpRegistry::default());
    if t1 == t2 {
        ensure!(us.is_empty(), "identical trees gave updates");
        return Ok(false);
    }
    ensure!(
        us == UpdateSet::from_pairs([(Location::nullary(PGM), Value::Tree(t2.clone()))]),
        "collapse of {um:?} is {us:?}"
    );
    Ok(true)
}

// ---- demos ----

pub fn demos_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demos")
}

pub fn load_demo(name: &str) -> State {
    let path = demos_dir().join(format!("{name}.rst"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_state(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Checks a demo against its hand-written `.expect` file. Each line reads
/// `after K: <check>` where the check is `rule = <rule>`, `symbol f/n`,
/// or `<term> = <value>`. Returns the number of lines checked.
pub fn check_expect(name: &str) -> Result<usize, String> {
    let path = demos_dir().join(format!("{name}.expect"));
    let text = std::fs::read_to_string(&path).map_err(err)?;
    let mut runs = vec![load_demo(name)];
    let mut checked = 0;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let where_ = format!("{}:{}", path.display(), n + 1);
        let (head, check) = line.split_once(':').ok_or(format!("{where_}: missing `:`"))?;
        let k: usize = head.trim().strip_prefix("after ").and_then(|k| k.trim().parse().ok()).ok_or(format!("{where_}: bad step"))?;
        while runs.len() <= k {
            let next = step(runs.last().unwrap(), &OpRegistry::default()).map_err(|e| format!("{where_}: {e}"))?.next;
            runs.push(next);
        }
        let s = &runs[k];
        let check = check.trim();
        if let Some(rule) = check.strip_prefix("rule = ") {
            let want = parse_rule(rule).map_err(|e| format!("{where_}: {e}"))?;
            let (_, got) = raise_program(s).map_err(|e| format!("{where_}: {e}"))?;
            ensure!(got == want, "{where_}: pgm raises to {}", print_rule_compact(&got));
        } else if let Some(sym) = check.strip_prefix("symbol ") {
            let (name, arity) = sym.split_once('/').ok_or(format!("{where_}: bad symbol"))?;
            let arity: usize = arity.parse().map_err(err)?;
            ensure!(s.signature.get(name).map(|f| f.arity) == Some(arity), "{where_}: signature lacks {sym}");
        } else {
            let (term, value) = check.split_once(" = ").ok_or(format!("{where_}: bad check"))?;
            let t = parse_term(term).map_err(|e| format!("{where_}: {e}"))?;
            let want = parse_value(value).map_err(|e| format!("{where_}: {e}"))?;
            let got = eval_term(s, &Env::new(), &t).map_err(|e| format!("{where_}: {e}"))?;
            ensure!(got == want, "{where_}: {term} is {got}, expected {want}");
        }
        checked += 1;
    }
    Ok(checked)
}
