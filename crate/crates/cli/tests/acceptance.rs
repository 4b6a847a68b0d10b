//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always shown.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rasm::asm::Location;
use rasm::conformance::{
    check_bounded_exploration_with, check_demo, check_initial_agreement, check_isomorphism_closure_with,
    controls, exploration_pairs, run_states,
};
use rasm::frontend::parse_state;
use rasm::Value;

const DEMOS: [&str; 3] = ["increment", "self_rewrite", "grow_signature"];

type Outcome = Result<String, String>;

/// Runs `n` seeded instances and stops at the first failure.
fn instances<T>(n: usize, seed: u64, mut f: impl FnMut(&mut ChaCha8Rng) -> Result<T, String>) -> Result<Vec<T>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(f(&mut rng).map_err(|e| format!("instance {i}: {e}"))?);
    }
    Ok(out)
}

fn tree_laws() -> Outcome {
    let start = Instant::now();
    instances(1000, 0xA1, support::tree_law_instance)?;
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("1000 instances took {secs:.2}s"));
    }
    Ok(format!("1000 trees/contexts, 0 failures, {secs:.2}s"))
}

fn round_trips() -> Outcome {
    let rules = instances(500, 0xA2, support::roundtrip_instance)?;
    let mut forms = BTreeSet::new();
    rules.iter().for_each(|r| support::rule_forms(r, &mut forms));
    if forms.len() != 7 {
        return Err(format!("corpus covers only {forms:?}"));
    }
    Ok("500 rules, all 7 forms, raise∘drop and parse∘print exact".into())
}

fn oracle_equivalence() -> Outcome {
    let ok = instances(1000, 0xA3, support::naive_instance)?;
    let evaluated = ok.iter().filter(|b| **b).count();
    Ok(format!("1000 pairs equal ({evaluated} update sets, {} matching errors)", 1000 - evaluated))
}

fn collapse_groups() -> Outcome {
    let sizes = instances(200, 0xA4, support::collapse_group_instance)?;
    let orders: usize = sizes.iter().map(|&k| (1..=k).product::<usize>()).sum();
    Ok(format!("200 groups, {orders} orders folded, 0 mismatches"))
}

fn demos() -> Outcome {
    let mut lines = 0;
    for name in DEMOS {
        lines += support::check_expect(name).map_err(|e| format!("{name}: {e}"))?;
    }
    let run = run_states(&support::load_demo("increment"), 10);
    if run.len() != 11 || run[10].get(&Location::nullary("f")) != Value::Nat(10) {
        return Err("increment does not reach f = 10 after 10 steps".into());
    }
    Ok(format!("3 demos, {lines} oracle lines"))
}

fn tree_diff() -> Outcome {
    let changed = instances(300, 0xA6, support::diff_instance)?;
    let n = changed.iter().filter(|c| **c).count();
    Ok(format!("300 pairs ({n} changed), θ and collapse exact"))
}

fn postulates() -> Outcome {
    let mut summary = Vec::new();
    for name in DEMOS {
        let s = support::load_demo(name);
        for r in check_demo(&s, 10, 100, 100, 0xA7) {
            if !r.passed() {
                return Err(format!("{name}: {r}"));
            }
            if r.checked() == 0 {
                return Err(format!("{name}: {} checked nothing", r.name));
            }
        }
        let mut variant = s.clone();
        let first = variant.bindings().find(|(l, _)| l.symbol.as_str() != "pgm").map(|(l, _)| l.clone());
        if let Some(loc) = first {
            variant.set(loc, Value::Nat(99)).map_err(|e| e.to_string())?;
        }
        let agree = check_initial_agreement(&[s.clone(), variant]);
        if !agree.passed() {
            return Err(format!("{name}: {agree}"));
        }
        summary.push(name);
    }

    let inc = support::load_demo("increment");
    let iso = check_isomorphism_closure_with(&inc, 100, 1, &controls::spelling_step);
    let pairs = exploration_pairs(&run_states(&inc, 4), 40, 2);
    let explore = check_bounded_exploration_with(&pairs, &controls::universe_peeking_multiset(3));
    let dir = support::demos_dir().join("controls");
    let load = |f: &str| parse_state(&std::fs::read_to_string(dir.join(f)).unwrap()).unwrap();
    let agree = check_initial_agreement(&[load("program_a.rst"), load("program_b.rst")]);
    for (label, r) in [("spelling step", &iso), ("universe peeking", &explore), ("program_a/program_b", &agree)] {
        if r.passed() {
            return Err(format!("negative control {label} was not caught"));
        }
    }
    Ok(format!("{} demos clean; 3 negative controls caught", summary.len()))
}

fn run_trace(demo: &Path, seed: u64, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_rasm"))
        .arg("run")
        .arg(demo)
        .args(["--steps", "10", "--seed", &seed.to_string(), "--trace"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in DEMOS {
        let demo = support::demos_dir().join(format!("{name}.rst"));
        for seed in [0, 7] {
            let a = run_trace(&demo, seed, &tmp.path().join(format!("{name}-{seed}-a.trace")))?;
            let b = run_trace(&demo, seed, &tmp.path().join(format!("{name}-{seed}-b.trace")))?;
            if a != b {
                return Err(format!("{name} with seed {seed}: traces differ"));
            }
            if seed == 0 {
                let golden = std::fs::read(support::demos_dir().join(format!("{name}.trace"))).map_err(|e| e.to_string())?;
                if a != golden {
                    return Err(format!("{name}: trace differs from the checked-in golden file"));
                }
            }
        }
    }
    Ok("3 demos × 2 seeds byte-identical, matching golden traces".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("tree-algebra laws", tree_laws),
        ("round trips", round_trips),
        ("oracle equivalence", oracle_equivalence),
        ("collapse correctness", collapse_groups),
        ("reflection demos", demos),
        ("tree diff", tree_diff),
        ("postulate checks", postulates),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
