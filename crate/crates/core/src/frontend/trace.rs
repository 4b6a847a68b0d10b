use sha2::{Digest, Sha256};

use super::printer::print_rule_compact;
use crate::asm::Rule;
use crate::reflection::StepReport;

/// First 16 hex digits of the SHA-256 of the rule's compact rendering.
pub fn rule_hash(r: &Rule) -> String {
    let digest = Sha256::digest(print_rule_compact(r).as_bytes());
    hex::encode(&digest[..8])
}

/// One trace block: step index, raised rule hash, the collapsed updates and
/// the consistency flag.
pub fn format_step(index: usize, report: &StepReport) -> String {
    let mut out = format!("step {index}\nrule {}\n", rule_hash(&report.raised_rule));
    for (loc, v) in &report.update_set.updates {
        out.push_str(&format!("update {loc} = {v}\n"));
    }
    for loc in &report.update_set.clashes {
        if !report.update_set.updates.iter().any(|(l, _)| l == loc) {
            out.push_str(&format!("clash {loc}\n"));
        }
    }
    out.push_str(if report.consistent { "consistent yes\n" } else { "consistent no\n" });
    out.push_str("end\n");
    out
}
