//! Programs stored as trees: the encoding, raise/drop, the extraction
//! function β, the reflective step, and the constructive tree difference.

mod beta;
mod diff;
mod encode;
mod step;

pub use beta::{beta, beta_rule, import_placeholder};
pub use diff::{tree_diff_theta, tree_diff_updates, AlgebraTerm, AlgebraValue};
pub use encode::{
    drop_func, drop_program, drop_rule, drop_signature, drop_symbol, drop_term, labels, raise_rule,
    raise_signature, raise_term, ProgramTree, ReflectError,
};
pub use step::{raise_program, step, StepError, StepReport};
