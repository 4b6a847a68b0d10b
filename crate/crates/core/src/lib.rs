//! Runtime for reflective abstract state machines: programs live in the
//! state as trees, are raised to rules at every step, and may rewrite
//! themselves through tree-algebra updates.

pub mod asm;
pub mod conformance;
pub mod frontend;
pub mod reflection;
pub mod tree;
pub mod value;

pub use value::{Multiset, Name, Value};
