//! Surface syntax for values, trees, terms and rules; state documents and
//! step traces.

mod lexer;
mod parser;
mod printer;
mod state;
mod trace;

use std::fmt;

use thiserror::Error;

pub use lexer::is_identifier;
pub use parser::{
    parse_context, parse_hedge, parse_rule, parse_term, parse_tree, parse_value, Parser, BUILTINS,
    KEYWORDS,
};
pub use printer::{print_rule, print_rule_compact, print_term, print_term_in, print_value};
pub use state::{parse_state, print_state, StateDocError};
pub use trace::{format_step, rule_hash};

use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" or "),
            self.found
        )
    }
}

/// Canonical tree text, identical to `Display`.
pub fn print_tree(t: &Tree) -> String {
    t.to_string()
}
