//! Recursive-descent parser for values, trees, terms and rules.

use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::ParseError;
use crate::asm::{BackgroundOp, FunctionSymbol, Rule, Term};
use crate::tree::{self, Context, Hedge, Label, Node, Tree};
use crate::value::{Name, Value};

/// Names with built-in meaning in term position.
pub const BUILTINS: &[&str] = &[
    "card", "proj", "defined", "subtree", "leaf", "label_hedge", "add", "union", "replace",
    "right_extend", "left_extend",
];

/// Identifiers that cannot name symbols or variables.
pub const KEYWORDS: &[&str] = &[
    "IF", "THEN", "ELSE", "ENDIF", "PAR", "ENDPAR", "FORALL", "WITH", "DO", "ENDDO", "LET", "IN",
    "IMPORT", "and", "or", "not", "true", "false", "undef",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<Name>,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, scope: Vec::new() })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_ident(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of input"])),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    /// An identifier that is not a keyword.
    pub fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let n = Name::new(s);
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["an identifier"])),
        }
    }

    pub fn nat(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Nat(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["a natural number"])),
        }
    }

    // ---- values ----

    pub fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "undef" => {
                self.bump();
                Ok(Value::Undef)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            Tok::Nat(n) => {
                self.bump();
                Ok(Value::Nat(n))
            }
            Tok::Atom(a) => {
                self.bump();
                Ok(Value::atom(a))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut items = Vec::new();
                let mut trailing_comma = false;
                while !self.is_sym(")") {
                    items.push(self.value()?);
                    trailing_comma = self.eat_sym(",");
                    if !trailing_comma {
                        break;
                    }
                }
                if items.len() == 1 && !trailing_comma {
                    return Err(self.error(&["`,`"]));
                }
                self.expect_sym(")")?;
                Ok(Value::Tuple(items))
            }
            Tok::Sym("{|") => {
                self.bump();
                let mut items = Vec::new();
                while !self.is_sym("|}") {
                    items.push(self.value()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("|}")?;
                Ok(Value::multiset(items))
            }
            Tok::Sym("#") => {
                self.bump();
                Ok(Value::Tree(self.tree()?))
            }
            Tok::Sym("'(") | Tok::Sym("'[") | Tok::Sym("'") => self.quoted(),
            _ => Err(self.error(&["a value"])),
        }
    }

    fn quoted(&mut self) -> Result<Value, ParseError> {
        let saved = std::mem::take(&mut self.scope);
        let result = match self.bump() {
            Tok::Sym("'(") => {
                let t = self.term();
                t.and_then(|t| {
                    self.expect_sym(")")?;
                    Ok(Value::DroppedTerm(Arc::new(t)))
                })
            }
            Tok::Sym("'[") => {
                let r = self.rule();
                r.and_then(|r| {
                    self.expect_sym("]")?;
                    Ok(Value::DroppedRule(Arc::new(r)))
                })
            }
            _ => (|| {
                let name = self.name()?;
                self.expect_sym("/")?;
                let arity = self.nat()? as usize;
                Ok(Value::DroppedSymbol(FunctionSymbol { name, arity, kind: Default::default() }))
            })(),
        };
        self.scope = saved;
        result
    }

    // ---- trees ----

    fn label(&mut self) -> Result<Label, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Label::new(s))
            }
            Tok::Sym("^") => {
                self.bump();
                Ok(Label::Hole)
            }
            _ => Err(self.error(&["a label"])),
        }
    }

    fn tree_nodes(&mut self, out: &mut Vec<Node>) -> Result<(), ParseError> {
        let label = self.label()?;
        let at = out.len();
        out.push(Node { label, value: None, size: 1 });
        if self.is_sym("=") && matches!(self.peek_at(1), Tok::Sym("⟨")) {
            self.bump();
            self.bump();
            let v = self.value()?;
            self.expect_sym("⟩")?;
            out[at].value = tree::normalize(Some(v));
        } else if self.eat_sym("⟨") {
            while !self.eat_sym("⟩") {
                self.tree_nodes(out)?;
            }
            out[at].size = out.len() - at;
        }
        Ok(())
    }

    /// A tree in canonical text form, without ξ.
    pub fn tree(&mut self) -> Result<Tree, ParseError> {
        let mut nodes = Vec::new();
        self.tree_nodes(&mut nodes)?;
        if nodes.iter().any(|n| n.label.is_hole()) {
            return Err(self.error(&["a tree without `^`"]));
        }
        Ok(Tree::from_nodes(nodes))
    }

    pub fn context(&mut self) -> Result<Context, ParseError> {
        let mut nodes = Vec::new();
        self.tree_nodes(&mut nodes)?;
        Context::from_nodes(nodes).map_err(|e| {
            let mut err = self.error(&["a context with exactly one `^` leaf"]);
            err.found = e.to_string();
            err
        })
    }

    // ---- terms ----

    pub fn term(&mut self) -> Result<Term, ParseError> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<(BackgroundOp, u8)> {
        use BackgroundOp as B;
        let op = match self.peek() {
            Tok::Sym("=>") => B::Implies,
            Tok::Ident(s) if s == "or" => B::Or,
            Tok::Ident(s) if s == "and" => B::And,
            Tok::Sym("=") => B::Eq,
            Tok::Sym("!=") => B::Ne,
            Tok::Sym("<") => B::Lt,
            Tok::Sym("<=") => B::Le,
            Tok::Sym(">") => B::Gt,
            Tok::Sym(">=") => B::Ge,
            Tok::Sym("+") => B::Add,
            Tok::Sym("-") => B::Sub,
            Tok::Sym("*") => B::Mul,
            _ => return None,
        };
        let p = super::printer::precedence(&op)?;
        Some((op, p))
    }

    fn binary(&mut self, min: u8) -> Result<Term, ParseError> {
        let mut lhs = if min <= 4 && self.is_ident("not") {
            self.bump();
            Term::Op(BackgroundOp::Not, vec![self.binary(4)?])
        } else {
            self.primary()?
        };
        loop {
            let Some((op, p)) = self.binary_op() else { break };
            if p < min {
                break;
            }
            self.bump();
            let rhs = match p {
                1 => self.binary(p)?,
                _ => self.binary(p + 1)?,
            };
            lhs = Term::Op(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        while !self.is_sym(")") {
            out.push(self.term()?);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn angle_label(&mut self) -> Result<Name, ParseError> {
        self.expect_sym("<")?;
        let n = match self.peek() {
            Tok::Ident(s) => Name::new(s),
            _ => return Err(self.error(&["a label"])),
        };
        self.bump();
        self.expect_sym(">")?;
        Ok(n)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(x) => {
                self.bump();
                Ok(Term::Var(Name::new(x)))
            }
            Tok::Ident(s) if s == "undef" || s == "true" || s == "false" => Ok(Term::Lit(self.value()?)),
            Tok::Nat(_) | Tok::Atom(_) | Tok::Sym("#") | Tok::Sym("'(") | Tok::Sym("'[") | Tok::Sym("'") => {
                Ok(Term::Lit(self.value()?))
            }
            Tok::Sym("%") => {
                self.bump();
                Ok(Term::Lit(self.value()?))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut items = Vec::new();
                let mut trailing_comma = false;
                while !self.is_sym(")") {
                    items.push(self.term()?);
                    trailing_comma = self.eat_sym(",");
                    if !trailing_comma {
                        break;
                    }
                }
                self.expect_sym(")")?;
                if items.len() == 1 && !trailing_comma {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Term::Op(BackgroundOp::Tuple, items))
                }
            }
            Tok::Sym("{|") => self.multiset(),
            Tok::Ident(s) if BUILTINS.contains(&s.as_str()) => {
                self.bump();
                use BackgroundOp as B;
                let op = match s.as_str() {
                    "card" => B::Card,
                    "proj" => B::Proj,
                    "defined" => B::Defined,
                    "subtree" => B::Subtree,
                    "leaf" => B::Leaf(self.angle_label()?),
                    "label_hedge" => B::LabelHedge(self.angle_label()?),
                    other => B::Shared(Name::new(other)),
                };
                Ok(Term::Op(op, self.args()?))
            }
            Tok::Ident(_) => {
                let n = self.name()?;
                if self.is_sym("(") {
                    Ok(Term::Apply(n, self.args()?))
                } else if self.scope.contains(&n) {
                    Ok(Term::Var(n))
                } else {
                    Ok(Term::Apply(n, Vec::new()))
                }
            }
            _ => Err(self.error(&["a term"])),
        }
    }

    fn binder_list_ahead(&self) -> bool {
        let mut k = 0;
        loop {
            if !matches!(self.peek_at(k), Tok::Ident(_)) {
                return false;
            }
            match self.peek_at(k + 1) {
                Tok::Sym(":") => return true,
                Tok::Sym(",") => k += 2,
                _ => return false,
            }
        }
    }

    fn multiset(&mut self) -> Result<Term, ParseError> {
        self.expect_sym("{|")?;
        if self.eat_sym("|}") {
            return Ok(Term::Op(BackgroundOp::Multiset, Vec::new()));
        }
        // The head of a comprehension sees its binders, which follow it; parse
        // it after reading them.
        let head_start = self.pos;
        let first = self.term()?;
        if self.is_sym("|") {
            self.bump();
            let mut binders = Vec::new();
            if self.binder_list_ahead() {
                loop {
                    binders.push(self.name()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(":")?;
            }
            let n = self.scope.len();
            self.scope.extend(binders.iter().cloned());
            let guard = self.term();
            let after_guard = self.pos;
            let head = if binders.is_empty() {
                Ok(first)
            } else {
                self.pos = head_start;
                let h = self.term();
                self.pos = after_guard;
                h
            };
            self.scope.truncate(n);
            let (head, guard) = (head?, guard?);
            self.expect_sym("|}")?;
            return Ok(Term::comprehension(head, binders, guard));
        }
        let mut items = vec![first];
        while self.eat_sym(",") {
            items.push(self.term()?);
        }
        self.expect_sym("|}")?;
        Ok(Term::Op(BackgroundOp::Multiset, items))
    }

    // ---- rules ----

    pub fn rule(&mut self) -> Result<Rule, ParseError> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "IF" => {
                self.bump();
                let cond = self.term()?;
                self.expect_keyword("THEN")?;
                let then = self.rule()?;
                let otherwise = if self.is_ident("ELSE") {
                    self.bump();
                    self.rule()?
                } else {
                    Rule::skip()
                };
                self.expect_keyword("ENDIF")?;
                Ok(Rule::If { cond, then: Box::new(then), otherwise: Box::new(otherwise) })
            }
            Tok::Ident(k) if k == "PAR" => {
                self.bump();
                let mut rs = Vec::new();
                while !self.is_ident("ENDPAR") {
                    rs.push(self.rule()?);
                }
                self.bump();
                Ok(Rule::Par(rs))
            }
            Tok::Ident(k) if k == "FORALL" => {
                self.bump();
                let var = self.name()?;
                self.expect_keyword("WITH")?;
                self.scope.push(var.clone());
                let inner = (|| {
                    let guard = self.term()?;
                    self.expect_keyword("DO")?;
                    let body = self.rule()?;
                    Ok((guard, body))
                })();
                self.scope.pop();
                let (guard, body) = inner?;
                self.expect_keyword("ENDDO")?;
                Ok(Rule::Forall { var, guard, body: Box::new(body) })
            }
            Tok::Ident(k) if k == "LET" => {
                self.bump();
                let var = self.name()?;
                self.expect_sym("=")?;
                let binding = self.term()?;
                self.expect_keyword("IN")?;
                self.scope.push(var.clone());
                let body = self.rule();
                self.scope.pop();
                Ok(Rule::Let { var, binding, body: Box::new(body?) })
            }
            Tok::Ident(k) if k == "IMPORT" => {
                self.bump();
                let var = self.name()?;
                self.expect_keyword("DO")?;
                self.scope.push(var.clone());
                let body = self.rule();
                self.scope.pop();
                Ok(Rule::Import { var, body: Box::new(body?) })
            }
            Tok::Ident(_) => {
                let func = self.name()?;
                let args = if self.is_sym("(") { self.args()? } else { Vec::new() };
                if self.eat_sym(":=") {
                    let rhs = self.term()?;
                    Ok(Rule::Assign { func, args, rhs })
                } else if self.eat_sym("<<=") {
                    let op = self.name()?;
                    let operands = self.args()?;
                    Ok(Rule::Partial { func, args, op, operands })
                } else {
                    Err(self.error(&["`:=`", "`<<=`"]))
                }
            }
            _ => Err(self.error(&["a rule"])),
        }
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(src)?;
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    whole(src, Parser::term)
}

pub fn parse_rule(src: &str) -> Result<Rule, ParseError> {
    whole(src, Parser::rule)
}

pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    whole(src, Parser::value)
}

pub fn parse_tree(src: &str) -> Result<Tree, ParseError> {
    whole(src, Parser::tree)
}

pub fn parse_context(src: &str) -> Result<Context, ParseError> {
    whole(src, Parser::context)
}

/// A hedge written as whitespace-separated trees.
pub fn parse_hedge(src: &str) -> Result<Hedge, ParseError> {
    whole(src, |p| {
        let mut out = Vec::new();
        while !p.at_eof() {
            out.push(p.tree()?);
        }
        Ok(Hedge(out))
    })
}
