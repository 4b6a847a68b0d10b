//! State documents: a line-insensitive list of records describing the
//! signature, the interpretation, extra universe values and the reserve.
//!
//! ```text
//! reserve r 0
//! universe @a @b
//! symbol f/1
//! symbol c/0 static
//! f(@a) = 3
//! program
//!   f(@a) := f(@a) + 1
//! end
//! ```
//!
//! `pgm` is given either as `pgm = #…` or as a `program … end` block, which
//! is encoded over the declared signature.

use thiserror::Error;

use super::lexer::Tok;
use super::parser::Parser;
use super::printer::{print_rule, print_value};
use super::ParseError;
use crate::asm::{FunctionSymbol, Location, Reserve, Signature, State, SymbolKind, PGM};
use crate::reflection::{drop_program, ProgramTree, ReflectError};
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateDocError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Malformed(#[from] ReflectError),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> StateDocError {
    StateDocError::Invalid(msg.into())
}

const RECORDS: &[&str] = &["reserve", "universe", "symbol", "program"];

fn starts_value(t: &Tok) -> bool {
    match t {
        Tok::Ident(s) => matches!(s.as_str(), "undef" | "true" | "false"),
        Tok::Nat(_) | Tok::Atom(_) => true,
        Tok::Sym(s) => matches!(*s, "(" | "{|" | "#" | "'(" | "'[" | "'"),
        _ => false,
    }
}

fn is_record_start(p: &Parser) -> bool {
    match p.peek() {
        Tok::Ident(s) if RECORDS.contains(&s.as_str()) => {
            !matches!(p.peek_at(1), Tok::Sym("=") | Tok::Sym("("))
        }
        _ => false,
    }
}

enum PgmSource {
    Tree(Value),
    Program(crate::asm::Rule),
}

pub fn parse_state(src: &str) -> Result<State, StateDocError> {
    let mut p = Parser::new(src)?;
    let mut reserve = Reserve::default();
    let mut universe = Vec::new();
    let mut declared = Signature::new();
    let mut bindings: Vec<(Name, Vec<Value>, Value)> = Vec::new();
    let mut pgm: Option<PgmSource> = None;

    while !p.at_eof() {
        if is_record_start(&p) {
            let Tok::Ident(kw) = p.peek().clone() else { unreachable!() };
            p.expect_keyword(&kw)?;
            match kw.as_str() {
                "reserve" => {
                    let ns = p.name()?;
                    let next = p.nat()?;
                    reserve = Reserve { namespace: ns.as_str().to_string(), next };
                }
                "universe" => {
                    while starts_value(p.peek()) {
                        universe.push(p.value()?);
                    }
                }
                "symbol" => {
                    let name = p.name()?;
                    p.expect_sym("/")?;
                    let arity = p.nat()? as usize;
                    let kind = if p.is_ident("static") {
                        p.expect_keyword("static")?;
                        SymbolKind::Static
                    } else if p.is_ident("relational") {
                        p.expect_keyword("relational")?;
                        SymbolKind::Relational
                    } else {
                        SymbolKind::Dynamic
                    };
                    declared
                        .insert(FunctionSymbol::new(name.as_str(), arity).with_kind(kind))
                        .map_err(|e| invalid(e.to_string()))?;
                }
                "program" => {
                    let r = p.rule()?;
                    p.expect_keyword("end")?;
                    if pgm.replace(PgmSource::Program(r)).is_some() {
                        return Err(invalid("pgm is given more than once"));
                    }
                }
                _ => unreachable!(),
            }
            continue;
        }
        let name = p.name()?;
        let mut args = Vec::new();
        if p.eat_sym("(") {
            while !p.is_sym(")") {
                args.push(p.value()?);
                if !p.eat_sym(",") {
                    break;
                }
            }
            p.expect_sym(")")?;
        }
        p.expect_sym("=")?;
        let v = p.value()?;
        if name.as_str() == PGM && args.is_empty() {
            if pgm.replace(PgmSource::Tree(v)).is_some() {
                return Err(invalid("pgm is given more than once"));
            }
        } else {
            bindings.push((name, args, v));
        }
    }

    if declared.get(PGM).is_none() {
        declared.insert(FunctionSymbol::new(PGM, 0)).map_err(|e| invalid(e.to_string()))?;
    }
    let pgm_value = match pgm {
        None => return Err(invalid("the state does not define pgm")),
        Some(PgmSource::Tree(v)) => v,
        Some(PgmSource::Program(r)) => Value::Tree(drop_program(&declared, &r)),
    };
    let listed = ProgramTree::from_value(&pgm_value)?.signature()?;
    let mut signature = Signature::new();
    for sym in listed.iter() {
        let kind = declared.get(sym.name.as_str()).map(|d| d.kind).unwrap_or_default();
        signature.insert(sym.clone().with_kind(kind)).map_err(|e| invalid(e.to_string()))?;
    }
    let missing = declared.missing_from(&listed);
    if let Some(m) = missing.first() {
        return Err(invalid(format!("declared symbol {m} is not listed in pgm")));
    }

    let mut s = State::new(signature);
    s.reserve = reserve;
    s.universe = universe.into_iter().filter(|v| !v.is_undef()).collect();
    s.set(Location::nullary(PGM), pgm_value).map_err(|e| invalid(e.to_string()))?;
    for (name, args, v) in bindings {
        let loc = Location { symbol: name, args, path: Default::default() };
        if s.get(&loc) != Value::Undef {
            return Err(invalid(format!("{loc} is bound more than once")));
        }
        s.set(loc, v).map_err(|e| invalid(e.to_string()))?;
    }
    Ok(s)
}

/// Renders a state so that [`parse_state`] gives it back. `pgm` is written
/// as a `program` block when that encodes to exactly the stored tree.
pub fn print_state(s: &State) -> String {
    let mut out = format!("reserve {} {}\n", s.reserve.namespace, s.reserve.next);
    if !s.universe.is_empty() {
        let vs: Vec<String> = s.universe.iter().map(print_value).collect();
        out.push_str(&format!("universe {}\n", vs.join(" ")));
    }
    for sym in s.signature.iter() {
        if sym.name.as_str() == PGM && sym.kind == SymbolKind::Dynamic {
            continue;
        }
        out.push_str(&format!("symbol {}/{}", sym.name, sym.arity));
        if let Some(k) = sym.kind.keyword() {
            out.push_str(&format!(" {k}"));
        }
        out.push('\n');
    }
    for (loc, v) in s.bindings() {
        if loc.symbol.as_str() == PGM {
            continue;
        }
        out.push_str(&format!("{loc} = {}\n", print_value(v)));
    }
    let pgm = s.pgm();
    match program_block(s, &pgm) {
        Some(r) => {
            out.push_str("program\n");
            for line in print_rule(&r).lines() {
                out.push_str(&format!("  {line}\n"));
            }
            out.push_str("end\n");
        }
        None => out.push_str(&format!("pgm = {}\n", print_value(&pgm))),
    }
    out
}

fn program_block(s: &State, pgm: &Value) -> Option<crate::asm::Rule> {
    let p = ProgramTree::from_value(pgm).ok()?;
    let r = p.rule().ok()?;
    let listed = p.signature().ok()?;
    let names = |sig: &Signature| sig.iter().map(|f| (f.name.clone(), f.arity)).collect::<Vec<_>>();
    if names(&listed) != names(&s.signature) {
        return None;
    }
    (Value::Tree(drop_program(&s.signature, &r)) == *pgm).then_some(r)
}
