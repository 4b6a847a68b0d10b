use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `@name`
    Atom(String),
    /// `?name`
    Var(String),
    Nat(u64),
    /// Punctuation and operators, including the unicode angle brackets.
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Atom(s) => format!("`@{s}`"),
            Tok::Var(s) => format!("`?{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "<<=", ":=", "!=", "<=", ">=", "=>", "{|", "|}", "'(", "'[", "(", ")", "[", "]", ",", "=", "<", ">",
    "+", "-", "*", "|", ":", "%", "#", "/", "'", "^", "⟨", "⟩",
];

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(ident_start) && cs.all(ident_char)
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for k in 0..n {
            if chars[*i + k] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
        *i += n;
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let word = |start: usize| {
            let mut j = start;
            while j < chars.len() && ident_char(chars[j]) {
                j += 1;
            }
            (chars[start..j].iter().collect::<String>(), j - start)
        };
        let tok = if ident_start(c) {
            let (w, n) = word(i);
            advance(&mut i, &mut line, &mut col, n);
            Tok::Ident(w)
        } else if (c == '@' || c == '?') && chars.get(i + 1).is_some_and(|&d| ident_start(d)) {
            let (w, n) = word(i + 1);
            advance(&mut i, &mut line, &mut col, n + 1);
            if c == '@' {
                Tok::Atom(w)
            } else {
                Tok::Var(w)
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<u64>().map_err(|_| ParseError {
                line: tl,
                col: tc,
                expected: vec!["a natural number below 2^64".into()],
                found: format!("`{text}`"),
            })?;
            let len = j - i;
            advance(&mut i, &mut line, &mut col, len);
            Tok::Nat(n)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    expected: vec!["a token".into()],
                    found: format!("`{c}`"),
                });
            };
            advance(&mut i, &mut line, &mut col, sym.chars().count());
            Tok::Sym(sym)
        };
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens() {
        let toks: Vec<Tok> = lex("f(?x) <<= add(@a, 12) // c\n{| |} ⟨⟩")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("f".into()),
                Tok::Sym("("),
                Tok::Var("x".into()),
                Tok::Sym(")"),
                Tok::Sym("<<="),
                Tok::Ident("add".into()),
                Tok::Sym("("),
                Tok::Atom("a".into()),
                Tok::Sym(","),
                Tok::Nat(12),
                Tok::Sym(")"),
                Tok::Sym("{|"),
                Tok::Sym("|}"),
                Tok::Sym("⟨"),
                Tok::Sym("⟩"),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions() {
        let toks = lex("a\n  b").unwrap();
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }
}
