//! Tokenizer and recursive-descent helpers shared by the ultragraph DSL,
//! point/cylinder/bisection expressions and group-word scripts.

use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::ultragraph::Affine;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    /// `mie#k`
    Mie(usize),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: [&str; 20] = [
    "->", "{", "}", "(", ")", "[", "]", ",", ";", ":", "|", "&", "\\", "*", "+", "-", ".", "^",
    "=", "#",
];

/// Splits `text` into tokens. `line` is the 1-based line number of the first
/// character; `#` starts a comment unless it belongs to a `mie#k` token.
pub fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut ln = line;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            ln += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(chars[i] as u64 - '0' as u64))
                    .ok_or_else(|| UgkError::parse(ln, start_col, "integer literal too large"))?;
                i += 1;
                col += 1;
            }
            out.push(Token {
                tok: Tok::Int(v),
                line: ln,
                col: start_col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            if s == "mie" && i < chars.len() && chars[i] == '#' {
                i += 1;
                col += 1;
                let mut k: usize = 0;
                let mut digits = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    k = k * 10 + (chars[i] as usize - '0' as usize);
                    i += 1;
                    col += 1;
                    digits += 1;
                }
                if digits == 0 {
                    return Err(UgkError::parse(ln, col, "expected identifier number after 'mie#'"));
                }
                out.push(Token {
                    tok: Tok::Mie(k),
                    line: ln,
                    col: start_col,
                });
            } else {
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: ln,
                    col: start_col,
                });
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = SYMBOLS
            .iter()
            .find(|s| rest.starts_with(**s))
            .ok_or_else(|| UgkError::parse(ln, col, format!("unexpected character '{c}'")))?;
        i += sym.len();
        col += sym.len();
        out.push(Token {
            tok: Tok::Sym(sym),
            line: ln,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line: ln,
        col,
    });
    Ok(out)
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str, line: usize) -> Result<Parser> {
        Ok(Parser {
            toks: tokenize(text, line)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> UgkError {
        let t = &self.toks[self.pos];
        UgkError::parse(t.line, t.col, msg)
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn expect_eof(&self) -> Result<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", describe(self.peek()))))
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
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}', found {}", describe(self.peek()))))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_ident(kw) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}', found {}", describe(self.peek()))))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    pub fn expect_int(&mut self) -> Result<u64> {
        match *self.peek() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            ref other => Err(self.error(format!("expected integer, found {}", describe(other)))),
        }
    }

    /// EP-set literal: `|` and `\` are left-associative and bind looser than `&`.
    pub fn epset(&mut self) -> Result<EpSet> {
        let mut acc = self.epset_term()?;
        loop {
            if self.eat_sym("|") {
                acc = acc.union(&self.epset_term()?);
            } else if self.eat_sym("\\") {
                acc = acc.difference(&self.epset_term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn epset_term(&mut self) -> Result<EpSet> {
        let mut acc = self.epset_atom()?;
        while self.eat_sym("&") {
            acc = acc.intersect(&self.epset_atom()?);
        }
        Ok(acc)
    }

    fn int_list(&mut self) -> Result<Vec<u64>> {
        self.expect_sym("{")?;
        let mut v = Vec::new();
        if self.eat_sym("}") {
            return Ok(v);
        }
        loop {
            v.push(self.expect_int()?);
            if self.eat_sym("}") {
                return Ok(v);
            }
            self.expect_sym(",")?;
        }
    }

    fn epset_atom(&mut self) -> Result<EpSet> {
        match self.peek().clone() {
            Tok::Sym("{") => Ok(EpSet::finite(self.int_list()?)),
            Tok::Sym("(") => {
                self.advance();
                let s = self.epset()?;
                self.expect_sym(")")?;
                Ok(s)
            }
            Tok::Ident(id) => match id.as_str() {
                "all" => {
                    self.advance();
                    Ok(EpSet::all())
                }
                "empty" => {
                    self.advance();
                    Ok(EpSet::empty())
                }
                "fin" => {
                    self.advance();
                    Ok(EpSet::finite(self.int_list()?))
                }
                "cof" => {
                    self.advance();
                    Ok(EpSet::cofinite(self.int_list()?))
                }
                "ap" => {
                    self.advance();
                    self.expect_sym("(")?;
                    let b = self.expect_int()?;
                    self.expect_sym(",")?;
                    let s = self.expect_int()?;
                    self.expect_sym(")")?;
                    Ok(EpSet::ap(b, s))
                }
                _ => Err(self.error(format!("expected EP-set literal, found '{id}'"))),
            },
            other => Err(self.error(format!("expected EP-set literal, found {}", describe(&other)))),
        }
    }

    /// `INT | n | INT*n | INT*n+INT`, also `n±INT` and `INT*n-INT`.
    pub fn affine(&mut self) -> Result<Affine> {
        let coef = match self.peek().clone() {
            Tok::Int(c) => {
                self.advance();
                if self.is_ident("n") {
                    return Err(self.error("expected '*' between coefficient and 'n'"));
                }
                if !self.eat_sym("*") {
                    return Ok(Affine::constant(c));
                }
                if !self.is_ident("n") {
                    return Err(self.error(format!("expected 'n', found {}", describe(self.peek()))));
                }
                self.advance();
                c
            }
            Tok::Ident(ref s) if s == "n" => {
                self.advance();
                1
            }
            other => {
                return Err(self.error(format!("expected affine term, found {}", describe(&other))))
            }
        };
        let off = if self.eat_sym("+") {
            self.expect_int()? as i64
        } else if self.eat_sym("-") {
            -(self.expect_int()? as i64)
        } else {
            0
        };
        Ok(Affine { coef, off })
    }

    /// True when the upcoming tokens start an affine term rather than an EP-set.
    pub fn at_affine(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s == "n",
            Tok::Int(_) => true,
            _ => false,
        }
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(v) => format!("'{v}'"),
        Tok::Mie(k) => format!("'mie#{k}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_epset(text: &str) -> Result<EpSet> {
    let mut p = Parser::new(text, 1)?;
    let s = p.epset()?;
    p.expect_eof()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_precedence() {
        // & binds tighter than |
        let s = parse_epset("{1} | ap(0,2) & ap(0,3)").unwrap();
        assert_eq!(s, EpSet::singleton(1).union(&EpSet::ap(0, 6)));
        let d = parse_epset("all \\ {0,2}").unwrap();
        assert_eq!(d, EpSet::cofinite([0, 2]));
        let l = parse_epset("all \\ {0} \\ {1}").unwrap();
        assert_eq!(l, EpSet::cofinite([0, 1]));
    }

    #[test]
    fn literal_round_trip() {
        for s in [
            EpSet::all(),
            EpSet::empty(),
            EpSet::finite([3, 9]),
            EpSet::cofinite([1, 4]),
            EpSet::singleton(3).union(&EpSet::ap(7, 2)),
            EpSet::ap(2, 5).union(&EpSet::ap(4, 5)),
        ] {
            assert_eq!(parse_epset(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn affine_forms() {
        let a = |t: &str| {
            let mut p = Parser::new(t, 1).unwrap();
            let r = p.affine();
            r.and_then(|v| p.expect_eof().map(|_| v))
        };
        assert_eq!(a("7").unwrap(), Affine { coef: 0, off: 7 });
        assert_eq!(a("n").unwrap(), Affine { coef: 1, off: 0 });
        assert_eq!(a("2*n").unwrap(), Affine { coef: 2, off: 0 });
        assert_eq!(a("2*n+1").unwrap(), Affine { coef: 2, off: 1 });
        assert_eq!(a("n-2").unwrap(), Affine { coef: 1, off: -2 });
        match a("2n+") {
            Err(UgkError::Parse { line: 1, col: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match a("2*n+") {
            Err(UgkError::Parse { col: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mie_tokens_survive_comment_rule() {
        let t = tokenize("fin(; mie#12) # trailing", 1).unwrap();
        assert!(t.iter().any(|t| t.tok == Tok::Mie(12)));
        assert!(!t.iter().any(|t| t.tok == Tok::Ident("trailing".into())));
    }
}
