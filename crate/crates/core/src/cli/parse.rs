//! Recursive-descent parser for polynomial expressions in `X` (or
//! `X1 .. Xn`) and `T`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Division is only allowed by a nonzero constant, so `2/3` and `X/2` parse
//! exactly while `1/X` is rejected.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactpoly::{MultiPoly, Rational};

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    X(Option<usize>),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            if i < chars.len() && chars[i] == '.' {
                return Err(err(
                    line,
                    column,
                    "decimal literals are not supported; write a fraction",
                ));
            }
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("ascii digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            column += i - start;
            let tok = match word.as_str() {
                "T" => Tok::T,
                "X" => Tok::X(None),
                w if w.starts_with('X') && w[1..].chars().all(|d| d.is_ascii_digit()) => {
                    let idx: usize = w[1..]
                        .parse()
                        .map_err(|_| err(l0, c0, format!("bad variable index in `{w}`")))?;
                    if idx == 0 {
                        return Err(err(l0, c0, "variables are numbered from X1"));
                    }
                    Tok::X(Some(idx))
                }
                _ => return Err(err(l0, c0, format!("unknown identifier `{word}`"))),
            };
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let at = self.next();
                    let d = self.unary()?;
                    let c = constant_value(&d)
                        .ok_or_else(|| err(at.line, at.column, "can only divide by a constant"))?;
                    if c.is_zero() {
                        return Err(err(at.line, at.column, "division by zero"));
                    }
                    acc = &acc * &MultiPoly::constant(self.nvars, c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(-&self.unary()?)
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let at = self.next();
        match at.tok {
            Tok::Int(e) => {
                let e: u32 = e
                    .try_into()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| {
                        err(
                            at.line,
                            at.column,
                            format!("exponent larger than {MAX_EXPONENT}"),
                        )
                    })?;
                Ok(base.pow(e))
            }
            _ => Err(err(
                at.line,
                at.column,
                "exponent must be a nonnegative integer",
            )),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(MultiPoly::constant(self.nvars, Rational::from_integer(n))),
            Tok::T => Ok(MultiPoly::t(self.nvars)),
            Tok::X(None) => Ok(MultiPoly::var(self.nvars, 0)),
            Tok::X(Some(i)) => Ok(MultiPoly::var(self.nvars, i - 1)),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Err(err(close.line, close.column, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::End => Err(err(t.line, t.column, "unexpected end of input")),
            other => Err(err(
                t.line,
                t.column,
                format!("unexpected {}", describe(&other)),
            )),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::RParen => "`)`",
        _ => "token",
    }
}

fn constant_value(p: &MultiPoly) -> Option<Rational> {
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (None, _) => Some(Rational::zero()),
        (Some((m, c)), None) if m.t == 0 && m.x_degree() == 0 => Some(c.clone()),
        _ => None,
    }
}

/// Parses `text` into a polynomial in `X` (one variable) or `X1 .. Xn`.
/// Using both spellings in one expression is an error.
pub fn parse_polynomial(text: &str) -> Result<MultiPoly> {
    let toks = lex(text)?;
    let mut plain = None;
    let mut indexed: Option<(usize, usize, usize)> = None;
    let mut nvars = 0;
    for t in &toks {
        match t.tok {
            Tok::X(None) => {
                plain.get_or_insert((t.line, t.column));
                nvars = nvars.max(1);
            }
            Tok::X(Some(i)) => {
                indexed.get_or_insert((t.line, t.column, i));
                nvars = nvars.max(i);
            }
            _ => {}
        }
    }
    if let (Some(_), Some((line, column, _))) = (plain, indexed) {
        return Err(err(
            line,
            column,
            "cannot mix `X` with indexed variables `X1..Xn`",
        ));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        nvars,
    };
    let out = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(err(
            t.line,
            t.column,
            format!("unexpected {} after expression", describe(&t.tok)),
        ));
    }
    Ok(out.with_nvars(nvars))
}
