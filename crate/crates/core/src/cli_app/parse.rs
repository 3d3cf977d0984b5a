//! Input formats: arithmetic expressions in `t1`, `t2` and a sparse
//! one-term-per-line listing.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::exact_arith::Rat;
use crate::polytope_fan::LatticePoint;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Expr,
    Sparse,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expr" => Ok(Self::Expr),
            "sparse" => Ok(Self::Sparse),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: negative exponent")]
    NegativeExponent { line: usize, column: usize },
    #[error("empty input")]
    Empty,
}

pub fn parse_polynomial(text: &str, format: InputFormat) -> Result<SparseBivariate, ParseError> {
    match format {
        InputFormat::Expr => parse_expression(text),
        InputFormat::Sparse => parse_sparse(text),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(u8),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Var(v) => write!(f, "`t{v}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars);
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                digits.push(advance(&mut chars));
            }
            out.push((Tok::Int(digits.parse().unwrap()), pos));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut name = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                name.push(advance(&mut chars));
            }
            let var = match name.as_str() {
                "t1" | "x" => 1,
                "t2" | "y" => 2,
                _ => return Err(pos.error(format!("unknown variable `{name}`"))),
            };
            out.push((Tok::Var(var), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(pos.error(format!("unexpected character `{c}`"))),
        };
        advance(&mut chars);
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    // sum := ['-'|'+'] product (('+'|'-') product)*
    fn sum(&mut self) -> Result<SparseBivariate, ParseError> {
        let mut acc = match self.peek() {
            Tok::Minus => {
                self.bump();
                self.product()?.scale(&Rat::from_integer((-1).into()))
            }
            Tok::Plus => {
                self.bump();
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // product := power (('*'|'/') power)*, dividing only by nonzero constants
    fn product(&mut self) -> Result<SparseBivariate, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.power()?);
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.power()?;
                    if d.is_zero() {
                        return Err(pos.error("division by zero"));
                    }
                    if d.len() != 1 || d.coeff(LatticePoint::new(0, 0)).is_zero() {
                        return Err(pos.error("division by a non-constant"));
                    }
                    acc = acc.scale(&(Rat::from_integer(1.into()) / d.constant_term()));
                }
                _ => return Ok(acc),
            }
        }
    }

    // power := atom ['^' ['-'] integer]
    fn power(&mut self) -> Result<SparseBivariate, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, pos) = self.bump();
        let e = match tok {
            Tok::Minus => {
                return Err(ParseError::NegativeExponent {
                    line: pos.line,
                    column: pos.column,
                })
            }
            Tok::Int(n) => n,
            other => return Err(pos.error(format!("expected exponent, found {other}"))),
        };
        let e: u64 = match u64::try_from(&e) {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => return Err(pos.error(format!("exponent exceeds {MAX_EXPONENT}"))),
        };
        Ok(base.pow(e as u32))
    }

    // atom := integer | variable | '(' sum ')' | '-' atom
    fn atom(&mut self) -> Result<SparseBivariate, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => Ok(SparseBivariate::constant(Rat::from_integer(n))),
            Tok::Var(1) => Ok(SparseBivariate::monomial(Rat::from_integer(1.into()), LatticePoint::new(1, 0))),
            Tok::Var(_) => Ok(SparseBivariate::monomial(Rat::from_integer(1.into()), LatticePoint::new(0, 1))),
            Tok::Minus => Ok(self.power()?.scale(&Rat::from_integer((-1).into()))),
            Tok::LParen => {
                let inner = self.sum()?;
                let (close, p) = self.bump();
                if close != Tok::RParen {
                    return Err(p.error(format!("expected `)`, found {close}")));
                }
                Ok(inner)
            }
            other => Err(pos.error(format!("unexpected {other}"))),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<SparseBivariate, ParseError> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks, at: 0 };
    let value = p.sum()?;
    let (tok, pos) = p.bump();
    if tok != Tok::End {
        return Err(pos.error(format!("unexpected {tok}")));
    }
    Ok(value)
}

/// Lines `num den m1 m2`; `#` starts a comment, blank lines are skipped.
pub fn parse_sparse(text: &str) -> Result<SparseBivariate, ParseError> {
    let mut f = SparseBivariate::zero();
    let mut seen = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = body
            .split_whitespace()
            .map(|w| (w.as_ptr() as usize - raw.as_ptr() as usize + 1, w))
            .collect();
        if fields.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ParseError::Syntax { line, column, message };
        if fields.len() != 4 {
            return Err(err(fields[0].0, format!("expected `num den m1 m2`, found {} fields", fields.len())));
        }
        let int = |(column, w): (usize, &str)| {
            w.parse::<BigInt>()
                .map_err(|_| err(column, format!("`{w}` is not an integer")))
        };
        let num = int(fields[0])?;
        let den = int(fields[1])?;
        if den.is_zero() {
            return Err(err(fields[1].0, "zero denominator".into()));
        }
        let mut exps = [0i64; 2];
        for (slot, &(column, w)) in exps.iter_mut().zip(&fields[2..]) {
            let e = int((column, w))?;
            if e.is_negative() {
                return Err(ParseError::NegativeExponent { line, column });
            }
            *slot = i64::try_from(&e)
                .ok()
                .filter(|&e| e as u64 <= MAX_EXPONENT)
                .ok_or_else(|| err(column, format!("exponent exceeds {MAX_EXPONENT}")))?;
        }
        f.add_term(LatticePoint::new(exps[0], exps[1]), Rat::new(num, den));
        seen = true;
    }
    if !seen {
        return Err(ParseError::Empty);
    }
    Ok(f)
}
