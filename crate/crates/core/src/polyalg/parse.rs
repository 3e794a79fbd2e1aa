//! Text format for polynomials: integer or rational coefficients, `+ - * / ^`
//! and parentheses, e.g. `x^2*y - 1` or `3/2*x + (y - 1)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::poly::SparsePoly;
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    end: (usize, usize),
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            toks.push((Tok::Num(s.parse().unwrap()), start.0, start.1));
            col += j - i;
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            toks.push((Tok::Ident(chars[i..j].iter().collect()), start.0, start.1));
            col += j - i;
            i = j;
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Sym(c), start.0, start.1));
            col += 1;
            i += 1;
        } else {
            return Err(ParseError { line, column: col, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(Lexer { toks, end: (line, col) })
}

struct Parser<'a> {
    lx: Lexer,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.lx.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.lx.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError { line, column, message: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SparsePoly, ParseError> {
        let n = self.vars.len();
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        debug_assert_eq!(acc.nvars(), n);
        Ok(acc)
    }

    fn term(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let at = self.here();
                let d = self.factor()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(ParseError { line: at.0, column: at.1, message: "division only by a nonzero constant".into() });
                }
                acc = acc.scale(&d.constant_term().invert().unwrap());
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e: u32 = match e.try_into() {
                        Ok(e) if e <= 1000 => e,
                        _ => return self.err("exponent too large"),
                    };
                    Ok(base.pow(e))
                }
                _ => self.err("expected a non-negative integer exponent after '^'"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<SparsePoly, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(SparsePoly::constant(n, Scalar::Rational(BigRational::from_integer(v))))
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(SparsePoly::var(n, i))
                }
                None => self.err(format!("unknown variable '{name}'")),
            },
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a polynomial in the given variables.
pub fn parse_poly(src: &str, vars: &[String]) -> Result<SparsePoly, ParseError> {
    let lx = lex(src)?;
    if lx.toks.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "empty polynomial".into() });
    }
    let mut ps = Parser { lx, pos: 0, vars };
    let e = ps.expr()?;
    if ps.pos != ps.lx.toks.len() {
        return ps.err("trailing input");
    }
    Ok(e)
}

/// Parse a rational number such as `3`, `-2/7`.
pub fn parse_rational(src: &str) -> Result<BigRational, ParseError> {
    Ok(parse_poly(src, &[])?.constant_term().to_rational())
}
