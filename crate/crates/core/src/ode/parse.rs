//! Recursive-descent parser for polynomial expressions with parameter
//! fractions as coefficients.
//!
//! ```text
//! expr   = term (('+' | '-') term)*
//! term   = unary (('*' | '/') unary)*
//! unary  = ('-' | '+') unary | power
//! power  = atom ('^' ['-'] integer)?
//! atom   = integer | identifier | '(' expr ')'
//! ```
//!
//! Division and negative powers are only allowed for expressions free of the
//! polynomial variables.

use thiserror::Error;

use crate::arith::{Coeff, Field, FracElem, Poly, Symbols};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("the independent variable `{name}` appears at column {pos}; only autonomous equations are supported")]
    NonAutonomous { name: String, pos: usize },
    #[error("undeclared symbol `{name}` at column {pos}")]
    UndeclaredSymbol { name: String, pos: usize },
    #[error("division by an expression involving the unknown at column {pos}")]
    DivisionByUnknown { pos: usize },
    #[error("division by zero at column {pos}")]
    DivisionByZero { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                return Err(ParseError::Syntax {
                    pos: i + 1,
                    msg: "floating-point literals are not allowed; write an exact fraction".into(),
                });
            }
            out.push((Tok::Int(chars[start..i].iter().collect()), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), pos));
            i += 1;
        } else if c == '.' {
            return Err(ParseError::Syntax { pos, msg: "floating-point literals are not allowed".into() });
        } else {
            return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Maps identifiers that are polynomial variables (e.g. `u0`, `tau`) to
/// their indices.
pub type VarLookup<'a> = &'a dyn Fn(&str) -> Option<usize>;

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    syms: &'a Symbols,
    vars: VarLookup<'a>,
}

type P = Poly<FracElem>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<P, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<P, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.i += 1;
                let d = self.unary()?;
                acc = divide(&acc, &d, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<P, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<P, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat('-');
        let e = match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.i += 1;
                s.parse::<u32>().map_err(|_| ParseError::Syntax { pos, msg: "exponent too large".into() })?
            }
            Some(Tok::Op('(')) => {
                // Allow `x^(3)` and `x^(-2)`.
                self.i += 1;
                let neg_in = self.eat('-');
                let e = match self.peek().cloned() {
                    Some(Tok::Int(s)) => {
                        self.i += 1;
                        s.parse::<u32>().map_err(|_| ParseError::Syntax { pos, msg: "exponent too large".into() })?
                    }
                    _ => return Err(ParseError::Syntax { pos, msg: "exponent must be an integer".into() }),
                };
                if !self.eat(')') {
                    return Err(ParseError::Syntax { pos: self.pos(), msg: "expected `)`".into() });
                }
                if neg_in {
                    return divide(&P::constant(FracElem::one()), &base.pow(e), pos);
                }
                e
            }
            _ => return Err(ParseError::Syntax { pos, msg: "exponent must be an integer".into() }),
        };
        if neg {
            divide(&P::constant(FracElem::one()), &base.pow(e), pos)
        } else {
            Ok(base.pow(e))
        }
    }

    fn atom(&mut self) -> Result<P, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.i += 1;
                let n: num_bigint::BigInt = s.parse().unwrap();
                Ok(P::constant(FracElem::from_rat_value(crate::arith::Rat::from_integer(n))))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if let Some(v) = (self.vars)(&name) {
                    return Ok(P::var(v));
                }
                if let Some(i) = self.syms.index(&name) {
                    return Ok(P::constant(FracElem::var(i)));
                }
                if name == "xi" {
                    return Err(ParseError::NonAutonomous { name, pos });
                }
                Err(ParseError::UndeclaredSymbol { name, pos })
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::Syntax { pos: self.pos(), msg: "expected `)`".into() });
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(ParseError::Syntax { pos, msg: format!("unexpected `{c}`") }),
            None => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
        }
    }
}

fn divide(a: &P, d: &P, pos: usize) -> Result<P, ParseError> {
    if !d.is_constant() {
        return Err(ParseError::DivisionByUnknown { pos });
    }
    let c = d.constant_term();
    if c.is_zero() {
        return Err(ParseError::DivisionByZero { pos });
    }
    let inv = c.inv();
    Ok(a.scale(&inv))
}

/// Parses `text` into a polynomial in the variables recognised by `vars`,
/// with coefficients in the fraction field of the symbols in `syms`.
pub fn parse_poly(text: &str, syms: &Symbols, vars: VarLookup) -> Result<P, ParseError> {
    let toks = tokenize(text)?;
    let end = text.chars().count() + 1;
    let mut p = Parser { toks, i: 0, end, syms, vars };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return Err(ParseError::Syntax { pos: p.pos(), msg: "unexpected trailing input".into() });
    }
    Ok(e)
}

/// Parses a parameter-only expression into a fraction.
pub fn parse_frac(text: &str, syms: &Symbols) -> Result<FracElem, ParseError> {
    let p = parse_poly(text, syms, &|_| None)?;
    Ok(p.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, SymbolKind};

    fn syms() -> Symbols {
        let mut s = Symbols::new();
        s.add("a", SymbolKind::Param, true);
        s
    }

    fn u(name: &str) -> Option<usize> {
        name.strip_prefix('u').and_then(|d| d.parse().ok())
    }

    #[test]
    fn parses_with_precedence() {
        let p = parse_poly("2*u0^2 - (6/a)*u0*u1 + 1/2", &syms(), &u).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.constant_term(), FracElem::from_rat_value(rat(1, 2)));
        let q = parse_poly("-u1^(2)/a^2", &syms(), &u).unwrap();
        assert_eq!(q.num_terms(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_poly("u0 + xi", &syms(), &u), Err(ParseError::NonAutonomous { .. })));
        assert!(matches!(parse_poly("u0 + c", &syms(), &u), Err(ParseError::UndeclaredSymbol { .. })));
        assert!(matches!(parse_poly("1/u0", &syms(), &u), Err(ParseError::DivisionByUnknown { .. })));
        assert!(matches!(parse_poly("0.5*u0", &syms(), &u), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("u0 +", &syms(), &u), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("u0/(a-a)", &syms(), &u), Err(ParseError::DivisionByZero { .. })));
    }
}
