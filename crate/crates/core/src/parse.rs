//! Text grammar for Laurent polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Variables are `u1` .. `u9`; `x`, `y`, `z` alias `u1`, `u2`, `u3` when the
//! dimension is at most 3. Juxtaposition (`2u1`, `u1 u2`) is rejected, and a
//! negative exponent is only accepted on a unit such as `u1^-2`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Monomial};

const MAX_POWER: u32 = 4096;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize, bool),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            b'u' => {
                i += 1;
                if i < bytes.len() && (b'1'..=b'9').contains(&bytes[i]) {
                    let idx = (bytes[i] - b'0') as usize;
                    i += 1;
                    if i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                        return Err(parse_err(start, "unknown variable"));
                    }
                    out.push((start, Tok::Var(idx, false)));
                    continue;
                }
                return Err(parse_err(start, "unknown variable"));
            }
            b'x' | b'y' | b'z' => {
                if i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric() {
                    return Err(parse_err(start, "unknown variable"));
                }
                let idx = (c - b'x') as usize + 1;
                out.push((start, Tok::Var(idx, true)));
            }
            _ => return Err(parse_err(start, "unexpected character")),
        }
        i += 1;
    }
    Ok(out)
}

fn parse_err(pos: usize, msg: &str) -> Error {
    Error::Parse {
        pos,
        msg: msg.to_string(),
    }
}

#[derive(Debug)]
enum Ast {
    Int(BigInt),
    Var(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, i64, usize),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    max_var: usize,
    used_alias: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Int(_)) | Some(Tok::Var(..)) | Some(Tok::LParen) => {
                    return Err(parse_err(
                        self.here(),
                        "implicit multiplication is not allowed; use '*'",
                    ));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            let at = self.here();
            self.pos += 1;
            let neg = if let Some(Tok::Minus) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.toks.get(self.pos).cloned() {
                Some((p, Tok::Int(n))) => {
                    self.pos += 1;
                    let e: i64 = i64::try_from(&n).map_err(|_| parse_err(p, "exponent too large"))?;
                    let e = if neg { -e } else { e };
                    if let Some(Tok::Caret) = self.peek() {
                        return Err(parse_err(
                            self.here(),
                            "chained exponents are ambiguous; use parentheses",
                        ));
                    }
                    return Ok(Ast::Pow(Box::new(base), e, at));
                }
                _ => return Err(parse_err(self.here(), "expected integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let here = self.here();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Int(n))) => {
                self.pos += 1;
                Ok(Ast::Int(n))
            }
            Some((_, Tok::Var(i, alias))) => {
                self.pos += 1;
                self.max_var = self.max_var.max(i);
                self.used_alias |= alias;
                Ok(Ast::Var(i))
            }
            Some((_, Tok::LParen)) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(parse_err(self.here(), "expected ')'")),
                }
            }
            Some(_) => Err(parse_err(here, "expected a number, variable or '('")),
            None => Err(parse_err(here, "unexpected end of input")),
        }
    }
}

fn eval(ast: &Ast, dim: usize) -> Result<LaurentPoly> {
    Ok(match ast {
        Ast::Int(n) => LaurentPoly::constant(dim, n.clone()),
        Ast::Var(i) => LaurentPoly::var(dim, i - 1),
        Ast::Add(a, b) => &eval(a, dim)? + &eval(b, dim)?,
        Ast::Sub(a, b) => &eval(a, dim)? - &eval(b, dim)?,
        Ast::Mul(a, b) => &eval(a, dim)? * &eval(b, dim)?,
        Ast::Neg(a) => -eval(a, dim)?,
        Ast::Pow(a, e, at) => {
            let base = eval(a, dim)?;
            if *e >= 0 {
                let e = u32::try_from(*e).map_err(|_| parse_err(*at, "exponent too large"))?;
                if e > MAX_POWER && !base.is_unit() {
                    return Err(parse_err(*at, "exponent too large"));
                }
                if base.is_unit() {
                    unit_pow(&base, e as i64, *at)?
                } else {
                    base.pow(e)
                }
            } else if base.is_unit() {
                unit_pow(&base, *e, *at)?
            } else {
                return Err(parse_err(*at, "negative exponent requires a unit base such as u1"));
            }
        }
    })
}

fn unit_pow(base: &LaurentPoly, e: i64, at: usize) -> Result<LaurentPoly> {
    let (m, c) = base.leading().expect("unit");
    let exps =
        m.0.iter()
            .map(|&x| i32::try_from(x as i64 * e).map_err(|_| parse_err(at, "exponent overflow")))
            .collect::<Result<Vec<_>>>()?;
    let sign = if c.sign() == num_bigint::Sign::Minus && e.rem_euclid(2) == 1 {
        -1
    } else {
        1
    };
    Ok(LaurentPoly::monomial(base.dim(), Monomial(exps), sign))
}

/// Parses a polynomial, inferring the dimension from the highest variable
/// index when `dim` is `None`. A declared `dim` smaller than a variable index
/// used in the text is a conflict.
pub fn parse_poly(text: &str, dim: Option<usize>) -> Result<LaurentPoly> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        max_var: 0,
        used_alias: false,
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(parse_err(p.here(), "unexpected trailing input"));
    }
    let dim = match dim {
        Some(d) => {
            if d == 0 {
                return Err(parse_err(0, "dimension must be positive"));
            }
            if p.max_var > d {
                return Err(parse_err(
                    0,
                    &format!("variable u{} exceeds declared dimension {}", p.max_var, d),
                ));
            }
            d
        }
        None => p.max_var.max(1),
    };
    if p.used_alias && dim > 3 {
        return Err(parse_err(
            0,
            "aliases x, y, z are only available for dimension at most 3",
        ));
    }
    eval(&ast, dim)
}
