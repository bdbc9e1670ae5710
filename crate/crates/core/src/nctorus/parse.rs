//! Plain-text expressions over `u`, `v`.
//!
//! ```text
//! program  := (name '=' expr ';')* expr
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*        division only by scalars
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := int | '-' int | '(' ['-'] int ['/' int] ')'
//! atom     := number | number'i' | 'i' | 'u' | 'v' | 'rho' | name
//!           | ('adj' | 'E' | 'sigma' | 'trace') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `rho` is `e^{2πiα}`; `rho^(k/2)` is the half power `s^k`. Negative powers
//! are accepted for single-term elements such as `u^-1`. Numbers are decimal
//! literals, read exactly in exact mode. Juxtaposition is not
//! multiplication except for the imaginary suffix in `2i`.

use super::poly::{AlgebraError, Mode, NcPoly, PhaseScalar};
use super::scalar::{rational_from_decimal, GaussRat, RatFunc};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    BadChar { ch: char, pos: usize },
    #[error("unexpected {found} at offset {pos}, expected {expected}")]
    Unexpected { found: String, expected: &'static str, pos: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("bad exponent at offset {0}")]
    BadExponent(usize),
    #[error("cannot invert a non-monomial element")]
    NotInvertible,
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Imag(String),
    Name(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number {s}"),
            Tok::Imag(s) => format!("number {s}i"),
            Tok::Name(s) => format!("name `{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let is_name = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            if chars.get(i) == Some(&'i') && !chars.get(i + 1).copied().is_some_and(is_name) {
                i += 1;
                out.push((Tok::Imag(text), start));
            } else {
                out.push((Tok::Num(text), start));
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_name(chars[i]) {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), start));
        } else if "+-*/^()=;".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError::BadChar { ch: c, pos: i });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

const RESERVED: [&str; 8] = ["u", "v", "i", "rho", "adj", "E", "sigma", "trace"];

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    mode: Mode,
    env: &'a HashMap<String, NcPoly>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected { found: self.peek().describe(), expected, pos: self.offset() }
    }

    fn number(&self, text: &str, imaginary: bool) -> Result<NcPoly, ParseError> {
        let c = match self.mode {
            Mode::Exact => {
                let r = rational_from_decimal(text).ok_or_else(|| ParseError::BadNumber(text.into()))?;
                let g: GaussRat = if imaginary {
                    Complex::new(BigRational::zero(), r)
                } else {
                    Complex::new(r, BigRational::zero())
                };
                PhaseScalar::Exact(RatFunc::constant(g))
            }
            Mode::Float { .. } => {
                let x: f64 = text.parse().map_err(|_| ParseError::BadNumber(text.into()))?;
                PhaseScalar::Float(if imaginary { Complex64::new(0.0, x) } else { Complex64::new(x, 0.0) })
            }
        };
        Ok(NcPoly::scalar(c, self.mode))
    }

    fn expr(&mut self) -> Result<NcPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NcPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?)?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    acc = acc.div_scalar(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<NcPoly, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let pos = self.offset();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Num(t) => t.parse::<i64>().map(|k| if neg { -k } else { k }).map_err(|_| ParseError::BadExponent(pos)),
            _ => Err(ParseError::BadExponent(pos)),
        }
    }

    /// Exponent as a fraction `(num, den)`.
    fn exponent(&mut self) -> Result<(i64, i64), ParseError> {
        if *self.peek() == Tok::Sym('(') {
            self.bump();
            let num = self.int()?;
            let den = if *self.peek() == Tok::Sym('/') {
                self.bump();
                self.int()?
            } else {
                1
            };
            self.expect(')', "`)` closing the exponent")?;
            if den == 0 {
                return Err(ParseError::BadExponent(self.offset()));
            }
            Ok((num, den))
        } else {
            Ok((self.int()?, 1))
        }
    }

    fn power(&mut self) -> Result<NcPoly, ParseError> {
        let is_rho = *self.peek() == Tok::Name("rho".into());
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        let pos = self.offset();
        self.bump();
        let (num, den) = self.exponent()?;
        if is_rho {
            // rho^(num/den) = s^{2 num / den}
            if (2 * num) % den != 0 {
                return Err(ParseError::BadExponent(pos));
            }
            return Ok(NcPoly::scalar(PhaseScalar::s_pow(self.mode, 2 * num / den), self.mode));
        }
        if den != 1 && num % den != 0 {
            return Err(ParseError::BadExponent(pos));
        }
        let k = num / den;
        if k >= 0 {
            return Ok(base.pow(k as u32)?);
        }
        Ok(invert_term(&base)?.pow((-k) as u32)?)
    }

    fn atom(&mut self) -> Result<NcPoly, ParseError> {
        let mode = self.mode;
        if matches!(self.peek(), Tok::End | Tok::Sym(_)) && *self.peek() != Tok::Sym('(') {
            return Err(self.unexpected("a number, name, or `(`"));
        }
        match self.bump() {
            Tok::Num(t) => self.number(&t, false),
            Tok::Imag(t) => self.number(&t, true),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            Tok::Name(name) => match name.as_str() {
                "u" => Ok(NcPoly::u(mode)),
                "v" => Ok(NcPoly::v(mode)),
                "i" => self.number("1", true),
                "rho" => Ok(NcPoly::scalar(PhaseScalar::s_pow(mode, 2), mode)),
                f @ ("adj" | "E" | "sigma" | "trace") => {
                    self.expect('(', "`(` after a function name")?;
                    let x = self.expr()?;
                    self.expect(')', "`)` closing the argument")?;
                    Ok(match f {
                        "adj" => x.adjoint(),
                        "E" => x.expectation(),
                        "sigma" => x.sigma(),
                        _ => NcPoly::scalar(x.trace(), mode),
                    })
                }
                other => self.env.get(other).cloned().ok_or_else(|| ParseError::UnknownName(other.into())),
            },
            _ => unreachable!("checked above"),
        }
    }
}

/// Inverse of `c·u^n v^m` as `c⁻¹ (u^n v^m)*`.
fn invert_term(x: &NcPoly) -> Result<NcPoly, ParseError> {
    if x.len() != 1 {
        return Err(ParseError::NotInvertible);
    }
    let (&(n, m), c) = x.terms().next().expect("one term");
    let mode = x.mode();
    let unit_term = NcPoly::monomial(mode, n, m);
    let c_poly = NcPoly::scalar(c.clone(), mode);
    Ok(unit_term.adjoint().div_scalar(&c_poly)?)
}

/// Parses and evaluates a program in the given coefficient mode.
pub fn parse_program(src: &str, mode: Mode) -> Result<NcPoly, ParseError> {
    let toks = lex(src)?;
    let mut env: HashMap<String, NcPoly> = HashMap::new();
    // Split at top-level `;` and bind `name = expr` statements in order.
    let mut stmts: Vec<Vec<(Tok, usize)>> = vec![Vec::new()];
    for t in toks {
        match t.0 {
            Tok::Sym(';') => stmts.push(Vec::new()),
            Tok::End => {}
            _ => stmts.last_mut().expect("nonempty").push(t),
        }
    }
    let end = src.chars().count();
    let last = stmts.pop().unwrap_or_default();
    for stmt in stmts {
        let (name, body) = match stmt.as_slice() {
            [(Tok::Name(name), _), (Tok::Sym('='), _), rest @ ..] => (name.clone(), rest.to_vec()),
            [(t, pos), ..] => {
                return Err(ParseError::Unexpected { found: t.describe(), expected: "`name = expr`", pos: *pos })
            }
            [] => continue,
        };
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::Reserved(name));
        }
        let value = eval_tokens(body, mode, &env, end)?;
        env.insert(name, value);
    }
    eval_tokens(last, mode, &env, end)
}

fn eval_tokens(
    mut toks: Vec<(Tok, usize)>,
    mode: Mode,
    env: &HashMap<String, NcPoly>,
    end: usize,
) -> Result<NcPoly, ParseError> {
    toks.push((Tok::End, end));
    let mut p = Parser { toks, pos: 0, mode, env };
    let value = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of statement"));
    }
    Ok(value)
}

/// Parses a single expression (no bindings).
pub fn parse_expr(src: &str, mode: Mode) -> Result<NcPoly, ParseError> {
    parse_program(src, mode)
}
