//! Element expressions for `wittquant eval`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')' | '[' expr ',' expr ']' | '{' expr ',' expr '}'
//! ```
//!
//! `[a, b]` is the commutator in `A_n`; `{f, g}` is the symplectic bracket
//! on `Z_1`. Juxtaposition multiplies, so `2x^3y` reads as `2 * x^3 * y`.

use std::sync::Arc;

use wittquant::polyring::{std_poisson, PolyRing, Polynomial};
use wittquant::quantization::{WeylAlgebra, WeylElement};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(u64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as u64))
                    .ok_or_else(|| parse_error("integer too large"))?;
                chars.next();
            }
            out.push(Token::Int(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                // a digit right after a letter belongs to the name: x1, y2
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Ident(s));
        } else if "+-*^()[]{},".contains(c) {
            out.push(Token::Sym(c));
            chars.next();
        } else {
            return Err(parse_error(&format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn parse_error(msg: &str) -> HarnessError {
    HarnessError::Algebra(wittquant::Error::Parse(msg.to_string()))
}

/// The operations an expression needs.
trait Domain {
    type Elem;
    fn int(&self, v: u64) -> Result<Self::Elem>;
    fn var(&self, name: &str) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn pow(&self, a: &Self::Elem, e: u64) -> Result<Self::Elem>;
    fn bracket(&self, open: char, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
}

struct Weyl {
    alg: Arc<WeylAlgebra>,
    level: u32,
}

impl Domain for Weyl {
    type Elem = WeylElement;

    fn int(&self, v: u64) -> Result<WeylElement> {
        let q = self.alg.level_modulus(self.level)?.order();
        Ok(self.alg.constant(self.level, (v % q) as i128)?)
    }
    fn var(&self, name: &str) -> Result<WeylElement> {
        let names = self.alg.var_names();
        let i = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| parse_error(&format!("unknown variable {name}; expected one of {}", names.join(", "))))?;
        let r = self.alg.r();
        Ok(if i < r { self.alg.x(i, self.level)? } else { self.alg.y(i - r, self.level)? })
    }
    fn add(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        Ok(a.add(b)?)
    }
    fn neg(&self, a: &WeylElement) -> WeylElement {
        a.neg()
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        Ok(a.mul(b)?)
    }
    fn pow(&self, a: &WeylElement, e: u64) -> Result<WeylElement> {
        Ok(a.pow(e)?)
    }
    fn bracket(&self, open: char, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        match open {
            '[' => Ok(a.commutator(b)?),
            _ => Err(parse_error("{f, g} is only defined on Z_1; use --z1")),
        }
    }
}

struct Center {
    ring: Arc<PolyRing>,
}

impl Domain for Center {
    type Elem = Polynomial;

    fn int(&self, v: u64) -> Result<Polynomial> {
        Ok(Polynomial::constant(&self.ring, (v % self.ring.p()) as i128))
    }
    fn var(&self, name: &str) -> Result<Polynomial> {
        Ok(Polynomial::var_named(&self.ring, name)?)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        Ok(a.try_add(b)?)
    }
    fn neg(&self, a: &Polynomial) -> Polynomial {
        a.neg()
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        Ok(a.try_mul(b)?)
    }
    fn pow(&self, a: &Polynomial, e: u64) -> Result<Polynomial> {
        Ok(a.pow(e))
    }
    fn bracket(&self, open: char, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        match open {
            '{' => Ok(std_poisson(a, b)?),
            _ => Err(parse_error("Z_1 is commutative; [f, g] is always 0, use {f, g}")),
        }
    }
}

struct Parser<'a, D: Domain> {
    tokens: &'a [Token],
    pos: usize,
    domain: &'a D,
}

impl<D: Domain> Parser<'_, D> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_error(&format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<D::Elem> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.domain.add(&acc, &t)?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.domain.add(&acc, &self.domain.neg(&t))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Token::Int(_)) | Some(Token::Ident(_)) => true,
            Some(Token::Sym(c)) => "([{".contains(*c),
            None => false,
        }
    }

    fn term(&mut self) -> Result<D::Elem> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') || self.starts_factor() {
                let f = self.factor()?;
                acc = self.domain.mul(&acc, &f)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<D::Elem> {
        if self.eat('-') {
            let f = self.factor()?;
            return Ok(self.domain.neg(&f));
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos) {
                Some(Token::Int(e)) => {
                    self.pos += 1;
                    return self.domain.pow(&base, *e);
                }
                _ => return Err(parse_error("exponent must be a non-negative integer")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<D::Elem> {
        let tok = self.peek().cloned().ok_or_else(|| parse_error("unexpected end of expression"))?;
        self.pos += 1;
        match tok {
            Token::Int(v) => self.domain.int(v),
            Token::Ident(name) => self.domain.var(&name),
            Token::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Sym(open @ ('[' | '{')) => {
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(if open == '[' { ']' } else { '}' })?;
                self.domain.bracket(open, &a, &b)
            }
            Token::Sym(c) => Err(parse_error(&format!("unexpected {c:?}"))),
        }
    }
}

fn evaluate<D: Domain>(domain: &D, text: &str) -> Result<D::Elem> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        domain,
    };
    let v = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(parse_error(&format!("trailing input at token {}", parser.pos)));
    }
    Ok(v)
}

/// Evaluates `text` in `A_n` over `Z/p^n`.
pub fn eval_weyl(alg: &Arc<WeylAlgebra>, text: &str) -> Result<WeylElement> {
    let level = alg.n();
    evaluate(&Weyl { alg: alg.clone(), level }, text)
}

/// Evaluates `text` in the center ring `Z_1`.
pub fn eval_center(ring: &Arc<PolyRing>, text: &str) -> Result<Polynomial> {
    evaluate(&Center { ring: ring.clone() }, text)
}
