//! First-order formulas over a single binary relation R with equality.
//!
//! Same precedence scheme as the modal grammar; `exists x.` and `forall x.`
//! take the longest possible body.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FOFormula {
    Rel(String, String),
    Eq(String, String),
    Not(Box<FOFormula>),
    And(Box<FOFormula>, Box<FOFormula>),
    Or(Box<FOFormula>, Box<FOFormula>),
    Imp(Box<FOFormula>, Box<FOFormula>),
    Exists(String, Box<FOFormula>),
    Forall(String, Box<FOFormula>),
}

use FOFormula as F;

impl FOFormula {
    pub fn rel(a: impl Into<String>, b: impl Into<String>) -> Self {
        F::Rel(a.into(), b.into())
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Self {
        F::Eq(a.into(), b.into())
    }

    pub fn not(self) -> Self {
        F::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        F::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        F::Or(Box::new(self), Box::new(other))
    }

    pub fn imp(self, other: Self) -> Self {
        F::Imp(Box::new(self), Box::new(other))
    }

    pub fn exists(var: impl Into<String>, body: Self) -> Self {
        F::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Self) -> Self {
        F::Forall(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; `None` when `parts` is empty.
    pub fn conjunction(parts: impl IntoIterator<Item = FOFormula>) -> Option<Self> {
        parts.into_iter().reduce(F::and)
    }

    pub fn disjunction(parts: impl IntoIterator<Item = FOFormula>) -> Option<Self> {
        parts.into_iter().reduce(F::or)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            F::Rel(a, b) | F::Eq(a, b) => [a.clone(), b.clone()].into(),
            F::Not(a) => a.free_vars(),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            F::Exists(x, body) | F::Forall(x, body) => {
                let mut s = body.free_vars();
                s.remove(x);
                s
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn quantifier_rank(&self) -> usize {
        match self {
            F::Rel(..) | F::Eq(..) => 0,
            F::Not(a) => a.quantifier_rank(),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            F::Exists(_, body) | F::Forall(_, body) => 1 + body.quantifier_rank(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            F::Rel(..) | F::Eq(..) => 1,
            F::Not(a) | F::Exists(_, a) | F::Forall(_, a) => 1 + a.size(),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Negation normal form: negations only on atoms, no implications.
    pub fn nnf(&self) -> FOFormula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> FOFormula {
        match (self, positive) {
            (F::Rel(..) | F::Eq(..), true) => self.clone(),
            (F::Rel(..) | F::Eq(..), false) => self.clone().not(),
            (F::Not(a), _) => a.nnf_signed(!positive),
            (F::And(a, b), true) | (F::Or(a, b), false) => a.nnf_signed(positive).and(b.nnf_signed(positive)),
            (F::Or(a, b), true) | (F::And(a, b), false) => a.nnf_signed(positive).or(b.nnf_signed(positive)),
            (F::Imp(a, b), true) => a.nnf_signed(false).or(b.nnf_signed(true)),
            (F::Imp(a, b), false) => a.nnf_signed(true).and(b.nnf_signed(false)),
            (F::Exists(x, body), true) | (F::Forall(x, body), false) => F::exists(x.clone(), body.nnf_signed(positive)),
            (F::Forall(x, body), true) | (F::Exists(x, body), false) => F::forall(x.clone(), body.nnf_signed(positive)),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            F::Rel(..) | F::Eq(..) => true,
            F::Not(a) => matches!(**a, F::Rel(..) | F::Eq(..)),
            F::And(a, b) | F::Or(a, b) => a.is_nnf() && b.is_nnf(),
            F::Imp(..) => false,
            F::Exists(_, a) | F::Forall(_, a) => a.is_nnf(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            F::Exists(..) | F::Forall(..) => 0,
            F::Imp(..) => 1,
            F::Or(..) => 2,
            F::And(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for FOFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, child: &FOFormula, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        let p = self.precedence();
        match self {
            F::Rel(a, b) => write!(f, "R({a},{b})"),
            F::Eq(a, b) => write!(f, "{a}={b}"),
            F::Not(a) => {
                f.write_str("~")?;
                side(f, a, a.precedence() < 4)
            }
            F::Exists(x, body) => write!(f, "exists {x}. {body}"),
            F::Forall(x, body) => write!(f, "forall {x}. {body}"),
            F::Imp(a, b) => {
                side(f, a, a.precedence() <= p)?;
                f.write_str(" -> ")?;
                side(f, b, b.precedence() < p)
            }
            F::And(a, b) | F::Or(a, b) => {
                side(f, a, a.precedence() < p)?;
                f.write_str(if matches!(self, F::And(..)) { " & " } else { " | " })?;
                side(f, b, b.precedence() <= p)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek_str(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(token)
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.peek_str(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected {token:?}")))
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit()))
            .count();
        &rest[..len]
    }

    fn variable(&mut self) -> Result<String> {
        let w = self.word();
        if w.is_empty() || matches!(w, "exists" | "forall" | "R") {
            return Err(self.error("expected a variable"));
        }
        self.pos += w.len();
        Ok(w.to_string())
    }

    fn imp(&mut self) -> Result<FOFormula> {
        let lhs = self.or()?;
        if self.eat("->") {
            Ok(lhs.imp(self.imp()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<FOFormula> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<FOFormula> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FOFormula> {
        if self.eat("~") {
            return Ok(self.unary()?.not());
        }
        if self.eat("(") {
            let inner = self.imp()?;
            self.expect(")")?;
            return Ok(inner);
        }
        let w = self.word();
        match w {
            "exists" | "forall" => {
                self.pos += w.len();
                let var = self.variable()?;
                self.expect(".")?;
                let body = self.imp()?;
                Ok(if w == "exists" { F::exists(var, body) } else { F::forall(var, body) })
            }
            "R" if self.src[self.pos + 1..].trim_start().starts_with('(') => {
                self.pos += 1;
                self.expect("(")?;
                let a = self.variable()?;
                self.expect(",")?;
                let b = self.variable()?;
                self.expect(")")?;
                Ok(F::rel(a, b))
            }
            "" if self.pos == self.src.len() => Err(self.error("unexpected end of input")),
            _ => {
                let a = self.variable()?;
                self.expect("=")?;
                let b = self.variable()?;
                Ok(F::eq(a, b))
            }
        }
    }
}

pub fn parse_fo(text: &str) -> Result<FOFormula> {
    let mut p = Parser { src: text, pos: 0 };
    let phi = p.imp()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(phi)
}
