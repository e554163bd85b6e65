//! Abstract syntax, parser and printer for the basic modal language.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! imp   := or ( "->" imp )?
//! or    := and ( "|" and )*
//! and   := unary ( "&" unary )*
//! unary := ("~" | "<>" | "[]") unary | atom | "(" imp ")"
//! atom  := "p" digits | "true" | "false"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalFormula {
    Atom(u32),
    Bot,
    Top,
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Imp(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
    /// Read as `~<>~`.
    Boxed(Box<ModalFormula>),
}

use ModalFormula as M;

impl ModalFormula {
    pub fn atom(i: u32) -> Self {
        M::Atom(i)
    }

    pub fn not(self) -> Self {
        M::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        M::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        M::Or(Box::new(self), Box::new(other))
    }

    pub fn imp(self, other: Self) -> Self {
        M::Imp(Box::new(self), Box::new(other))
    }

    pub fn dia(self) -> Self {
        M::Diamond(Box::new(self))
    }

    pub fn boxed(self) -> Self {
        M::Boxed(Box::new(self))
    }

    /// Conjunction of `parts`, `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = ModalFormula>) -> Self {
        parts.into_iter().reduce(M::and).unwrap_or(M::Top)
    }

    /// Nesting depth of modal operators.
    pub fn depth(&self) -> usize {
        match self {
            M::Atom(_) | M::Bot | M::Top => 0,
            M::Not(a) => a.depth(),
            M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => a.depth().max(b.depth()),
            M::Diamond(a) | M::Boxed(a) => 1 + a.depth(),
        }
    }

    pub fn letters(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<u32>) {
        match self {
            M::Atom(i) => {
                out.insert(*i);
            }
            M::Bot | M::Top => {}
            M::Not(a) | M::Diamond(a) | M::Boxed(a) => a.collect_letters(out),
            M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            M::Atom(_) | M::Bot | M::Top => 1,
            M::Not(a) | M::Diamond(a) | M::Boxed(a) => 1 + a.size(),
            M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            M::Imp(..) => 1,
            M::Or(..) => 2,
            M::And(..) => 3,
            _ => 4,
        }
    }
}

/// The modal depth `dp(φ)`.
pub fn modal_depth(phi: &ModalFormula) -> usize {
    phi.depth()
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, child: &ModalFormula, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        let p = self.precedence();
        match self {
            M::Atom(i) => write!(f, "p{i}"),
            M::Bot => f.write_str("false"),
            M::Top => f.write_str("true"),
            M::Not(a) | M::Diamond(a) | M::Boxed(a) => {
                f.write_str(match self {
                    M::Not(_) => "~",
                    M::Diamond(_) => "<>",
                    _ => "[]",
                })?;
                side(f, a, a.precedence() < 4)
            }
            M::Imp(a, b) => {
                side(f, a, a.precedence() <= p)?;
                f.write_str(" -> ")?;
                side(f, b, b.precedence() < p)
            }
            M::And(a, b) | M::Or(a, b) => {
                side(f, a, a.precedence() < p)?;
                f.write_str(if matches!(self, M::And(..)) { " & " } else { " | " })?;
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
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn imp(&mut self) -> Result<ModalFormula> {
        let lhs = self.or()?;
        if self.eat("->") {
            Ok(lhs.imp(self.imp()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<ModalFormula> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<ModalFormula> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ModalFormula> {
        if self.eat("~") {
            return Ok(self.unary()?.not());
        }
        if self.eat("<>") {
            return Ok(self.unary()?.dia());
        }
        if self.eat("[]") {
            return Ok(self.unary()?.boxed());
        }
        if self.eat("(") {
            let inner = self.imp()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let word_len = rest
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(rest.len());
        let word = &rest[..word_len];
        let parsed = match word {
            "true" => M::Top,
            "false" => M::Bot,
            _ if word.len() > 1 && word.starts_with('p') && word[1..].bytes().all(|b| b.is_ascii_digit()) => {
                let index = word[1..].parse().map_err(|_| self.error("letter index out of range"))?;
                M::Atom(index)
            }
            "" if rest.is_empty() => return Err(self.error("unexpected end of input")),
            _ => return Err(self.error(format!("expected a formula, found {:?}", rest.chars().next().unwrap_or(' ')))),
        };
        self.pos += word_len;
        Ok(parsed)
    }
}

/// Parses a modal formula; errors carry the byte offset of the failure.
pub fn parse_modal(text: &str) -> Result<ModalFormula> {
    let mut p = Parser { src: text, pos: 0 };
    let phi = p.imp()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_fixtures() {
        assert_eq!(parse_modal("<>p0").unwrap(), M::atom(0).dia());
        assert_eq!(parse_modal("[]p0 -> p0").unwrap(), M::atom(0).boxed().imp(M::atom(0)));
        assert_eq!(parse_modal("<> <> p1 & p0").unwrap(), M::atom(1).dia().dia().and(M::atom(0)));
        assert_eq!(
            parse_modal("p0 -> p1 -> p2").unwrap(),
            M::atom(0).imp(M::atom(1).imp(M::atom(2)))
        );
        assert_eq!(
            parse_modal("p0 | p1 & p2 -> ~p3").unwrap(),
            M::atom(0).or(M::atom(1).and(M::atom(2))).imp(M::atom(3).not())
        );
        assert_eq!(parse_modal("~(p0 | false)").unwrap(), M::atom(0).or(M::Bot).not());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_modal("p0 & ").unwrap_err() {
            Error::Syntax { position, .. } => assert_eq!(position, 5),
            e => panic!("{e}"),
        }
        match parse_modal("(p0 | p1").unwrap_err() {
            Error::Syntax { position, .. } => assert_eq!(position, 8),
            e => panic!("{e}"),
        }
        assert!(parse_modal("q1").is_err());
        assert!(parse_modal("p0 p1").is_err());
        assert!(parse_modal("p").is_err());
    }

    #[test]
    fn depth() {
        assert_eq!(modal_depth(&parse_modal("p0").unwrap()), 0);
        assert_eq!(modal_depth(&parse_modal("<>[]p0").unwrap()), 2);
        assert_eq!(modal_depth(&parse_modal("<>p0 & []<>p1").unwrap()), 2);
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        for text in ["<>p0 & []<>p1", "(p0 -> p1) -> p2", "p0 & (p1 & p2)", "~(p0 | p1)", "<>true"] {
            assert_eq!(parse_modal(text).unwrap().to_string(), text);
        }
    }
}
