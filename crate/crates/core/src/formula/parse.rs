//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! imp   ::= or ("->" imp)?
//! or    ::= and ("|" and)*
//! and   ::= unary ("&" unary)*
//! unary ::= "~" unary | "<" NAME ">" unary | "[" NAME "]" unary | atom
//! atom  ::= "false" | "true" | "p" NAT | "(" imp ")"
//! ```

use super::Formula;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Arrow,
    Bar,
    Amp,
    Tilde,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Ident(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Ident(s) => format!("`{s}`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Tok::Arrow));
                i += 2;
                continue;
            }
            b'|' => Tok::Bar,
            b'&' => Tok::Amp,
            b'~' => Tok::Tilde,
            b'<' => Tok::LAngle,
            b'>' => Tok::RAngle,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), Tok::describe);
            self.error(format!("expected {}, found {found}", tok.describe()))
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Amp) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn modality(&mut self, close: Tok) -> Result<String> {
        let name = match self.peek() {
            Some(Tok::Ident(name)) => name.clone(),
            _ => return self.error("expected a modality name"),
        };
        self.pos += 1;
        self.expect(close)?;
        Ok(name)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LAngle) {
            let m = self.modality(Tok::RAngle)?;
            return Ok(Formula::diamond(&m, self.unary()?));
        }
        if self.eat(&Tok::LBracket) {
            let m = self.modality(Tok::RBracket)?;
            return Ok(Formula::boxed(&m, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(word)) => {
                let f = match word.as_str() {
                    "false" => Formula::Bottom,
                    "true" => Formula::top(),
                    w if w.len() > 1
                        && w.starts_with('p')
                        && w[1..].bytes().all(|b| b.is_ascii_digit()) =>
                    {
                        match w[1..].parse::<u32>() {
                            Ok(i) => Formula::Var(i),
                            Err(_) => return self.error(format!("variable index too large in `{w}`")),
                        }
                    }
                    w => return self.error(format!("unexpected identifier `{w}`")),
                };
                self.pos += 1;
                Ok(f)
            }
            Some(t) => self.error(format!("expected a formula, found {}", t.describe())),
            None => self.error("expected a formula, found end of input"),
        }
    }
}

/// Parses a formula. Errors carry the byte offset of the offending token.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.implication()?;
    if let Some(t) = p.peek() {
        let t = t.describe();
        return p.error(format!("unexpected {t} after formula"));
    }
    Ok(f)
}
