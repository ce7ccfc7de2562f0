//! Class expressions: integer-coefficient sums of products of basis ids.
//!
//! ```text
//! expr  := ['+'|'-'] term (('+'|'-') term)*
//! term  := power ('*' power)*
//! power := atom ['^' INT]
//! atom  := INT | IDENT | '(' expr ')'
//! ```
//!
//! Products are cup products, evaluated left to right.

use std::sync::Arc;

use thiserror::Error;

use super::{GradedClass, RingError, RingPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '^' | '(' | ')' => {
                out.push((
                    pos,
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                ));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let v = s.parse::<i64>().map_err(|_| ParseError {
                    position: pos,
                    message: format!("integer `{s}` out of range"),
                })?;
                out.push((pos, Tok::Int(v)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].1.is_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Ident(s)));
            }
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ring: &'a Arc<RingPresentation>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err(&self, message: impl Into<String>) -> RingError {
        RingError::Parse(ParseError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<GradedClass, RingError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                self.term()?.scale(-1)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedClass, RingError> {
        let mut acc = self.power()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = acc.cup(&self.power()?)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<GradedClass, RingError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            match self.peek() {
                Some(Tok::Int(e)) if *e >= 0 && *e <= u32::MAX as i64 => {
                    let e = *e as u32;
                    self.at += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<GradedClass, RingError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                Ok(self.ring.unit().scale(v))
            }
            Some(Tok::Ident(id)) => {
                let pos = self.pos();
                self.at += 1;
                self.ring.class(&id).map_err(|_| {
                    RingError::Parse(ParseError {
                        position: pos,
                        message: format!("unknown basis id `{id}` in ring {}", self.ring.name()),
                    })
                })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a class expression in `ring`.
pub fn parse_class_expr(
    text: &str,
    ring: &Arc<RingPresentation>,
) -> Result<GradedClass, RingError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        ring,
    };
    let class = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(class)
}
