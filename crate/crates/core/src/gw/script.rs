//! Text format for systems of equations in GW invariants of `S²` and
//! integer unknowns:
//!
//! ```text
//! # comments run to the end of the line
//! int c, t
//! a in {0, 1}
//! GW[0,3,1](h,h,h) = 2*c*t
//! ```
//!
//! `GW[g,n,d](…)` is the invariant capped with the point class and
//! `GWfull[g,n,d](…)` the one capped with the fundamental class; insertions
//! are class expressions in `ℤ[h]/(h²)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ring::{parse_class_expr, GradedClass};
use crate::scalar::rational;
use crate::Rational;

use super::expr::GWExpression;
use super::solve::Domain;
use super::sphere::{sphere_coordinates, sphere_ring, Cap, SphereSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ScriptError {
    /// 1-based; 0 when the error is not tied to a line.
    pub line: usize,
    /// 1-based column within the line.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct EquationScript {
    pub domains: BTreeMap<String, Domain>,
    /// Each equation moved to the form `lhs - rhs = 0`.
    pub equations: Vec<GWExpression>,
    /// Source text of each equation.
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, (usize, String)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| (start, format!("number `{s}` is too large")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()[],={}".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err((i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

type PResult<T> = Result<T, (usize, String)>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> PResult<Self> {
        Ok(Parser {
            text,
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.0)
            .unwrap_or_else(|| self.text.chars().count())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err((self.offset(), format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> PResult<i64> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err((self.offset(), "expected a number".into())),
        }
    }

    fn signed(&mut self) -> PResult<i64> {
        let neg = self.eat('-');
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> PResult<GWExpression> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let t = self.term()?;
        let mut acc = if neg { GWExpression::zero().sub(&t) } else { t };
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

    fn term(&mut self) -> PResult<GWExpression> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<GWExpression> {
        let base = self.primary()?;
        if self.eat('^') {
            let at = self.offset();
            let e = self.number()?;
            let e = u32::try_from(e).map_err(|_| (at, "exponent too large".to_string()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<GWExpression> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.eat('/') {
                    let d = self.number()?;
                    if d == 0 {
                        return Err((at, "division by zero".into()));
                    }
                    return Ok(GWExpression::constant(rational(n, d)));
                }
                Ok(GWExpression::constant(Rational::from_integer(n.into())))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "GW" if self.peek() == Some(&Tok::Sym('[')) => self.invariant(Cap::Point),
                    "GWfull" if self.peek() == Some(&Tok::Sym('[')) => self.invariant(Cap::Full),
                    _ => Ok(GWExpression::var(&name)),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err((at, "expected a number, unknown, invariant or `(`".into())),
        }
    }

    fn invariant(&mut self, cap: Cap) -> PResult<GWExpression> {
        self.expect('[')?;
        let g_at = self.offset();
        let g = self.number()?;
        self.expect(',')?;
        let n_at = self.offset();
        let n = self.number()?;
        self.expect(',')?;
        let d = self.signed()?;
        self.expect(']')?;
        let open = self.offset();
        self.expect('(')?;
        let genus = u32::try_from(g).map_err(|_| (g_at, "genus out of range".to_string()))?;
        let points = u32::try_from(n).map_err(|_| (n_at, "n out of range".to_string()))?;
        if 2 * genus as u64 + points as u64 <= 2 {
            return Err((g_at, format!("(g, n) = ({genus}, {points}) is unstable")));
        }
        // insertion text runs to the matching parenthesis
        let start = self.pos;
        let mut depth = 0usize;
        let mut splits = vec![];
        while let Some(t) = self.peek() {
            match t {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') if depth == 0 => break,
                Tok::Sym(')') => depth -= 1,
                Tok::Sym(',') if depth == 0 => splits.push(self.pos),
                _ => {}
            }
            self.pos += 1;
        }
        let end = self.pos;
        self.expect(')')?;
        let mut bounds = vec![start];
        for s in &splits {
            bounds.push(*s);
            bounds.push(s + 1);
        }
        bounds.push(end);
        let chars: Vec<char> = self.text.chars().collect();
        let offset_of = |tok: usize| self.toks.get(tok).map(|t| t.0).unwrap_or(chars.len());
        let mut insertions = Vec::new();
        if end > start {
            for pair in bounds.chunks(2) {
                let (a, b) = (pair[0], pair[1]);
                if a == b {
                    return Err((offset_of(a), "empty insertion".into()));
                }
                let from = offset_of(a);
                let to = self.toks[b - 1].0 + tok_len(&self.toks[b - 1].1);
                let text: String = chars[from..to].iter().collect();
                let class = parse_class_expr(&text, &sphere_ring())
                    .map_err(|e| (from, format!("insertion `{text}`: {e}")))?;
                insertions.push(class);
            }
        }
        if insertions.len() != points as usize {
            return Err((
                open,
                format!("{} insertions given but n = {points}", insertions.len()),
            ));
        }
        expand(genus, d, cap, &insertions).map_err(|m| (open, m))
    }
}

fn tok_len(t: &Tok) -> usize {
    match t {
        Tok::Num(v) => v.to_string().len(),
        Tok::Ident(s) => s.chars().count(),
        Tok::Sym(_) => 1,
    }
}

/// Multilinear expansion into symbols with `1`/`h` insertions.
fn expand(
    genus: u32,
    degree: i64,
    cap: Cap,
    insertions: &[GradedClass],
) -> Result<GWExpression, String> {
    let mut poly: Vec<i64> = vec![1];
    for c in insertions {
        let (a, b) = sphere_coordinates(c).map_err(|e| e.to_string())?;
        let mut next = vec![0; poly.len() + 1];
        for (k, p) in poly.iter().enumerate() {
            next[k] += p * a;
            next[k + 1] += p * b;
        }
        poly = next;
    }
    let points = insertions.len() as u32;
    let mut out = GWExpression::zero();
    for (k, &c) in poly.iter().enumerate() {
        let s = SphereSymbol {
            genus,
            points,
            degree,
            h_count: k as u32,
            cap,
        };
        out = out.add(&GWExpression::sphere(s).scale(&Rational::from_integer(c.into())));
    }
    Ok(out)
}

fn finish<T>(p: &Parser, v: T) -> PResult<T> {
    if p.pos < p.toks.len() {
        Err((p.offset(), "unexpected trailing input".into()))
    } else {
        Ok(v)
    }
}

/// Parses one expression (no `=`).
pub fn parse_expression(text: &str) -> Result<GWExpression, ScriptError> {
    let run = || -> PResult<GWExpression> {
        let mut p = Parser::new(text)?;
        let e = p.expr()?;
        finish(&p, e)
    };
    run().map_err(|(at, message)| ScriptError {
        line: 0,
        column: at + 1,
        message,
    })
}

fn parse_names(p: &mut Parser) -> PResult<Vec<String>> {
    let mut names = Vec::new();
    loop {
        match p.peek().cloned() {
            Some(Tok::Ident(n)) => {
                p.pos += 1;
                names.push(n);
            }
            _ => return Err((p.offset(), "expected an unknown's name".into())),
        }
        if !p.eat(',') {
            return Ok(names);
        }
    }
}

fn parse_line(line: &str, script: &mut EquationScript) -> PResult<()> {
    let mut p = Parser::new(line)?;
    if p.peek() == Some(&Tok::Ident("int".into())) {
        p.pos += 1;
        for n in parse_names(&mut p)? {
            script.domains.entry(n).or_insert(Domain::Integers);
        }
        return finish(&p, ());
    }
    if let (Some(Tok::Ident(name)), Some(Tok::Ident(kw))) = (
        p.toks.first().map(|t| t.1.clone()),
        p.toks.get(1).map(|t| &t.1),
    ) {
        if kw == "in" {
            p.pos = 2;
            p.expect('{')?;
            let mut values = Vec::new();
            if !p.eat('}') {
                loop {
                    values.push(p.signed()?);
                    if p.eat('}') {
                        break;
                    }
                    p.expect(',')?;
                }
            }
            script.domains.insert(name, Domain::Finite(values));
            return finish(&p, ());
        }
    }
    let lhs = p.expr()?;
    p.expect('=')?;
    let rhs = p.expr()?;
    finish(&p, ())?;
    script.equations.push(lhs.sub(&rhs));
    script.sources.push(line.trim().to_string());
    Ok(())
}

/// Parses a whole script. Errors carry 1-based line and column.
pub fn parse_script(text: &str) -> Result<EquationScript, ScriptError> {
    let mut script = EquationScript::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        parse_line(line, &mut script).map_err(|(at, message)| ScriptError {
            line: i + 1,
            column: at + 1,
            message,
        })?;
    }
    Ok(script)
}
