//! Concrete syntax for MTL formulas: a parser for the nuXmv-compatible
//! grammar and printers for the canonical and pure-LTL (nuXmv) dialects.
//!
//! Grammar, loosest to tightest: `<->`, `->` (right-assoc), `|`, `&`,
//! binary temporal `U V R S` (left-assoc; `V` and `R` are both Release),
//! unary `! G F X H O Y Z`, atoms/constants/parentheses. Interval-carrying
//! operators take an optional `[lo,hi]` suffix. `TRUE`, `FALSE` and `LAST`
//! are reserved.

use crate::mtl::{Interval, MtlFormula};
use thiserror::Error;

/// Output dialects for [`print_formula`].
///
/// `Canonical` round-trips through [`parse_formula`] and keeps interval
/// suffixes. `NuXmvLtl` expands every bounded operator into nested
/// next/yesterday steps and boolean combinations, so the output is plain
/// LTL with past.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Canonical,
    NuXmvLtl,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBrack, i));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBrack, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected '->'"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::DoubleArrow, i));
                    i += 3;
                } else {
                    return Err(ParseError::new(i, "expected '<->'"));
                }
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: usize = text[start..i]
                    .parse()
                    .map_err(|_| ParseError::new(start, "number too large"))?;
                toks.push((Tok::Num(n), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => return Err(ParseError::new(i, format!("unexpected character '{c}'"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

const UNARY_TEMPORAL: [&str; 7] = ["G", "F", "X", "H", "O", "Y", "Z"];
const BINARY_TEMPORAL: [&str; 4] = ["U", "V", "R", "S"];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.here(), format!("expected {what}")))
        }
    }

    fn iff(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.implication()?;
        while self.peek() == Some(&Tok::DoubleArrow) {
            self.pos += 1;
            lhs = lhs.iff(self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<MtlFormula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            return Ok(lhs.implies(self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.binary_temporal()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = lhs.and(self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Ident(name)) if BINARY_TEMPORAL.contains(&name.as_str()) => {
                    name.clone()
                }
                _ => break,
            };
            self.pos += 1;
            let interval = self.maybe_interval()?;
            let rhs = self.unary()?;
            lhs = match op.as_str() {
                "U" => MtlFormula::until(interval, lhs, rhs),
                "S" => MtlFormula::since(interval, lhs, rhs),
                // nuXmv writes Release as V; R is accepted as a synonym
                _ => MtlFormula::release(interval, lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<MtlFormula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::Ident(name)) if UNARY_TEMPORAL.contains(&name.as_str()) => {
                let op = name.clone();
                let op_pos = self.here();
                self.pos += 1;
                let has_interval = self.peek() == Some(&Tok::LBrack);
                if has_interval && matches!(op.as_str(), "X" | "Y" | "Z") {
                    return Err(ParseError::new(
                        op_pos,
                        format!("operator {op} does not take an interval"),
                    ));
                }
                let interval = self.maybe_interval()?;
                let arg = self.unary()?;
                Ok(match op.as_str() {
                    "G" => MtlFormula::globally(interval, arg),
                    "F" => MtlFormula::eventually(interval, arg),
                    "X" => arg.next(),
                    "H" => MtlFormula::historically(interval, arg),
                    "O" => MtlFormula::once(interval, arg),
                    "Y" => arg.yesterday(),
                    _ => arg.weak_yesterday(),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<MtlFormula, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.iff()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "TRUE" => Ok(MtlFormula::True),
                "FALSE" => Ok(MtlFormula::False),
                "LAST" => Ok(MtlFormula::Last),
                n if BINARY_TEMPORAL.contains(&n) => {
                    Err(ParseError::new(pos, format!("operator {n} needs a left operand")))
                }
                _ => Ok(MtlFormula::Atom(name)),
            },
            Some(_) => Err(ParseError::new(pos, "expected a formula")),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }

    fn maybe_interval(&mut self) -> Result<Interval, ParseError> {
        if self.peek() != Some(&Tok::LBrack) {
            return Ok(Interval::Unbounded);
        }
        let open = self.here();
        self.pos += 1;
        let lo = self.number()?;
        self.expect(Tok::Comma, "','")?;
        let hi = self.number()?;
        self.expect(Tok::RBrack, "']'")?;
        if lo > hi {
            return Err(ParseError::new(open, format!("interval bounds out of order: [{lo},{hi}]")));
        }
        Ok(Interval::Bounded(lo, hi))
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(n),
            _ => Err(ParseError::new(pos, "expected a number")),
        }
    }
}

/// Parses one formula in the concrete grammar.
pub fn parse_formula(text: &str) -> Result<MtlFormula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, end: text.len() };
    let formula = parser.iff()?;
    if parser.pos < parser.toks.len() {
        return Err(ParseError::new(parser.here(), "trailing input after formula"));
    }
    Ok(formula)
}

/// Prints `f` in the requested dialect.
///
/// Canonical output parses back to a structurally identical formula. NuXmv
/// output contains no interval suffixes and every compound subformula is
/// parenthesized.
pub fn print_formula(f: &MtlFormula, dialect: Dialect) -> String {
    match dialect {
        Dialect::Canonical => canonical(f),
        Dialect::NuXmvLtl => nuxmv(&expand_bounded(f)),
    }
}

fn unary_op(f: &MtlFormula) -> Option<(&'static str, Interval, &MtlFormula)> {
    use MtlFormula::*;
    match f {
        Not(a) => Some(("!", Interval::Unbounded, a)),
        Yesterday(a) => Some(("Y", Interval::Unbounded, a)),
        WeakYesterday(a) => Some(("Z", Interval::Unbounded, a)),
        Next(a) => Some(("X", Interval::Unbounded, a)),
        Once(i, a) => Some(("O", *i, a)),
        Historically(i, a) => Some(("H", *i, a)),
        Eventually(i, a) => Some(("F", *i, a)),
        Globally(i, a) => Some(("G", *i, a)),
        _ => None,
    }
}

fn binary_op(f: &MtlFormula) -> Option<(&'static str, Interval, &MtlFormula, &MtlFormula)> {
    use MtlFormula::*;
    match f {
        And(a, b) => Some(("&", Interval::Unbounded, a, b)),
        Or(a, b) => Some(("|", Interval::Unbounded, a, b)),
        Implies(a, b) => Some(("->", Interval::Unbounded, a, b)),
        Iff(a, b) => Some(("<->", Interval::Unbounded, a, b)),
        Since(i, a, b) => Some(("S", *i, a, b)),
        Until(i, a, b) => Some(("U", *i, a, b)),
        Release(i, a, b) => Some(("V", *i, a, b)),
        _ => None,
    }
}

fn leaf(f: &MtlFormula) -> Option<String> {
    match f {
        MtlFormula::Atom(name) => Some(name.clone()),
        MtlFormula::Last => Some("LAST".to_string()),
        MtlFormula::True => Some("TRUE".to_string()),
        MtlFormula::False => Some("FALSE".to_string()),
        _ => None,
    }
}

fn canonical(f: &MtlFormula) -> String {
    // binary subterms are always parenthesized; unary chains and leaves are not
    fn wrap(f: &MtlFormula) -> String {
        if f.is_binary() {
            format!("({})", canonical(f))
        } else {
            canonical(f)
        }
    }
    if let Some(text) = leaf(f) {
        text
    } else if let Some((op, i, a)) = unary_op(f) {
        format!("{op}{i} {}", wrap(a))
    } else if let Some((op, i, a, b)) = binary_op(f) {
        format!("{} {op}{i} {}", wrap(a), wrap(b))
    } else {
        unreachable!()
    }
}

fn nuxmv(f: &MtlFormula) -> String {
    if let Some(text) = leaf(f) {
        text
    } else if let Some((op, _, a)) = unary_op(f) {
        format!("({op} {})", nuxmv(a))
    } else if let Some((op, _, a, b)) = binary_op(f) {
        format!("({} {op} {})", nuxmv(a), nuxmv(b))
    } else {
        unreachable!()
    }
}

fn nested_next(steps: usize, f: MtlFormula) -> MtlFormula {
    (0..steps).fold(f, |acc, _| acc.next())
}

fn nested_yesterday(steps: usize, f: MtlFormula) -> MtlFormula {
    (0..steps).fold(f, |acc, _| acc.yesterday())
}

fn nested_weak_yesterday(steps: usize, f: MtlFormula) -> MtlFormula {
    (0..steps).fold(f, |acc, _| acc.weak_yesterday())
}

/// `X^i f` that is vacuously true past the end of the trace.
fn weak_next_step(i: usize, f: MtlFormula) -> MtlFormula {
    if i == 0 {
        f
    } else {
        nested_next(i, f.not()).not()
    }
}

fn fold_or(terms: Vec<MtlFormula>) -> MtlFormula {
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty disjunction");
    it.fold(first, |acc, t| acc.or(t))
}

fn fold_and(terms: Vec<MtlFormula>) -> MtlFormula {
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty conjunction");
    it.fold(first, |acc, t| acc.and(t))
}

fn unroll_until(lo: usize, hi: usize, f: &MtlFormula, g: &MtlFormula) -> MtlFormula {
    if lo > 0 {
        f.clone().and(unroll_until(lo - 1, hi - 1, f, g).next())
    } else if hi == 0 {
        g.clone()
    } else {
        g.clone().or(f.clone().and(unroll_until(0, hi - 1, f, g).next()))
    }
}

fn unroll_since(lo: usize, hi: usize, f: &MtlFormula, g: &MtlFormula) -> MtlFormula {
    if lo > 0 {
        f.clone().and(unroll_since(lo - 1, hi - 1, f, g).yesterday())
    } else if hi == 0 {
        g.clone()
    } else {
        g.clone().or(f.clone().and(unroll_since(0, hi - 1, f, g).yesterday()))
    }
}

/// Rewrites every bounded temporal operator into nested steps and boolean
/// combinations; the result contains only unbounded operators and is
/// equivalent at every position of every trace.
fn expand_bounded(f: &MtlFormula) -> MtlFormula {
    use MtlFormula::*;
    match f {
        Atom(_) | Last | True | False => f.clone(),
        Not(a) => expand_bounded(a).not(),
        And(a, b) => expand_bounded(a).and(expand_bounded(b)),
        Or(a, b) => expand_bounded(a).or(expand_bounded(b)),
        Implies(a, b) => expand_bounded(a).implies(expand_bounded(b)),
        Iff(a, b) => expand_bounded(a).iff(expand_bounded(b)),
        Yesterday(a) => expand_bounded(a).yesterday(),
        WeakYesterday(a) => expand_bounded(a).weak_yesterday(),
        Next(a) => expand_bounded(a).next(),
        Eventually(Interval::Unbounded, a) => {
            MtlFormula::eventually(Interval::Unbounded, expand_bounded(a))
        }
        Globally(Interval::Unbounded, a) => {
            MtlFormula::globally(Interval::Unbounded, expand_bounded(a))
        }
        Once(Interval::Unbounded, a) => MtlFormula::once(Interval::Unbounded, expand_bounded(a)),
        Historically(Interval::Unbounded, a) => {
            MtlFormula::historically(Interval::Unbounded, expand_bounded(a))
        }
        Until(Interval::Unbounded, a, b) => {
            MtlFormula::until(Interval::Unbounded, expand_bounded(a), expand_bounded(b))
        }
        Release(Interval::Unbounded, a, b) => {
            MtlFormula::release(Interval::Unbounded, expand_bounded(a), expand_bounded(b))
        }
        Since(Interval::Unbounded, a, b) => {
            MtlFormula::since(Interval::Unbounded, expand_bounded(a), expand_bounded(b))
        }
        Eventually(Interval::Bounded(lo, hi), a) => {
            let a = expand_bounded(a);
            fold_or((*lo..=*hi).map(|i| nested_next(i, a.clone())).collect())
        }
        Globally(Interval::Bounded(lo, hi), a) => {
            let a = expand_bounded(a);
            fold_and((*lo..=*hi).map(|i| weak_next_step(i, a.clone())).collect())
        }
        Once(Interval::Bounded(lo, hi), a) => {
            let a = expand_bounded(a);
            fold_or((*lo..=*hi).map(|i| nested_yesterday(i, a.clone())).collect())
        }
        Historically(Interval::Bounded(lo, hi), a) => {
            let a = expand_bounded(a);
            fold_and((*lo..=*hi).map(|i| nested_weak_yesterday(i, a.clone())).collect())
        }
        Until(Interval::Bounded(lo, hi), a, b) => {
            unroll_until(*lo, *hi, &expand_bounded(a), &expand_bounded(b))
        }
        Since(Interval::Bounded(lo, hi), a, b) => {
            unroll_since(*lo, *hi, &expand_bounded(a), &expand_bounded(b))
        }
        Release(Interval::Bounded(lo, hi), a, b) => {
            // first the all-positions disjunct, then one release witness per offset
            let a = expand_bounded(a);
            let b = expand_bounded(b);
            let everywhere =
                fold_and((*lo..=*hi).map(|i| weak_next_step(i, b.clone())).collect());
            let witnesses = fold_or(
                (*lo..=*hi)
                    .map(|i| {
                        let held =
                            fold_and((*lo..=i).map(|j| nested_next(j, b.clone())).collect());
                        nested_next(i, a.clone()).and(held)
                    })
                    .collect(),
            );
            everywhere.or(witnesses)
        }
    }
}
