//! FRETISH requirement sentences: parsing, rendering, and template
//! enumeration.
//!
//! A sentence has the shape
//! `[scope] [","] [condition] [","] component shall [timing] satisfy response`
//! with keywords case-insensitive and identifiers case-sensitive. A missing
//! scope means Global, a missing condition means unconditional, and a
//! missing timing means Eventually. Comparison phrases such as
//! `horizontal_distance <= 250` are lexed as single opaque propositions.

use std::fmt;
use thiserror::Error;

use crate::mtl::MtlFormula;

/// Boolean expression over propositions, as used in conditions, responses
/// and stop conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Atom(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        BoolExpr::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn and(self, rhs: Self) -> Self {
        BoolExpr::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        BoolExpr::Or(Box::new(self), Box::new(rhs))
    }

    pub fn to_mtl(&self) -> MtlFormula {
        match self {
            BoolExpr::Atom(name) => MtlFormula::Atom(name.clone()),
            BoolExpr::Not(a) => a.to_mtl().not(),
            BoolExpr::And(a, b) => a.to_mtl().and(b.to_mtl()),
            BoolExpr::Or(a, b) => a.to_mtl().or(b.to_mtl()),
        }
    }

    fn render_prec(&self, min: u8, out: &mut String) {
        let prec = match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::And(..) => 2,
            BoolExpr::Not(_) => 3,
            BoolExpr::Atom(_) => 4,
        };
        let needs_parens = prec < min;
        if needs_parens {
            out.push('(');
        }
        match self {
            BoolExpr::Atom(name) => out.push_str(name),
            BoolExpr::Not(a) => {
                out.push_str("! ");
                a.render_prec(3, out);
            }
            BoolExpr::And(a, b) => {
                a.render_prec(2, out);
                out.push_str(" & ");
                b.render_prec(3, out);
            }
            BoolExpr::Or(a, b) => {
                a.render_prec(1, out);
                out.push_str(" | ");
                b.render_prec(2, out);
            }
        }
        if needs_parens {
            out.push(')');
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_prec(0, &mut s);
        f.write_str(&s)
    }
}

/// Where a requirement is enforced; every kind except Global names a mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scope {
    Global,
    In(String),
    NotIn(String),
    OnlyIn(String),
    Before(String),
    OnlyBefore(String),
    After(String),
    OnlyAfter(String),
}

impl Scope {
    pub fn mode(&self) -> Option<&str> {
        match self {
            Scope::Global => None,
            Scope::In(m)
            | Scope::NotIn(m)
            | Scope::OnlyIn(m)
            | Scope::Before(m)
            | Scope::OnlyBefore(m)
            | Scope::After(m)
            | Scope::OnlyAfter(m) => Some(m),
        }
    }

    /// The "only" scopes forbid the behavior outside their region.
    pub fn is_only(&self) -> bool {
        matches!(self, Scope::OnlyIn(_) | Scope::OnlyBefore(_) | Scope::OnlyAfter(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scope::Global => "global",
            Scope::In(_) => "in",
            Scope::NotIn(_) => "notin",
            Scope::OnlyIn(_) => "onlyin",
            Scope::Before(_) => "before",
            Scope::OnlyBefore(_) => "onlybefore",
            Scope::After(_) => "after",
            Scope::OnlyAfter(_) => "onlyafter",
        }
    }

    fn phrase(&self) -> Option<String> {
        let kw = match self {
            Scope::Global => return None,
            Scope::In(_) => "in",
            Scope::NotIn(_) => "not in",
            Scope::OnlyIn(_) => "only in",
            Scope::Before(_) => "before",
            Scope::OnlyBefore(_) => "only before",
            Scope::After(_) => "after",
            Scope::OnlyAfter(_) => "only after",
        };
        Some(format!("{kw} {}", self.mode().unwrap()))
    }
}

/// Condition kinds: a trigger fires on the rising edge of its expression,
/// a continual condition applies whenever it holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    None,
    Trigger(BoolExpr),
    Continual(BoolExpr),
}

impl Condition {
    pub fn expr(&self) -> Option<&BoolExpr> {
        match self {
            Condition::None => None,
            Condition::Trigger(e) | Condition::Continual(e) => Some(e),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Condition::None => "none",
            Condition::Trigger(_) => "trigger",
            Condition::Continual(_) => "continual",
        }
    }
}

/// When the response must occur, relative to the triggering instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Timing {
    Immediately,
    Eventually,
    Next,
    Always,
    Never,
    Within(usize),
    For(usize),
    After(usize),
    Until(BoolExpr),
    Before(BoolExpr),
}

impl Timing {
    pub fn label(&self) -> &'static str {
        match self {
            Timing::Immediately => "immediately",
            Timing::Eventually => "eventually",
            Timing::Next => "next",
            Timing::Always => "always",
            Timing::Never => "never",
            Timing::Within(_) => "within",
            Timing::For(_) => "for",
            Timing::After(_) => "after",
            Timing::Until(_) => "until",
            Timing::Before(_) => "before",
        }
    }

    fn phrase(&self) -> Option<String> {
        fn ticks(k: usize) -> String {
            if k == 1 { "1 tick".to_string() } else { format!("{k} ticks") }
        }
        Some(match self {
            Timing::Immediately => "immediately".to_string(),
            Timing::Eventually => "eventually".to_string(),
            Timing::Next => "at the next timepoint".to_string(),
            Timing::Always => "always".to_string(),
            Timing::Never => "never".to_string(),
            Timing::Within(k) => format!("within {}", ticks(*k)),
            Timing::For(k) => format!("for {}", ticks(*k)),
            Timing::After(k) => format!("after {}", ticks(*k)),
            Timing::Until(e) => format!("until {e}"),
            Timing::Before(e) => format!("before {e}"),
        })
    }
}

/// A parsed FRETISH requirement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Requirement {
    pub scope: Scope,
    pub condition: Condition,
    pub component: String,
    pub timing: Timing,
    pub response: BoolExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("requirement syntax error at byte {position}: {message}")]
pub struct FretishError {
    pub position: usize,
    pub message: String,
}

impl FretishError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        FretishError { position, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Amp,
    Pipe,
    Bang,
    LParen,
    RParen,
    Comma,
    Cmp(&'static str),
}

/// Names that may not be used as propositions: they would collide with the
/// formula grammar when the requirement is translated and printed.
const RESERVED_ATOMS: [&str; 14] =
    ["TRUE", "FALSE", "LAST", "G", "F", "X", "H", "O", "Y", "Z", "U", "V", "R", "S"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FretishError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp("_ne_"), i));
                    i += 2;
                } else {
                    toks.push((Tok::Bang, i));
                    i += 1;
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp("_le_"), i));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp("_lt_"), i));
                    i += 1;
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp("_ge_"), i));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp("_gt_"), i));
                    i += 1;
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp("_eq_"), i));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp("_eq_"), i));
                    i += 1;
                }
            }
            _ if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Word(text[start..i].to_string()), start));
            }
            _ => return Err(FretishError::new(i, format!("unexpected character '{c}'"))),
        }
    }
    Ok(toks)
}

/// Folds `lhs <op> rhs` comparison phrases into single opaque propositions;
/// the operands and operator are joined into one identifier.
fn fold_comparisons(toks: Vec<(Tok, usize)>) -> Result<Vec<(Tok, usize)>, FretishError> {
    let mut out: Vec<(Tok, usize)> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if let (Tok::Cmp(op), pos) = &toks[i] {
            let lhs = match out.pop() {
                Some((Tok::Word(w), p)) => (w, p),
                _ => return Err(FretishError::new(*pos, "comparison without left operand")),
            };
            let rhs = match toks.get(i + 1) {
                Some((Tok::Word(w), _)) => w.clone(),
                _ => return Err(FretishError::new(*pos, "comparison without right operand")),
            };
            let name = format!("{}{}{}", lhs.0, op, rhs).replace('.', "_");
            out.push((Tok::Word(name), lhs.1));
            i += 2;
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    Ok(out)
}

fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct ReqParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl ReqParser {
    fn peek_word(&self) -> Option<String> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), _)) => Some(w.to_ascii_lowercase()),
            _ => None,
        }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump_word(&mut self) -> String {
        let w = match &self.toks[self.pos].0 {
            Tok::Word(w) => w.clone(),
            _ => unreachable!(),
        };
        self.pos += 1;
        w
    }

    fn take_keyword(&mut self, kw: &str) -> bool {
        if self.peek_word().as_deref() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), FretishError> {
        if self.take_keyword(kw) {
            Ok(())
        } else {
            Err(FretishError::new(self.here(), format!("expected '{kw}'")))
        }
    }

    fn identifier(&mut self, what: &str) -> Result<String, FretishError> {
        match self.peek_word() {
            Some(_) => {
                let pos = self.here();
                let w = self.bump_word();
                if !is_identifier(&w) {
                    return Err(FretishError::new(pos, format!("'{w}' is not a valid {what}")));
                }
                Ok(w)
            }
            None => Err(FretishError::new(self.here(), format!("expected {what}"))),
        }
    }

    fn skip_comma(&mut self) {
        if matches!(self.toks.get(self.pos), Some((Tok::Comma, _))) {
            self.pos += 1;
        }
    }

    fn try_scope(&mut self) -> Result<Scope, FretishError> {
        let Some(word) = self.peek_word() else { return Ok(Scope::Global) };
        match word.as_str() {
            "in" => {
                self.pos += 1;
                Ok(Scope::In(self.scope_mode()?))
            }
            "not" => {
                self.pos += 1;
                self.expect_keyword("in")?;
                Ok(Scope::NotIn(self.scope_mode()?))
            }
            "only" => {
                self.pos += 1;
                match self.peek_word().as_deref() {
                    Some("in") => {
                        self.pos += 1;
                        Ok(Scope::OnlyIn(self.scope_mode()?))
                    }
                    Some("before") => {
                        self.pos += 1;
                        Ok(Scope::OnlyBefore(self.scope_mode()?))
                    }
                    Some("after") => {
                        self.pos += 1;
                        Ok(Scope::OnlyAfter(self.scope_mode()?))
                    }
                    _ => Err(FretishError::new(
                        self.here(),
                        "dangling 'only': expected in, before or after",
                    )),
                }
            }
            "before" => {
                self.pos += 1;
                Ok(Scope::Before(self.scope_mode()?))
            }
            "after" => {
                self.pos += 1;
                Ok(Scope::After(self.scope_mode()?))
            }
            _ => Ok(Scope::Global),
        }
    }

    fn scope_mode(&mut self) -> Result<String, FretishError> {
        match self.peek_word() {
            Some(_) => {
                let pos = self.here();
                let w = self.bump_word();
                if !is_identifier(&w) {
                    return Err(FretishError::new(pos, format!("'{w}' is not a valid mode name")));
                }
                self.check_atom(&w, pos)?;
                Ok(w)
            }
            None => Err(FretishError::new(self.here(), "dangling scope keyword: expected a mode name")),
        }
    }

    fn try_condition(&mut self) -> Result<Condition, FretishError> {
        match self.peek_word().as_deref() {
            Some("upon") => {
                self.pos += 1;
                Ok(Condition::Trigger(self.boolexpr("condition")?))
            }
            Some("when") | Some("while") => {
                self.pos += 1;
                Ok(Condition::Continual(self.boolexpr("condition")?))
            }
            _ => Ok(Condition::None),
        }
    }

    fn try_timing(&mut self) -> Result<Timing, FretishError> {
        let Some(word) = self.peek_word() else {
            return Err(FretishError::new(self.here(), "expected timing or 'satisfy'"));
        };
        match word.as_str() {
            "satisfy" => Ok(Timing::Eventually),
            "immediately" => {
                self.pos += 1;
                Ok(Timing::Immediately)
            }
            "eventually" => {
                self.pos += 1;
                Ok(Timing::Eventually)
            }
            "always" => {
                self.pos += 1;
                Ok(Timing::Always)
            }
            "never" => {
                self.pos += 1;
                Ok(Timing::Never)
            }
            "next" => {
                self.pos += 1;
                Ok(Timing::Next)
            }
            "at" => {
                self.pos += 1;
                self.expect_keyword("the")?;
                self.expect_keyword("next")?;
                self.expect_keyword("timepoint")?;
                Ok(Timing::Next)
            }
            "within" => {
                self.pos += 1;
                Ok(Timing::Within(self.duration()?))
            }
            "for" => {
                self.pos += 1;
                Ok(Timing::For(self.duration()?))
            }
            "after" => {
                self.pos += 1;
                Ok(Timing::After(self.duration()?))
            }
            "until" => {
                self.pos += 1;
                Ok(Timing::Until(self.boolexpr("stop condition")?))
            }
            "before" => {
                self.pos += 1;
                Ok(Timing::Before(self.boolexpr("stop condition")?))
            }
            other => Err(FretishError::new(
                self.here(),
                format!("unknown timing keyword '{other}'"),
            )),
        }
    }

    /// `n [unit]` where any unit word counts as one abstract tick per unit.
    fn duration(&mut self) -> Result<usize, FretishError> {
        let pos = self.here();
        let word = match self.peek_word() {
            Some(_) => self.bump_word(),
            None => return Err(FretishError::new(pos, "expected a duration")),
        };
        let n: usize = word
            .parse()
            .map_err(|_| FretishError::new(pos, format!("expected a number, found '{word}'")))?;
        if n == 0 {
            return Err(FretishError::new(pos, "duration must be at least 1"));
        }
        if let Some(unit) = self.peek_word() {
            if unit != "satisfy" && is_identifier(&unit) {
                self.pos += 1;
            }
        }
        Ok(n)
    }

    fn check_atom(&self, name: &str, pos: usize) -> Result<(), FretishError> {
        if RESERVED_ATOMS.contains(&name) {
            return Err(FretishError::new(pos, format!("'{name}' is a reserved name")));
        }
        Ok(())
    }

    fn boolexpr(&mut self, what: &str) -> Result<BoolExpr, FretishError> {
        let mut lhs = self.bool_and(what)?;
        while matches!(self.toks.get(self.pos), Some((Tok::Pipe, _))) {
            self.pos += 1;
            lhs = lhs.or(self.bool_and(what)?);
        }
        Ok(lhs)
    }

    fn bool_and(&mut self, what: &str) -> Result<BoolExpr, FretishError> {
        let mut lhs = self.bool_unary(what)?;
        while matches!(self.toks.get(self.pos), Some((Tok::Amp, _))) {
            self.pos += 1;
            lhs = lhs.and(self.bool_unary(what)?);
        }
        Ok(lhs)
    }

    fn bool_unary(&mut self, what: &str) -> Result<BoolExpr, FretishError> {
        match self.toks.get(self.pos) {
            Some((Tok::Bang, _)) => {
                self.pos += 1;
                Ok(self.bool_unary(what)?.not())
            }
            Some((Tok::LParen, _)) => {
                self.pos += 1;
                let inner = self.boolexpr(what)?;
                match self.toks.get(self.pos) {
                    Some((Tok::RParen, _)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(FretishError::new(self.here(), "expected ')'")),
                }
            }
            Some((Tok::Word(w), pos)) => {
                let (w, pos) = (w.clone(), *pos);
                let lower = w.to_ascii_lowercase();
                if lower == "shall" || lower == "satisfy" {
                    return Err(FretishError::new(pos, format!("expected {what}")));
                }
                if !is_identifier(&w) {
                    return Err(FretishError::new(pos, format!("'{w}' is not a valid proposition")));
                }
                self.check_atom(&w, pos)?;
                self.pos += 1;
                Ok(BoolExpr::Atom(w))
            }
            _ => Err(FretishError::new(self.here(), format!("expected {what}"))),
        }
    }
}

/// Parses one FRETISH sentence.
pub fn parse_requirement(text: &str) -> Result<Requirement, FretishError> {
    let toks = fold_comparisons(lex(text)?)?;
    let end = text.len();
    let mut p = ReqParser { toks, pos: 0, end };

    let scope = p.try_scope()?;
    p.skip_comma();
    let condition = p.try_condition()?;
    p.skip_comma();
    // tolerate an article before the component, as in "the aircraft shall ..."
    p.take_keyword("the");
    let component = p.identifier("component name")?;
    if component.eq_ignore_ascii_case("shall") {
        return Err(FretishError::new(0, "missing component before 'shall'"));
    }
    p.expect_keyword("shall")?;
    let timing = p.try_timing()?;
    p.expect_keyword("satisfy")?;
    let response = p.boolexpr("response")?;
    if p.pos < p.toks.len() {
        return Err(FretishError::new(p.here(), "trailing input after response"));
    }
    Ok(Requirement { scope, condition, component, timing, response })
}

/// Renders a requirement as a canonical FRETISH sentence;
/// `parse_requirement` inverts it.
pub fn render_requirement(r: &Requirement) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let Some(scope) = r.scope.phrase() {
        parts.push(scope);
    }
    match &r.condition {
        Condition::None => {}
        Condition::Trigger(e) => parts.push(format!("upon {e}")),
        Condition::Continual(e) => parts.push(format!("when {e}")),
    }
    parts.push(r.component.clone());
    parts.push("shall".to_string());
    if let Some(timing) = r.timing.phrase() {
        parts.push(timing);
    }
    parts.push(format!("satisfy {}", r.response));
    parts.join(" ")
}

/// All scope kinds in canonical order, instantiated over `mode`.
pub fn scope_kinds(mode: &str) -> [Scope; 8] {
    [
        Scope::Global,
        Scope::In(mode.to_string()),
        Scope::NotIn(mode.to_string()),
        Scope::OnlyIn(mode.to_string()),
        Scope::Before(mode.to_string()),
        Scope::OnlyBefore(mode.to_string()),
        Scope::After(mode.to_string()),
        Scope::OnlyAfter(mode.to_string()),
    ]
}

/// The full template set: every scope kind crossed with every condition kind
/// and every timing kind (8 × 3 × 10 = 240), in scope-major order, over the
/// fixed propositions `Scope`, `Condition`, `Response` and component
/// `MyComponent`. Bounded timings use `k`, condition-based timings use
/// `stop_name`.
pub fn enumerate_templates(k: usize, stop_name: &str) -> Vec<Requirement> {
    assert!(k >= 1, "template bound must be at least 1");
    let conditions = [
        Condition::None,
        Condition::Trigger(BoolExpr::atom("Condition")),
        Condition::Continual(BoolExpr::atom("Condition")),
    ];
    let timings = [
        Timing::Immediately,
        Timing::Eventually,
        Timing::Next,
        Timing::Always,
        Timing::Never,
        Timing::Within(k),
        Timing::For(k),
        Timing::After(k),
        Timing::Until(BoolExpr::atom(stop_name)),
        Timing::Before(BoolExpr::atom(stop_name)),
    ];
    let mut out = Vec::with_capacity(240);
    for scope in scope_kinds("Scope") {
        for condition in &conditions {
            for timing in &timings {
                out.push(Requirement {
                    scope: scope.clone(),
                    condition: condition.clone(),
                    component: "MyComponent".to_string(),
                    timing: timing.clone(),
                    response: BoolExpr::atom("Response"),
                });
            }
        }
    }
    out
}

/// Parses a requirements file: one sentence per line, `#` comments and blank
/// lines ignored.
pub fn parse_requirements_file(text: &str) -> Result<Vec<Requirement>, FretishError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let req = parse_requirement(line).map_err(|e| {
            FretishError::new(e.position, format!("line {}: {}", idx + 1, e.message))
        })?;
        out.push(req);
    }
    Ok(out)
}
