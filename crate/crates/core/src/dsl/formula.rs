//! Event-based LTL formulas.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! phi := phi => phi            (right associative, sugar for !phi | phi)
//!      | phi | phi | phi or phi
//!      | phi & phi | phi and phi
//!      | phi U phi             (right associative)
//!      | !phi | not phi | F phi | G phi | GF phi | FG phi
//!      | [event] | true | false | (phi)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{tokenize, Cursor, Tok};
use super::{ParseError, Span};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn ff() -> Self {
        Formula::Not(Box::new(Formula::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn finally(a: Formula) -> Self {
        Formula::Finally(Box::new(a))
    }

    pub fn globally(a: Formula) -> Self {
        Formula::Globally(Box::new(a))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// Left-nested disjunction of atoms in the given order; `!true` when empty.
    pub fn any_of<I: IntoIterator<Item = S>, S: Into<String>>(events: I) -> Self {
        events.into_iter().map(Formula::atom).reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    /// Event names occurring in the formula.
    pub fn alphabet(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True => {}
            Formula::Atom(x) => {
                out.insert(x.clone());
            }
            Formula::Not(a) | Formula::Finally(a) | Formula::Globally(a) => a.collect_atoms(out),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Finally(a) | Formula::Globally(a) => 1 + a.depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 1,
            Formula::Not(a) | Formula::Finally(a) | Formula::Globally(a) => 1 + a.size(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Rename every atom through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Atom(x) => f(x),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::Finally(a) => Formula::finally(a.map_atoms(f)),
            Formula::Globally(a) => Formula::globally(a.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Until(a, b) => Formula::until(a.map_atoms(f), b.map_atoms(f)),
        }
    }
}

const LVL_IMPLIES: u8 = 0;
const LVL_OR: u8 = 1;
const LVL_AND: u8 = 2;
const LVL_UNTIL: u8 = 3;
const LVL_UNARY: u8 = 4;

impl Formula {
    fn level(&self) -> u8 {
        match self {
            Formula::Or(a, _) if matches!(**a, Formula::Not(_)) && **a != Formula::ff() => LVL_IMPLIES,
            Formula::Or(..) => LVL_OR,
            Formula::And(..) => LVL_AND,
            Formula::Until(..) => LVL_UNTIL,
            _ => LVL_UNARY,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::Atom(x) => write!(f, "[{x}]"),
            Formula::Not(a) if **a == Formula::True => f.write_str("false"),
            Formula::Not(a) => {
                f.write_str("!")?;
                a.write_at(f, LVL_UNARY)
            }
            Formula::Finally(a) | Formula::Globally(a) => {
                f.write_str(if matches!(self, Formula::Finally(_)) { "F" } else { "G" })?;
                if matches!(**a, Formula::Finally(_) | Formula::Globally(_) | Formula::True)
                    || **a == Formula::ff()
                {
                    f.write_str(" ")?;
                }
                a.write_at(f, LVL_UNARY)
            }
            Formula::Or(a, b) => match &**a {
                Formula::Not(p) if self.level() == LVL_IMPLIES => {
                    p.write_at(f, LVL_OR)?;
                    f.write_str(" => ")?;
                    b.write_at(f, LVL_IMPLIES)
                }
                _ => {
                    a.write_at(f, LVL_OR)?;
                    f.write_str(" | ")?;
                    b.write_at(f, LVL_AND)
                }
            },
            Formula::And(a, b) => {
                a.write_at(f, LVL_AND)?;
                f.write_str(" & ")?;
                b.write_at(f, LVL_UNTIL)
            }
            Formula::Until(a, b) => {
                a.write_at(f, LVL_UNARY)?;
                f.write_str(" U ")?;
                b.write_at(f, LVL_UNTIL)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(src)?;
    let mut p = FormulaParser { c: Cursor::new(toks), pending: vec![] };
    if matches!(p.c.peek(), Tok::Eof) {
        return Err(ParseError::new(Span::default(), "empty formula"));
    }
    let f = p.implies()?;
    if !matches!(p.c.peek(), Tok::Eof) || !p.pending.is_empty() {
        return Err(p.c.unexpected("end of formula"));
    }
    Ok(f)
}

/// A named line of a property file.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedFormula {
    pub name: String,
    pub formula: Formula,
}

/// Parse a property file: one formula per line, optionally `name = formula`, `#` comments.
/// Unnamed formulas are called `p1`, `p2`, ... by line order.
pub fn parse_property_file(src: &str) -> Result<Vec<NamedFormula>, ParseError> {
    let mut out = vec![];
    for (lineno, line) in src.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let relocate = |mut e: ParseError| {
            e.span.line = lineno as u32 + 1;
            e
        };
        let (name, text) = match body.split_once('=') {
            Some((lhs, rhs))
                if !rhs.starts_with('>')
                    && !lhs.is_empty()
                    && lhs.trim().chars().all(|c| c.is_alphanumeric() || c == '_') =>
            {
                (lhs.trim().to_string(), rhs)
            }
            _ => (format!("p{}", out.len() + 1), body),
        };
        let formula = parse_formula(text).map_err(relocate)?;
        out.push(NamedFormula { name, formula });
    }
    Ok(out)
}

struct FormulaParser {
    c: Cursor,
    /// Remaining letters of a fused `GF`/`FG` word.
    pending: Vec<char>,
}

impl FormulaParser {
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.pending.is_empty() && self.c.eat_sym("=>") {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.c.eat_sym("|") || self.c.eat_word("or") {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.c.eat_sym("&") || self.c.eat_word("and") {
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.c.eat_word("U") {
            return Ok(Formula::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Some(op) = self.pending.pop() {
            return self.temporal(op);
        }
        let span = self.c.span();
        match self.c.peek().clone() {
            Tok::Sym("!") => {
                self.c.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Sym("(") => {
                self.c.bump();
                let f = self.implies()?;
                self.c.expect_sym(")")?;
                Ok(f)
            }
            Tok::Sym("[") => {
                self.c.bump();
                let name = match self.c.peek().clone() {
                    Tok::Ident(w) => {
                        self.c.bump();
                        w
                    }
                    _ => return Err(self.c.unexpected("event name")),
                };
                self.c.expect_sym("]")?;
                Ok(Formula::Atom(name))
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "TRUE" => {
                    self.c.bump();
                    Ok(Formula::True)
                }
                "false" | "FALSE" => {
                    self.c.bump();
                    Ok(Formula::ff())
                }
                "not" => {
                    self.c.bump();
                    Ok(Formula::not(self.unary()?))
                }
                "X" => Err(ParseError::new(span, "the next operator `X` is not supported")),
                w if !w.is_empty() && w.chars().all(|c| c == 'F' || c == 'G') => {
                    self.c.bump();
                    // Leftmost letter applies outermost: pop order is left to right.
                    self.pending = w.chars().rev().collect();
                    let op = self.pending.pop().unwrap();
                    self.temporal(op)
                }
                _ => Err(ParseError::new(span, format!("expected a formula, found `{w}` (atoms are written `[{w}]`)"))),
            },
            _ => Err(self.c.unexpected("a formula")),
        }
    }

    fn temporal(&mut self, op: char) -> Result<Formula, ParseError> {
        let inner = self.unary()?;
        Ok(if op == 'F' { Formula::finally(inner) } else { Formula::globally(inner) })
    }
}
