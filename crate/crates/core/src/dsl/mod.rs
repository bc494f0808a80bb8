//! Machine and property languages: lexing, parsing, typing, printing.

pub mod ast;
pub mod formula;
mod lexer;
pub mod parser;
pub mod print;
pub mod typecheck;

use std::fmt;

pub use ast::{EventAst, Expr, MachineAst, Status};
pub use formula::{parse_formula, parse_property_file, Formula, NamedFormula};
pub use parser::parse_expr;
pub use typecheck::{Domain, Symbols};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownIdent,
    Unbounded,
    Type,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { kind: ErrorKind::Syntax, span, message: message.into() }
    }

    pub fn with_kind(kind: ErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError { kind, span, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.span == Span::default() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.span, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

/// Parse and typecheck a machine. The `linking` clause is checked later against the abstract machine.
pub fn parse_machine(src: &str) -> Result<MachineAst, ParseError> {
    let m = parser::parse_machine_syntax(src)?;
    typecheck::typecheck(&m)?;
    Ok(m)
}
