//! Plain-text circuit description format.
//!
//! ```text
//! version 1
//! path u l out            # optional explicit declarations
//! source s1 weight=1 pol=H mode=h
//! element HWP(22.5deg) on s1
//! element PBS() on s1 routes s1->u,l
//! element BS(0.7071, 0.7071) on u routes u->out,l
//! sink out
//! ```
//!
//! Paths must be declared (by `path` or `source`) before an element or sink
//! refers to them. Bare angles are radians; a `deg` suffix converts.

mod parse;
mod serialize;

use std::fmt;

use crate::optics::{Circuit, Element, Source};

pub use parse::{parse_circuit, parse_document};
pub use serialize::{serialize_circuit, serialize_document};

/// Highest format version understood by the parser.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    UnknownStatement,
    UnknownKind,
    UnknownKey,
    MissingKey,
    DuplicateKey,
    Arity,
    InvalidValue,
    UndeclaredPath,
    RouteMismatch,
    UnexpectedToken,
    UnexpectedEnd,
    Version,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::UnknownStatement => "unknown statement",
            ParseErrorKind::UnknownKind => "unknown element kind",
            ParseErrorKind::UnknownKey => "unknown key",
            ParseErrorKind::MissingKey => "missing key",
            ParseErrorKind::DuplicateKey => "duplicate key",
            ParseErrorKind::Arity => "arity mismatch",
            ParseErrorKind::InvalidValue => "invalid value",
            ParseErrorKind::UndeclaredPath => "undeclared path",
            ParseErrorKind::RouteMismatch => "route mismatch",
            ParseErrorKind::UnexpectedToken => "unexpected token",
            ParseErrorKind::UnexpectedEnd => "unexpected end of line",
            ParseErrorKind::Version => "unsupported version",
        };
        f.write_str(s)
    }
}

/// Diagnostic for the first offending token. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.kind)?;
        if !self.token.is_empty() {
            write!(f, " at `{}`", self.token)?;
        }
        if !self.message.is_empty() {
            write!(f, ": {}", self.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Location of a statement in its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub start_column: usize,
    pub end_column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Path(Vec<String>),
    Source(Source),
    Element(Element),
    Sink(String),
}

/// A parsed file: statements in order with their spans.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDocument {
    pub version: u32,
    pub file_name: Option<String>,
    pub statements: Vec<(Statement, Span)>,
}

impl CircuitDocument {
    /// Canonical document for a circuit (one `path` statement first, then
    /// sources, elements and sinks).
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let span = Span {
            line: 0,
            start_column: 0,
            end_column: 0,
        };
        let mut statements = Vec::new();
        if !circuit.paths.is_empty() {
            statements.push((Statement::Path(circuit.paths.clone()), span));
        }
        statements.extend(circuit.sources.iter().cloned().map(|s| (Statement::Source(s), span)));
        statements.extend(circuit.elements.iter().cloned().map(|e| (Statement::Element(e), span)));
        statements.extend(circuit.sinks.iter().cloned().map(|s| (Statement::Sink(s), span)));
        Self {
            version: FORMAT_VERSION,
            file_name: None,
            statements,
        }
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new();
        for (st, _) in &self.statements {
            match st {
                Statement::Path(ps) => {
                    for p in ps {
                        c.declare_path(p);
                    }
                }
                Statement::Source(s) => {
                    c.add_source(s.clone());
                }
                Statement::Element(e) => {
                    c.add_element(e.clone());
                }
                Statement::Sink(s) => {
                    c.add_sink(s);
                }
            }
        }
        c
    }

    /// Statements without spans, for structural comparison.
    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().map(|(s, _)| s)
    }
}
