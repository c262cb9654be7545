//! Concrete syntax: a parenthesized grammar for terms, formulas, schemas and
//! knowledge-base files (`.elf`), plus a canonical renderer.
//!
//! ```text
//! term     := ?name | name | (name term*) | (ka predexpr) | (that formula)
//! predexpr := name | (lambda (?name+) formula) | (mod name predexpr) | (opname term)
//! formula  := true | name | (predexpr term*) | (= term term) | (not f) | (and f f+)
//!           | (or f f+) | (implies f f) | (equiv f f) | (quant q ?name f f)
//!           | (forall ?name f) | (exists ?name f) | (poss f) | (nec f)
//! q        := name | (name integer)
//! ```
//!
//! A bare `name` in formula position is a zero-place atom; `kind` is accepted
//! as a spelling of `ka`. Comments run from `;` to end of line.

pub(crate) mod lexer;
pub(crate) mod parser;
mod render;

use std::fmt;

use thiserror::Error;

use crate::logic::{Diagnostic, Formula, Name, Signature, Term};
use crate::schema::Schema;

pub use render::render;

/// Byte offsets plus the 1-based line and column of `start`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message} (expected {})", expected.join(" or "))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: String, expected: Vec<String>) -> Self {
        ParseError { span, message, expected }
    }
}

/// Parse failure or well-formedness failure of a knowledge-base file.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("{f}:{e}", f = .1.as_deref().unwrap_or("<input>"), e = .0)]
    Syntax(ParseError, Option<String>),
    #[error("{file}:{span}: {diagnostic}", file = .file.as_deref().unwrap_or("<input>"))]
    IllFormed {
        file: Option<String>,
        span: SourceSpan,
        diagnostic: Diagnostic,
    },
    #[error("{file}:{span}: {message}", file = .file.as_deref().unwrap_or("<input>"))]
    Declaration {
        file: Option<String>,
        span: SourceSpan,
        message: String,
    },
}

impl KbError {
    pub fn span(&self) -> SourceSpan {
        match self {
            KbError::Syntax(e, _) => e.span,
            KbError::IllFormed { span, .. } | KbError::Declaration { span, .. } => *span,
        }
    }

    pub(crate) fn with_file(self, name: &str) -> Self {
        let file = Some(name.to_string());
        match self {
            KbError::Syntax(e, _) => KbError::Syntax(e, file),
            KbError::IllFormed { span, diagnostic, .. } => KbError::IllFormed { file, span, diagnostic },
            KbError::Declaration { span, message, .. } => KbError::Declaration { file, span, message },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    Functions(Vec<(Name, usize)>),
    Predicates(Vec<(Name, usize)>),
    Modifiers(Vec<Name>),
    Operators(Vec<(Name, usize)>),
    Constants(Vec<Name>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Provable,
    NotProvable,
}

/// A named query with the knowledge it may use and its expected outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub name: Option<Name>,
    /// Scenario fact sets to load (file stems without the `scenario-` prefix).
    pub scenarios: Vec<Name>,
    /// Axiom and schema names the query may use; `None` means all of them.
    pub uses: Option<Vec<Name>>,
    pub expect: Expectation,
    pub max_lexical_steps: Option<usize>,
    pub goal: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KbItem {
    Declare(Declaration),
    Axiom { name: Option<Name>, formula: Formula },
    Fact(Formula),
    Schema(Schema),
    Query(Query),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spanned<T> {
    pub item: T,
    pub span: SourceSpan,
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parser::single(text, parser::formula)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parser::single(text, parser::term)
}

pub fn parse_pred_expr(text: &str) -> Result<crate::logic::PredExpr, ParseError> {
    parser::single(text, parser::pred_expr)
}

pub fn parse_schema(text: &str) -> Result<Schema, ParseError> {
    parser::single(text, parser::schema)
}

/// Parses a knowledge-base file into its top-level items, without
/// well-formedness checking.
pub fn parse_kb(text: &str) -> Result<Vec<Spanned<KbItem>>, ParseError> {
    let forms = lexer::read_all(text)?;
    forms.iter().map(parser::kb_item).collect()
}

/// Collects the declarations of `items` into `sig`.
pub fn apply_declarations(items: &[Spanned<KbItem>], sig: &mut Signature) -> Result<(), KbError> {
    for it in items {
        if let KbItem::Declare(d) = &it.item {
            let res = match d {
                Declaration::Functions(ds) => ds.iter().try_for_each(|(n, a)| sig.declare_function(n, *a)),
                Declaration::Predicates(ds) => ds.iter().try_for_each(|(n, a)| sig.declare_predicate(n, *a)),
                Declaration::Modifiers(ns) => ns.iter().try_for_each(|n| sig.declare_modifier(n)),
                Declaration::Operators(ds) => ds.iter().try_for_each(|(n, a)| sig.declare_operator(n, *a)),
                Declaration::Constants(ns) => ns.iter().try_for_each(|n| sig.declare_constant(n)),
            };
            res.map_err(|e| KbError::Declaration { file: None, span: it.span, message: e.to_string() })?;
        }
    }
    Ok(())
}
