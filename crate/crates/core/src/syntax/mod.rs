//! Concrete syntax of Bean: lexer, parser with scope resolution, pretty
//! printer, definition inlining and arithmetic normalization.

mod ast;
mod expand;
mod lexer;
mod parser;
mod print;

pub use ast::*;
pub use expand::{desugar_ops, expand_defs, is_kernel_form, Expanded, FreshNames};
pub use print::{pretty_print, print_program};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntaxErrorKind {
    Lexical,
    Syntax,
    DuplicateDefinition,
    DuplicateParameter,
    UnboundVariable,
    UnknownMain,
    UnknownDefinition,
    ArityMismatch,
    ArgumentKindMismatch,
}

/// Parse, scope or expansion failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub message: String,
    pub span: Span,
}

impl SyntaxError {
    pub fn new(kind: SyntaxErrorKind, message: &str, span: Span) -> Self {
        SyntaxError {
            kind,
            message: message.to_string(),
            span,
        }
    }

    pub(crate) fn lexical(message: &str, span: Span) -> Self {
        Self::new(SyntaxErrorKind::Lexical, message, span)
    }

    pub(crate) fn syntax(message: &str, span: Span) -> Self {
        Self::new(SyntaxErrorKind::Syntax, message, span)
    }

    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self.kind {
            SyntaxErrorKind::Lexical => "lexical_error",
            SyntaxErrorKind::Syntax => "syntax_error",
            SyntaxErrorKind::DuplicateDefinition => "duplicate_definition",
            SyntaxErrorKind::DuplicateParameter => "duplicate_parameter",
            SyntaxErrorKind::UnboundVariable => "unbound_variable",
            SyntaxErrorKind::UnknownMain => "unknown_main",
            SyntaxErrorKind::UnknownDefinition => "unknown_definition",
            SyntaxErrorKind::ArityMismatch => "arity_mismatch",
            SyntaxErrorKind::ArgumentKindMismatch => "argument_kind_mismatch",
        }
    }

    /// Grammar-level failures, as opposed to scope and call errors in a
    /// grammatical program.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self.kind,
            SyntaxErrorKind::Lexical
                | SyntaxErrorKind::Syntax
                | SyntaxErrorKind::DuplicateDefinition
                | SyntaxErrorKind::DuplicateParameter
        )
    }
}

/// Parses a whole `.bean` source. `main` defaults to the last definition.
pub fn parse_program(source: &str) -> Result<Program, SyntaxError> {
    let mut p = parser::Parser::new(source)?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

/// Parses a standalone expression with the given variables in scope.
pub fn parse_expr(source: &str, linear: &[&str], discrete: &[&str]) -> Result<Expr, SyntaxError> {
    let mut p = parser::Parser::new(source)?.with_scope(linear, discrete);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a type such as `num^2 + unit`.
pub fn parse_type(source: &str) -> Result<Ty, SyntaxError> {
    let mut p = parser::Parser::new(source)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}
