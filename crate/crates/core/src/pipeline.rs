//! Source text to a checked program: parse, select `main`, inline calls,
//! normalize arithmetic, infer bounds.

use serde::Serialize;

use crate::syntax::{
    desugar_ops, expand_defs, parse_program, Expr, Param, ParamKind, Program, Span, SyntaxError, SyntaxErrorKind,
};
use crate::typecheck::{infer, ContextSkeleton, Derivation, DiscreteContext, Grade, InferenceResult, TypeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Parse,
    Scope,
    Type,
}

/// A user-facing error with a machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub stage: Stage,
    pub code: &'static str,
    pub message: String,
    #[serde(skip)]
    pub span: Span,
}

impl Diagnostic {
    /// 2 for grammar errors, 1 for everything found in a grammatical program.
    pub fn exit_code(&self) -> i32 {
        match self.stage {
            Stage::Parse => 2,
            Stage::Scope | Stage::Type => 1,
        }
    }

    /// `path:line:col: error[code]: message`.
    pub fn render(&self, path: &str, source: &str) -> String {
        let (line, col) = self.span.line_col(source);
        format!("{path}:{line}:{col}: error[{}]: {}", self.code, self.message)
    }

    /// 1-based line and column of the span start.
    pub fn position(&self, source: &str) -> (usize, usize) {
        self.span.line_col(source)
    }
}

impl From<SyntaxError> for Diagnostic {
    fn from(e: SyntaxError) -> Self {
        Diagnostic {
            stage: if e.is_parse_error() { Stage::Parse } else { Stage::Scope },
            code: e.code(),
            message: e.message,
            span: e.span,
        }
    }
}

impl From<TypeError> for Diagnostic {
    fn from(e: TypeError) -> Self {
        Diagnostic {
            stage: if e.kind == crate::typecheck::TypeErrorKind::UnboundVariable {
                Stage::Scope
            } else {
                Stage::Type
            },
            code: e.code(),
            message: e.message,
            span: e.span,
        }
    }
}

/// A program that type checks, with its entry point expanded.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub program: Program,
    pub params: Vec<Param>,
    /// `main` with calls inlined and arithmetic in variable-operand form.
    pub body: Expr,
    pub disc: DiscreteContext,
    pub skeleton: ContextSkeleton,
    pub result: InferenceResult,
}

impl Compiled {
    pub fn main(&self) -> &str {
        &self.program.main
    }

    pub fn derivation(&self) -> &Derivation {
        &self.result.derivation
    }

    /// Inferred bound on a linear parameter; zero when it is unused.
    pub fn bound(&self, name: &str) -> Grade {
        self.result.ctx.grade(name).cloned().unwrap_or_else(Grade::zero)
    }

    pub fn linear_params(&self) -> impl Iterator<Item = &Param> {
        self.params.iter().filter(|p| p.kind == ParamKind::Linear)
    }

    pub fn ops(&self) -> usize {
        self.result.derivation.ops()
    }
}

/// Parses and checks `source`, analyzing `main` or the last definition.
pub fn compile(source: &str, main: Option<&str>) -> Result<Compiled, Diagnostic> {
    let mut program = parse_program(source)?;
    if let Some(m) = main {
        program = program.with_main(m).ok_or_else(|| {
            SyntaxError::new(
                SyntaxErrorKind::UnknownMain,
                &format!("no definition named `{m}`"),
                Span::default(),
            )
        })?;
    }
    compile_program(program)
}

pub fn compile_program(program: Program) -> Result<Compiled, Diagnostic> {
    let expanded = expand_defs(&program)?;
    let body = desugar_ops(&expanded.body);
    let mut disc = DiscreteContext::new();
    let mut skeleton = ContextSkeleton::new();
    for p in &expanded.params {
        match p.kind {
            ParamKind::Linear => skeleton.insert(p.name.clone(), p.ty.clone()),
            ParamKind::Discrete => disc.insert(p.name.clone(), p.ty.clone()),
        };
    }
    let result = infer(&disc, &skeleton, &body)?;
    Ok(Compiled {
        program,
        params: expanded.params,
        body,
        disc,
        skeleton,
        result,
    })
}
