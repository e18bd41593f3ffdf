//! Graded linear type system: grades, contexts, bottom-up bound inference,
//! and an independent declarative checker for the derivations it produces.

mod context;
mod derivation;
mod grade;
mod infer;
mod recheck;

pub use context::{
    ctx_add_grade, ctx_max, is_subcontext, is_subskeleton, ContextSkeleton, DiscreteContext, LinearContext,
};
pub use derivation::{Derivation, Rule};
pub use grade::Grade;
pub use infer::{check_declared, infer, op_charge, InferenceResult};
pub use recheck::{recheck, RecheckError};

use serde::Serialize;

use crate::syntax::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeErrorKind {
    UnboundVariable,
    LinearityViolation,
    /// Linear variable where a discrete one is required, or the reverse.
    KindError,
    TypeMismatch,
    BranchMismatch,
    /// An injection whose other side is never determined.
    AmbiguousType,
    UnexpandedCall,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub message: String,
    pub span: Span,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, message: String, span: Span) -> Self {
        TypeError { kind, message, span }
    }

    pub fn code(&self) -> &'static str {
        match self.kind {
            TypeErrorKind::UnboundVariable => "unbound_variable",
            TypeErrorKind::LinearityViolation => "linearity_violation",
            TypeErrorKind::KindError => "kind_error",
            TypeErrorKind::TypeMismatch => "type_mismatch",
            TypeErrorKind::BranchMismatch => "branch_mismatch",
            TypeErrorKind::AmbiguousType => "ambiguous_type",
            TypeErrorKind::UnexpandedCall => "unexpanded_call",
        }
    }
}
