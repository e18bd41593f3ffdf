//! Bean: a first-order language whose type system bounds the backward error of
//! floating-point programs.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: binary64 and high-precision arithmetic, the relative
//!   precision metric, rounding constants.
//! * [`syntax`]: lexer, parser, printer, definition inlining.
//! * [`typecheck`]: graded contexts, bound inference and a declarative
//!   re-checker.
//! * [`semantics`]: ideal and approximate interpreters and the backward map.
//! * [`harness`]: benchmark generators, bound tables, soundness trials.
//! * [`pipeline`]: source text to checked program, with diagnostics.

pub mod harness;
pub mod numerics;
pub mod pipeline;
pub mod semantics;
pub mod syntax;
pub mod typecheck;

pub use pipeline::{compile, Compiled, Diagnostic};

/// Runs `f` on a stack that grows on demand. Generated programs nest a few
/// thousand binders deep and every tree walk in the crate recurses.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}
