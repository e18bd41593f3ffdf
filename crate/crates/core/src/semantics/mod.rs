//! Operational semantics over typing derivations: the ideal interpreter, the
//! binary64 interpreter and the backward map that pushes an approximate
//! result back onto perturbed inputs.

mod backward;
mod eval;
mod value;

pub use backward::{
    b_add, b_div, b_dmul, b_mul, b_sub, backward_eval, distances, prim_backward, value_distance, DistanceReport,
};
pub use eval::{eval_approx, eval_approx_traced, eval_ideal, Approx, ApproxRun, Arith, Evaluator, Ideal};
pub use value::{env_from_json, format_f64, value_from_json, ApproxValue, Env, IdealValue, InputError, NumText, Value};

use crate::numerics::ArithOp;
use crate::syntax::Name;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("floating-point overflow in {0}")]
    Overflow(ArithOp),
    #[error("{0}")]
    Numeric(String),
    #[error("unbound variable `{0}` at run time")]
    Unbound(Name),
    #[error("ill-shaped value: {0}")]
    Mismatch(String),
    #[error("no input at finite distance: {0}")]
    InfiniteDistance(String),
}
