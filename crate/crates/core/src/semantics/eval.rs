use std::collections::HashMap;

use super::value::{Env, Value};
use super::EvalError;
use crate::numerics::{approx_op, ideal_op, ArithOp, BigNum, NumError, Outcome};
use crate::syntax::{Name, PrimOp};
use crate::typecheck::{Derivation, Rule};

/// One of the two arithmetic worlds.
pub trait Arith {
    type N: Clone;
    fn apply(&mut self, op: ArithOp, a: &Self::N, b: &Self::N) -> Result<Outcome<Self::N>, EvalError>;
}

/// Binary64 arithmetic. Records whether any product or quotient lost
/// accuracy to gradual underflow, where the relative error model fails.
#[derive(Debug, Default, Clone)]
pub struct Approx {
    pub underflow: bool,
}

impl Arith for Approx {
    type N = f64;

    fn apply(&mut self, op: ArithOp, a: &f64, b: &f64) -> Result<Outcome<f64>, EvalError> {
        let out = approx_op(op, *a, *b).map_err(|e| match e {
            NumError::Overflow(op) => EvalError::Overflow(op),
            other => EvalError::Numeric(other.to_string()),
        })?;
        if let (Outcome::Value(r), ArithOp::Mul | ArithOp::Div) = (&out, op) {
            let tiny = *r != 0.0 && r.abs() < f64::MIN_POSITIVE;
            let flushed = *r == 0.0 && *a != 0.0 && *b != 0.0;
            self.underflow |= tiny || flushed;
        }
        Ok(out)
    }
}

/// High-precision arithmetic standing in for the reals.
#[derive(Debug, Clone, Copy)]
pub struct Ideal {
    pub bits: usize,
}

impl Arith for Ideal {
    type N = BigNum;

    fn apply(&mut self, op: ArithOp, a: &BigNum, b: &BigNum) -> Result<Outcome<BigNum>, EvalError> {
        Ok(ideal_op(op, a, b, self.bits))
    }
}

/// Big-step evaluator over a derivation. Variables live in a scope keyed by
/// name, innermost binding last.
pub struct Evaluator<A: Arith> {
    pub arith: A,
    scope: HashMap<Name, Vec<Value<A::N>>>,
    /// Move linear variables out of scope instead of copying them. Only
    /// valid when every node is evaluated at most once.
    consume: bool,
}

impl<A: Arith> Evaluator<A> {
    pub fn new(arith: A, env: &Env<A::N>) -> Self {
        let mut scope: HashMap<Name, Vec<Value<A::N>>> = HashMap::new();
        for (k, v) in env.disc.iter().chain(&env.lin) {
            scope.entry(k.clone()).or_default().push(v.clone());
        }
        Evaluator {
            arith,
            scope,
            consume: false,
        }
    }

    /// Evaluator for a single forward run: linear values are moved rather
    /// than copied, since each is read exactly once.
    pub fn consuming(arith: A, env: &Env<A::N>) -> Self {
        Evaluator {
            consume: true,
            ..Self::new(arith, env)
        }
    }

    pub fn bind(&mut self, x: &Name, v: Value<A::N>) {
        self.scope.entry(x.clone()).or_default().push(v);
    }

    pub fn unbind(&mut self, x: &Name) {
        if let Some(s) = self.scope.get_mut(x) {
            s.pop();
        }
    }

    pub fn lookup(&self, x: &Name) -> Result<&Value<A::N>, EvalError> {
        self.scope
            .get(x)
            .and_then(|s| s.last())
            .ok_or_else(|| EvalError::Unbound(x.clone()))
    }

    pub fn eval(&mut self, d: &Derivation) -> Result<Value<A::N>, EvalError> {
        crate::deep(|| self.eval_inner(d))
    }

    fn eval_inner(&mut self, d: &Derivation) -> Result<Value<A::N>, EvalError> {
        let c = &d.children;
        match &d.rule {
            Rule::Var(x) if self.consume => match self.scope.get_mut(x).and_then(|s| s.last_mut()) {
                Some(slot) => Ok(std::mem::replace(slot, Value::Unit)),
                None => Err(EvalError::Unbound(x.clone())),
            },
            Rule::Var(x) | Rule::DVar(x) => self.lookup(x).cloned(),
            Rule::Unit => Ok(Value::Unit),
            Rule::Disc => self.eval(&c[0]),
            Rule::Pair => {
                let a = self.eval(&c[0])?;
                let b = self.eval(&c[1])?;
                Ok(Value::pair(a, b))
            }
            Rule::Inl => Ok(Value::inl(self.eval(&c[0])?)),
            Rule::Inr => Ok(Value::inr(self.eval(&c[0])?)),
            Rule::Let { var, .. } | Rule::DLet { var } => {
                let v = self.eval(&c[0])?;
                self.bind(var, v);
                let out = self.eval(&c[1]);
                self.unbind(var);
                out
            }
            Rule::LetPair { left, right, .. } | Rule::DLetPair { left, right } => {
                let (a, b) = match self.eval(&c[0])? {
                    Value::Pair(a, b) => (*a, *b),
                    _ => return Err(EvalError::Mismatch("destructuring a non-pair".into())),
                };
                self.bind(left, a);
                self.bind(right, b);
                let out = self.eval(&c[1]);
                self.unbind(right);
                self.unbind(left);
                out
            }
            Rule::Case { left, right, .. } => {
                let (var, v, branch) = match self.eval(&c[0])? {
                    Value::Inl(v) => (left, *v, &c[1]),
                    Value::Inr(v) => (right, *v, &c[2]),
                    _ => return Err(EvalError::Mismatch("case on a non-injection".into())),
                };
                self.bind(var, v);
                let out = self.eval(branch);
                self.unbind(var);
                out
            }
            Rule::Prim(op) => {
                let a = self.num(&c[0])?;
                let b = self.num(&c[1])?;
                match (self.arith.apply(op.arith(), &a, &b)?, op) {
                    (Outcome::Value(r), PrimOp::Div) => Ok(Value::inl(Value::Num(r))),
                    (Outcome::Value(r), _) => Ok(Value::Num(r)),
                    (Outcome::DivByZero, _) => Ok(Value::inr(Value::Unit)),
                }
            }
        }
    }

    /// Value of a numeric operand.
    pub fn num(&mut self, d: &Derivation) -> Result<A::N, EvalError> {
        match self.eval(d)? {
            Value::Num(n) => Ok(n),
            _ => Err(EvalError::Mismatch("arithmetic on a non-number".into())),
        }
    }
}

/// Result of a binary64 run.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRun {
    pub value: Value<f64>,
    /// Some multiplication or division underflowed.
    pub underflow: bool,
}

/// Floating-point semantics: every operation rounded to binary64.
pub fn eval_approx(d: &Derivation, env: &Env<f64>) -> Result<Value<f64>, EvalError> {
    eval_approx_traced(d, env).map(|r| r.value)
}

pub fn eval_approx_traced(d: &Derivation, env: &Env<f64>) -> Result<ApproxRun, EvalError> {
    let mut ev = Evaluator::consuming(Approx::default(), env);
    let value = ev.eval(d)?;
    Ok(ApproxRun {
        value,
        underflow: ev.arith.underflow,
    })
}

/// Ideal semantics, realized at `bits` bits of precision.
pub fn eval_ideal(d: &Derivation, env: &Env<BigNum>, bits: usize) -> Result<Value<BigNum>, EvalError> {
    Evaluator::consuming(Ideal { bits }, env).eval(d)
}
