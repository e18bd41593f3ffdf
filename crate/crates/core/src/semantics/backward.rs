use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::eval::{Approx, Evaluator};
use super::value::{Env, IdealValue, Value};
use super::EvalError;
use crate::numerics::{rp_distance, BigNum, Distance};
use crate::syntax::{Name, PrimOp};
use crate::typecheck::{Derivation, Rule};

/// Extra bits carried by the closed-form backward maps beyond the ideal
/// precision.
const GUARD_BITS: usize = 16;

fn infinite<T>(what: &str) -> Result<T, EvalError> {
    Err(EvalError::InfiniteDistance(what.to_string()))
}

/// Checks that a nonzero exact result `s` and target `x3` are at finite
/// distance, i.e. same sign; `Ok(false)` when both are zero.
fn same_side(s: &BigNum, x3: &BigNum, what: &str) -> Result<bool, EvalError> {
    match (s.is_zero(), x3.is_zero()) {
        (true, true) => Ok(false),
        (true, false) | (false, true) => infinite(what),
        _ if s.is_negative() != x3.is_negative() => infinite(what),
        _ => Ok(true),
    }
}

/// Scales both operands of a sum or difference by `x3 / s`.
fn rescale(x1: &BigNum, x2: &BigNum, s: &BigNum, x3: &BigNum, p: usize) -> (BigNum, BigNum) {
    let k = x3.div(s, p);
    (x1.mul(&k, p), x2.mul(&k, p))
}

/// Backward map of `add`: `(x1 x3/(x1+x2), x2 x3/(x1+x2))`.
pub fn b_add(x1: &BigNum, x2: &BigNum, x3: &BigNum, bits: usize) -> Result<(BigNum, BigNum), EvalError> {
    let p = bits + GUARD_BITS;
    let s = x1.add(x2, p);
    if !same_side(&s, x3, "add")? {
        return Ok((x1.clone(), x2.clone()));
    }
    Ok(rescale(x1, x2, &s, x3, p))
}

/// Backward map of `sub`: `(x1 x3/(x1-x2), x2 x3/(x1-x2))`.
pub fn b_sub(x1: &BigNum, x2: &BigNum, x3: &BigNum, bits: usize) -> Result<(BigNum, BigNum), EvalError> {
    let p = bits + GUARD_BITS;
    let s = x1.sub(x2, p);
    if !same_side(&s, x3, "sub")? {
        return Ok((x1.clone(), x2.clone()));
    }
    Ok(rescale(x1, x2, &s, x3, p))
}

/// Backward map of `mul`, splitting the error evenly:
/// `(x1 k, x2 k)` with `k = sqrt(x3/(x1 x2))`.
pub fn b_mul(x1: &BigNum, x2: &BigNum, x3: &BigNum, bits: usize) -> Result<(BigNum, BigNum), EvalError> {
    let p = bits + GUARD_BITS;
    let s = x1.mul(x2, p);
    if !same_side(&s, x3, "mul")? {
        return Ok((x1.clone(), x2.clone()));
    }
    let k = x3.div(&s, p).sqrt(p);
    Ok((x1.mul(&k, p), x2.mul(&k, p)))
}

/// Backward map of `dmul`: the discrete `x1` is kept, `x2` becomes `x3/x1`.
pub fn b_dmul(x1: &BigNum, x2: &BigNum, x3: &BigNum, bits: usize) -> Result<(BigNum, BigNum), EvalError> {
    let p = bits + GUARD_BITS;
    let s = x1.mul(x2, p);
    if !same_side(&s, x3, "dmul")? {
        return Ok((x1.clone(), x2.clone()));
    }
    Ok((x1.clone(), x3.div(x1, p)))
}

/// Backward map of `div` against a target in `num + unit`. With
/// `t = sqrt(x3 x2 / x1)` the result is `(x1 t, x2 / t)`, which for positive
/// operands is `(sqrt(x1 x2 x3), sqrt(x1 x2 / x3))`. A division by zero
/// leaves the operands alone.
pub fn b_div(x1: &BigNum, x2: &BigNum, target: &IdealValue, bits: usize) -> Result<(BigNum, BigNum), EvalError> {
    let p = bits + GUARD_BITS;
    match target {
        Value::Inr(_) if x2.is_zero() => Ok((x1.clone(), x2.clone())),
        Value::Inr(_) => infinite("div: target is inr but the quotient exists"),
        Value::Inl(v) => {
            let Value::Num(x3) = &**v else {
                return Err(EvalError::Mismatch("div target is not a number".into()));
            };
            if x2.is_zero() {
                return infinite("div: target is inl but the divisor is zero");
            }
            let q = x1.div(x2, p);
            if !same_side(&q, x3, "div")? {
                return Ok((x1.clone(), x2.clone()));
            }
            let t = x3.mul(x2, p).div(x1, p).sqrt(p);
            Ok((x1.mul(&t, p), x2.div(&t, p)))
        }
        _ => Err(EvalError::Mismatch("div target is not an injection".into())),
    }
}

/// Backward map of any primitive. `target` is a number, or an injection
/// for `div`.
pub fn prim_backward(
    op: PrimOp,
    x1: &BigNum,
    x2: &BigNum,
    target: &IdealValue,
    bits: usize,
) -> Result<(BigNum, BigNum), EvalError> {
    if op == PrimOp::Div {
        return b_div(x1, x2, target, bits);
    }
    let Value::Num(x3) = target else {
        return Err(EvalError::Mismatch(format!("{op} target is not a number")));
    };
    match op {
        PrimOp::Add => b_add(x1, x2, x3, bits),
        PrimOp::Sub => b_sub(x1, x2, x3, bits),
        PrimOp::Mul => b_mul(x1, x2, x3, bits),
        PrimOp::DMul => b_dmul(x1, x2, x3, bits),
        PrimOp::Div => unreachable!(),
    }
}

/// Walks a derivation backwards. Approximate values of intermediate results
/// are recomputed from the original inputs as needed; targets for linear
/// variables are collected in `out` when their use sites are reached.
struct Backward {
    bits: usize,
    ev: Evaluator<Approx>,
    out: HashMap<Name, IdealValue>,
}

impl Backward {
    fn back(&mut self, d: &Derivation, target: IdealValue) -> Result<(), EvalError> {
        crate::deep(|| self.back_inner(d, target))
    }

    /// Runs `f` with `vars` bound to approximate values, returning the
    /// targets the body set for them. Outer targets under the same names are
    /// preserved.
    fn scoped(
        &mut self,
        vars: &[(&Name, Value<f64>)],
        f: impl FnOnce(&mut Self) -> Result<(), EvalError>,
    ) -> Result<Vec<Option<IdealValue>>, EvalError> {
        let mut saved = Vec::new();
        for (x, v) in vars {
            self.ev.bind(x, v.clone());
            saved.push(self.out.remove(*x));
        }
        let r = f(self);
        let mut got = Vec::new();
        for ((x, _), s) in vars.iter().zip(saved).rev() {
            self.ev.unbind(x);
            got.push(self.out.remove(*x));
            if let Some(s) = s {
                self.out.insert((*x).clone(), s);
            }
        }
        got.reverse();
        r.map(|_| got)
    }

    fn back_inner(&mut self, d: &Derivation, target: IdealValue) -> Result<(), EvalError> {
        let c = &d.children;
        match &d.rule {
            Rule::Var(x) => {
                self.out.insert(x.clone(), target);
                Ok(())
            }
            Rule::DVar(_) | Rule::Unit => Ok(()),
            Rule::Disc => self.back(&c[0], target),
            Rule::Pair => match target {
                Value::Pair(a, b) => {
                    self.back(&c[0], *a)?;
                    self.back(&c[1], *b)
                }
                _ => Err(EvalError::Mismatch("pair target is not a pair".into())),
            },
            Rule::Inl => match target {
                Value::Inl(v) => self.back(&c[0], *v),
                _ => infinite("target has the other injection tag"),
            },
            Rule::Inr => match target {
                Value::Inr(v) => self.back(&c[0], *v),
                _ => infinite("target has the other injection tag"),
            },
            Rule::Let { var, .. } => {
                let v = self.ev.eval(&c[0])?;
                let got = self.scoped(&[(var, v.clone())], |s| s.back(&c[1], target))?;
                let t = got.into_iter().next().flatten().unwrap_or_else(|| v.lift());
                self.back(&c[0], t)
            }
            Rule::LetPair { left, right, .. } => {
                let v = self.ev.eval(&c[0])?;
                let Value::Pair(a, b) = &v else {
                    return Err(EvalError::Mismatch("destructuring a non-pair".into()));
                };
                let binds = [(left, (**a).clone()), (right, (**b).clone())];
                let got = self.scoped(&binds, |s| s.back(&c[1], target))?;
                let mut got = got.into_iter();
                let ta = got.next().flatten().unwrap_or_else(|| a.lift());
                let tb = got.next().flatten().unwrap_or_else(|| b.lift());
                self.back(&c[0], Value::pair(ta, tb))
            }
            Rule::DLet { var } => {
                let v = self.ev.eval(&c[0])?;
                self.scoped(&[(var, v.clone())], |s| s.back(&c[1], target))?;
                self.back(&c[0], v.lift())
            }
            Rule::DLetPair { left, right } => {
                let v = self.ev.eval(&c[0])?;
                let Value::Pair(a, b) = &v else {
                    return Err(EvalError::Mismatch("destructuring a non-pair".into()));
                };
                let binds = [(left, (**a).clone()), (right, (**b).clone())];
                self.scoped(&binds, |s| s.back(&c[1], target))?;
                self.back(&c[0], v.lift())
            }
            Rule::Case { left, right, .. } => {
                // the approximate run decides which branch is replayed
                let (var, v, branch, inl) = match self.ev.eval(&c[0])? {
                    Value::Inl(v) => (left, *v, &c[1], true),
                    Value::Inr(v) => (right, *v, &c[2], false),
                    _ => return Err(EvalError::Mismatch("case on a non-injection".into())),
                };
                let got = self.scoped(&[(var, v.clone())], |s| s.back(branch, target))?;
                let t = got.into_iter().next().flatten().unwrap_or_else(|| v.lift());
                self.back(&c[0], if inl { Value::inl(t) } else { Value::inr(t) })
            }
            Rule::Prim(op) => {
                let a = BigNum::from_f64(self.ev.num(&c[0])?).map_err(num_err)?;
                let b = BigNum::from_f64(self.ev.num(&c[1])?).map_err(num_err)?;
                let (ta, tb) = prim_backward(*op, &a, &b, &target, self.bits)?;
                self.back(&c[0], Value::Num(ta))?;
                self.back(&c[1], Value::Num(tb))
            }
        }
    }
}

fn num_err(e: crate::numerics::NumError) -> EvalError {
    EvalError::Numeric(e.to_string())
}

/// Backward map of a whole program: ideal-precision inputs, close to `env`,
/// on which the ideal semantics produces `target`. Discrete inputs and unused
/// linear inputs come back unchanged.
pub fn backward_eval(
    d: &Derivation,
    env: &Env<f64>,
    target: &IdealValue,
    bits: usize,
) -> Result<Env<BigNum>, EvalError> {
    let mut bw = Backward {
        bits,
        ev: Evaluator::new(Approx::default(), env),
        out: HashMap::new(),
    };
    bw.back(d, target.clone())?;
    let mut res = env.lift();
    for (x, v) in res.lin.iter_mut() {
        if let Some(t) = bw.out.remove(x) {
            *v = t;
        }
    }
    Ok(res)
}

/// Componentwise relative precision distance, maximized over the value;
/// infinite on any tag or shape difference.
pub fn value_distance(a: &IdealValue, b: &IdealValue, bits: usize) -> Distance {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => rp_distance(x, y, bits),
        (Value::Unit, Value::Unit) => Distance::zero(),
        (Value::Pair(a1, a2), Value::Pair(b1, b2)) => value_distance(a1, b1, bits).max(value_distance(a2, b2, bits)),
        (Value::Inl(x), Value::Inl(y)) | (Value::Inr(x), Value::Inr(y)) => value_distance(x, y, bits),
        _ => Distance::Infinite,
    }
}

/// How far a perturbed environment moved from the original.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    #[serde(serialize_with = "ser_distances")]
    pub linear: BTreeMap<Name, Distance>,
    pub discrete_changed: BTreeMap<Name, bool>,
}

fn ser_distances<S: serde::Serializer>(m: &BTreeMap<Name, Distance>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, d)| (k.to_string(), d.to_f64())))
}

impl DistanceReport {
    pub fn any_discrete_changed(&self) -> bool {
        self.discrete_changed.values().any(|c| *c)
    }
}

pub fn distances(orig: &Env<f64>, pert: &Env<BigNum>, bits: usize) -> DistanceReport {
    let linear = orig
        .lin
        .iter()
        .map(|(x, v)| {
            let d = match pert.lin.get(x) {
                Some(p) => value_distance(&v.lift(), p, bits),
                None => Distance::Infinite,
            };
            (x.clone(), d)
        })
        .collect();
    let discrete_changed = orig
        .disc
        .iter()
        .map(|(z, v)| (z.clone(), pert.disc.get(z) != Some(&v.lift())))
        .collect();
    DistanceReport {
        linear,
        discrete_changed,
    }
}
