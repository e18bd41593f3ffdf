use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value as Json;

use crate::numerics::BigNum;
use crate::syntax::{Name, Ty};

/// Runtime value. `N` is `f64` for the approximate semantics and [`BigNum`]
/// for the ideal one.
#[derive(Debug, Clone, PartialEq)]
pub enum Value<N> {
    Num(N),
    Unit,
    Pair(Box<Value<N>>, Box<Value<N>>),
    Inl(Box<Value<N>>),
    Inr(Box<Value<N>>),
}

pub type ApproxValue = Value<f64>;
pub type IdealValue = Value<BigNum>;

impl<N> Value<N> {
    pub fn pair(a: Value<N>, b: Value<N>) -> Self {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(v: Value<N>) -> Self {
        Value::Inl(Box::new(v))
    }

    pub fn inr(v: Value<N>) -> Self {
        Value::Inr(Box::new(v))
    }

    /// Right-nested tuple of the given components.
    pub fn tuple(items: Vec<Value<N>>) -> Self {
        let mut it = items.into_iter().rev();
        let mut acc = it.next().expect("empty tuple");
        for v in it {
            acc = Value::pair(v, acc);
        }
        acc
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&N) -> M) -> Value<M> {
        match self {
            Value::Num(n) => Value::Num(f(n)),
            Value::Unit => Value::Unit,
            Value::Pair(a, b) => Value::pair(a.map(f), b.map(f)),
            Value::Inl(v) => Value::inl(v.map(f)),
            Value::Inr(v) => Value::inr(v.map(f)),
        }
    }

    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&N) -> Result<M, E>) -> Result<Value<M>, E> {
        Ok(match self {
            Value::Num(n) => Value::Num(f(n)?),
            Value::Unit => Value::Unit,
            Value::Pair(a, b) => Value::pair(a.try_map(f)?, b.try_map(f)?),
            Value::Inl(v) => Value::inl(v.try_map(f)?),
            Value::Inr(v) => Value::inr(v.try_map(f)?),
        })
    }

    /// Numbers in left-to-right order.
    pub fn leaves(&self) -> Vec<&N> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(v) = stack.pop() {
            match v {
                Value::Num(n) => out.push(n),
                Value::Unit => {}
                Value::Pair(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Value::Inl(v) | Value::Inr(v) => stack.push(v),
            }
        }
        out
    }

    /// Whether the value inhabits `ty`.
    pub fn fits(&self, ty: &Ty) -> bool {
        match (self, ty) {
            (_, Ty::Disc(t)) => self.fits(t),
            (Value::Num(_), Ty::Num) | (Value::Unit, Ty::Unit) => true,
            (Value::Pair(a, b), Ty::Tensor(s, t)) => a.fits(s) && b.fits(t),
            (Value::Inl(v), Ty::Sum(s, _)) => v.fits(s),
            (Value::Inr(v), Ty::Sum(_, t)) => v.fits(t),
            (_, Ty::Hole) => true,
            _ => false,
        }
    }
}

impl ApproxValue {
    /// Exact embedding into the ideal numbers.
    pub fn lift(&self) -> IdealValue {
        self.try_map(&mut |x| BigNum::from_f64(*x))
            .expect("approximate values are finite")
    }
}

impl IdealValue {
    /// Nearest binary64 value of every component.
    pub fn round(&self) -> ApproxValue {
        self.map(&mut |x| x.to_f64())
    }
}

/// Shortest text that reads back as the same binary64 value.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Text form of a number for display and JSON.
pub trait NumText {
    fn text(&self) -> String;
}

impl NumText for f64 {
    fn text(&self) -> String {
        format_f64(*self)
    }
}

impl NumText for BigNum {
    fn text(&self) -> String {
        self.to_decimal()
    }
}

impl<N: NumText> Value<N> {
    /// JSON form without type information: numbers as strings, pairs as
    /// two-element arrays, injections as `{"inl": v}` / `{"inr": v}`, unit as
    /// `null`.
    pub fn to_json(&self) -> Json {
        match self {
            Value::Num(n) => Json::String(n.text()),
            Value::Unit => Json::Null,
            Value::Pair(a, b) => Json::Array(vec![a.to_json(), b.to_json()]),
            Value::Inl(v) => serde_json::json!({ "inl": v.to_json() }),
            Value::Inr(v) => serde_json::json!({ "inr": v.to_json() }),
        }
    }

    /// JSON form at type `ty`: like [`Value::to_json`], but a value of type
    /// `t^k` becomes a flat array of `k` elements, matching what
    /// [`value_from_json`] reads.
    pub fn to_json_typed(&self, ty: &Ty) -> Json {
        if let Some(parts) = self.parts(ty) {
            return Json::Array(parts.into_iter().map(|(v, t)| v.to_json_typed(t)).collect());
        }
        match (self, ty) {
            (_, Ty::Disc(t)) => self.to_json_typed(t),
            (Value::Inl(v), Ty::Sum(l, _)) => serde_json::json!({ "inl": v.to_json_typed(l) }),
            (Value::Inr(v), Ty::Sum(_, r)) => serde_json::json!({ "inr": v.to_json_typed(r) }),
            _ => self.to_json(),
        }
    }

    /// Text form at type `ty`, with vectors printed flat: `(1.0, 2.0, 3.0)`.
    pub fn render(&self, ty: &Ty) -> String {
        let mut s = String::new();
        self.render_into(&mut s, Some(ty), false);
        s
    }

    /// Components of a tuple value at type `ty`: `k` of them for `t^k`, two
    /// for any other product.
    fn parts<'a>(&'a self, ty: &'a Ty) -> Option<Vec<(&'a Value<N>, &'a Ty)>> {
        let ty = match ty {
            Ty::Disc(t) => &**t,
            t => t,
        };
        let Ty::Tensor(ta, tb) = ty else { return None };
        let Value::Pair(..) = self else { return None };
        match ty.as_power() {
            Some((base, k)) => {
                let mut out = Vec::with_capacity(k);
                let mut cur = self;
                for _ in 1..k {
                    let Value::Pair(a, b) = cur else { return None };
                    out.push((&**a, base));
                    cur = b;
                }
                out.push((cur, base));
                Some(out)
            }
            None => {
                let Value::Pair(a, b) = self else { return None };
                Some(vec![(&**a, &**ta), (&**b, &**tb)])
            }
        }
    }

    fn render_into(&self, out: &mut String, ty: Option<&Ty>, atom: bool) {
        let ty = match ty {
            Some(Ty::Disc(t)) => Some(&**t),
            t => t,
        };
        let parts = match (self, ty) {
            (Value::Pair(..), Some(t)) => self.parts(t),
            (Value::Pair(a, b), None) => Some(vec![(&**a, &Ty::Hole), (&**b, &Ty::Hole)]),
            _ => None,
        };
        match self {
            Value::Num(n) => out.push_str(&n.text()),
            Value::Unit => out.push_str("()"),
            Value::Pair(a, b) => {
                out.push('(');
                match parts {
                    Some(parts) => {
                        for (i, (v, t)) in parts.into_iter().enumerate() {
                            if i > 0 {
                                out.push_str(", ");
                            }
                            v.render_into(out, (*t != Ty::Hole).then_some(t), false);
                        }
                    }
                    None => {
                        a.render_into(out, None, false);
                        out.push_str(", ");
                        b.render_into(out, None, false);
                    }
                }
                out.push(')');
            }
            Value::Inl(v) | Value::Inr(v) => {
                let inner = match (self, ty) {
                    (Value::Inl(_), Some(Ty::Sum(l, _))) => Some(&**l),
                    (Value::Inr(_), Some(Ty::Sum(_, r))) => Some(&**r),
                    _ => None,
                };
                if atom {
                    out.push('(');
                }
                out.push_str(if matches!(self, Value::Inl(_)) { "inl " } else { "inr " });
                v.render_into(out, inner, true);
                if atom {
                    out.push(')');
                }
            }
        }
    }
}

impl<N: NumText> fmt::Display for Value<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_into(&mut s, None, false);
        f.write_str(&s)
    }
}

/// Variable bindings for a run: discrete and linear inputs kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Env<N> {
    pub disc: BTreeMap<Name, Value<N>>,
    pub lin: BTreeMap<Name, Value<N>>,
}

impl<N> Default for Env<N> {
    fn default() -> Self {
        Env {
            disc: BTreeMap::new(),
            lin: BTreeMap::new(),
        }
    }
}

impl<N> Env<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_lin(mut self, x: &str, v: Value<N>) -> Self {
        self.lin.insert(x.into(), v);
        self
    }

    pub fn with_disc(mut self, z: &str, v: Value<N>) -> Self {
        self.disc.insert(z.into(), v);
        self
    }
}

impl Env<f64> {
    pub fn lift(&self) -> Env<BigNum> {
        Env {
            disc: self.disc.iter().map(|(k, v)| (k.clone(), v.lift())).collect(),
            lin: self.lin.iter().map(|(k, v)| (k.clone(), v.lift())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct InputError {
    pub path: String,
    pub message: String,
}

fn input_err<T>(path: &str, message: impl Into<String>) -> Result<T, InputError> {
    Err(InputError {
        path: path.to_string(),
        message: message.into(),
    })
}

/// Reads a binary64 value of type `ty` from JSON. Numbers may be JSON numbers
/// or decimal strings; a tuple type accepts either a flat array of all its
/// components or explicitly nested pairs.
pub fn value_from_json(json: &Json, ty: &Ty, path: &str) -> Result<ApproxValue, InputError> {
    match ty {
        Ty::Disc(t) => value_from_json(json, t, path),
        Ty::Num => {
            let x = match json {
                Json::Number(n) => n.as_f64(),
                Json::String(s) => s.trim().parse::<f64>().ok(),
                _ => None,
            };
            match x {
                Some(x) if x.is_finite() => Ok(Value::Num(if x == 0.0 { 0.0 } else { x })),
                Some(_) => input_err(path, "numbers must be finite"),
                None => input_err(path, format!("expected a number, found {json}")),
            }
        }
        Ty::Unit => match json {
            Json::Null => Ok(Value::Unit),
            _ => input_err(path, format!("expected null for unit, found {json}")),
        },
        Ty::Tensor(..) => match json {
            Json::Array(items) if items.len() >= 2 => seq_from_json(items, ty, path, 0),
            _ => input_err(path, format!("expected an array for {ty}, found {json}")),
        },
        Ty::Sum(l, r) => {
            let obj = match json {
                Json::Object(o) if o.len() == 1 => o,
                _ => return input_err(path, format!("expected {{\"inl\": ..}} or {{\"inr\": ..}} for {ty}")),
            };
            if let Some(v) = obj.get("inl") {
                Ok(Value::inl(value_from_json(v, l, &format!("{path}.inl"))?))
            } else if let Some(v) = obj.get("inr") {
                Ok(Value::inr(value_from_json(v, r, &format!("{path}.inr"))?))
            } else {
                input_err(path, format!("expected {{\"inl\": ..}} or {{\"inr\": ..}} for {ty}"))
            }
        }
        Ty::Hole => input_err(path, "input type is not fully known"),
    }
}

fn seq_from_json(items: &[Json], ty: &Ty, path: &str, offset: usize) -> Result<ApproxValue, InputError> {
    if items.len() == 1 {
        return value_from_json(&items[0], ty, &format!("{path}[{offset}]"));
    }
    match ty {
        Ty::Tensor(a, b) => Ok(Value::pair(
            value_from_json(&items[0], a, &format!("{path}[{offset}]"))?,
            seq_from_json(&items[1..], b, path, offset + 1)?,
        )),
        Ty::Disc(t) => seq_from_json(items, t, path, offset),
        _ => input_err(path, format!("too many components for {ty}")),
    }
}

/// Reads a run's inputs from a JSON object keyed by parameter name, or from
/// an array in parameter order.
pub fn env_from_json(json: &Json, params: &[crate::syntax::Param]) -> Result<Env<f64>, InputError> {
    use crate::syntax::ParamKind;
    let mut env = Env::new();
    for (i, p) in params.iter().enumerate() {
        let v = match json {
            Json::Object(o) => o.get(&*p.name),
            Json::Array(a) => a.get(i),
            _ => return input_err("inputs", "expected an object keyed by parameter name"),
        };
        let Some(v) = v else {
            return input_err(&p.name, "missing input");
        };
        let v = value_from_json(v, &p.ty, &p.name)?;
        match p.kind {
            ParamKind::Linear => env.lin.insert(p.name.clone(), v),
            ParamKind::Discrete => env.disc.insert(p.name.clone(), v),
        };
    }
    if let Json::Object(o) = json {
        if let Some(k) = o.keys().find(|k| !params.iter().any(|p| &*p.name == k.as_str())) {
            return input_err(k, "not a parameter of this definition");
        }
    }
    Ok(env)
}
