use std::fmt::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::syntax::{parse_program, Program};

/// The benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BenchmarkKind {
    DotProd,
    Horner,
    PolyVal,
    MatVecMul,
    Sum,
    LinSolve2,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 6] = [
        BenchmarkKind::DotProd,
        BenchmarkKind::Horner,
        BenchmarkKind::PolyVal,
        BenchmarkKind::MatVecMul,
        BenchmarkKind::Sum,
        BenchmarkKind::LinSolve2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::DotProd => "DotProd",
            BenchmarkKind::Horner => "Horner",
            BenchmarkKind::PolyVal => "PolyVal",
            BenchmarkKind::MatVecMul => "MatVecMul",
            BenchmarkKind::Sum => "Sum",
            BenchmarkKind::LinSolve2 => "LinSolve2",
        }
    }

    /// The input that carries all of the backward error.
    pub fn linear_input(self) -> &'static str {
        match self {
            BenchmarkKind::DotProd | BenchmarkKind::Sum => "x",
            BenchmarkKind::Horner | BenchmarkKind::PolyVal => "a",
            BenchmarkKind::MatVecMul => "M",
            BenchmarkKind::LinSolve2 => "A",
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchmarkKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::UnknownBenchmark(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown benchmark `{0}` (expected DotProd, Horner, PolyVal, MatVecMul, Sum or LinSolve2)")]
    UnknownBenchmark(String),
    #[error("{0} does not support size {1}")]
    BadSize(BenchmarkKind, usize),
}

/// A benchmark instance. `size` is the vector length for DotProd and Sum,
/// the degree for Horner and PolyVal, the side of the square matrix for
/// MatVecMul, and always 2 for LinSolve2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BenchmarkSpec {
    pub kind: BenchmarkKind,
    pub size: usize,
}

impl BenchmarkSpec {
    pub fn new(kind: BenchmarkKind, size: usize) -> Result<Self, HarnessError> {
        let ok = match kind {
            BenchmarkKind::LinSolve2 => size == 2,
            _ => size >= 1,
        };
        if !ok {
            return Err(HarnessError::BadSize(kind, size));
        }
        Ok(BenchmarkSpec { kind, size })
    }

    /// Size as printed in tables: `50x50` for matrices.
    pub fn size_label(&self) -> String {
        match self.kind {
            BenchmarkKind::MatVecMul | BenchmarkKind::LinSolve2 => format!("{0}x{0}", self.size),
            _ => self.size.to_string(),
        }
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.size_label())
    }
}

const LINSOLVE2: &str = "\
LinSolve2 (A: (num^2)^2) (b: num^2) :=
  let (r0, r1) = A in
  let (a00, a01) = r0 in
  let (a10, a11) = r1 in
  let (b0, b1) = b in
  let x0_or_err = div b0 a00 in
  case x0_or_err of
    inl (x0) =>
      dlet d_x0 = !x0 in
      let s0 = dmul d_x0 a10 in
      let s1 = sub b1 s0 in
      let x1_or_err = div s1 a11 in
      case x1_or_err of
        inl (x1) => inl (d_x0, x1)
      | inr (err) => inr err
  | inr (err) => inr err
";

fn vec_ty(n: usize) -> String {
    if n == 1 {
        "num".into()
    } else {
        format!("num^{n}")
    }
}

/// Emits `let (p0, p_t1) = src in let (p1, p_t2) = p_t1 in ...` and returns
/// the component names. A length-one vector is the variable itself.
fn destructure(out: &mut String, kw: &str, src: &str, prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        return vec![src.to_string()];
    }
    let mut names = Vec::with_capacity(n);
    let mut cur = src.to_string();
    for i in 0..n - 1 {
        let head = format!("{prefix}{i}");
        let tail = if i == n - 2 {
            format!("{prefix}{}", n - 1)
        } else {
            format!("{prefix}_t{}", i + 1)
        };
        let _ = writeln!(out, "  {kw} ({head}, {tail}) = {cur} in");
        names.push(head);
        cur = tail;
    }
    names.push(cur);
    names
}

/// Left-to-right sum of `terms`. Intermediate sums are bound to
/// `{prefix}1`, `{prefix}2`, ...; the returned expression is the last one.
fn fold_add(out: &mut String, terms: &[String], prefix: &str) -> String {
    let mut acc = terms[0].clone();
    for (i, t) in terms.iter().enumerate().skip(1) {
        let e = format!("add {acc} {t}");
        if i + 1 == terms.len() {
            return e;
        }
        let name = format!("{prefix}{i}");
        let _ = writeln!(out, "  let {name} = {e} in");
        acc = name;
    }
    acc
}

/// Right-nested tuple expression.
fn tuple(items: &[String]) -> String {
    match items {
        [x] => x.clone(),
        [x, rest @ ..] => format!("({x}, {})", tuple(rest)),
        [] => "()".into(),
    }
}

/// Source text of a benchmark. Vectors are right-nested tensors, sums are
/// sequential left folds, and the inputs that do not carry error are
/// discrete so that every multiplication is a `dmul`.
pub fn gen_source(spec: &BenchmarkSpec) -> String {
    let n = spec.size;
    let mut s = String::new();
    match spec.kind {
        BenchmarkKind::DotProd => {
            let _ = writeln!(s, "DotProd (x: {0}) {{y: {0}}} :=", vec_ty(n));
            let xs = destructure(&mut s, "let", "x", "x", n);
            let ys = destructure(&mut s, "dlet", "y", "y", n);
            let mut terms = Vec::new();
            for i in 0..n {
                let p = format!("p{i}");
                let e = format!("dmul {} {}", ys[i], xs[i]);
                if n == 1 {
                    let _ = writeln!(s, "  {e}");
                    return s;
                }
                let _ = writeln!(s, "  let {p} = {e} in");
                terms.push(p);
            }
            let body = fold_add(&mut s, &terms, "s");
            let _ = writeln!(s, "  {body}");
        }
        BenchmarkKind::Sum => {
            let _ = writeln!(s, "Sum (x: {}) :=", vec_ty(n));
            let xs = destructure(&mut s, "let", "x", "x", n);
            let body = fold_add(&mut s, &xs, "s");
            let _ = writeln!(s, "  {body}");
        }
        BenchmarkKind::Horner => {
            let _ = writeln!(s, "Horner (a: {}) {{z: num}} :=", vec_ty(n + 1));
            let a = destructure(&mut s, "let", "a", "a", n + 1);
            let mut acc = a[n].clone();
            for k in (0..n).rev() {
                let _ = writeln!(s, "  let m{k} = dmul z {acc} in");
                let e = format!("add {} m{k}", a[k]);
                if k == 0 {
                    let _ = writeln!(s, "  {e}");
                    return s;
                }
                let _ = writeln!(s, "  let h{k} = {e} in");
                acc = format!("h{k}");
            }
        }
        BenchmarkKind::PolyVal => {
            let _ = writeln!(s, "PolyVal (a: {}) {{z: num}} :=", vec_ty(n + 1));
            let a = destructure(&mut s, "let", "a", "a", n + 1);
            let mut terms = vec![a[0].clone()];
            for (k, ak) in a.iter().enumerate().skip(1) {
                let mut acc = ak.clone();
                for j in 1..=k {
                    let name = format!("t{k}_{j}");
                    let _ = writeln!(s, "  let {name} = dmul z {acc} in");
                    acc = name;
                }
                terms.push(acc);
            }
            let body = fold_add(&mut s, &terms, "s");
            let _ = writeln!(s, "  {body}");
        }
        BenchmarkKind::MatVecMul => {
            let row = vec_ty(n);
            let mat = if n == 1 { row.clone() } else { format!("({row})^{n}") };
            let _ = writeln!(s, "MatVecMul (M: {mat}) {{v: {row}}} :=");
            let rows = destructure(&mut s, "let", "M", "r", n);
            let v = destructure(&mut s, "dlet", "v", "v", n);
            let mut outs = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                let m = destructure(&mut s, "let", r, &format!("m{i}_"), n);
                let mut terms = Vec::new();
                for j in 0..n {
                    let p = format!("p{i}_{j}");
                    let _ = writeln!(s, "  let {p} = dmul {} {} in", v[j], m[j]);
                    terms.push(p);
                }
                let u = format!("u{i}");
                let e = fold_add(&mut s, &terms, &format!("s{i}_"));
                if terms.len() == 1 {
                    outs.push(e);
                } else {
                    let _ = writeln!(s, "  let {u} = {e} in");
                    outs.push(u);
                }
            }
            let _ = writeln!(s, "  {}", tuple(&outs));
        }
        BenchmarkKind::LinSolve2 => s.push_str(LINSOLVE2),
    }
    s
}

/// The benchmark as a parsed program.
pub fn gen_benchmark(spec: &BenchmarkSpec) -> Program {
    let src = gen_source(spec);
    parse_program(&src).unwrap_or_else(|e| panic!("generated {spec} does not parse: {e}\n{src}"))
}
