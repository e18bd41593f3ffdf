use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::numerics::ArithOp;

/// Identifier. Cheap to clone and shareable across threads.
pub type Name = Arc<str>;

/// Byte range in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based line and column of the start of the span.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let upto = &src[..self.start.min(src.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Num,
    Unit,
    Tensor(Arc<Ty>, Arc<Ty>),
    Sum(Arc<Ty>, Arc<Ty>),
    /// Discrete (freely duplicable, zero-error) version of a type.
    Disc(Arc<Ty>),
    /// Unknown side of an unannotated injection. Only appears while inference
    /// is in progress; finished derivations never contain it.
    Hole,
}

impl Ty {
    pub fn tensor(a: Ty, b: Ty) -> Ty {
        Ty::Tensor(Arc::new(a), Arc::new(b))
    }

    pub fn sum(a: Ty, b: Ty) -> Ty {
        Ty::Sum(Arc::new(a), Arc::new(b))
    }

    /// Discrete wrapper, normalized: `!!t = !t` and `!(a * b) = !a * !b`.
    pub fn disc(t: Ty) -> Ty {
        match t {
            Ty::Disc(_) => t,
            Ty::Tensor(a, b) => Ty::tensor(Ty::disc((*a).clone()), Ty::disc((*b).clone())),
            other => Ty::Disc(Arc::new(other)),
        }
    }

    /// `t^n`, right-nested: `t^1 = t`, `t^n = t * t^(n-1)`.
    pub fn power(t: Ty, n: usize) -> Ty {
        assert!(n >= 1, "vector length must be positive");
        let mut acc = t.clone();
        for _ in 1..n {
            acc = Ty::tensor(t.clone(), acc);
        }
        acc
    }

    /// `num^n`.
    pub fn vector(n: usize) -> Ty {
        Ty::power(Ty::Num, n)
    }

    pub fn is_discrete(&self) -> bool {
        match self {
            Ty::Disc(_) => true,
            Ty::Tensor(a, b) => a.is_discrete() && b.is_discrete(),
            _ => false,
        }
    }

    pub fn has_hole(&self) -> bool {
        match self {
            Ty::Hole => true,
            Ty::Num | Ty::Unit => false,
            Ty::Tensor(a, b) | Ty::Sum(a, b) => a.has_hole() || b.has_hole(),
            Ty::Disc(t) => t.has_hole(),
        }
    }

    /// The type with every discrete marker removed.
    pub fn erase(&self) -> Ty {
        match self {
            Ty::Num | Ty::Unit | Ty::Hole => self.clone(),
            Ty::Tensor(a, b) => Ty::tensor(a.erase(), b.erase()),
            Ty::Sum(a, b) => Ty::sum(a.erase(), b.erase()),
            Ty::Disc(t) => t.erase(),
        }
    }

    /// Most specific common instance, filling holes from either side.
    pub fn unify(&self, other: &Ty) -> Option<Ty> {
        match (self, other) {
            (Ty::Hole, t) | (t, Ty::Hole) => Some(t.clone()),
            (Ty::Num, Ty::Num) => Some(Ty::Num),
            (Ty::Unit, Ty::Unit) => Some(Ty::Unit),
            (Ty::Tensor(a, b), Ty::Tensor(c, d)) => Some(Ty::tensor(a.unify(c)?, b.unify(d)?)),
            (Ty::Sum(a, b), Ty::Sum(c, d)) => Some(Ty::sum(a.unify(c)?, b.unify(d)?)),
            (Ty::Disc(a), Ty::Disc(b)) => Some(Ty::disc(a.unify(b)?)),
            _ => None,
        }
    }

    /// If `self` is `a^k` for some `k >= 2`, returns `(a, k)` with the
    /// shortest such `a`.
    pub fn as_power(&self) -> Option<(&Ty, usize)> {
        let Ty::Tensor(a, _) = self else { return None };
        let mut k = 1;
        let mut cur = self;
        while let Ty::Tensor(head, rest) = cur {
            if **head != **a {
                return None;
            }
            k += 1;
            cur = rest;
            if *cur == **a {
                return Some((a, k));
            }
        }
        None
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: sum, 1: product, 2: prefix `!`, 3: postfix `^n`
        let wrap = |f: &mut fmt::Formatter<'_>, own: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if prec > own {
                f.write_str("(")?;
                body(f)?;
                f.write_str(")")
            } else {
                body(f)
            }
        };
        match self {
            Ty::Num => f.write_str("num"),
            Ty::Unit => f.write_str("unit"),
            Ty::Hole => f.write_str("_"),
            Ty::Sum(a, b) => wrap(f, 0, &|f| {
                a.fmt_prec(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 0)
            }),
            Ty::Tensor(a, b) => match self.as_power() {
                Some((base, k)) => wrap(f, 3, &|f| {
                    base.fmt_prec(f, 4)?;
                    write!(f, "^{k}")
                }),
                None => wrap(f, 1, &|f| {
                    a.fmt_prec(f, 2)?;
                    f.write_str(" * ")?;
                    b.fmt_prec(f, 1)
                }),
            },
            Ty::Disc(t) => wrap(f, 2, &|f| {
                f.write_str("!")?;
                t.fmt_prec(f, 2)
            }),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    /// Multiplication whose first operand is discrete; all error goes to the
    /// second operand.
    DMul,
    Div,
}

impl PrimOp {
    pub const ALL: [PrimOp; 5] = [PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::DMul, PrimOp::Div];

    pub fn keyword(self) -> &'static str {
        match self {
            PrimOp::Add => "add",
            PrimOp::Sub => "sub",
            PrimOp::Mul => "mul",
            PrimOp::DMul => "dmul",
            PrimOp::Div => "div",
        }
    }

    /// The arithmetic both interpreters perform (`dmul` is plain multiplication).
    pub fn arith(self) -> ArithOp {
        match self {
            PrimOp::Add => ArithOp::Add,
            PrimOp::Sub => ArithOp::Sub,
            PrimOp::Mul | PrimOp::DMul => ArithOp::Mul,
            PrimOp::Div => ArithOp::Div,
        }
    }
}

impl fmt::Display for PrimOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Expression with its source span. Equality ignores spans.
#[derive(Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

// Generated benchmarks nest thousands of `let`s deep, so the structural
// traversals below run on a growable stack.
impl Clone for Expr {
    fn clone(&self) -> Self {
        crate::deep(|| Expr {
            kind: self.kind.clone(),
            span: self.span,
        })
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        crate::deep(|| self.kind == other.kind)
    }
}

impl Drop for Expr {
    fn drop(&mut self) {
        let kind = std::mem::replace(&mut self.kind, ExprKind::Unit);
        crate::deep(move || drop(kind));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    LinVar(Name),
    DiscVar(Name),
    Unit,
    Bang(Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    /// Injection with an optional ascription of the whole sum type.
    Inl(Box<Expr>, Option<Ty>),
    Inr(Box<Expr>, Option<Ty>),
    Let(Name, Box<Expr>, Box<Expr>),
    LetPair(Name, Name, Box<Expr>, Box<Expr>),
    DLet(Name, Box<Expr>, Box<Expr>),
    DLetPair(Name, Name, Box<Expr>, Box<Expr>),
    Case(Box<Expr>, Name, Box<Expr>, Name, Box<Expr>),
    Prim(PrimOp, Box<Expr>, Box<Expr>),
    /// Call of an earlier definition; removed by `expand_defs`.
    Call(Name, Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Expression with an empty span, for programmatic construction.
    pub fn synth(kind: ExprKind) -> Self {
        Expr::new(kind, Span::default())
    }

    pub fn lin(name: &str) -> Self {
        Expr::synth(ExprKind::LinVar(name.into()))
    }

    pub fn disc(name: &str) -> Self {
        Expr::synth(ExprKind::DiscVar(name.into()))
    }

    pub fn prim(op: PrimOp, a: Expr, b: Expr) -> Self {
        Expr::synth(ExprKind::Prim(op, Box::new(a), Box::new(b)))
    }

    pub fn let_(x: &str, bound: Expr, body: Expr) -> Self {
        Expr::synth(ExprKind::Let(x.into(), Box::new(bound), Box::new(body)))
    }

    pub fn is_var(&self) -> bool {
        matches!(self.kind, ExprKind::LinVar(_) | ExprKind::DiscVar(_))
    }

    /// Direct subexpressions, in source order.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            LinVar(_) | DiscVar(_) | Unit => vec![],
            Bang(e) | Inl(e, _) | Inr(e, _) => vec![e],
            Pair(a, b) | Prim(_, a, b) => vec![a, b],
            Let(_, a, b) | LetPair(_, _, a, b) | DLet(_, a, b) | DLetPair(_, _, a, b) => vec![a, b],
            Case(s, _, l, _, r) => vec![s, l, r],
            Call(_, args) => args.iter().collect(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            n += 1;
            stack.extend(e.children());
        }
        n
    }

    /// Every identifier occurring in the expression, bound or free.
    pub fn names(&self, out: &mut std::collections::HashSet<Name>) {
        use ExprKind::*;
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match &e.kind {
                LinVar(x) | DiscVar(x) | Let(x, ..) | DLet(x, ..) | Call(x, _) => {
                    out.insert(x.clone());
                }
                LetPair(x, y, ..) | DLetPair(x, y, ..) | Case(_, x, _, y, _) => {
                    out.insert(x.clone());
                    out.insert(y.clone());
                }
                _ => {}
            }
            stack.extend(e.children());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Linear,
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Name,
    pub ty: Ty,
    pub kind: ParamKind,
}

#[derive(Debug, Clone)]
pub struct TopLevelDef {
    pub name: Name,
    pub params: Vec<Param>,
    pub body: Expr,
    pub span: Span,
}

impl PartialEq for TopLevelDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params && self.body == other.body
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub defs: Vec<TopLevelDef>,
    /// Definition analyzed by default: the last one unless chosen explicitly.
    pub main: Name,
}

impl Program {
    pub fn def(&self, name: &str) -> Option<&TopLevelDef> {
        self.defs.iter().find(|d| &*d.name == name)
    }

    /// Same program with a different entry point.
    pub fn with_main(mut self, name: &str) -> Option<Program> {
        let def = self.def(name)?;
        self.main = def.name.clone();
        Some(self)
    }
}
