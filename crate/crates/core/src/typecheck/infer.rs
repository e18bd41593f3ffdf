use std::collections::{BTreeMap, HashMap};

use super::context::{ContextSkeleton, DiscreteContext, LinearContext};
use super::{Derivation, Grade, Rule, TypeError, TypeErrorKind};
use crate::syntax::{Expr, ExprKind, Name, PrimOp, Span, Ty};

/// Output of inference: the linear variables actually used with their
/// tightest grades, the program's type, and the derivation that justifies
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub ctx: LinearContext,
    pub ty: Ty,
    pub derivation: Derivation,
}

/// Infers the type of `e` and the least grade each linear variable needs.
/// Unused skeleton entries do not appear in the result.
pub fn infer(disc: &DiscreteContext, skel: &ContextSkeleton, e: &Expr) -> Result<InferenceResult, TypeError> {
    let mut inf = Infer::default();
    for (z, t) in disc {
        inf.push(z, Kind::Discrete, t.clone());
    }
    for (x, t) in skel {
        inf.push(x, Kind::Linear, t.clone());
    }
    let (ctx, ty, derivation) = inf.go(e)?;
    if ty.has_hole() {
        return Err(TypeError::new(
            TypeErrorKind::AmbiguousType,
            format!("cannot determine the full result type {ty}; annotate the injection"),
            e.span,
        ));
    }
    Ok(InferenceResult {
        ctx: ctx.into_iter().map(|(n, u)| (n, u.ty, u.grade)).collect(),
        ty,
        derivation,
    })
}

/// Infers against a declared context: the flag says whether the inferred
/// context is a subcontext of the declaration.
pub fn check_declared(
    disc: &DiscreteContext,
    declared: &LinearContext,
    e: &Expr,
) -> Result<(bool, InferenceResult), TypeError> {
    let res = infer(disc, &declared.skeleton(), e)?;
    Ok((super::is_subcontext(&res.ctx, declared), res))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Linear,
    Discrete,
}

struct Use {
    ty: Ty,
    grade: Grade,
    span: Span,
}

type Ctx = BTreeMap<Name, Use>;

#[derive(Default)]
struct Infer {
    scope: HashMap<Name, Vec<(Kind, Ty)>>,
}

type Judgment = (Ctx, Ty, Derivation);

fn err<T>(kind: TypeErrorKind, msg: String, span: Span) -> Result<T, TypeError> {
    Err(TypeError::new(kind, msg, span))
}

fn add_grade(q: &Grade, ctx: &mut Ctx) {
    if !q.is_zero() {
        for u in ctx.values_mut() {
            u.grade = q.add(&u.grade);
        }
    }
}

/// Disjoint union; a shared name is a linearity violation.
fn union(a: Ctx, b: Ctx) -> Result<Ctx, TypeError> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (n, u) in small {
        if let Some(prev) = big.get(&n) {
            let span = if prev.span.start > u.span.start {
                prev.span
            } else {
                u.span
            };
            return err(
                TypeErrorKind::LinearityViolation,
                format!("linearity violation: {n} used twice"),
                span,
            );
        }
        big.insert(n, u);
    }
    Ok(big)
}

/// Pointwise max over the union of the domains.
fn max_ctx(a: Ctx, b: Ctx) -> Result<Ctx, TypeError> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (n, u) in small {
        match big.get_mut(&n) {
            Some(prev) => {
                if prev.ty != u.ty {
                    return err(
                        TypeErrorKind::TypeMismatch,
                        format!("`{n}` is used at types {} and {} in the two branches", prev.ty, u.ty),
                        u.span,
                    );
                }
                if u.grade > prev.grade {
                    prev.grade = u.grade;
                }
            }
            None => {
                big.insert(n, u);
            }
        }
    }
    Ok(big)
}

fn take_grade(ctx: &mut Ctx, x: &str) -> Grade {
    ctx.remove(x).map(|u| u.grade).unwrap_or_else(Grade::zero)
}

impl Infer {
    fn push(&mut self, x: &Name, k: Kind, t: Ty) {
        self.scope.entry(x.clone()).or_default().push((k, t));
    }

    fn pop(&mut self, x: &Name) {
        if let Some(v) = self.scope.get_mut(x) {
            v.pop();
        }
    }

    fn lookup(&self, x: &Name, want: Kind, span: Span) -> Result<Ty, TypeError> {
        match self.scope.get(x).and_then(|v| v.last()) {
            None => err(TypeErrorKind::UnboundVariable, format!("unbound variable `{x}`"), span),
            Some((k, t)) if *k == want => Ok(t.clone()),
            Some((k, _)) => err(
                TypeErrorKind::KindError,
                format!(
                    "`{x}` is {} but is used as a {} variable",
                    if *k == Kind::Linear { "linear" } else { "discrete" },
                    if want == Kind::Linear { "linear" } else { "discrete" },
                ),
                span,
            ),
        }
    }

    /// Type checks `body` with `binders` in scope.
    fn under(&mut self, binders: &[(&Name, Kind, Ty)], body: &Expr) -> Result<Judgment, TypeError> {
        for (x, k, t) in binders {
            self.push(x, *k, t.clone());
        }
        let out = self.go(body);
        for (x, _, _) in binders {
            self.pop(x);
        }
        out
    }

    fn go(&mut self, e: &Expr) -> Result<Judgment, TypeError> {
        crate::deep(|| self.go_inner(e))
    }

    fn go_inner(&mut self, e: &Expr) -> Result<Judgment, TypeError> {
        use ExprKind::*;
        let span = e.span;
        let node = |rule, ty: &Ty, children| Derivation::new(rule, ty.clone(), span, children);
        match &e.kind {
            LinVar(x) => {
                let ty = self.lookup(x, Kind::Linear, span)?;
                let mut ctx = Ctx::new();
                ctx.insert(
                    x.clone(),
                    Use {
                        ty: ty.clone(),
                        grade: Grade::zero(),
                        span,
                    },
                );
                let d = node(Rule::Var(x.clone()), &ty, vec![]);
                Ok((ctx, ty, d))
            }
            DiscVar(z) => {
                let ty = self.lookup(z, Kind::Discrete, span)?;
                let d = node(Rule::DVar(z.clone()), &ty, vec![]);
                Ok((Ctx::new(), ty, d))
            }
            Unit => Ok((Ctx::new(), Ty::Unit, node(Rule::Unit, &Ty::Unit, vec![]))),
            Bang(a) => {
                let (ctx, t, d) = self.go(a)?;
                let ty = Ty::disc(t);
                Ok((ctx, ty.clone(), node(Rule::Disc, &ty, vec![d])))
            }
            Pair(a, b) => {
                let (c1, t1, d1) = self.go(a)?;
                let (c2, t2, d2) = self.go(b)?;
                let ty = Ty::tensor(t1, t2);
                Ok((union(c1, c2)?, ty.clone(), node(Rule::Pair, &ty, vec![d1, d2])))
            }
            Inl(a, ann) | Inr(a, ann) => {
                let left = matches!(e.kind, Inl(..));
                let (ctx, t, d) = self.go(a)?;
                let bare = if left {
                    Ty::sum(t.clone(), Ty::Hole)
                } else {
                    Ty::sum(Ty::Hole, t.clone())
                };
                let ty = match ann {
                    None => bare,
                    Some(ann) => match bare.unify(ann) {
                        Some(ty) => ty,
                        None => {
                            return err(
                                TypeErrorKind::TypeMismatch,
                                format!("injection of {t} does not fit the annotation {ann}"),
                                span,
                            )
                        }
                    },
                };
                let rule = if left { Rule::Inl } else { Rule::Inr };
                Ok((ctx, ty.clone(), node(rule, &ty, vec![d])))
            }
            Let(x, a, b) => {
                let (mut c1, t1, d1) = self.go(a)?;
                let (mut c2, t2, d2) = self.under(&[(x, Kind::Linear, t1)], b)?;
                let r = take_grade(&mut c2, x);
                add_grade(&r, &mut c1);
                let rule = Rule::Let {
                    var: x.clone(),
                    grade: r,
                };
                Ok((union(c1, c2)?, t2.clone(), node(rule, &t2, vec![d1, d2])))
            }
            LetPair(x, y, a, b) => {
                let (mut c1, t1, d1) = self.go(a)?;
                let (l, r) = self.components(&t1, a.span)?;
                let (mut c2, t2, d2) = self.under(&[(x, Kind::Linear, l), (y, Kind::Linear, r)], b)?;
                let g = take_grade(&mut c2, x).max(take_grade(&mut c2, y));
                add_grade(&g, &mut c1);
                let rule = Rule::LetPair {
                    left: x.clone(),
                    right: y.clone(),
                    grade: g,
                };
                Ok((union(c1, c2)?, t2.clone(), node(rule, &t2, vec![d1, d2])))
            }
            DLet(z, a, b) => {
                let (c1, t1, d1) = self.go(a)?;
                if !t1.is_discrete() {
                    return err(
                        TypeErrorKind::KindError,
                        format!("dlet needs a discrete value, found {t1}"),
                        a.span,
                    );
                }
                let (c2, t2, d2) = self.under(&[(z, Kind::Discrete, t1)], b)?;
                let rule = Rule::DLet { var: z.clone() };
                Ok((union(c1, c2)?, t2.clone(), node(rule, &t2, vec![d1, d2])))
            }
            DLetPair(x, y, a, b) => {
                let (c1, t1, d1) = self.go(a)?;
                let (l, r) = self.components(&t1, a.span)?;
                if !t1.is_discrete() {
                    return err(
                        TypeErrorKind::KindError,
                        format!("dlet needs a discrete value, found {t1}"),
                        a.span,
                    );
                }
                let (c2, t2, d2) = self.under(&[(x, Kind::Discrete, l), (y, Kind::Discrete, r)], b)?;
                let rule = Rule::DLetPair {
                    left: x.clone(),
                    right: y.clone(),
                };
                Ok((union(c1, c2)?, t2.clone(), node(rule, &t2, vec![d1, d2])))
            }
            Case(s, x, l, y, r) => {
                let (mut c1, ts, d1) = self.go(s)?;
                let Ty::Sum(tl, tr) = &ts else {
                    return err(
                        TypeErrorKind::TypeMismatch,
                        format!("case needs a value of sum type, found {ts}"),
                        s.span,
                    );
                };
                let (mut c2, t2, d2) = self.under(&[(x, Kind::Linear, (**tl).clone())], l)?;
                let (mut c3, t3, d3) = self.under(&[(y, Kind::Linear, (**tr).clone())], r)?;
                let Some(ty) = t2.unify(&t3) else {
                    return err(
                        TypeErrorKind::BranchMismatch,
                        format!("case branches disagree: {t2} versus {t3}"),
                        span,
                    );
                };
                let q = take_grade(&mut c2, x).max(take_grade(&mut c3, y));
                add_grade(&q, &mut c1);
                let ctx = union(c1, max_ctx(c2, c3)?)?;
                let rule = Rule::Case {
                    left: x.clone(),
                    right: y.clone(),
                    grade: q,
                };
                Ok((ctx, ty.clone(), node(rule, &ty, vec![d1, d2, d3])))
            }
            Prim(op, a, b) => {
                let (ca, da) = match op {
                    PrimOp::DMul => self.discrete_operand(*op, a)?,
                    _ => self.linear_operand(*op, a, op_charge(*op))?,
                };
                let (cb, db) = self.linear_operand(*op, b, op_charge(*op))?;
                let ty = match op {
                    PrimOp::Div => Ty::sum(Ty::Num, Ty::Unit),
                    _ => Ty::Num,
                };
                Ok((union(ca, cb)?, ty.clone(), node(Rule::Prim(*op), &ty, vec![da, db])))
            }
            Call(f, _) => err(
                TypeErrorKind::UnexpandedCall,
                format!("call to `{f}` must be inlined before type checking"),
                span,
            ),
        }
    }

    fn components(&self, t: &Ty, span: Span) -> Result<(Ty, Ty), TypeError> {
        match t {
            Ty::Tensor(l, r) => Ok(((**l).clone(), (**r).clone())),
            _ => err(
                TypeErrorKind::TypeMismatch,
                format!("pattern (x, y) needs a pair, found {t}"),
                span,
            ),
        }
    }

    /// A linear `num` operand charged `charge`. Compound operands are typed
    /// as if let-bound to a fresh variable.
    fn linear_operand(&mut self, op: PrimOp, a: &Expr, charge: Grade) -> Result<(Ctx, Derivation), TypeError> {
        if let ExprKind::DiscVar(z) = &a.kind {
            return err(
                TypeErrorKind::KindError,
                format!("`{z}` is discrete; {op} needs a linear operand here"),
                a.span,
            );
        }
        let (mut ctx, t, d) = self.go(a)?;
        if t != Ty::Num {
            let kind = if t.has_hole() {
                TypeErrorKind::AmbiguousType
            } else {
                TypeErrorKind::TypeMismatch
            };
            return err(kind, format!("{op} expects num, found {t}"), a.span);
        }
        add_grade(&charge, &mut ctx);
        Ok((ctx, d))
    }

    /// First operand of `dmul`: a discrete `num`, never charged.
    fn discrete_operand(&mut self, op: PrimOp, a: &Expr) -> Result<(Ctx, Derivation), TypeError> {
        if let ExprKind::LinVar(x) = &a.kind {
            return err(
                TypeErrorKind::KindError,
                format!("`{x}` is linear; the first operand of {op} must be discrete"),
                a.span,
            );
        }
        let (ctx, t, d) = self.go(a)?;
        if t != Ty::disc(Ty::Num) {
            let kind = if t.erase() == Ty::Num {
                TypeErrorKind::KindError
            } else {
                TypeErrorKind::TypeMismatch
            };
            return err(
                kind,
                format!("the first operand of {op} must have type !num, found {t}"),
                a.span,
            );
        }
        Ok((ctx, d))
    }
}

/// Grade charged to each linear operand of `op`.
pub fn op_charge(op: PrimOp) -> Grade {
    match op {
        PrimOp::Add | PrimOp::Sub | PrimOp::DMul => Grade::eps(),
        PrimOp::Mul | PrimOp::Div => Grade::half_eps(),
    }
}
