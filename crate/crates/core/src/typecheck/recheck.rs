//! Declarative checking of a finished derivation against a given graded
//! context, independent of the inference algorithm. Contexts are split top
//! down: each premise receives what the rule allows it, and the variables a
//! premise actually consumes are withheld from its siblings.

use std::collections::HashSet;

use super::context::{DiscreteContext, LinearContext};
use super::infer::op_charge;
use super::{Derivation, Grade, Rule};
use crate::syntax::{Name, PrimOp, Span, Ty};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct RecheckError {
    pub message: String,
    pub span: Span,
}

/// Checks that `d` derives `disc | ctx |- e : d.ty`.
pub fn recheck(d: &Derivation, disc: &DiscreteContext, ctx: &LinearContext) -> Result<(), RecheckError> {
    check(d, disc, ctx).map(|_| ())
}

type Used = HashSet<Name>;

fn fail<T>(d: &Derivation, message: String) -> Result<T, RecheckError> {
    Err(RecheckError { message, span: d.span })
}

fn without(g: &LinearContext, used: &Used) -> LinearContext {
    g.iter()
        .filter(|(n, _, _)| !used.contains(*n))
        .map(|(n, t, r)| (n.clone(), t.clone(), r.clone()))
        .collect()
}

fn bind_linear(
    g: &LinearContext,
    phi: &DiscreteContext,
    xs: &[(&Name, Ty, &Grade)],
) -> (LinearContext, DiscreteContext) {
    let mut g = g.clone();
    let mut phi = phi.clone();
    for (x, t, r) in xs {
        phi.remove(*x);
        g.insert((*x).clone(), t.clone(), (*r).clone());
    }
    (g, phi)
}

fn bind_discrete(g: &LinearContext, phi: &DiscreteContext, zs: &[(&Name, Ty)]) -> (LinearContext, DiscreteContext) {
    let mut g = g.clone();
    let mut phi = phi.clone();
    for (z, t) in zs {
        g.remove(z);
        phi.insert((*z).clone(), t.clone());
    }
    (g, phi)
}

fn compatible(a: &Ty, b: &Ty) -> bool {
    a.unify(b).is_some()
}

fn check(d: &Derivation, phi: &DiscreteContext, g: &LinearContext) -> Result<Used, RecheckError> {
    crate::deep(|| check_inner(d, phi, g))
}

fn check_inner(d: &Derivation, phi: &DiscreteContext, g: &LinearContext) -> Result<Used, RecheckError> {
    let arity = match &d.rule {
        Rule::Var(_) | Rule::DVar(_) | Rule::Unit => 0,
        Rule::Inl | Rule::Inr | Rule::Disc => 1,
        Rule::Case { .. } => 3,
        _ => 2,
    };
    if d.children.len() != arity {
        return fail(d, format!("{} node with {} premises", d.rule.name(), d.children.len()));
    }
    let c = &d.children;
    match &d.rule {
        Rule::Var(x) => match g.get(x) {
            Some((t, _)) if *t == d.ty => Ok(Used::from([x.clone()])),
            Some((t, _)) => fail(d, format!("`{x}` has type {t}, node says {}", d.ty)),
            None => fail(d, format!("linear `{x}` not available")),
        },
        Rule::DVar(z) => match phi.get(z) {
            Some(t) if *t == d.ty => Ok(Used::new()),
            _ => fail(d, format!("discrete `{z}` not available at {}", d.ty)),
        },
        Rule::Unit => {
            if d.ty == Ty::Unit {
                Ok(Used::new())
            } else {
                fail(d, "unit node with non-unit type".into())
            }
        }
        Rule::Disc => {
            let used = check(&c[0], phi, g)?;
            if d.ty == Ty::disc(c[0].ty.clone()) {
                Ok(used)
            } else {
                fail(d, format!("! of {} cannot have type {}", c[0].ty, d.ty))
            }
        }
        Rule::Inl | Rule::Inr => {
            let used = check(&c[0], phi, g)?;
            let ok = match (&d.ty, &d.rule) {
                (Ty::Sum(l, _), Rule::Inl) => compatible(l, &c[0].ty),
                (Ty::Sum(_, r), Rule::Inr) => compatible(r, &c[0].ty),
                _ => false,
            };
            if ok {
                Ok(used)
            } else {
                fail(d, format!("injection of {} cannot have type {}", c[0].ty, d.ty))
            }
        }
        Rule::Pair => {
            let mut u1 = check(&c[0], phi, g)?;
            let u2 = check(&c[1], phi, &without(g, &u1))?;
            if d.ty != Ty::tensor(c[0].ty.clone(), c[1].ty.clone()) {
                return fail(d, "pair type does not match its components".into());
            }
            u1.extend(u2);
            Ok(u1)
        }
        Rule::Let { var, grade } => {
            let mut u1 = check(&c[0], phi, &g.sub_grade(grade))?;
            let (g2, phi2) = bind_linear(&without(g, &u1), phi, &[(var, c[0].ty.clone(), grade)]);
            let mut u2 = check(&c[1], &phi2, &g2)?;
            u2.remove(var);
            same_ty(d, &c[1])?;
            u1.extend(u2);
            Ok(u1)
        }
        Rule::LetPair { left, right, grade } => {
            let Ty::Tensor(l, r) = &c[0].ty else {
                return fail(d, format!("destructuring a non-pair {}", c[0].ty));
            };
            let mut u1 = check(&c[0], phi, &g.sub_grade(grade))?;
            let binds = [(left, (**l).clone(), grade), (right, (**r).clone(), grade)];
            let (g2, phi2) = bind_linear(&without(g, &u1), phi, &binds);
            let mut u2 = check(&c[1], &phi2, &g2)?;
            u2.remove(left);
            u2.remove(right);
            same_ty(d, &c[1])?;
            u1.extend(u2);
            Ok(u1)
        }
        Rule::DLet { var } => {
            if !c[0].ty.is_discrete() {
                return fail(d, format!("dlet of non-discrete {}", c[0].ty));
            }
            let mut u1 = check(&c[0], phi, g)?;
            let (g2, phi2) = bind_discrete(&without(g, &u1), phi, &[(var, c[0].ty.clone())]);
            let u2 = check(&c[1], &phi2, &g2)?;
            same_ty(d, &c[1])?;
            u1.extend(u2);
            Ok(u1)
        }
        Rule::DLetPair { left, right } => {
            let (Ty::Tensor(l, r), true) = (&c[0].ty, c[0].ty.is_discrete()) else {
                return fail(d, format!("dlet of non-discrete pair {}", c[0].ty));
            };
            let mut u1 = check(&c[0], phi, g)?;
            let binds = [(left, (**l).clone()), (right, (**r).clone())];
            let (g2, phi2) = bind_discrete(&without(g, &u1), phi, &binds);
            let u2 = check(&c[1], &phi2, &g2)?;
            same_ty(d, &c[1])?;
            u1.extend(u2);
            Ok(u1)
        }
        Rule::Case { left, right, grade } => {
            let Ty::Sum(l, r) = &c[0].ty else {
                return fail(d, format!("case on non-sum {}", c[0].ty));
            };
            let mut u1 = check(&c[0], phi, &g.sub_grade(grade))?;
            let rest = without(g, &u1);
            let (gl, phil) = bind_linear(&rest, phi, &[(left, (**l).clone(), grade)]);
            let (gr, phir) = bind_linear(&rest, phi, &[(right, (**r).clone(), grade)]);
            let mut u2 = check(&c[1], &phil, &gl)?;
            let mut u3 = check(&c[2], &phir, &gr)?;
            if !compatible(&c[1].ty, &d.ty) || !compatible(&c[2].ty, &d.ty) {
                return fail(d, "case branches do not match the node type".into());
            }
            u2.remove(left);
            u3.remove(right);
            u1.extend(u2);
            u1.extend(u3);
            Ok(u1)
        }
        Rule::Prim(op) => {
            let charge = op_charge(*op);
            let mut u1 = if *op == PrimOp::DMul {
                discrete_operand(&c[0], phi, g)?
            } else {
                linear_operand(&c[0], phi, g, &charge)?
            };
            let u2 = linear_operand(&c[1], phi, &without(g, &u1), &charge)?;
            let want = if *op == PrimOp::Div {
                Ty::sum(Ty::Num, Ty::Unit)
            } else {
                Ty::Num
            };
            if d.ty != want {
                return fail(d, format!("{op} cannot have type {}", d.ty));
            }
            u1.extend(u2);
            Ok(u1)
        }
    }
}

fn same_ty(d: &Derivation, body: &Derivation) -> Result<(), RecheckError> {
    if d.ty == body.ty {
        Ok(())
    } else {
        fail(d, format!("node type {} differs from its body's {}", d.ty, body.ty))
    }
}

fn linear_operand(
    d: &Derivation,
    phi: &DiscreteContext,
    g: &LinearContext,
    charge: &Grade,
) -> Result<Used, RecheckError> {
    if d.ty != Ty::Num {
        return fail(d, format!("operand of type {}", d.ty));
    }
    match &d.rule {
        Rule::Var(x) => match g.get(x) {
            Some((Ty::Num, r)) if r >= charge => Ok(Used::from([x.clone()])),
            Some((Ty::Num, r)) => fail(d, format!("`{x}` has grade {r}, operation needs {charge}")),
            _ => fail(d, format!("`{x}` is not a linear num here")),
        },
        Rule::DVar(z) => fail(d, format!("`{z}` is discrete")),
        // derived rule: let-bind the operand at the charge
        _ => check(d, phi, &g.sub_grade(charge)),
    }
}

fn discrete_operand(d: &Derivation, phi: &DiscreteContext, g: &LinearContext) -> Result<Used, RecheckError> {
    if d.ty != Ty::disc(Ty::Num) {
        return fail(d, format!("discrete operand of type {}", d.ty));
    }
    match &d.rule {
        Rule::Var(x) => fail(d, format!("`{x}` is linear")),
        _ => check(d, phi, g),
    }
}
