use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::{SyntaxError, SyntaxErrorKind};

/// Generates identifiers that collide neither with each other nor with any
/// name already present in the program.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    taken: HashSet<Name>,
}

impl FreshNames {
    pub fn new(taken: HashSet<Name>) -> Self {
        FreshNames { taken }
    }

    pub fn for_expr(e: &Expr) -> Self {
        let mut taken = HashSet::new();
        e.names(&mut taken);
        FreshNames { taken }
    }

    pub fn for_program(p: &Program) -> Self {
        let mut taken = HashSet::new();
        for d in &p.defs {
            taken.insert(d.name.clone());
            taken.extend(d.params.iter().map(|p| p.name.clone()));
            d.body.names(&mut taken);
        }
        FreshNames { taken }
    }

    /// `base` itself if unused, otherwise `base_1`, `base_2`, ...
    pub fn fresh(&mut self, base: &str) -> Name {
        // `x_3` freshens to `x_4`, not `x_3_1`
        let stem = match base.rsplit_once('_') {
            Some((head, tail)) if !head.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => head,
            _ => base,
        };
        let mut candidate: Name = base.into();
        let mut i = 1usize;
        while self.taken.contains(&candidate) || super::lexer::is_keyword(&candidate) {
            candidate = format!("{stem}_{i}").into();
            i += 1;
        }
        self.taken.insert(candidate.clone());
        candidate
    }
}

/// Main's body with every call inlined, plus main's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Expanded {
    pub params: Vec<Param>,
    pub body: Expr,
}

struct Inlinable {
    params: Vec<Param>,
    body: Expr,
}

/// Inlines every call in `main`. Arguments that are variables of the right
/// kind are substituted directly; other arguments are bound first with `let`
/// (linear parameter) or `dlet` (discrete parameter). Binders of inlined
/// bodies are renamed apart.
pub fn expand_defs(p: &Program) -> Result<Expanded, SyntaxError> {
    let mut fresh = FreshNames::for_program(p);
    let mut done: HashMap<Name, Inlinable> = HashMap::new();
    for def in &p.defs {
        let body = expand_expr(&def.body, &done, &mut fresh)?;
        if def.name == p.main {
            return Ok(Expanded {
                params: def.params.clone(),
                body,
            });
        }
        done.insert(
            def.name.clone(),
            Inlinable {
                params: def.params.clone(),
                body,
            },
        );
    }
    Err(SyntaxError::new(
        SyntaxErrorKind::UnknownMain,
        &format!("no definition named `{}`", p.main),
        Span::default(),
    ))
}

fn expand_expr(e: &Expr, defs: &HashMap<Name, Inlinable>, fresh: &mut FreshNames) -> Result<Expr, SyntaxError> {
    crate::deep(|| {
        use ExprKind::*;
        let mut go = |x: &Expr| expand_expr(x, defs, fresh).map(Box::new);
        let kind = match &e.kind {
            LinVar(_) | DiscVar(_) | Unit => e.kind.clone(),
            Bang(a) => Bang(go(a)?),
            Pair(a, b) => Pair(go(a)?, go(b)?),
            Inl(a, t) => Inl(go(a)?, t.clone()),
            Inr(a, t) => Inr(go(a)?, t.clone()),
            Let(x, a, b) => Let(x.clone(), go(a)?, go(b)?),
            LetPair(x, y, a, b) => LetPair(x.clone(), y.clone(), go(a)?, go(b)?),
            DLet(x, a, b) => DLet(x.clone(), go(a)?, go(b)?),
            DLetPair(x, y, a, b) => DLetPair(x.clone(), y.clone(), go(a)?, go(b)?),
            Case(s, x, l, y, r) => Case(go(s)?, x.clone(), go(l)?, y.clone(), go(r)?),
            Prim(op, a, b) => Prim(*op, go(a)?, go(b)?),
            Call(f, args) => {
                let args = args
                    .iter()
                    .map(|a| expand_expr(a, defs, fresh))
                    .collect::<Result<Vec<_>, _>>()?;
                return inline_call(f, args, e.span, defs, fresh);
            }
        };
        Ok(Expr::new(kind, e.span))
    })
}

fn inline_call(
    f: &Name,
    args: Vec<Expr>,
    span: Span,
    defs: &HashMap<Name, Inlinable>,
    fresh: &mut FreshNames,
) -> Result<Expr, SyntaxError> {
    let Some(def) = defs.get(f) else {
        return Err(SyntaxError::new(
            SyntaxErrorKind::UnknownDefinition,
            &format!("call to unknown definition `{f}`"),
            span,
        ));
    };
    if def.params.len() != args.len() {
        return Err(SyntaxError::new(
            SyntaxErrorKind::ArityMismatch,
            &format!("`{f}` expects {} argument(s), got {}", def.params.len(), args.len()),
            span,
        ));
    }
    let mut subst: HashMap<Name, Expr> = HashMap::new();
    let mut hoisted: Vec<(Name, ParamKind, Expr)> = Vec::new();
    for (param, arg) in def.params.iter().zip(args) {
        let var_kind = match &arg.kind {
            ExprKind::LinVar(_) => Some(ParamKind::Linear),
            ExprKind::DiscVar(_) => Some(ParamKind::Discrete),
            _ => None,
        };
        match var_kind {
            Some(k) if k == param.kind => {
                subst.insert(param.name.clone(), arg);
            }
            Some(k) => {
                let what = |k| match k {
                    ParamKind::Linear => "linear",
                    ParamKind::Discrete => "discrete",
                };
                return Err(SyntaxError::new(
                    SyntaxErrorKind::ArgumentKindMismatch,
                    &format!(
                        "argument for {} parameter `{}` of `{f}` is a {} variable",
                        what(param.kind),
                        param.name,
                        what(k)
                    ),
                    arg.span,
                ));
            }
            None => {
                let t = fresh.fresh(&param.name);
                let var = match param.kind {
                    ParamKind::Linear => ExprKind::LinVar(t.clone()),
                    ParamKind::Discrete => ExprKind::DiscVar(t.clone()),
                };
                subst.insert(param.name.clone(), Expr::new(var, arg.span));
                hoisted.push((t, param.kind, arg));
            }
        }
    }
    let mut body = rename(&def.body, &mut subst, fresh, span);
    for (t, kind, arg) in hoisted.into_iter().rev() {
        let (bound, rest) = (Box::new(arg), Box::new(body));
        body = Expr::new(
            match kind {
                ParamKind::Linear => ExprKind::Let(t, bound, rest),
                ParamKind::Discrete => ExprKind::DLet(t, bound, rest),
            },
            span,
        );
    }
    Ok(body)
}

/// Copies `e` with free variables replaced per `subst` and every binder
/// renamed to a fresh name. Spans are set to the call site.
fn rename(e: &Expr, subst: &mut HashMap<Name, Expr>, fresh: &mut FreshNames, span: Span) -> Expr {
    crate::deep(|| {
        use ExprKind::*;
        let bind = |x: &Name, lin: bool, subst: &mut HashMap<Name, Expr>, fresh: &mut FreshNames| {
            let y = fresh.fresh(x);
            let var = if lin { LinVar(y.clone()) } else { DiscVar(y.clone()) };
            let old = subst.insert(x.clone(), Expr::new(var, span));
            (y, old)
        };
        let restore = |x: &Name, old: Option<Expr>, subst: &mut HashMap<Name, Expr>| match old {
            Some(o) => {
                subst.insert(x.clone(), o);
            }
            None => {
                subst.remove(x);
            }
        };
        let kind = match &e.kind {
            LinVar(x) | DiscVar(x) => match subst.get(x) {
                Some(v) => v.kind.clone(),
                None => e.kind.clone(),
            },
            Unit => Unit,
            Bang(a) => Bang(Box::new(rename(a, subst, fresh, span))),
            Pair(a, b) => Pair(
                Box::new(rename(a, subst, fresh, span)),
                Box::new(rename(b, subst, fresh, span)),
            ),
            Inl(a, t) => Inl(Box::new(rename(a, subst, fresh, span)), t.clone()),
            Inr(a, t) => Inr(Box::new(rename(a, subst, fresh, span)), t.clone()),
            Prim(op, a, b) => Prim(
                *op,
                Box::new(rename(a, subst, fresh, span)),
                Box::new(rename(b, subst, fresh, span)),
            ),
            Let(x, a, b) | DLet(x, a, b) => {
                let lin = matches!(e.kind, Let(..));
                let a = Box::new(rename(a, subst, fresh, span));
                let (x2, old) = bind(x, lin, subst, fresh);
                let b = Box::new(rename(b, subst, fresh, span));
                restore(x, old, subst);
                if lin {
                    Let(x2, a, b)
                } else {
                    DLet(x2, a, b)
                }
            }
            LetPair(x, y, a, b) | DLetPair(x, y, a, b) => {
                let lin = matches!(e.kind, LetPair(..));
                let a = Box::new(rename(a, subst, fresh, span));
                let (x2, oldx) = bind(x, lin, subst, fresh);
                let (y2, oldy) = bind(y, lin, subst, fresh);
                let b = Box::new(rename(b, subst, fresh, span));
                restore(y, oldy, subst);
                restore(x, oldx, subst);
                if lin {
                    LetPair(x2, y2, a, b)
                } else {
                    DLetPair(x2, y2, a, b)
                }
            }
            Case(s, x, l, y, r) => {
                let s = Box::new(rename(s, subst, fresh, span));
                let (x2, old) = bind(x, true, subst, fresh);
                let l = Box::new(rename(l, subst, fresh, span));
                restore(x, old, subst);
                let (y2, old) = bind(y, true, subst, fresh);
                let r = Box::new(rename(r, subst, fresh, span));
                restore(y, old, subst);
                Case(s, x2, l, y2, r)
            }
            Call(f, args) => Call(f.clone(), args.iter().map(|a| rename(a, subst, fresh, span)).collect()),
        };
        Expr::new(kind, span)
    })
}

/// Rewrites arithmetic so that every operand is a variable, hoisting other
/// operands into `let` bindings (`dlet` for the first operand of `dmul`).
pub fn desugar_ops(e: &Expr) -> Expr {
    let mut fresh = FreshNames::for_expr(e);
    desugar(e, &mut fresh)
}

fn desugar(e: &Expr, fresh: &mut FreshNames) -> Expr {
    crate::deep(|| {
        use ExprKind::*;
        let mut go = |x: &Expr| Box::new(desugar(x, fresh));
        let kind = match &e.kind {
            LinVar(_) | DiscVar(_) | Unit => e.kind.clone(),
            Bang(a) => Bang(go(a)),
            Pair(a, b) => Pair(go(a), go(b)),
            Inl(a, t) => Inl(go(a), t.clone()),
            Inr(a, t) => Inr(go(a), t.clone()),
            Let(x, a, b) => Let(x.clone(), go(a), go(b)),
            LetPair(x, y, a, b) => LetPair(x.clone(), y.clone(), go(a), go(b)),
            DLet(x, a, b) => DLet(x.clone(), go(a), go(b)),
            DLetPair(x, y, a, b) => DLetPair(x.clone(), y.clone(), go(a), go(b)),
            Case(s, x, l, y, r) => Case(go(s), x.clone(), go(l), y.clone(), go(r)),
            Call(f, args) => Call(f.clone(), args.iter().map(|a| desugar(a, fresh)).collect()),
            Prim(op, a, b) => {
                let a = desugar(a, fresh);
                let b = desugar(b, fresh);
                let mut binds: Vec<(Name, bool, Expr)> = Vec::new();
                let mut operand = |x: Expr, discrete: bool, binds: &mut Vec<_>| {
                    if x.is_var() {
                        return x;
                    }
                    let t = fresh.fresh("t");
                    let span = x.span;
                    binds.push((t.clone(), discrete, x));
                    let var = if discrete { DiscVar(t) } else { LinVar(t) };
                    Expr::new(var, span)
                };
                let a = operand(a, *op == PrimOp::DMul, &mut binds);
                let b = operand(b, false, &mut binds);
                let mut out = Expr::new(Prim(*op, Box::new(a), Box::new(b)), e.span);
                for (t, discrete, bound) in binds.into_iter().rev() {
                    let span = e.span;
                    let (bound, rest) = (Box::new(bound), Box::new(out));
                    out = Expr::new(
                        if discrete {
                            DLet(t, bound, rest)
                        } else {
                            Let(t, bound, rest)
                        },
                        span,
                    );
                }
                return out;
            }
        };
        Expr::new(kind, e.span)
    })
}

/// True when every arithmetic operand is a variable and no calls remain.
pub fn is_kernel_form(e: &Expr) -> bool {
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        match &e.kind {
            ExprKind::Prim(_, a, b) if !a.is_var() || !b.is_var() => return false,
            ExprKind::Call(..) => return false,
            _ => stack.extend(e.children()),
        }
    }
    true
}
