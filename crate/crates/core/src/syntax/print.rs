use std::fmt::Write;

use super::ast::*;

/// Renders an expression in the concrete syntax. The output re-parses to the
/// same tree.
pub fn pretty_print(e: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(e, false);
    p.out
}

/// Renders a whole program, one definition per paragraph.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, def) in p.defs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&def.name);
        for param in &def.params {
            match param.kind {
                ParamKind::Linear => write!(out, " ({}: {})", param.name, param.ty),
                ParamKind::Discrete => write!(out, " {{{}: {}}}", param.name, discrete_ty(&param.ty)),
            }
            .unwrap();
        }
        out.push_str(" :=\n  ");
        let mut pr = Printer {
            out: String::new(),
            indent: 2,
        };
        pr.expr(&def.body, false);
        out.push_str(&pr.out);
        out.push('\n');
    }
    out
}

/// Discrete parameters are declared without their `!` markers when that
/// loses nothing.
fn discrete_ty(t: &Ty) -> Ty {
    let plain = t.erase();
    if Ty::disc(plain.clone()) == *t {
        plain
    } else {
        t.clone()
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn newline(&mut self) {
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push(' ');
        }
    }

    fn nested(&mut self, by: usize, f: impl FnOnce(&mut Self)) {
        self.indent += by;
        f(self);
        self.indent -= by;
    }

    fn expr(&mut self, e: &Expr, atom: bool) {
        crate::deep(|| self.expr_inner(e, atom))
    }

    fn expr_inner(&mut self, e: &Expr, atom: bool) {
        use ExprKind::*;
        let atomic = matches!(e.kind, LinVar(_) | DiscVar(_) | Unit | Pair(..));
        if atom && !atomic {
            self.out.push('(');
            self.nested(1, |p| p.expr(e, false));
            self.out.push(')');
            return;
        }
        match &e.kind {
            LinVar(x) | DiscVar(x) => self.out.push_str(x),
            Unit => self.out.push_str("()"),
            Pair(a, b) => {
                self.out.push('(');
                self.expr(a, false);
                self.out.push_str(", ");
                self.expr(b, false);
                self.out.push(')');
            }
            Bang(a) => {
                self.out.push('!');
                self.expr(a, true);
            }
            Inl(a, ann) | Inr(a, ann) => {
                self.out
                    .push_str(if matches!(e.kind, Inl(..)) { "inl " } else { "inr " });
                self.expr(a, true);
                if let Some(t) = ann {
                    write!(self.out, " : {t}").unwrap();
                }
            }
            Prim(op, a, b) => {
                self.out.push_str(op.keyword());
                self.out.push(' ');
                self.expr(a, true);
                self.out.push(' ');
                self.expr(b, true);
            }
            Call(f, args) => {
                self.out.push_str(f);
                for a in args {
                    self.out.push(' ');
                    self.expr(a, true);
                }
            }
            Let(x, bound, body) => self.binding("let", x, None, bound, body),
            LetPair(x, y, bound, body) => self.binding("let", x, Some(y), bound, body),
            DLet(x, bound, body) => self.binding("dlet", x, None, bound, body),
            DLetPair(x, y, bound, body) => self.binding("dlet", x, Some(y), bound, body),
            Case(s, x, l, y, r) => {
                self.out.push_str("case ");
                self.nested(2, |p| p.expr(s, false));
                self.out.push_str(" of");
                self.nested(2, |p| {
                    p.newline();
                    write!(p.out, "inl {x} =>").unwrap();
                    p.nested(2, |p| {
                        p.newline();
                        // a bare nested case here would be correct but hard to read
                        let wrap = matches!(l.kind, Case(..));
                        p.expr(l, wrap);
                    });
                    p.newline();
                    write!(p.out, "| inr {y} =>").unwrap();
                    p.nested(2, |p| {
                        p.newline();
                        p.expr(r, false);
                    });
                });
            }
        }
    }

    fn binding(&mut self, kw: &str, x: &Name, y: Option<&Name>, bound: &Expr, body: &Expr) {
        match y {
            Some(y) => write!(self.out, "{kw} ({x}, {y}) = "),
            None => write!(self.out, "{kw} {x} = "),
        }
        .unwrap();
        self.nested(2, |p| p.expr(bound, false));
        self.out.push_str(" in");
        self.newline();
        self.expr(body, false);
    }
}
