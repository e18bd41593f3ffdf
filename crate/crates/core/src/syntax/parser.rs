use std::collections::HashMap;

use super::ast::*;
use super::lexer::{tokenize, Tok};
use super::{SyntaxError, SyntaxErrorKind};

pub(super) struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    /// Known definitions and the kinds of their parameters.
    defs: HashMap<String, Vec<ParamKind>>,
    scope: Vec<(Name, ParamKind)>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    pub(super) fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            defs: HashMap::new(),
            scope: Vec::new(),
        })
    }

    pub(super) fn with_scope(mut self, lin: &[&str], disc: &[&str]) -> Self {
        self.scope
            .extend(lin.iter().map(|x| (Name::from(*x), ParamKind::Linear)));
        self.scope
            .extend(disc.iter().map(|x| (Name::from(*x), ParamKind::Discrete)));
        self
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<Span> {
        if self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> SyntaxError {
        SyntaxError::syntax(
            &format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn ident(&mut self, what: &str) -> PResult<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().1;
                Ok((Name::from(s.as_str()), sp))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(super) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(super) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(super) fn program(&mut self) -> PResult<Program> {
        let mut defs: Vec<TopLevelDef> = Vec::new();
        while !self.at_eof() {
            let def = self.def()?;
            if self.defs.contains_key(&*def.name) {
                return Err(SyntaxError::new(
                    SyntaxErrorKind::DuplicateDefinition,
                    &format!("duplicate definition of `{}`", def.name),
                    def.span,
                ));
            }
            self.defs
                .insert(def.name.to_string(), def.params.iter().map(|p| p.kind).collect());
            defs.push(def);
        }
        let Some(last) = defs.last() else {
            return Err(SyntaxError::syntax("program has no definitions", self.span()));
        };
        Ok(Program {
            main: last.name.clone(),
            defs,
        })
    }

    fn def(&mut self) -> PResult<TopLevelDef> {
        let (name, start) = self.ident("a definition name")?;
        let mut params: Vec<Param> = Vec::new();
        loop {
            let (close, kind) = match self.peek() {
                Tok::LParen => (Tok::RParen, ParamKind::Linear),
                Tok::LBrace => (Tok::RBrace, ParamKind::Discrete),
                Tok::Define => break,
                _ => return Err(self.unexpected("a parameter or `:=`")),
            };
            self.bump();
            let (pname, psp) = self.ident("a parameter name")?;
            self.expect(&Tok::Colon, "`:` and a parameter type")?;
            let ty = self.ty()?;
            self.expect(&close, &close.describe())?;
            if params.iter().any(|p| p.name == pname) {
                return Err(SyntaxError::new(
                    SyntaxErrorKind::DuplicateParameter,
                    &format!("parameter `{pname}` declared twice"),
                    psp,
                ));
            }
            let ty = match kind {
                ParamKind::Discrete => Ty::disc(ty),
                ParamKind::Linear => ty,
            };
            params.push(Param { name: pname, ty, kind });
        }
        self.expect(&Tok::Define, "`:=`")?;
        let mark = self.scope.len();
        self.scope.extend(params.iter().map(|p| (p.name.clone(), p.kind)));
        let body = self.expr()?;
        self.scope.truncate(mark);
        Ok(TopLevelDef {
            name,
            params,
            span: start.to(body.span),
            body,
        })
    }

    // ty := prod ('+' ty)?
    pub(super) fn ty(&mut self) -> PResult<Ty> {
        let left = self.ty_prod()?;
        if self.eat(&Tok::Plus) {
            let right = self.ty()?;
            Ok(Ty::sum(left, right))
        } else {
            Ok(left)
        }
    }

    fn ty_prod(&mut self) -> PResult<Ty> {
        let left = self.ty_bang()?;
        if self.eat(&Tok::Star) {
            let right = self.ty_prod()?;
            Ok(Ty::tensor(left, right))
        } else {
            Ok(left)
        }
    }

    fn ty_bang(&mut self) -> PResult<Ty> {
        if self.eat(&Tok::Bang) {
            Ok(Ty::disc(self.ty_bang()?))
        } else {
            self.ty_postfix()
        }
    }

    fn ty_postfix(&mut self) -> PResult<Ty> {
        let mut t = match self.peek() {
            Tok::Num => {
                self.bump();
                Ty::Num
            }
            Tok::UnitTy => {
                self.bump();
                Ty::Unit
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen, "`)`")?;
                t
            }
            _ => return Err(self.unexpected("a type")),
        };
        while self.eat(&Tok::Caret) {
            match self.bump() {
                (Tok::Int(n), _) if (1..=1 << 20).contains(&n) => t = Ty::power(t, n as usize),
                (_, sp) => return Err(SyntaxError::syntax("expected a positive vector length after `^`", sp)),
            }
        }
        Ok(t)
    }

    fn lookup(&self, x: &str) -> Option<ParamKind> {
        self.scope.iter().rev().find(|(n, _)| &**n == x).map(|(_, k)| *k)
    }

    pub(super) fn expr(&mut self) -> PResult<Expr> {
        crate::deep(|| match self.peek() {
            Tok::Let => self.let_expr(ParamKind::Linear),
            Tok::DLet => self.let_expr(ParamKind::Discrete),
            Tok::Case => self.case_expr(),
            _ => self.app(),
        })
    }

    fn let_expr(&mut self, kind: ParamKind) -> PResult<Expr> {
        let start = self.bump().1;
        let pattern = if self.eat(&Tok::LParen) {
            let (x, _) = self.ident("a variable")?;
            self.expect(&Tok::Comma, "`,`")?;
            let (y, ysp) = self.ident("a variable")?;
            self.expect(&Tok::RParen, "`)`")?;
            if x == y {
                return Err(SyntaxError::syntax(
                    &format!("`{x}` bound twice in the same pattern"),
                    ysp,
                ));
            }
            (x, Some(y))
        } else {
            (self.ident("a variable or a pair pattern")?.0, None)
        };
        self.expect(&Tok::Eq, "`=`")?;
        let bound = self.expr()?;
        self.expect(&Tok::In, "`in`")?;
        let mark = self.scope.len();
        self.scope.push((pattern.0.clone(), kind));
        if let Some(y) = &pattern.1 {
            self.scope.push((y.clone(), kind));
        }
        let body = self.expr()?;
        self.scope.truncate(mark);
        let span = start.to(body.span);
        let (bound, body) = (Box::new(bound), Box::new(body));
        let kind = match (kind, pattern) {
            (ParamKind::Linear, (x, None)) => ExprKind::Let(x, bound, body),
            (ParamKind::Linear, (x, Some(y))) => ExprKind::LetPair(x, y, bound, body),
            (ParamKind::Discrete, (x, None)) => ExprKind::DLet(x, bound, body),
            (ParamKind::Discrete, (x, Some(y))) => ExprKind::DLetPair(x, y, bound, body),
        };
        Ok(Expr::new(kind, span))
    }

    fn binder(&mut self) -> PResult<Name> {
        if self.eat(&Tok::LParen) {
            let (x, _) = self.ident("a variable")?;
            self.expect(&Tok::RParen, "`)`")?;
            Ok(x)
        } else {
            Ok(self.ident("a variable")?.0)
        }
    }

    fn branch(&mut self, x: &Name) -> PResult<Expr> {
        self.expect(&Tok::Arrow, "`=>`")?;
        self.scope.push((x.clone(), ParamKind::Linear));
        let e = self.expr();
        self.scope.pop();
        e
    }

    fn case_expr(&mut self) -> PResult<Expr> {
        let start = self.bump().1;
        let scrutinee = self.expr()?;
        self.expect(&Tok::Of, "`of`")?;
        self.expect(&Tok::Inl, "`inl`")?;
        let x = self.binder()?;
        let left = self.branch(&x)?;
        self.expect(&Tok::Bar, "`|`")?;
        self.expect(&Tok::Inr, "`inr`")?;
        let y = self.binder()?;
        let right = self.branch(&y)?;
        let span = start.to(right.span);
        Ok(Expr::new(
            ExprKind::Case(Box::new(scrutinee), x, Box::new(left), y, Box::new(right)),
            span,
        ))
    }

    fn app(&mut self) -> PResult<Expr> {
        let start = self.span();
        let op = match self.peek() {
            Tok::Add => Some(PrimOp::Add),
            Tok::Sub => Some(PrimOp::Sub),
            Tok::Mul => Some(PrimOp::Mul),
            Tok::DMul => Some(PrimOp::DMul),
            Tok::Div => Some(PrimOp::Div),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let a = self.atom()?;
            let b = self.atom()?;
            let span = start.to(b.span);
            return Ok(Expr::new(ExprKind::Prim(op, Box::new(a), Box::new(b)), span));
        }
        match self.peek().clone() {
            Tok::Inl | Tok::Inr => {
                let left = self.bump().0 == Tok::Inl;
                let body = Box::new(self.atom()?);
                let ann = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                let span = start.to(self.prev_span());
                let kind = if left {
                    ExprKind::Inl(body, ann)
                } else {
                    ExprKind::Inr(body, ann)
                };
                Ok(Expr::new(kind, span))
            }
            Tok::Bang => {
                self.bump();
                let body = self.atom()?;
                let span = start.to(body.span);
                Ok(Expr::new(ExprKind::Bang(Box::new(body)), span))
            }
            Tok::Ident(name) if self.lookup(&name).is_none() && self.defs.contains_key(&name) => {
                self.bump();
                let arity = self.defs[&name].len();
                let mut args = Vec::with_capacity(arity);
                for _ in 0..arity {
                    args.push(self.atom()?);
                }
                let span = start.to(self.prev_span());
                Ok(Expr::new(ExprKind::Call(name.as_str().into(), args), span))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match self.lookup(&name) {
                    Some(ParamKind::Linear) => Ok(Expr::new(ExprKind::LinVar(name.as_str().into()), start)),
                    Some(ParamKind::Discrete) => Ok(Expr::new(ExprKind::DiscVar(name.as_str().into()), start)),
                    None => match self.defs.get(&name) {
                        Some(kinds) if kinds.is_empty() => {
                            Ok(Expr::new(ExprKind::Call(name.as_str().into(), vec![]), start))
                        }
                        Some(kinds) => Err(SyntaxError::syntax(
                            &format!(
                                "`{name}` takes {} argument(s); wrap the call in parentheses",
                                kinds.len()
                            ),
                            start,
                        )),
                        None => Err(SyntaxError::new(
                            SyntaxErrorKind::UnboundVariable,
                            &format!("unbound variable `{name}`"),
                            start,
                        )),
                    },
                }
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Expr::new(ExprKind::Unit, start.to(self.prev_span())));
                }
                let first = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let second = self.expr()?;
                    let end = self.expect(&Tok::RParen, "`)`")?;
                    Ok(Expr::new(
                        ExprKind::Pair(Box::new(first), Box::new(second)),
                        start.to(end),
                    ))
                } else {
                    self.expect(&Tok::RParen, "`)` or `,`")?;
                    Ok(first)
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
