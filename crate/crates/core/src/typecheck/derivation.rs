use std::fmt::{self, Write};

use super::Grade;
use crate::syntax::{Name, PrimOp, Span, Ty};

/// The rule applied at a derivation node, with whatever the rule binds or
/// charges.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Var(Name),
    DVar(Name),
    Unit,
    Pair,
    Inl,
    Inr,
    /// `!e`.
    Disc,
    /// `let x = e in f` where `x` carries `grade` in `f`.
    Let {
        var: Name,
        grade: Grade,
    },
    LetPair {
        left: Name,
        right: Name,
        grade: Grade,
    },
    DLet {
        var: Name,
    },
    DLetPair {
        left: Name,
        right: Name,
    },
    Case {
        left: Name,
        right: Name,
        grade: Grade,
    },
    Prim(PrimOp),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Var(_) => "Var",
            Rule::DVar(_) => "DVar",
            Rule::Unit => "Unit",
            Rule::Pair => "TensorI",
            Rule::Inl => "SumIL",
            Rule::Inr => "SumIR",
            Rule::Disc => "Disc",
            Rule::Let { .. } => "Let",
            Rule::LetPair { .. } => "TensorE",
            Rule::DLet { .. } => "DLet",
            Rule::DLetPair { .. } => "DTensorE",
            Rule::Case { .. } => "SumE",
            Rule::Prim(PrimOp::Add) => "Add",
            Rule::Prim(PrimOp::Sub) => "Sub",
            Rule::Prim(PrimOp::Mul) => "Mul",
            Rule::Prim(PrimOp::DMul) => "DMul",
            Rule::Prim(PrimOp::Div) => "Div",
        }
    }
}

/// Typing derivation, one node per rule instance. Children follow source
/// order: bound expression before body, scrutinee before branches, operands
/// left to right.
#[derive(Debug)]
pub struct Derivation {
    pub rule: Rule,
    pub ty: Ty,
    pub span: Span,
    pub children: Vec<Derivation>,
}

impl Clone for Derivation {
    fn clone(&self) -> Self {
        crate::deep(|| Derivation {
            rule: self.rule.clone(),
            ty: self.ty.clone(),
            span: self.span,
            children: self.children.clone(),
        })
    }
}

impl PartialEq for Derivation {
    fn eq(&self, o: &Self) -> bool {
        crate::deep(|| self.rule == o.rule && self.ty == o.ty && self.span == o.span && self.children == o.children)
    }
}

impl Drop for Derivation {
    fn drop(&mut self) {
        let children = std::mem::take(&mut self.children);
        if !children.is_empty() {
            crate::deep(move || drop(children));
        }
    }
}

impl Derivation {
    pub fn new(rule: Rule, ty: Ty, span: Span, children: Vec<Derivation>) -> Self {
        Derivation {
            rule,
            ty,
            span,
            children,
        }
    }

    /// Number of floating-point operations: primitive nodes.
    pub fn ops(&self) -> usize {
        self.count(|r| matches!(r, Rule::Prim(_)))
    }

    pub fn size(&self) -> usize {
        self.count(|_| true)
    }

    fn count(&self, pred: impl Fn(&Rule) -> bool) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            n += pred(&d.rule) as usize;
            stack.extend(&d.children);
        }
        n
    }

    /// Indented tree, one rule per line.
    pub fn outline(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self, 0usize)];
        while let Some((d, depth)) = stack.pop() {
            let _ = writeln!(out, "{:indent$}{} : {}", "", d.rule_label(), d.ty, indent = depth * 2);
            stack.extend(d.children.iter().rev().map(|c| (c, depth + 1)));
        }
        out
    }

    fn rule_label(&self) -> String {
        match &self.rule {
            Rule::Var(x) | Rule::DVar(x) => format!("{} {x}", self.rule.name()),
            Rule::Let { var, grade } => format!("Let {var} [{grade}]"),
            Rule::LetPair { left, right, grade } => format!("TensorE ({left}, {right}) [{grade}]"),
            Rule::DLet { var } => format!("DLet {var}"),
            Rule::DLetPair { left, right } => format!("DTensorE ({left}, {right})"),
            Rule::Case { left, right, grade } => format!("SumE {left} | {right} [{grade}]"),
            r => r.name().to_string(),
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.outline())
    }
}
