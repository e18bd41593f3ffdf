use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::{Grade, TypeError, TypeErrorKind};
use crate::syntax::{Name, Span, Ty};

/// Discrete bindings: name to (discrete) type, no grades.
pub type DiscreteContext = BTreeMap<Name, Ty>;

/// A linear context with the grades stripped off.
pub type ContextSkeleton = BTreeMap<Name, Ty>;

/// Graded linear bindings `x :_r t`, ordered by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearContext(BTreeMap<Name, (Ty, Grade)>);

impl LinearContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a binding, returning the one it replaced.
    pub fn insert(&mut self, name: impl Into<Name>, ty: Ty, grade: Grade) -> Option<(Ty, Grade)> {
        self.0.insert(name.into(), (ty, grade))
    }

    pub fn get(&self, name: &str) -> Option<&(Ty, Grade)> {
        self.0.get(name)
    }

    pub fn grade(&self, name: &str) -> Option<&Grade> {
        self.0.get(name).map(|(_, g)| g)
    }

    pub fn remove(&mut self, name: &str) -> Option<(Ty, Grade)> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Ty, &Grade)> {
        self.0.iter().map(|(n, (t, g))| (n, t, g))
    }

    pub fn skeleton(&self) -> ContextSkeleton {
        self.0.iter().map(|(n, (t, _))| (n.clone(), t.clone())).collect()
    }

    /// Largest grade in the context, zero if empty.
    pub fn max_grade(&self) -> Grade {
        self.0.values().fold(Grade::zero(), |m, (_, g)| m.max(g.clone()))
    }

    /// Every grade lowered by `r`; bindings that cannot afford `r` are
    /// dropped.
    pub fn sub_grade(&self, r: &Grade) -> LinearContext {
        LinearContext(
            self.0
                .iter()
                .filter_map(|(n, (t, g))| Some((n.clone(), (t.clone(), g.checked_sub(r)?))))
                .collect(),
        )
    }
}

impl FromIterator<(Name, Ty, Grade)> for LinearContext {
    fn from_iter<I: IntoIterator<Item = (Name, Ty, Grade)>>(iter: I) -> Self {
        LinearContext(iter.into_iter().map(|(n, t, g)| (n, (t, g))).collect())
    }
}

impl fmt::Display for LinearContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, (n, (t, g))) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} :[{g}] {t}")?;
        }
        Ok(())
    }
}

impl Serialize for LinearContext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            name: &'a str,
            #[serde(rename = "type")]
            ty: String,
            grade: &'a Grade,
        }
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (n, (t, g)) in &self.0 {
            seq.serialize_element(&Entry {
                name: n,
                ty: t.to_string(),
                grade: g,
            })?;
        }
        seq.end()
    }
}

/// `q + g`: every grade raised by `q`.
pub fn ctx_add_grade(q: &Grade, g: &LinearContext) -> LinearContext {
    LinearContext(
        g.0.iter()
            .map(|(n, (t, r))| (n.clone(), (t.clone(), q.add(r))))
            .collect(),
    )
}

/// Union of the domains, taking the larger grade on shared names.
pub fn ctx_max(g1: &LinearContext, g2: &LinearContext) -> Result<LinearContext, TypeError> {
    let mut out = g1.clone();
    for (n, (t, r)) in &g2.0 {
        match out.0.get_mut(n) {
            Some((t0, r0)) => {
                if t0 != t {
                    return Err(TypeError::new(
                        TypeErrorKind::TypeMismatch,
                        format!("`{n}` has type {t0} in one context and {t} in the other"),
                        Span::default(),
                    ));
                }
                if r > r0 {
                    *r0 = r.clone();
                }
            }
            None => {
                out.0.insert(n.clone(), (t.clone(), r.clone()));
            }
        }
    }
    Ok(out)
}

/// `g1 ⊑ g2`: every binding of `g1` is in `g2` at the same type with a grade
/// at least as large.
pub fn is_subcontext(g1: &LinearContext, g2: &LinearContext) -> bool {
    g1.0.iter().all(|(n, (t, r))| match g2.0.get(n) {
        Some((t2, q)) => t == t2 && r <= q,
        None => false,
    })
}

/// Domain inclusion with equal types.
pub fn is_subskeleton(s1: &ContextSkeleton, s2: &ContextSkeleton) -> bool {
    s1.iter().all(|(n, t)| s2.get(n) == Some(t))
}
