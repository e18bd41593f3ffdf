//! Typing judgments of the example programs in `programs/`.

use bean_core::compile;
use bean_core::typecheck::{check_declared, is_subcontext, recheck, Grade, LinearContext};

fn source(file: &str) -> String {
    let path = format!("{}/../../programs/{file}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn bounds(file: &str, main: Option<&str>) -> Vec<(String, Grade)> {
    let c = compile(&source(file), main).unwrap_or_else(|d| panic!("{file}: {}", d.message));
    recheck(c.derivation(), &c.disc, &c.result.ctx).unwrap();
    c.linear_params()
        .map(|p| (p.name.to_string(), c.bound(&p.name)))
        .collect()
}

fn g(n: i64, d: i64) -> Grade {
    Grade::ratio(n, d)
}

fn assert_bounds(file: &str, main: Option<&str>, want: &[(&str, Grade)]) {
    let got = bounds(file, main);
    let want: Vec<(String, Grade)> = want.iter().map(|(n, g)| (n.to_string(), g.clone())).collect();
    assert_eq!(got, want, "{file}");
}

#[test]
fn dotprod2() {
    assert_bounds("dotprod2.bean", None, &[("x", g(3, 2)), ("y", g(3, 2))]);
}

#[test]
fn scalevec() {
    assert_bounds("scalevec.bean", None, &[("x", g(1, 1))]);
}

#[test]
fn svecadd() {
    assert_bounds("svecadd.bean", None, &[("x", g(2, 1)), ("y", g(1, 1))]);
}

#[test]
fn innerproduct() {
    assert_bounds("innerproduct.bean", None, &[("u", g(2, 1))]);
}

#[test]
fn matvec() {
    assert_bounds("matvecmul.bean", None, &[("M", g(2, 1))]);
    assert_bounds("matvecex.bean", None, &[("A", g(2, 1))]);
}

#[test]
fn smatvecmul() {
    assert_bounds("smatvecmul.bean", None, &[("M", g(4, 1)), ("u", g(2, 1))]);
    // every definition in the file can be analyzed on its own
    assert_bounds("smatvecmul.bean", Some("SVecAdd"), &[("x", g(2, 1)), ("y", g(1, 1))]);
}

#[test]
fn polynomials() {
    assert_bounds("polyval.bean", None, &[("a", g(3, 1))]);
    assert_bounds("horner.bean", None, &[("a", g(4, 1))]);
    assert_bounds(
        "polyval_alt.bean",
        None,
        &[("a0", g(2, 1)), ("a1", g(3, 1)), ("a2", g(3, 1))],
    );
    assert_bounds(
        "horner_alt.bean",
        None,
        &[("a0", g(1, 1)), ("a1", g(3, 1)), ("a2", g(4, 1))],
    );
}

#[test]
fn linsolve() {
    assert_bounds("linsolve.bean", None, &[("A", g(5, 2)), ("b", g(3, 2))]);
    let c = compile(&source("linsolve.bean"), None).unwrap();
    assert_eq!(c.result.ty.erase().to_string(), "num^2 + unit");
}

#[test]
fn declared_judgments() {
    let c = compile(&source("dotprod2.bean"), None).unwrap();
    let declare = |r: Grade| -> LinearContext {
        c.skeleton
            .iter()
            .map(|(n, t)| (n.clone(), t.clone(), r.clone()))
            .collect()
    };
    let at = |r: Grade| check_declared(&c.disc, &declare(r), &c.body).unwrap().0;
    assert!(at(g(3, 2)));
    assert!(!at(g(1, 1)));
    assert!(at(g(2, 1)));
    // a declared weakening also passes the declarative checker
    recheck(c.derivation(), &c.disc, &declare(g(2, 1))).unwrap();
    assert!(recheck(c.derivation(), &c.disc, &declare(g(1, 1))).is_err());
    assert!(is_subcontext(&c.result.ctx, &declare(g(3, 2))));
}
