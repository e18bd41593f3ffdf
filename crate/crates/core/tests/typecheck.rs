//! Rejected programs and the algorithmic/declarative agreement.

mod common;

use bean_core::typecheck::{check_declared, is_subcontext, is_subskeleton, recheck, Grade, LinearContext};
use bean_core::{compile, Diagnostic};

fn reject(src: &str) -> Diagnostic {
    match compile(src, None) {
        Ok(c) => panic!("accepted with type {}:\n{src}", c.result.ty),
        Err(d) => d,
    }
}

#[test]
fn duplicated_linear_variable() {
    let d = reject("F (x: num) := add x x");
    assert_eq!(d.code, "linearity_violation");
    assert_eq!(d.message, "linearity violation: x used twice");
    assert_eq!(d.exit_code(), 1);
}

#[test]
fn reused_pair_component() {
    let d = reject("F (p: num^2) := let (a, b) = p in mul a a");
    assert_eq!(d.code, "linearity_violation");
    let d = reject("F (p: num^2) := let (a, b) = p in let c = add a b in add c b");
    assert_eq!(d.code, "linearity_violation");
}

#[test]
fn dmul_needs_a_discrete_first_operand() {
    let d = reject("F (x: num) (y: num) := dmul x y");
    assert_eq!(d.code, "kind_error");
}

#[test]
fn product_plus_reused_factor() {
    // x*y + y needs y twice
    let d = reject("F (x: num) (y: num) := add (mul x y) y");
    assert_eq!(d.code, "linearity_violation");
    let d = reject("F (x: num) (y: num) := let t = mul x y in add t y");
    assert_eq!(d.code, "linearity_violation");
}

#[test]
fn the_same_with_a_discrete_factor_is_fine() {
    let c = compile("F (x: num) {y: num} := add (dmul y x) (dmul y x')", None);
    assert!(c.is_err());
    let c = compile("F (x: num) (w: num) {y: num} := add (dmul y x) (dmul y w)", None).unwrap();
    assert_eq!(c.bound("x"), Grade::ratio(2, 1));
}

#[test]
fn other_type_errors() {
    assert_eq!(reject("F (x: num^2) (y: num) := add x y").code, "type_mismatch");
    assert_eq!(
        reject("F (x: num) := case x of inl (a) => a | inr (b) => b").code,
        "type_mismatch"
    );
    assert_eq!(reject("F (x: num) := let (a, b) = x in a").code, "type_mismatch");
    assert_eq!(
        reject("F (x: num) (y: num) := case div x y of inl (a) => a | inr (e) => e").code,
        "branch_mismatch"
    );
    assert_eq!(reject("F (x: num) := inl x").code, "ambiguous_type");
    assert_eq!(reject("F (x: num) := add x y").exit_code(), 1);
}

#[test]
fn parse_errors_exit_2() {
    let d = reject("F (x: num) := add x");
    assert_eq!(d.exit_code(), 2);
    let d = reject("F (x: num) = x");
    assert_eq!(d.exit_code(), 2);
    let d = reject("F (x: num) := x $");
    assert_eq!(d.exit_code(), 2);
}

#[test]
fn diagnostics_carry_positions() {
    let src = "F (x: num) :=\n  add x x";
    let d = reject(src);
    let text = d.render("f.bean", src);
    assert!(text.starts_with("f.bean:2:"), "{text}");
    assert!(text.contains("error[linearity_violation]"), "{text}");
}

#[test]
fn random_programs_recheck() {
    for seed in 0..200 {
        let src = common::random_program(seed, 12);
        let c = compile(&src, None).unwrap_or_else(|d| panic!("{}\n{src}", d.message));
        recheck(c.derivation(), &c.disc, &c.result.ctx).unwrap_or_else(|e| panic!("{}\n{src}", e.message));
        assert!(is_subskeleton(&c.result.ctx.skeleton(), &c.skeleton));
    }
}

#[test]
fn inferred_is_least_among_declarations() {
    for seed in 0..100 {
        let src = common::random_program(seed, 12);
        let c = compile(&src, None).unwrap();
        let loose: LinearContext = c
            .skeleton
            .iter()
            .map(|(n, t)| (n.clone(), t.clone(), c.bound(n).add(&Grade::half_eps())))
            .collect();
        let (ok, res) = check_declared(&c.disc, &loose, &c.body).unwrap();
        assert!(ok && is_subcontext(&res.ctx, &loose));
        // lowering any positive grade is rejected
        for (x, _, g) in c.result.ctx.iter() {
            if g.is_zero() {
                continue;
            }
            let mut tight = loose.clone();
            let ty = c.skeleton[x].clone();
            tight.insert(
                x.clone(),
                ty,
                g.checked_sub(&Grade::ratio(1, 4)).unwrap_or_else(Grade::zero),
            );
            let (ok, _) = check_declared(&c.disc, &tight, &c.body).unwrap();
            assert!(!ok, "{x} below {g} accepted\n{src}");
        }
    }
}
