//! Interpreters and the backward map on concrete programs.

use bean_core::harness::{gen_benchmark, gen_source, BenchmarkKind, BenchmarkSpec};
use bean_core::numerics::{rp_distance, ArithOp, BigNum, Distance};
use bean_core::pipeline::compile_program;
use bean_core::semantics::*;
use bean_core::syntax::PrimOp;
use bean_core::{compile, Compiled};
use proptest::prelude::*;
use serde_json::json;

const BITS: usize = 256;

fn program(file: &str) -> Compiled {
    let path = format!("{}/../../programs/{file}", env!("CARGO_MANIFEST_DIR"));
    compile(&std::fs::read_to_string(path).unwrap(), None).unwrap()
}

fn env(c: &Compiled, inputs: serde_json::Value) -> Env<f64> {
    env_from_json(&inputs, &c.params).unwrap()
}

fn big(x: f64) -> BigNum {
    BigNum::from_f64(x).unwrap()
}

fn num(x: &BigNum) -> IdealValue {
    Value::Num(x.clone())
}

fn sqrt2() -> BigNum {
    BigNum::from_i64(2).sqrt(BITS)
}

fn close(a: &BigNum, b: &BigNum) -> bool {
    rp_distance(a, b, BITS).le(&Distance::Finite(big(2f64.powi(-200))))
}

#[test]
fn dotprod2_exact() {
    let c = program("dotprod2.bean");
    let e = env(&c, json!({"x": [1, 2], "y": [3, 4]}));
    assert_eq!(eval_approx(c.derivation(), &e).unwrap(), Value::Num(11.0));
    assert_eq!(
        eval_ideal(c.derivation(), &e.lift(), BITS).unwrap(),
        Value::Num(BigNum::from_i64(11))
    );
}

#[test]
fn dotprod2_orthogonal_is_zero() {
    let c = program("dotprod2.bean");
    let e = env(&c, json!({"x": [1, 1], "y": [1, -1]}));
    assert_eq!(eval_approx(c.derivation(), &e).unwrap(), Value::Num(0.0));
    let target = eval_approx(c.derivation(), &e).unwrap().lift();
    let p = backward_eval(c.derivation(), &e, &target, BITS).unwrap();
    assert_eq!(p, e.lift());
}

#[test]
fn linsolve_solution_and_singular_branch() {
    let c = program("linsolve.bean");
    let e = env(&c, json!({"A": [[2, 0], [0, 2]], "b": [2, 4]}));
    let want = Value::inl(Value::pair(Value::Num(1.0), Value::Num(2.0)));
    assert_eq!(eval_approx(c.derivation(), &e).unwrap(), want);
    assert_eq!(eval_ideal(c.derivation(), &e.lift(), BITS).unwrap(), want.lift());

    let e = env(&c, json!({"A": [[0, 0], [1, 2]], "b": [2, 4]}));
    let v = eval_approx(c.derivation(), &e).unwrap();
    assert_eq!(v.to_string(), "inr ()");
    assert_eq!(
        eval_ideal(c.derivation(), &e.lift(), BITS).unwrap().to_string(),
        "inr ()"
    );
    let p = backward_eval(c.derivation(), &e, &v.lift(), BITS).unwrap();
    let d = distances(&e, &p, BITS);
    assert!(d.linear.values().all(|x| x.is_zero()));
}

#[test]
fn sum_of_tenths() {
    let s = BenchmarkSpec::new(BenchmarkKind::Sum, 10).unwrap();
    let c = compile_program(gen_benchmark(&s)).unwrap();
    let e = env(&c, json!({"x": vec![0.1; 10]}));
    assert_eq!(eval_approx(c.derivation(), &e).unwrap(), Value::Num(0.9999999999999999));
}

#[test]
fn sum3_run_distance() {
    let s = BenchmarkSpec::new(BenchmarkKind::Sum, 3).unwrap();
    let c = compile(&gen_source(&s), None).unwrap();
    let e = env(&c, json!({"x": [0.1, 0.2, 0.3]}));
    let a = eval_approx(c.derivation(), &e).unwrap();
    assert_eq!(a, Value::Num(0.6000000000000001));
    let i = eval_ideal(c.derivation(), &e.lift(), BITS).unwrap();
    let d = value_distance(&a.lift(), &i, BITS).to_f64();
    // the inputs are the binary64 neighbours of 0.1, 0.2, 0.3, so the ideal
    // sum is not 0.6 itself
    assert!((d - 1.3877787807814457e-16).abs() < 1e-20, "{d}");
}

#[test]
fn exact_add() {
    let c = compile("F (x: num) (y: num) := add x y", None).unwrap();
    let e = env(&c, json!({"x": 1.0, "y": 1.0}));
    let v = eval_approx(c.derivation(), &e).unwrap();
    assert_eq!(v, Value::Num(2.0));
    let p = backward_eval(c.derivation(), &e, &v.lift(), BITS).unwrap();
    assert!(distances(&e, &p, BITS).linear.values().all(|d| d.is_zero()));
}

#[test]
fn primitive_examples() {
    let (a, b) = b_add(&big(1.0), &big(1.0), &big(2.5), BITS).unwrap();
    assert_eq!((a.to_f64(), b.to_f64()), (1.25, 1.25));
    let (a, b) = b_add(&BigNum::zero(), &BigNum::zero(), &BigNum::zero(), BITS).unwrap();
    assert!(a.is_zero() && b.is_zero());

    let (a, b) = b_mul(&big(2.0), &big(3.0), &big(12.0), BITS).unwrap();
    assert!(close(&a, &big(2.0).mul(&sqrt2(), BITS)));
    assert!(close(&b, &big(3.0).mul(&sqrt2(), BITS)));
    assert!(close(&a.mul(&b, BITS), &big(12.0)));

    let (a, b) = b_dmul(&big(2.0), &big(3.0), &big(8.0), BITS).unwrap();
    assert_eq!((a.to_f64(), b.to_f64()), (2.0, 4.0));

    let (a, b) = b_div(&big(1.0), &big(4.0), &Value::inl(num(&big(0.5))), BITS).unwrap();
    assert!(close(&a, &sqrt2()));
    assert!(close(&b, &big(2.0).mul(&sqrt2(), BITS)));
    assert!(close(&a.div(&b, BITS), &big(0.5)));

    let (a, b) = b_sub(&big(3.0), &big(1.0), &big(2.0), BITS).unwrap();
    assert_eq!((a.to_f64(), b.to_f64()), (3.0, 1.0));
    let x3 = big(2.0000000000000004);
    let t = x3.div(&big(2.0), BITS);
    let (a, b) = b_sub(&big(3.0), &big(1.0), &x3, BITS).unwrap();
    assert!(close(&a, &big(3.0).mul(&t, BITS)) && close(&b, &t));
    assert!(close(&a.sub(&b, BITS), &x3));
    let (a, b) = b_sub(&BigNum::zero(), &BigNum::zero(), &BigNum::zero(), BITS).unwrap();
    assert!(a.is_zero() && b.is_zero());
}

#[test]
fn primitive_errors() {
    assert!(matches!(
        b_add(&big(1.0), &big(1.0), &big(-2.0), BITS),
        Err(EvalError::InfiniteDistance(_))
    ));
    assert!(b_mul(&big(1.0), &big(1.0), &BigNum::zero(), BITS).is_err());
    assert!(b_div(&big(1.0), &big(2.0), &Value::inr(Value::Unit), BITS).is_err());
    assert!(b_div(&big(1.0), &BigNum::zero(), &Value::inl(num(&big(1.0))), BITS).is_err());
    let (a, b) = b_div(&big(1.0), &BigNum::zero(), &Value::inr(Value::Unit), BITS).unwrap();
    assert_eq!((a.to_f64(), b.to_f64()), (1.0, 0.0));
}

#[test]
fn distance_examples() {
    let e = Env::new()
        .with_lin("x", Value::Num(1.0))
        .with_disc("z", Value::Num(2.0));
    let d = distances(&e, &e.lift(), BITS);
    assert!(d.linear["x"].is_zero());
    assert!(!d.any_discrete_changed());

    let moved = big(1e-16).exp(BITS);
    let p = Env::new().with_lin("x", num(&moved)).with_disc("z", num(&big(2.0)));
    let d = distances(&e, &p, BITS);
    assert!((d.linear["x"].to_f64() - 1e-16).abs() < 1e-30);

    let delta = 3e-17;
    let two_e = big(2.0).mul(&big(delta).exp(BITS), BITS);
    let a = Value::pair(num(&big(1.0)), num(&big(2.0)));
    let b = Value::pair(num(&big(1.0)), num(&two_e));
    assert!((value_distance(&a, &b, BITS).to_f64() - delta).abs() < 1e-30);
    assert!(value_distance(&Value::inl(num(&big(1.0))), &Value::inr(Value::Unit), BITS).is_infinite());

    let p = Env::new().with_lin("x", num(&big(1.0))).with_disc("z", num(&big(2.5)));
    assert!(distances(&e, &p, BITS).any_discrete_changed());
}

#[test]
fn values_round_trip_through_json() {
    let c = program("linsolve.bean");
    let e = env(&c, json!({"A": [[2, "0"], [0.5, 2]], "b": [2, 4]}));
    let ty = &c.params[0].ty;
    assert_eq!(e.lin["A"].to_json_typed(ty), json!([["2.0", "0.0"], ["0.5", "2.0"]]));
    assert_eq!(e.lin["A"].render(ty), "((2.0, 0.0), (0.5, 2.0))");
    assert_eq!(e.lin["A"].to_json(), json!([["2.0", "0.0"], ["0.5", "2.0"]]));
    let back = value_from_json(&e.lin["A"].to_json_typed(ty), ty, "A").unwrap();
    assert_eq!(back, e.lin["A"]);
    assert!(env_from_json(&json!({"A": [[1, 2], [3]], "b": [1, 2]}), &c.params).is_err());
    assert!(env_from_json(&json!({"A": [[1, 2], [3, 4]], "b": [1, 2], "c": 1}), &c.params).is_err());
    assert!(env_from_json(&json!({"A": [[1, 2], [3, 4]]}), &c.params).is_err());
    assert_eq!(Value::inl(Value::<f64>::Unit).to_json(), json!({"inl": null}));
}

#[test]
fn overflow_is_an_error() {
    let c = compile("F (x: num) (y: num) := mul x y", None).unwrap();
    let e = env(&c, json!({"x": 1e200, "y": 1e200}));
    assert_eq!(eval_approx(c.derivation(), &e), Err(EvalError::Overflow(ArithOp::Mul)));
}

#[test]
fn shadowed_binders_route_targets() {
    // the inner `x` shadows the parameter, which still gets its own
    // perturbation
    let c = compile("F (x: num) (y: num) (w: num) := let x = add x y in mul x w", None).unwrap();
    let e = env(&c, json!({"x": 0.1, "y": 0.2, "w": 0.3}));
    let v = eval_approx(c.derivation(), &e).unwrap();
    let p = backward_eval(c.derivation(), &e, &v.lift(), BITS).unwrap();
    let Value::Num(out) = eval_ideal(c.derivation(), &p, BITS).unwrap() else {
        panic!()
    };
    let Value::Num(v) = v.lift() else { panic!() };
    assert!(close(&out, &v));
    let d = distances(&e, &p, BITS);
    assert!(!d.linear["x"].is_zero() && !d.linear["y"].is_zero());
}

#[test]
fn approx_run_is_deterministic() {
    let c = program("smatvecmul.bean");
    let e = env(
        &c,
        json!({"M": [[0.1, 0.7], [1.3, 2.9]], "v": [0.3, 1.1], "u": [5.5, 0.01], "a": 3.7, "b": 0.25}),
    );
    let first = eval_approx(c.derivation(), &e).unwrap();
    for _ in 0..5 {
        assert_eq!(eval_approx(c.derivation(), &e).unwrap(), first);
    }
}

fn positive() -> impl Strategy<Value = f64> {
    (-20.0f64..20.0).prop_map(|t| t.exp2())
}

fn exact(op: PrimOp, a: &BigNum, b: &BigNum) -> BigNum {
    match op {
        PrimOp::Add => a.add(b, BITS),
        PrimOp::Sub => a.sub(b, BITS),
        PrimOp::Mul | PrimOp::DMul => a.mul(b, BITS),
        PrimOp::Div => a.div(b, BITS),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_of_backward_is_target(
        x1 in positive(), x2 in positive(), t in -1.0f64..1.0, op in 0usize..5
    ) {
        let eps = 2f64.powi(-53);
        let (a, b) = (big(x1), big(x2));
        let op = [PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::DMul, PrimOp::Div][op];
        let y = exact(op, &a, &b).mul(&big(t * eps).exp(BITS), BITS);
        let target = if op == PrimOp::Div { Value::inl(num(&y)) } else { num(&y) };
        let (p, q) = prim_backward(op, &a, &b, &target, BITS).unwrap();
        let back = exact(op, &p, &q);
        prop_assert!(close(&back, &y) || (back.is_zero() && y.is_zero()));
    }
}
