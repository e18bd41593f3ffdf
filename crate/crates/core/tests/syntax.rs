//! Parser and printer.

mod common;

use bean_core::harness::{gen_source, BenchmarkKind, BenchmarkSpec};
use bean_core::syntax::*;
use proptest::prelude::*;

fn corpus() -> Vec<(String, String)> {
    let dir = format!("{}/../../programs", env!("CARGO_MANIFEST_DIR"));
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "bean"))
        .map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn round_trip(src: &str) {
    let p = parse_program(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    let printed = print_program(&p);
    let q = parse_program(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
    assert_eq!(p, q, "{printed}");
    assert_eq!(print_program(&q), printed);
}

#[test]
fn corpus_round_trips() {
    let files = corpus();
    assert!(files.len() >= 12);
    for (_, src) in files {
        round_trip(&src);
    }
}

#[test]
fn generated_benchmarks_round_trip() {
    for kind in BenchmarkKind::ALL {
        let n = if kind == BenchmarkKind::LinSolve2 { 2 } else { 4 };
        round_trip(&gen_source(&BenchmarkSpec::new(kind, n).unwrap()));
    }
}

#[test]
fn types_print_and_parse() {
    for (text, want) in [
        ("num^2", "num^2"),
        ("(num^2)^2", "(num^2)^2"),
        ("num * num * num", "num^3"),
        ("num^2 + unit", "num^2 + unit"),
        ("!num * num + unit", "!num * num + unit"),
        ("!(num * num)", "(!num)^2"),
        ("!!num", "!num"),
        ("num * unit", "num * unit"),
    ] {
        let t = parse_type(text).unwrap();
        assert_eq!(t.to_string(), want, "{text}");
        assert_eq!(parse_type(want).unwrap(), t);
    }
}

#[test]
fn comments_and_whitespace() {
    let a = parse_program("F (x: num) (y: num) := add x y").unwrap();
    let b = parse_program("// leading\nF (x: num)\n  (y: num) :=\n    add x y // trailing\n").unwrap();
    assert_eq!(a, b);
}

#[test]
fn main_defaults_to_last_definition() {
    let p = parse_program("G (x: num) := x\nF (y: num) := G y").unwrap();
    assert_eq!(&*p.main, "F");
    assert_eq!(&*p.with_main("G").unwrap().main, "G");
    assert!(parse_program("G (x: num) := x").unwrap().with_main("H").is_none());
}

#[test]
fn definitions_inline() {
    let p = parse_program("Sq {z: num} (x: num) := dmul z x\nF {w: num} (y: num) := Sq w (Sq w y)").unwrap();
    let e = expand_defs(&p).unwrap();
    let body = desugar_ops(&e.body);
    assert!(is_kernel_form(&body));
    assert!(!pretty_print(&body).contains("Sq"));
}

#[test]
fn syntax_errors() {
    for (src, kind) in [
        ("F (x: num) := add x", SyntaxErrorKind::Syntax),
        ("F (x: num) := x #", SyntaxErrorKind::Lexical),
        ("F (x: num) := y", SyntaxErrorKind::UnboundVariable),
        ("F (x: num) (x: num) := x", SyntaxErrorKind::DuplicateParameter),
        ("F (x: num) := x\nF (y: num) := y", SyntaxErrorKind::DuplicateDefinition),
        (
            "G (x: num) (y: num) := add x y\nF (x: num) := G x",
            SyntaxErrorKind::Syntax,
        ),
    ] {
        let got = parse_program(src).and_then(|p| expand_defs(&p).map(|_| ()));
        assert_eq!(got.map_err(|e| e.kind), Err(kind), "{src}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_programs_round_trip(seed in any::<u64>()) {
        round_trip(&common::random_program(seed, 16));
    }
}
