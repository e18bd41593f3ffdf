use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value as Json;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bean(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_bean"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("bean runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema() -> jsonschema::JSONSchema {
    let text =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json")).unwrap();
    let schema: Json = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

/// Runs with `--format json`, checks the output against the schema and
/// returns it parsed.
fn bean_json(args: &[&str]) -> (i32, Json) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let r = bean(&all);
    let v: Json = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", r.stdout));
    let s = schema();
    if let Err(errs) = s.validate(&v) {
        let msgs: Vec<String> = errs.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{args:?} output violates the schema: {msgs:?}\n{v:#}");
    }
    (r.code, v)
}

fn temp_program(src: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".bean").tempfile().unwrap();
    std::fs::write(f.path(), src).unwrap();
    f
}

const SUM3: &str = "Sum3 (x: num^3) :=\n  let (a, t) = x in\n  let (b, c) = t in\n  let s = add a b in\n  add s c\n";

#[test]
fn check_reports_bounds_and_result_type() {
    let r = bean(&["check", "programs/dotprod2.bean"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("x : num^2 @ 3/2 eps (1.67e-16)"), "{}", r.stdout);
    assert!(r.stdout.contains("y : num^2 @ 3/2 eps (1.67e-16)"), "{}", r.stdout);
    assert!(r.stdout.contains("result : num\n"));

    let r = bean(&["check", "programs/linsolve.bean"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("result : num^2 + unit"), "{}", r.stdout);

    let (code, v) = bean_json(&["check", "programs/dotprod2.bean"]);
    assert_eq!(code, 0);
    assert_eq!(v["params"][0]["coefficient"], "3/2");
    assert_eq!(v["params"][0]["bound"], "1.67e-16");
    assert_eq!(v["unit_roundoff"], "2^-53");
}

#[test]
fn check_main_flag_and_discrete_params() {
    let r = bean(&["check", "programs/scalevec.bean"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("discrete"), "{}", r.stdout);
    let src = "A (x: num) := x\nB (y: num) (z: num) := add y z\n";
    let f = temp_program(src);
    let p = f.path().to_str().unwrap();
    assert!(bean(&["check", p]).stdout.starts_with("B "));
    assert!(bean(&["check", p, "--main", "A"]).stdout.contains("x : num @ 0"));
    let r = bean(&["check", p, "--main", "C"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("unknown_main"));
}

#[test]
fn exit_codes_follow_the_error_class() {
    let cases: &[(&str, i32, &str)] = &[
        ("P (x: num) :=\n  add x x\n", 1, "linearity_violation"),
        ("P (x: num) (y: num) :=\n  let (a, b) = x in y\n", 1, "type_mismatch"),
        ("P (x: num) :=\n  add x q\n", 1, "unbound_variable"),
        ("P (x: num) :=\n  add x\n", 2, "syntax_error"),
        ("P (x: num) := $\n", 2, "lexical_error"),
    ];
    for (src, code, tag) in cases {
        let f = temp_program(src);
        let p = f.path().to_str().unwrap();
        let r = bean(&["check", p]);
        assert_eq!(r.code, *code, "{src}: {}", r.stderr);
        assert!(r.stderr.contains(&format!("error[{tag}]")), "{src}: {}", r.stderr);
        assert!(
            r.stderr.starts_with(&format!("{p}:")),
            "diagnostic carries a position: {}",
            r.stderr
        );
        let (jcode, v) = bean_json(&["check", p]);
        assert_eq!(jcode, *code);
        assert_eq!(v["error"]["code"], *tag);
    }
    let f = temp_program("P (x: num) :=\n  add x x\n");
    let r = bean(&["check", f.path().to_str().unwrap()]);
    assert!(r.stderr.contains("linearity violation: x used twice"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["check", "no/such/file.bean"],
        vec!["check", "programs/dotprod2.bean", "--uroundoff", "2"],
        vec!["check", "programs/dotprod2.bean", "--ideal-bits", "8"],
        vec!["bench", "--only", "Fft"],
        vec!["run", "programs/dotprod2.bean", "--inputs", "{not json"],
    ] {
        let r = bean(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        let (code, v) = bean_json(&args);
        assert_eq!(code, 2);
        assert_eq!(v["error"]["class"], "usage");
    }
    // argument errors from the parser itself
    assert_eq!(bean(&["check"]).code, 2);
    assert_eq!(bean(&["frobnicate"]).code, 2);
}

#[test]
fn run_prints_both_semantics() {
    let f = temp_program(SUM3);
    let p = f.path().to_str().unwrap();
    let r = bean(&["run", p, "--inputs", r#"{"x": [0.1, 0.2, 0.3]}"#]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("approx : 0.6000000000000001\n"), "{}", r.stdout);
    assert!(r.stdout.contains("ideal  : 0.6000000000000000"), "{}", r.stdout);

    let (code, v) = bean_json(&["run", p, "--inputs", r#"[[0.1, 0.2, 0.3]]"#]);
    assert_eq!(code, 0);
    let rp = v["rp"].as_f64().unwrap();
    assert!(rp > 1e-17 && rp < 2.3e-16, "rp {rp}");

    // dyadic inputs whose sums are exact
    let (_, v) = bean_json(&["run", p, "--inputs", r#"{"x": [0.5, 0.25, 2]}"#]);
    assert_eq!(v["approx"], "2.75");
    assert_eq!(v["rp"].as_f64(), Some(0.0));

    let inputs = root().join("crates/cli/tests/data/singular.json");
    let r = bean(&[
        "run",
        "programs/linsolve.bean",
        "--inputs",
        &format!("@{}", inputs.display()),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("approx : inr ()\nideal  : inr ()\n"), "{}", r.stdout);
}

#[test]
fn run_rejects_mismatched_inputs() {
    let f = temp_program(SUM3);
    let p = f.path().to_str().unwrap();
    for bad in [
        r#"{"x": [1, 2]}"#,
        r#"{"x": 1}"#,
        r#"{"y": [1, 2, 3]}"#,
        r#"{"x": [1, 2, 3], "z": 4}"#,
    ] {
        let r = bean(&["run", p, "--inputs", bad]);
        assert_eq!(r.code, 1, "{bad}: {}", r.stderr);
        assert!(r.stderr.contains("input_mismatch"));
        let (_, v) = bean_json(&["run", p, "--inputs", bad]);
        assert_eq!(v["error"]["class"], "input");
    }
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "programs/dotprod2.bean", "--trials", "1000", "--seed", "42"];
    let r = bean(&args);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let (code, v) = bean_json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["violations"], 0);
    assert!(v["report"]["max_slack"].as_f64().unwrap() <= 1.0);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert_eq!(bean(&json_args).stdout, bean(&json_args).stdout);
    assert_ne!(
        bean(&json_args).stdout,
        bean(&[
            "verify",
            "programs/dotprod2.bean",
            "--trials",
            "1000",
            "--seed",
            "43",
            "--format",
            "json"
        ])
        .stdout
    );
}

#[test]
fn check_and_verify_every_corpus_program() {
    let mut files: Vec<_> = std::fs::read_dir(root().join("programs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bean"))
        .collect();
    files.sort();
    assert!(files.len() >= 10);
    for f in files {
        let p = f.to_str().unwrap();
        let (code, _) = bean_json(&["check", p]);
        assert_eq!(code, 0, "check {p}");
        for signed in [false, true] {
            let mut args = vec!["verify", p, "--trials", "200", "--seed", "7"];
            if signed {
                args.push("--signed");
            }
            let (code, v) = bean_json(&args);
            assert_eq!(code, 0, "verify {p}: {v:#}");
        }
    }
}

#[test]
fn bench_default_matrix() {
    let (code, v) = bean_json(&["bench"]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r["match"] == true));
    assert_eq!(rows[0]["inferred"], "2.22e-15");

    let r = bean(&["bench"]);
    assert!(r.stdout.contains("20/20 rows match"), "{}", r.stdout);
}

#[test]
fn bench_filters_and_rescales() {
    let (_, v) = bean_json(&["bench", "--only", "Sum"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["inferred"], "5.44e-15");

    // 49 eps at u = 2^-24
    let (_, v) = bean_json(&["bench", "--only", "sum", "--uroundoff", "2^-24"]);
    assert_eq!(v["unit_roundoff"], "2^-24");
    assert_eq!(v["rows"][0]["inferred"], "2.92e-6");
    assert_eq!(v["rows"][0]["match"], true);

    let (code, v) = bean_json(&["bench", "--only", "LinSolve2", "--trials", "100"]);
    assert_eq!(code, 0);
    assert_eq!(v["rows"][0]["standard"], Json::Null);
    assert_eq!(v["rows"][0]["violations"], 0);
    assert_eq!(v["rows"][0]["trials"], 100);
}

#[test]
fn schema_rejects_malformed_reports() {
    let s = schema();
    let (_, good) = bean_json(&["check", "programs/dotprod2.bean"]);
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("params");
    let mut bad_grade = good.clone();
    bad_grade["params"][0]["grade"] = Json::from("1.5 eps");
    let mut extra = good;
    extra["surprise"] = Json::from(1);
    for v in [
        missing,
        bad_grade,
        extra,
        serde_json::json!({"command": "run", "status": "ok"}),
    ] {
        assert!(!s.is_valid(&v), "accepted {v:#}");
    }
}
