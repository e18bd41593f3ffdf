//! The `bean` command: type check, run, verify and benchmark Bean programs.
//!
//! Every command produces an [`Output`] instead of printing, so the binary
//! is a thin wrapper and tests can drive commands in process.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Value as Json};

use bean_core::harness::{
    bound_matrix, format_table, gen_benchmark, run_bench, verify_soundness, BenchOptions, BenchmarkKind, BenchmarkSpec,
    InputDistribution, TrialConfig,
};
use bean_core::numerics::{grade_to_decimal, parse_uroundoff, RoundingConfig, DEFAULT_IDEAL_BITS};
use bean_core::semantics::{env_from_json, eval_approx, eval_ideal, format_f64, value_distance};
use bean_core::syntax::ParamKind;
use bean_core::{compile, Compiled, Diagnostic};

#[derive(Debug, Parser)]
#[command(name = "bean", version, about = "Backward error analysis for Bean programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the backward error bound of every input.
    Check {
        #[command(flatten)]
        program: ProgramArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate in binary64 and in high precision and compare.
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        /// Inputs as JSON, or `@path` to read them from a file. Either an
        /// object keyed by parameter name or an array in parameter order.
        #[arg(long)]
        inputs: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the inferred bounds on random inputs. Exits 1 on any violation.
    Verify {
        #[command(flatten)]
        program: ProgramArgs,
        #[command(flatten)]
        trials: TrialArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare inferred bounds with the standard ones on the built-in
    /// benchmark matrix.
    Bench {
        /// Restrict to one benchmark family.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        trials: TrialArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct ProgramArgs {
    /// A `.bean` source file.
    pub file: PathBuf,
    /// Definition to analyze; defaults to the last one in the file.
    #[arg(long)]
    pub main: Option<String>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Unit roundoff, e.g. `2^-53`, `2^-24` or `1/1024`.
    #[arg(long, default_value = "2^-53")]
    pub uroundoff: String,
    /// Precision of the ideal semantics in bits.
    #[arg(long, default_value_t = DEFAULT_IDEAL_BITS)]
    pub ideal_bits: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    /// Number of random trials (per benchmark row for `bench`). Defaults to
    /// 1000 for `verify` and 0 for `bench`.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw inputs of both signs instead of positive ones only.
    #[arg(long)]
    pub signed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit codes: 0 success, 1 the program or its inputs were rejected (or
/// verification found a violation), 2 the command could not start (usage,
/// unreadable file, syntax error).
pub mod exit {
    pub const OK: i32 = 0;
    pub const REJECTED: i32 = 1;
    pub const USAGE: i32 = 2;
}

/// Failure classes, each with a fixed exit code.
#[derive(Debug)]
enum Failure {
    Usage {
        code: &'static str,
        message: String,
    },
    Diagnostic {
        diag: Diagnostic,
        file: String,
        source: String,
    },
    Input(String),
    Evaluation(String),
}

impl Failure {
    fn usage(code: &'static str, message: impl Into<String>) -> Self {
        Failure::Usage {
            code,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage { .. } => exit::USAGE,
            Failure::Diagnostic { diag, .. } => diag.exit_code(),
            Failure::Input(_) | Failure::Evaluation(_) => exit::REJECTED,
        }
    }

    fn text(&self) -> String {
        match self {
            Failure::Usage { message, .. } => format!("error: {message}"),
            Failure::Diagnostic { diag, file, source } => diag.render(file, source),
            Failure::Input(m) => format!("error[input_mismatch]: {m}"),
            Failure::Evaluation(m) => format!("error[evaluation]: {m}"),
        }
    }

    fn json(&self) -> Json {
        match self {
            Failure::Usage { code, message } => json!({"class": "usage", "code": code, "message": message}),
            Failure::Diagnostic { diag, file, source } => {
                let (line, column) = diag.position(source);
                json!({
                    "class": diag.stage,
                    "code": diag.code,
                    "message": diag.message,
                    "file": file,
                    "line": line,
                    "column": column,
                })
            }
            Failure::Input(m) => json!({"class": "input", "code": "input_mismatch", "message": m}),
            Failure::Evaluation(m) => json!({"class": "evaluation", "code": "evaluation", "message": m}),
        }
    }
}

/// A finished command: its report and exit code.
struct Report {
    code: i32,
    text: String,
    json: Json,
}

pub fn execute(cli: Cli) -> Output {
    let (name, format) = match &cli.command {
        Command::Check { common, .. } => ("check", common.format),
        Command::Run { common, .. } => ("run", common.format),
        Command::Verify { common, .. } => ("verify", common.format),
        Command::Bench { common, .. } => ("bench", common.format),
    };
    let result = match &cli.command {
        Command::Check { program, common } => cmd_check(program, common),
        Command::Run {
            program,
            inputs,
            common,
        } => cmd_run(program, inputs, common),
        Command::Verify {
            program,
            trials,
            common,
        } => cmd_verify(program, trials, common),
        Command::Bench { only, trials, common } => cmd_bench(only.as_deref(), trials, common),
    };
    match (result, format) {
        (Ok(r), Format::Text) => Output {
            code: r.code,
            stdout: r.text,
            stderr: String::new(),
        },
        (Ok(mut r), Format::Json) => {
            r.json["command"] = json!(name);
            Output {
                code: r.code,
                stdout: pretty(&r.json),
                stderr: String::new(),
            }
        }
        (Err(f), Format::Text) => Output {
            code: f.exit_code(),
            stdout: String::new(),
            stderr: f.text() + "\n",
        },
        (Err(f), Format::Json) => Output {
            code: f.exit_code(),
            stdout: pretty(&json!({"command": name, "status": "error", "error": f.json()})),
            stderr: String::new(),
        },
    }
}

fn pretty(j: &Json) -> String {
    serde_json::to_string_pretty(j).expect("serializable") + "\n"
}

fn rounding(common: &CommonArgs) -> Result<RoundingConfig, Failure> {
    let u = parse_uroundoff(&common.uroundoff).map_err(|e| Failure::usage("bad_uroundoff", e.to_string()))?;
    RoundingConfig::new(u, common.ideal_bits).map_err(|e| Failure::usage("bad_precision", e.to_string()))
}

/// `2^-53` for powers of two, `n/d` otherwise.
fn show_rational(q: &BigRational) -> String {
    let (n, d) = (q.numer(), q.denom());
    let pow2_exp =
        |x: &BigInt| (x.is_positive() && (x & (x - BigInt::one())) == BigInt::from(0)).then(|| x.bits() as i64 - 1);
    match (pow2_exp(n), pow2_exp(d)) {
        (Some(a), Some(b)) => format!("2^{}", a - b),
        _ => q.to_string(),
    }
}

fn load(program: &ProgramArgs) -> Result<(Compiled, String), Failure> {
    let file = program.file.display().to_string();
    let source = std::fs::read_to_string(&program.file)
        .map_err(|e| Failure::usage("unreadable_file", format!("cannot read {file}: {e}")))?;
    match compile(&source, program.main.as_deref()) {
        Ok(c) => Ok((c, file)),
        Err(diag) => Err(Failure::Diagnostic { diag, file, source }),
    }
}

fn cmd_check(program: &ProgramArgs, common: &CommonArgs) -> Result<Report, Failure> {
    let cfg = rounding(common)?;
    let (c, file) = load(program)?;
    let result_ty = c.result.ty.erase();
    let mut text = format!("{} (u = {})\n", c.main(), show_rational(&cfg.unit_roundoff));
    let mut params = Vec::new();
    for p in &c.params {
        match p.kind {
            ParamKind::Linear => {
                let g = c.bound(&p.name);
                let dec = grade_to_decimal(&g, &cfg);
                text += &format!("  {} : {} @ {} ({})\n", p.name, p.ty, g, dec);
                params.push(json!({
                    "name": &*p.name,
                    "kind": "linear",
                    "type": p.ty.to_string(),
                    "grade": g.to_string(),
                    "coefficient": g.coeff().to_string(),
                    "bound": dec,
                }));
            }
            ParamKind::Discrete => {
                text += &format!("  {} : {} discrete\n", p.name, p.ty);
                params.push(json!({
                    "name": &*p.name,
                    "kind": "discrete",
                    "type": p.ty.to_string(),
                    "grade": null,
                    "coefficient": null,
                    "bound": null,
                }));
            }
        }
    }
    text += &format!("  result : {result_ty}\n");
    let json = json!({
        "status": "ok",
        "file": file,
        "main": c.main(),
        "unit_roundoff": show_rational(&cfg.unit_roundoff),
        "params": params,
        "result_type": result_ty.to_string(),
    });
    Ok(Report {
        code: exit::OK,
        text,
        json,
    })
}

fn read_inputs(arg: &str) -> Result<Json, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::usage("unreadable_file", format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::usage("bad_json", format!("inputs are not valid JSON: {e}")))
}

fn cmd_run(program: &ProgramArgs, inputs: &str, common: &CommonArgs) -> Result<Report, Failure> {
    let cfg = rounding(common)?;
    let (c, file) = load(program)?;
    let inputs = read_inputs(inputs)?;
    let env = env_from_json(&inputs, &c.params).map_err(|e| Failure::Input(e.to_string()))?;
    let approx = eval_approx(c.derivation(), &env).map_err(|e| Failure::Evaluation(e.to_string()))?;
    let ideal =
        eval_ideal(c.derivation(), &env.lift(), cfg.ideal_bits).map_err(|e| Failure::Evaluation(e.to_string()))?;
    let rp = value_distance(&ideal, &approx.lift(), cfg.ideal_bits);
    let ty = c.result.ty.erase();
    let rp_text = if rp.is_infinite() {
        "inf".to_string()
    } else {
        format_f64(rp.to_f64())
    };
    let text = format!(
        "approx : {}\nideal  : {}\nrp     : {}\n",
        approx.render(&ty),
        ideal.render(&ty),
        rp_text
    );
    let json = json!({
        "status": "ok",
        "file": file,
        "main": c.main(),
        "result_type": ty.to_string(),
        "approx": approx.to_json_typed(&ty),
        "ideal": ideal.to_json_typed(&ty),
        "rp": if rp.is_infinite() { Json::Null } else { json!(rp.to_f64()) },
    });
    Ok(Report {
        code: exit::OK,
        text,
        json,
    })
}

fn distribution(t: &TrialArgs) -> InputDistribution {
    let InputDistribution::PositiveLogUniform { lo, hi } = InputDistribution::default() else {
        unreachable!("the default draws positive inputs")
    };
    if t.signed {
        InputDistribution::SignedLogUniform { lo, hi }
    } else {
        InputDistribution::PositiveLogUniform { lo, hi }
    }
}

fn cmd_verify(program: &ProgramArgs, t: &TrialArgs, common: &CommonArgs) -> Result<Report, Failure> {
    let cfg = rounding(common)?;
    let (c, file) = load(program)?;
    let tc = TrialConfig {
        trials: t.trials.unwrap_or(1000),
        seed: t.seed,
        distribution: distribution(t),
        rounding: cfg.clone(),
    };
    let r = verify_soundness(&c, &tc);
    let sound = r.violations == 0;
    let mut text = format!("{}: {} trials, seed {} ({})\n", c.main(), r.trials, r.seed, r.prng);
    text += &format!(
        "  violations {}, excluded {}, underflow {}\n  max slack {:.4}\n",
        r.violations, r.excluded, r.underflow_trials, r.max_slack
    );
    for f in &r.failures {
        text += &format!("  trial {}: {}\n", f.trial, f.reason);
    }
    text += if sound { "sound\n" } else { "VIOLATED\n" };
    let bounds: serde_json::Map<String, Json> = c
        .linear_params()
        .map(|p| (p.name.to_string(), json!(c.bound(&p.name).to_string())))
        .collect();
    let json = json!({
        "status": if sound { "ok" } else { "violated" },
        "file": file,
        "main": c.main(),
        "unit_roundoff": show_rational(&cfg.unit_roundoff),
        "bounds": bounds,
        "report": serde_json::to_value(&r).expect("serializable"),
    });
    Ok(Report {
        code: if sound { exit::OK } else { exit::REJECTED },
        text,
        json,
    })
}

fn bench_specs(only: Option<&str>) -> Result<Vec<BenchmarkSpec>, Failure> {
    let Some(name) = only else {
        return Ok(bound_matrix());
    };
    let kind: BenchmarkKind = name
        .parse()
        .map_err(|e: bean_core::harness::HarnessError| Failure::usage("unknown_benchmark", e.to_string()))?;
    if kind == BenchmarkKind::LinSolve2 {
        return Ok(vec![BenchmarkSpec { kind, size: 2 }]);
    }
    Ok(bound_matrix().into_iter().filter(|s| s.kind == kind).collect())
}

fn cmd_bench(only: Option<&str>, t: &TrialArgs, common: &CommonArgs) -> Result<Report, Failure> {
    let cfg = rounding(common)?;
    let specs = bench_specs(only)?;
    // generated programs are well typed; a failure here is a bug, not input
    for s in &specs {
        let _ = gen_benchmark(s);
    }
    let opts = BenchOptions {
        rounding: cfg.clone(),
        trials: t.trials.unwrap_or(0),
        seed: t.seed,
        distribution: distribution(t),
    };
    let rows = run_bench(&specs, &opts).map_err(|d| Failure::Evaluation(d.message))?;
    let matched = rows.iter().filter(|r| r.matches).count();
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let mut text = format!("u = {}\n", show_rational(&cfg.unit_roundoff));
    text += &format_table(&rows);
    text += &format!("{matched}/{} rows match, {violations} violations\n", rows.len());
    let json = json!({
        "status": if violations == 0 { "ok" } else { "violated" },
        "unit_roundoff": show_rational(&cfg.unit_roundoff),
        "rows": serde_json::to_value(&rows).expect("serializable"),
    });
    Ok(Report {
        code: if violations == 0 { exit::OK } else { exit::REJECTED },
        text,
        json,
    })
}
