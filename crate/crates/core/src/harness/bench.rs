use std::fmt::Write;
use std::time::Instant;

use num_rational::BigRational;
use serde::Serialize;

use super::generate::{gen_benchmark, BenchmarkKind, BenchmarkSpec};
use super::soundness::{verify_soundness, InputDistribution, TrialConfig};
use crate::numerics::{format_sci3, grade_to_decimal, RoundingConfig};
use crate::pipeline::{compile_program, Diagnostic};
use crate::typecheck::Grade;

use BenchmarkKind::*;

/// Reference backward bounds at `u = 2^-53`. The inferred and the standard
/// bound agree on every row.
pub const BACKWARD_BOUNDS: [(BenchmarkKind, usize, &str); 20] = [
    (DotProd, 20, "2.22e-15"),
    (DotProd, 50, "5.55e-15"),
    (DotProd, 100, "1.11e-14"),
    (DotProd, 500, "5.55e-14"),
    (Horner, 20, "4.44e-15"),
    (Horner, 50, "1.11e-14"),
    (Horner, 100, "2.22e-14"),
    (Horner, 500, "1.11e-13"),
    (PolyVal, 10, "1.22e-15"),
    (PolyVal, 20, "2.33e-15"),
    (PolyVal, 50, "5.66e-15"),
    (PolyVal, 100, "1.12e-14"),
    (MatVecMul, 5, "5.55e-16"),
    (MatVecMul, 10, "1.11e-15"),
    (MatVecMul, 20, "2.22e-15"),
    (MatVecMul, 50, "5.55e-15"),
    (Sum, 50, "5.44e-15"),
    (Sum, 100, "1.10e-14"),
    (Sum, 500, "5.54e-14"),
    (Sum, 1000, "1.11e-13"),
];

/// Reference forward bounds for condition number 1 at `u = 2^-52`.
pub const FORWARD_BOUNDS: [(BenchmarkKind, usize, &str); 4] = [
    (Sum, 500, "1.11e-13"),
    (DotProd, 500, "1.11e-13"),
    (Horner, 500, "2.22e-13"),
    (PolyVal, 100, "2.24e-14"),
];

pub fn bound_matrix() -> Vec<BenchmarkSpec> {
    BACKWARD_BOUNDS
        .iter()
        .map(|&(k, n, _)| BenchmarkSpec { kind: k, size: n })
        .collect()
}

/// Number of arithmetic operations in the generated program.
pub fn expected_ops(spec: &BenchmarkSpec) -> usize {
    let n = spec.size;
    match spec.kind {
        DotProd => 2 * n - 1,
        Sum => n - 1,
        Horner => 2 * n,
        PolyVal => n * (n + 3) / 2,
        MatVecMul => 2 * n * n - n,
        LinSolve2 => 4,
    }
}

/// Worst-case backward bound from the numerical analysis literature, as a
/// multiple of eps. There is no tabulated figure for LinSolve2.
pub fn standard_bound(spec: &BenchmarkSpec) -> Option<Grade> {
    let n = spec.size as u64;
    let k = match spec.kind {
        DotProd | MatVecMul => n,
        Sum => n - 1,
        Horner => 2 * n,
        PolyVal => n + 1,
        LinSolve2 => return None,
    };
    Some(Grade::eps().scale(k))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundComparison {
    pub spec: BenchmarkSpec,
    pub inferred: Grade,
    pub standard: Option<Grade>,
    pub inferred_display: String,
    pub standard_display: Option<String>,
    pub ops: usize,
}

impl BoundComparison {
    /// Inferred and standard bounds print the same; vacuously true without
    /// a standard bound.
    pub fn matches(&self) -> bool {
        self.standard_display
            .as_ref()
            .is_none_or(|s| *s == self.inferred_display)
    }
}

/// Infers the benchmark's bound: the largest grade over its linear inputs.
pub fn compare_bounds(spec: &BenchmarkSpec, cfg: &RoundingConfig) -> Result<BoundComparison, Diagnostic> {
    let c = compile_program(gen_benchmark(spec))?;
    let inferred = c
        .linear_params()
        .map(|p| c.bound(&p.name))
        .max()
        .unwrap_or_else(Grade::zero);
    let standard = standard_bound(spec);
    Ok(BoundComparison {
        spec: *spec,
        inferred_display: grade_to_decimal(&inferred, cfg),
        standard_display: standard.as_ref().map(|g| grade_to_decimal(g, cfg)),
        inferred,
        standard,
        ops: c.ops(),
    })
}

/// Forward error bound `kappa * backward` in three significant digits.
pub fn forward_bound_from_kappa(backward: &Grade, kappa: &BigRational, cfg: &RoundingConfig) -> String {
    format_sci3(&(kappa * backward.to_real(cfg)))
}

#[derive(Debug, Clone, Default)]
pub struct BenchOptions {
    pub rounding: RoundingConfig,
    /// Soundness trials per row; zero skips them.
    pub trials: usize,
    pub seed: u64,
    pub distribution: InputDistribution,
}

/// One row of the benchmark report.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub size: usize,
    pub ops: usize,
    pub inferred: String,
    pub standard: Option<String>,
    #[serde(rename = "match")]
    pub matches: bool,
    pub trials: usize,
    pub violations: usize,
    pub max_slack: f64,
    pub elapsed_ms: u64,
}

fn bench_row(spec: &BenchmarkSpec, opts: &BenchOptions) -> Result<BenchRow, Diagnostic> {
    let start = Instant::now();
    let cmp = compare_bounds(spec, &opts.rounding)?;
    let (trials, violations, max_slack) = if opts.trials > 0 {
        let c = compile_program(gen_benchmark(spec))?;
        let tc = TrialConfig {
            trials: opts.trials,
            seed: opts.seed,
            distribution: opts.distribution,
            rounding: opts.rounding.clone(),
        };
        let r = verify_soundness(&c, &tc);
        (r.trials, r.violations, r.max_slack)
    } else {
        (0, 0, 0.0)
    };
    Ok(BenchRow {
        benchmark: spec.kind.name().to_string(),
        size: spec.size,
        ops: cmp.ops,
        matches: cmp.matches(),
        inferred: cmp.inferred_display,
        standard: cmp.standard_display,
        trials,
        violations,
        max_slack,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every spec, in parallel when enabled. Rows come back in input order.
pub fn run_bench(specs: &[BenchmarkSpec], opts: &BenchOptions) -> Result<Vec<BenchRow>, Diagnostic> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        specs.par_iter().map(|s| bench_row(s, opts)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        specs.iter().map(|s| bench_row(s, opts)).collect()
    }
}

/// Plain-text table, one row per benchmark instance.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>6}  {:>9} {:>9}  {:<5} {:>6} {:>10} {:>9} {:>9}",
        "Benchmark", "Size", "Ops", "Bean", "Std.", "Match", "Trials", "Violations", "MaxSlack", "Time(ms)"
    );
    for r in rows {
        let size = match r.benchmark.as_str() {
            "MatVecMul" | "LinSolve2" => format!("{0}x{0}", r.size),
            _ => r.size.to_string(),
        };
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>6}  {:>9} {:>9}  {:<5} {:>6} {:>10} {:>9.3} {:>9}",
            r.benchmark,
            size,
            r.ops,
            r.inferred,
            r.standard.as_deref().unwrap_or("-"),
            if r.matches { "yes" } else { "NO" },
            r.trials,
            r.violations,
            r.max_slack,
            r.elapsed_ms
        );
    }
    out
}
