//! Benchmark programs, bound tables and randomized soundness trials.

mod bench;
mod generate;
mod soundness;

pub use bench::{
    bound_matrix, compare_bounds, expected_ops, format_table, forward_bound_from_kappa, run_bench, standard_bound,
    BenchOptions, BenchRow, BoundComparison, BACKWARD_BOUNDS, FORWARD_BOUNDS,
};
pub use generate::{gen_benchmark, gen_source, BenchmarkKind, BenchmarkSpec, HarnessError};
pub use soundness::{
    random_env, run_trial, verify_soundness, InputDistribution, TrialConfig, TrialFailure, TrialOutcome, TrialReport,
    PRNG_NAME,
};
