//! Benchmark generators, bound tables and soundness trials.

use bean_core::harness::*;
use bean_core::numerics::RoundingConfig;
use bean_core::pipeline::compile_program;
use num_rational::BigRational;

fn spec(kind: BenchmarkKind, size: usize) -> BenchmarkSpec {
    BenchmarkSpec::new(kind, size).unwrap()
}

#[test]
fn backward_bound_rows_reproduce() {
    let cfg = RoundingConfig::default();
    for (kind, n, want) in BACKWARD_BOUNDS {
        let s = spec(kind, n);
        let cmp = compare_bounds(&s, &cfg).unwrap();
        assert_eq!(cmp.inferred_display, want, "{s} inferred");
        assert_eq!(cmp.standard_display.as_deref(), Some(want), "{s} standard");
        assert_eq!(cmp.ops, expected_ops(&s), "{s} ops");
        assert!(cmp.matches());
    }
}

#[test]
fn forward_bound_rows_reproduce() {
    let cfg = RoundingConfig::power_of_two(-52);
    let one = BigRational::from_integer(1.into());
    for (kind, n, want) in FORWARD_BOUNDS {
        let cmp = compare_bounds(&spec(kind, n), &cfg).unwrap();
        assert_eq!(forward_bound_from_kappa(&cmp.inferred, &one, &cfg), want, "{kind} {n}");
    }
}

#[test]
fn zero_condition_number_gives_zero_forward_bound() {
    let cfg = RoundingConfig::default();
    let g = standard_bound(&spec(BenchmarkKind::Sum, 10)).unwrap();
    assert_eq!(
        forward_bound_from_kappa(&g, &BigRational::from_integer(0.into()), &cfg),
        "0.00e0"
    );
}

#[test]
fn ops_formulas_small_sizes() {
    for kind in BenchmarkKind::ALL {
        let sizes: &[usize] = if kind == BenchmarkKind::LinSolve2 {
            &[2]
        } else {
            &[1, 2, 3, 7]
        };
        for &n in sizes {
            let s = spec(kind, n);
            let c = compile_program(gen_benchmark(&s)).unwrap_or_else(|d| panic!("{s}: {}", d.message));
            assert_eq!(c.ops(), expected_ops(&s), "{s}\n{}", gen_source(&s));
        }
    }
}

#[test]
fn small_instances_match_hand_written_programs() {
    let cfg = RoundingConfig::default();
    let inner = compare_bounds(&spec(BenchmarkKind::DotProd, 2), &cfg).unwrap();
    assert_eq!(inner.inferred.to_string(), "2 eps");
    let sum2 = compare_bounds(&spec(BenchmarkKind::Sum, 2), &cfg).unwrap();
    assert_eq!(sum2.inferred.to_string(), "eps");
    let mv = compare_bounds(&spec(BenchmarkKind::MatVecMul, 2), &cfg).unwrap();
    assert_eq!(mv.inferred.to_string(), "2 eps");
    let ls = compare_bounds(&spec(BenchmarkKind::LinSolve2, 2), &cfg).unwrap();
    assert_eq!(ls.inferred.to_string(), "5/2 eps");
    assert!(ls.standard.is_none());
}

#[test]
fn bad_sizes_and_names() {
    assert!(BenchmarkSpec::new(BenchmarkKind::Sum, 0).is_err());
    assert!(BenchmarkSpec::new(BenchmarkKind::LinSolve2, 3).is_err());
    assert_eq!("horner".parse::<BenchmarkKind>().unwrap(), BenchmarkKind::Horner);
    assert!("Fft".parse::<BenchmarkKind>().is_err());
}

#[test]
fn soundness_small_suite() {
    let tc = TrialConfig {
        trials: 200,
        seed: 7,
        ..Default::default()
    };
    for (kind, n) in [
        (BenchmarkKind::DotProd, 5),
        (BenchmarkKind::Sum, 10),
        (BenchmarkKind::Horner, 6),
        (BenchmarkKind::PolyVal, 5),
        (BenchmarkKind::MatVecMul, 3),
        (BenchmarkKind::LinSolve2, 2),
    ] {
        let c = compile_program(gen_benchmark(&spec(kind, n))).unwrap();
        let r = verify_soundness(&c, &tc);
        assert_eq!(r.violations, 0, "{kind} {n}: {:?}", r.failures);
        assert!(r.max_slack <= 1.0 && r.max_slack > 0.0, "{kind} {n}: {}", r.max_slack);
    }
}

#[test]
fn signed_inputs_are_sound_too() {
    let tc = TrialConfig {
        trials: 200,
        seed: 3,
        distribution: InputDistribution::SignedLogUniform { lo: 0.1, hi: 1000.0 },
        ..Default::default()
    };
    for kind in [BenchmarkKind::DotProd, BenchmarkKind::Sum, BenchmarkKind::Horner] {
        let c = compile_program(gen_benchmark(&spec(kind, 8))).unwrap();
        let r = verify_soundness(&c, &tc);
        assert_eq!(r.violations, 0, "{kind}: {:?}", r.failures);
    }
}

#[test]
fn same_seed_same_report() {
    let c = compile_program(gen_benchmark(&spec(BenchmarkKind::DotProd, 4))).unwrap();
    let tc = TrialConfig {
        trials: 50,
        seed: 42,
        ..Default::default()
    };
    let a = serde_json::to_string(&verify_soundness(&c, &tc)).unwrap();
    let b = serde_json::to_string(&verify_soundness(&c, &tc)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bench_rows_in_order() {
    let specs = [spec(BenchmarkKind::Sum, 50), spec(BenchmarkKind::DotProd, 20)];
    let rows = run_bench(&specs, &BenchOptions::default()).unwrap();
    assert_eq!(rows[0].benchmark, "Sum");
    assert_eq!(rows[1].benchmark, "DotProd");
    assert!(rows.iter().all(|r| r.matches));
    let table = format_table(&rows);
    assert!(table.contains("5.44e-15"));
}
