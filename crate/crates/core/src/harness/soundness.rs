use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::{BigNum, Distance, RoundingConfig};
use crate::pipeline::Compiled;
use crate::semantics::{
    backward_eval, distances, eval_approx_traced, eval_ideal, value_distance, ApproxValue, Env, EvalError, Value,
};
use crate::syntax::{Param, ParamKind, Ty};

/// Generator behind every random input, pinned so that a seed means the
/// same inputs on every platform.
pub const PRNG_NAME: &str = "chacha8 (rand_chacha 0.3), stream = trial index";

/// How trial inputs are drawn. Magnitudes are log-uniform in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDistribution {
    PositiveLogUniform { lo: f64, hi: f64 },
    SignedLogUniform { lo: f64, hi: f64 },
}

impl Default for InputDistribution {
    fn default() -> Self {
        InputDistribution::PositiveLogUniform { lo: 0.1, hi: 1000.0 }
    }
}

impl InputDistribution {
    fn sampler(&self) -> Sampler {
        let (lo, hi, signed) = match *self {
            InputDistribution::PositiveLogUniform { lo, hi } => (lo, hi, false),
            InputDistribution::SignedLogUniform { lo, hi } => (lo, hi, true),
        };
        // logs go through the software float so the result does not depend
        // on the platform libm
        let log2 = |x: f64| {
            let b = BigNum::from_f64(x).expect("finite bound");
            b.ln(64).div(&BigNum::from_i64(2).ln(64), 64).to_f64()
        };
        Sampler {
            lo,
            hi,
            a: log2(lo),
            b: log2(hi),
            signed,
        }
    }
}

struct Sampler {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    signed: bool,
}

impl Sampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let t: f64 = rng.gen_range(self.a..=self.b);
        let x = exp2(t).clamp(self.lo, self.hi);
        if self.signed && rng.gen::<bool>() {
            -x
        } else {
            x
        }
    }
}

/// `2^t` from basic operations only, so every platform gets the same bits.
/// Accurate to a few ulps, which is plenty for drawing inputs.
fn exp2(t: f64) -> f64 {
    let k = t.floor();
    let y = (t - k) * std::f64::consts::LN_2;
    let mut acc = 1.0;
    for i in (1..=20).rev() {
        acc = 1.0 + acc * y / i as f64;
    }
    let k = k as i64;
    if (-1022..=1023).contains(&k) {
        acc * f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        acc * 2f64.powi(k as i32)
    }
}

fn random_value(ty: &Ty, rng: &mut ChaCha8Rng, dist: &Sampler) -> ApproxValue {
    match ty {
        Ty::Num => Value::Num(dist.sample(rng)),
        Ty::Unit | Ty::Hole => Value::Unit,
        Ty::Disc(t) => random_value(t, rng, dist),
        Ty::Tensor(a, b) => Value::pair(random_value(a, rng, dist), random_value(b, rng, dist)),
        Ty::Sum(a, b) => {
            if rng.gen::<bool>() {
                Value::inl(random_value(a, rng, dist))
            } else {
                Value::inr(random_value(b, rng, dist))
            }
        }
    }
}

/// Random inputs for every parameter.
pub fn random_env(params: &[Param], rng: &mut ChaCha8Rng, dist: &InputDistribution) -> Env<f64> {
    let mut env = Env::new();
    let dist = dist.sampler();
    for p in params {
        let v = random_value(&p.ty, rng, &dist);
        match p.kind {
            ParamKind::Linear => env.lin.insert(p.name.clone(), v),
            ParamKind::Discrete => env.disc.insert(p.name.clone(), v),
        };
    }
    env
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub distribution: InputDistribution,
    pub rounding: RoundingConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            seed: 0,
            distribution: InputDistribution::default(),
            rounding: RoundingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    /// `slack` is the largest observed distance over inferred bound.
    Pass {
        slack: f64,
    },
    /// Outside the rounding model: overflow, or an underflow that left a
    /// result at infinite distance.
    Excluded(String),
    Violation(String),
}

/// Tolerance for comparing ideal results: 56 bits short of the working
/// precision, `2^-200` at 256 bits.
fn tolerance(bits: usize) -> BigNum {
    BigNum::from_rational(&crate::numerics::pow2(-(bits as i64 - 56)), bits)
}

/// One soundness check: the ideal program on the backward-perturbed inputs
/// reproduces the floating-point result, each linear input moved by at most
/// its inferred bound, and discrete inputs did not move. Also reports
/// whether a product or quotient underflowed.
pub fn run_trial(c: &Compiled, env: &Env<f64>, cfg: &RoundingConfig) -> (TrialOutcome, bool) {
    let bits = cfg.ideal_bits;
    let d = c.derivation();
    let run = match eval_approx_traced(d, env) {
        Ok(r) => r,
        Err(EvalError::Overflow(op)) => return (TrialOutcome::Excluded(format!("overflow in {op}")), false),
        Err(e) => return (TrialOutcome::Violation(format!("approximate run failed: {e}")), false),
    };
    let uf = run.underflow;
    let target = run.value.lift();
    let pert = match backward_eval(d, env, &target, bits) {
        Ok(p) => p,
        Err(e @ EvalError::InfiniteDistance(_)) if uf => {
            return (TrialOutcome::Excluded(format!("underflow: {e}")), uf)
        }
        Err(e) => return (TrialOutcome::Violation(format!("backward map failed: {e}")), uf),
    };
    let tol = tolerance(bits);
    let ideal = match eval_ideal(d, &pert, bits) {
        Ok(v) => v,
        Err(e) => return (TrialOutcome::Violation(format!("ideal run failed: {e}")), uf),
    };
    let out = value_distance(&ideal, &target, bits);
    if !out.le(&Distance::Finite(tol.clone())) {
        return (
            TrialOutcome::Violation(format!(
                "ideal result on perturbed inputs is {out} away from the float result"
            )),
            uf,
        );
    }
    let report = distances(env, &pert, bits);
    if let Some((z, _)) = report.discrete_changed.iter().find(|(_, ch)| **ch) {
        return (TrialOutcome::Violation(format!("discrete input `{z}` changed")), uf);
    }
    let mut slack = 0.0f64;
    for (x, dist) in &report.linear {
        let bound = BigNum::from_rational(&c.bound(x).to_real(cfg), bits);
        let limit = Distance::Finite(bound.add(&tol, bits));
        if !dist.le(&limit) {
            if uf {
                return (TrialOutcome::Excluded(format!("underflow: `{x}` moved {dist}")), uf);
            }
            return (
                TrialOutcome::Violation(format!("`{x}` moved {dist}, more than its bound {}", c.bound(x))),
                uf,
            );
        }
        if let Distance::Finite(dv) = dist {
            if !bound.is_zero() {
                slack = slack.max(dv.div(&bound, 64).to_f64());
            }
        }
    }
    (TrialOutcome::Pass { slack }, uf)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub reason: String,
}

/// Aggregate of a batch of trials.
#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub trials: usize,
    pub violations: usize,
    pub excluded: usize,
    pub max_slack: f64,
    pub underflow_trials: usize,
    pub seed: u64,
    pub prng: &'static str,
    /// The first few violations.
    pub failures: Vec<TrialFailure>,
}

const MAX_FAILURES: usize = 10;

/// Runs `tc.trials` independent trials. Trial `i` draws its inputs from
/// stream `i` of the seeded generator, so results do not depend on
/// scheduling.
pub fn verify_soundness(c: &Compiled, tc: &TrialConfig) -> TrialReport {
    let one = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(tc.seed);
        rng.set_stream(i as u64);
        let env = random_env(&c.params, &mut rng, &tc.distribution);
        run_trial(c, &env, &tc.rounding)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(TrialOutcome, bool)> = {
        use rayon::prelude::*;
        (0..tc.trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(TrialOutcome, bool)> = (0..tc.trials).map(one).collect();

    let mut report = TrialReport {
        trials: tc.trials,
        violations: 0,
        excluded: 0,
        max_slack: 0.0,
        underflow_trials: 0,
        seed: tc.seed,
        prng: PRNG_NAME,
        failures: Vec::new(),
    };
    for (i, (outcome, uf)) in results.into_iter().enumerate() {
        report.underflow_trials += uf as usize;
        match outcome {
            TrialOutcome::Pass { slack } => report.max_slack = report.max_slack.max(slack),
            TrialOutcome::Excluded(_) => report.excluded += 1,
            TrialOutcome::Violation(reason) => {
                report.violations += 1;
                if report.failures.len() < MAX_FAILURES {
                    report.failures.push(TrialFailure { trial: i, reason });
                }
            }
        }
    }
    report
}
