//! WebAssembly bindings for the browser demo in `www/`. Each export takes
//! plain strings and returns a JSON string, `{"ok": ...}` or `{"error": ...}`.

use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

use bean_core::harness::{verify_soundness, TrialConfig};
use bean_core::numerics::{grade_to_decimal, parse_uroundoff, RoundingConfig, DEFAULT_IDEAL_BITS};
use bean_core::semantics::{env_from_json, eval_approx, eval_ideal, format_f64, value_distance};
use bean_core::syntax::ParamKind;
use bean_core::{compile, Compiled};

/// Trials are capped so a click never hangs the page.
const MAX_TRIALS: usize = 2000;

fn fail(message: impl Into<String>) -> Json {
    json!({ "error": message.into() })
}

fn compiled(source: &str) -> Result<Compiled, Json> {
    compile(source, None).map_err(|d| {
        let (line, column) = d.position(source);
        json!({ "error": d.message, "code": d.code, "line": line, "column": column })
    })
}

fn config(uroundoff: &str) -> Result<RoundingConfig, Json> {
    let u = parse_uroundoff(uroundoff).map_err(|e| fail(e.to_string()))?;
    RoundingConfig::new(u, DEFAULT_IDEAL_BITS).map_err(|e| fail(e.to_string()))
}

fn check_json(source: &str, uroundoff: &str) -> Result<Json, Json> {
    let cfg = config(uroundoff)?;
    let c = compiled(source)?;
    let params: Vec<Json> = c
        .params
        .iter()
        .map(|p| match p.kind {
            ParamKind::Linear => {
                let g = c.bound(&p.name);
                json!({
                    "name": &*p.name,
                    "type": p.ty.to_string(),
                    "grade": g.to_string(),
                    "bound": grade_to_decimal(&g, &cfg),
                })
            }
            ParamKind::Discrete => json!({ "name": &*p.name, "type": p.ty.to_string(), "discrete": true }),
        })
        .collect();
    Ok(json!({ "main": c.main(), "params": params, "result_type": c.result.ty.erase().to_string() }))
}

fn run_json(source: &str, inputs: &str) -> Result<Json, Json> {
    let c = compiled(source)?;
    let inputs: Json = serde_json::from_str(inputs).map_err(|e| fail(format!("inputs are not valid JSON: {e}")))?;
    let env = env_from_json(&inputs, &c.params).map_err(|e| fail(e.to_string()))?;
    let approx = eval_approx(c.derivation(), &env).map_err(|e| fail(e.to_string()))?;
    let ideal = eval_ideal(c.derivation(), &env.lift(), DEFAULT_IDEAL_BITS).map_err(|e| fail(e.to_string()))?;
    let rp = value_distance(&ideal, &approx.lift(), DEFAULT_IDEAL_BITS);
    let ty = c.result.ty.erase();
    Ok(json!({
        "approx": approx.render(&ty),
        "ideal": ideal.render(&ty),
        "rp": if rp.is_infinite() { "inf".to_string() } else { format_f64(rp.to_f64()) },
    }))
}

fn verify_json(source: &str, trials: usize, seed: u64) -> Result<Json, Json> {
    let c = compiled(source)?;
    let tc = TrialConfig {
        trials: trials.min(MAX_TRIALS),
        seed,
        ..TrialConfig::default()
    };
    let r = verify_soundness(&c, &tc);
    serde_json::to_value(&r).map_err(|e| fail(e.to_string()))
}

fn wrap(r: Result<Json, Json>) -> String {
    match r {
        Ok(v) => json!({ "ok": v }).to_string(),
        Err(e) => e.to_string(),
    }
}

/// Inferred bound of every input and the result type.
#[wasm_bindgen]
pub fn check(source: &str, uroundoff: &str) -> String {
    wrap(check_json(source, uroundoff))
}

/// Floating-point and ideal results on the given inputs, and their distance.
#[wasm_bindgen]
pub fn run(source: &str, inputs: &str) -> String {
    wrap(run_json(source, inputs))
}

/// Random soundness trials at double precision.
#[wasm_bindgen]
pub fn verify(source: &str, trials: u32, seed: u32) -> String {
    wrap(verify_json(source, trials as usize, seed as u64))
}
