//! `construct`: parameter sequence, generation counts and measure table.

use lipsharp::cubetree::{generation_measure, inner_set_lower_bound, validate_params, Mode, ParamSequence};
use lipsharp::numeric::Scaled;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{envelope, rational_scaled, scaled_json, write_json};
use crate::CliError;

pub fn manifest(p: &ParamSequence) -> Value {
    let n_max = p.n_max();
    let validation = validate_params(p);
    let bound = inner_set_lower_bound(p);
    let counts: Vec<String> = (0..=n_max).map(|n| p.card(n).to_string()).collect();
    let measures: Vec<Value> = (0..=n_max)
        .map(|n| {
            let m = generation_measure(n, p);
            json!({
                "generation": n,
                "exact": m.to_string(),
                "value": m.to_f64(),
                "ratio_to_cube": bound.running[n].to_string(),
                "above_running_bound": bound.running_above_bound[n],
            })
        })
        .collect();
    let a: Vec<Value> = (0..n_max)
        .map(|n| json!({ "exp2": -(p.a_exp[n] as i64), "value": scaled_json(Scaled::pow2(-(p.a_exp[n] as i64))) }))
        .collect();
    envelope(
        "construction",
        json!({
            "mode": p.mode,
            "relaxed": p.mode == Mode::Relaxed,
            "dim": p.dim,
            "n_max": n_max,
            "j": p.j,
            "k": p.k,
            "l": p.l,
            "a": a,
            "eps": p.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "eps_value": p.eps.iter().map(|e| scaled_json(rational_scaled(e))).collect::<Vec<_>>(),
            "children_per_cube": p.children.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "generation_counts": counts,
            "measure": measures,
            "tail_factor": bound.tail_factor,
            "residual_lower_bound": bound.lower,
            "residual_floor": bound.floor,
            "validation": validation,
        }),
    )
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.params()?;
    let validation = validate_params(&p);
    if !validation.is_ok() {
        let list: Vec<String> = validation
            .violations
            .iter()
            .map(|v| format!("{} (level {}): {}", v.rule, v.level, v.detail))
            .collect();
        return Err(CliError::Config(format!("parameter violations:\n  {}", list.join("\n  "))));
    }
    let m = manifest(&p);
    let path = write_json(&cfg.out, "manifest.json", &m)?;
    println!("{}", serde_json::to_string_pretty(&m).expect("json values serialize"));
    eprintln!("wrote {}", path.display());
    Ok(())
}
