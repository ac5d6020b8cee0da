//! `gradcheck`: chaining, maximal function and Hajłasz checks.
//!
//! The test case is a capacity bump (`ε = 0.1`, `τ = 1`, budget `0.05`)
//! centered off the grid, with its Lip field as the upper gradient. Writes
//! `gradcheck.json`, `lip_field.csv` and `maximal.csv`.

use std::path::Path;

use lipsharp::capacity::{bump_lip_f64, eval_bump_f64, make_bump, Bump, BumpSpec};
use lipsharp::gradcheck::{
    chain_inequality, hajlasz_pair_check, hajlasz_sweep, maximal_function, maximal_lorentz_ratio, GridField,
    PolyCurve, RadialField,
};
use lipsharp::lorentz::LorentzIndex;
use lipsharp::numeric::Dyadic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{envelope, write_json, write_text};
use crate::CliError;

pub fn test_bump(cfg: &RunConfig) -> Result<Bump, CliError> {
    let center: Vec<Dyadic> = (0..cfg.dim as i64).map(|i| Dyadic::new((3 - 8 * i).into(), 8)).collect();
    let mut spec = BumpSpec::log_default(center, 0.1, 1.0, 0.05);
    spec.profile = cfg.profile.build(cfg.dim);
    make_bump(spec).map_err(|e| CliError::Failed(format!("test bump: {e}")))
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

pub fn run(cfg: &RunConfig, field_csv: Option<&Path>) -> Result<(), CliError> {
    let g_cfg = &cfg.gradcheck;
    let b = test_bump(cfg)?;
    let c: Vec<f64> = b.center().iter().map(|d| d.to_f64()).collect();
    let f = |x: &[f64]| eval_bump_f64(&b, x);
    let lip = RadialField::bump_lip(&b);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut curves = Vec::new();
    let mut all_hold = true;
    let mut worst_refinement: f64 = 0.0;
    for i in 0..g_cfg.curves {
        let mut pts: Vec<Vec<f64>> =
            (0..4).map(|_| c.iter().map(|ci| ci + rng.gen_range(-0.08..0.08)).collect()).collect();
        if i % 4 == 0 {
            // through the plateau
            pts[1] = c.clone();
        }
        let curve = PolyCurve::new(pts).map_err(failed)?;
        let r = chain_inequality(&f, &lip, &curve, g_cfg.segments);
        let finer = chain_inequality(&f, &lip, &curve, 2 * g_cfg.segments);
        let change = (finer.rhs - r.rhs).abs();
        worst_refinement = worst_refinement.max(change);
        all_hold &= r.holds && finer.holds;
        curves.push(json!({
            "length": r.length,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "slack": r.slack,
            "telescoping": r.telescoping,
            "converged": r.converged,
            "holds": r.holds,
            "refinement_change": change,
        }));
    }

    let g = match field_csv {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            GridField::from_csv(cfg.dim, &text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => GridField::from_fn(cfg.dim, g_cfg.grid_nodes, |x| bump_lip_f64(&b, x)).map_err(failed)?,
    };
    let h = g.h();
    let mut radii = vec![h, 2.0 * h, 4.0 * h];
    if cfg.dim <= 2 {
        radii.extend([8.0 * h, 0.25]);
    }
    let m1 = maximal_function(&g, 1.0, &radii).map_err(failed)?;
    let m2 = maximal_function(&g, 2.0, &radii).map_err(failed)?;
    let dominates = g.values().iter().zip(m1.values()).all(|(a, b)| b >= a);
    let ordered = m1.values().iter().zip(m2.values()).all(|(a, b)| *a <= b * (1.0 + 1e-12));
    let idx = LorentzIndex::new(cfg.dim as f64, 1.0).map_err(failed)?;
    let ratio = maximal_lorentz_ratio(&g, &m1, idx);

    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..g_cfg.pairs)
        .map(|_| {
            let x = c.iter().map(|ci| ci + rng.gen_range(-0.1..0.1)).collect();
            let y = c.iter().map(|ci| ci + rng.gen_range(-0.1..0.1)).collect();
            (x, y)
        })
        .collect();
    let at_two = hajlasz_pair_check(&f, &m1, &pairs, 2.0);
    let min_c = at_two.min_c;
    let at_min = hajlasz_pair_check(&f, &m1, &pairs, min_c);
    let sweep = hajlasz_sweep(&f, &m1, &pairs, &[0.25, 0.5, 1.0, 2.0, 4.0]);

    write_text(&cfg.out, "lip_field.csv", &g.to_csv().map_err(failed)?)?;
    write_text(&cfg.out, "maximal.csv", &m1.to_csv().map_err(failed)?)?;
    let passed = all_hold && dominates && ordered && at_min.passes();
    let report = envelope(
        "gradcheck",
        json!({
            "passed": passed,
            "seed": cfg.seed,
            "bump": { "center": c, "eps": 0.1, "tau": 1.0, "ln_delta": b.delta.ln(), "lambda": b.lambda },
            "chaining": {
                "segments": g_cfg.segments,
                "all_hold": all_hold,
                "worst_refinement_change": worst_refinement,
                "curves": curves,
            },
            "maximal": {
                "nodes": g.nodes(),
                "radii": radii,
                "dominates_field": dominates,
                "power_mean_order": ordered,
                "lorentz_ratio_q1": ratio,
            },
            "hajlasz": {
                "pairs": pairs.len(),
                "violations_at_c2": at_two.violations.len(),
                "min_c": min_c,
                "passes_at_min_c": at_min.passes(),
                "sweep": sweep,
            },
        }),
    );
    write_json(&cfg.out, "gradcheck.json", &report)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("json values serialize"));
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed("gradient checks failed".into()))
    }
}
