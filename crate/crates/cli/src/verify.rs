//! `verify`: invariant suites with a JSON verdict.

use lipsharp::capacity::{make_bump, BumpSpec};
use lipsharp::cubetree::{generation_measure, generation_measure_by_count, inner_set_lower_bound, validate_params, Mode};
use lipsharp::gradcheck::{chain_inequality, maximal_function, GridField, PolyCurve, RadialField};
use lipsharp::lorentz::{lorentz_norm, lorentz_norm_step, LorentzIndex, RadialProfile, StepFunction};
use lipsharp::numeric::{Dyadic, TailOptions};
use lipsharp::sharpfn::{lip_field_norm_budget, SharpExample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{envelope, write_json};
use crate::probe::{chains, example, probe_chain, probe_depth};
use crate::CliError;

pub const SUITES: [&str; 7] = ["params", "measure", "lorentz", "capacity", "sharpfn", "budget", "gradcheck"];

const RULES: [&str; 9] = [
    "j0 = 0",
    "j divisible by 3",
    "j growth",
    "l derivation",
    "growth inequality",
    "lemma inequality",
    "nonempty generation",
    "norm budget",
    "k derivation",
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
    skipped: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: Vec::new(), skipped: Vec::new() }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.name, name: name.into(), passed, detail: detail.into() });
    }
}

fn params_suite(cfg: &RunConfig, s: &mut Suite) -> Result<(), CliError> {
    let p = cfg.params()?;
    let v = validate_params(&p);
    for rule in RULES {
        if v.skipped.iter().any(|x| x == rule) {
            s.skipped.push(rule.into());
            continue;
        }
        let hits: Vec<String> = v
            .violations
            .iter()
            .filter(|x| x.rule == rule)
            .map(|x| format!("level {}: {}", x.level, x.detail))
            .collect();
        s.check(rule, hits.is_empty(), hits.join("; "));
    }
    Ok(())
}

fn measure_suite(cfg: &RunConfig, s: &mut Suite) -> Result<(), CliError> {
    let p = cfg.params()?;
    let mismatched: Vec<usize> = (0..=p.n_max())
        .filter(|&n| generation_measure(n, &p) != generation_measure_by_count(n, &p))
        .collect();
    s.check("generation measure", mismatched.is_empty(), format!("mismatched generations: {mismatched:?}"));
    let b = inner_set_lower_bound(&p);
    if p.mode == Mode::Strict {
        s.check(
            "running measure bound",
            b.running_above_bound.iter().all(|&x| x),
            format!("{:?}", b.running_above_bound),
        );
        s.check("residual measure floor", b.lower > b.floor, format!("{} > {}", b.lower, b.floor));
    } else {
        s.skipped.extend(["running measure bound".into(), "residual measure floor".into()]);
    }
    Ok(())
}

fn lorentz_suite(cfg: &RunConfig, s: &mut Suite) -> Result<(), CliError> {
    let mut worst: f64 = 0.0;
    for (m, q) in [(0.5, 1.5), (1.0, 2.0), (3.0, 2.5), (0.125, 4.0)] {
        let idx = LorentzIndex::new(q, 1.0).expect("valid index");
        let f = StepFunction::indicator(m, 1.0).expect("valid indicator");
        let exact = q * f64::powf(m, 1.0 / q);
        worst = worst.max((lorentz_norm_step(&f, idx) - exact).abs() / exact);
    }
    s.check("indicator norm", worst <= 1e-9, format!("max relative error {worst:e}"));

    let profile = cfg.profile.build(cfg.dim);
    let beta = match profile {
        RadialProfile::LogCritical { beta, .. } => beta,
        _ => unreachable!("configured profiles are log-critical"),
    };
    let n = cfg.dim as f64;
    let opts = TailOptions::default();
    if n * beta > 1.0 {
        let idx = LorentzIndex::new(n, n).expect("valid index");
        let exact = (n * beta - 1.0).powf(-1.0 / n);
        let got = lorentz_norm(&profile, idx, &opts);
        let ok = got.finite().is_some_and(|v| (v - exact).abs() <= 1e-6 * exact);
        s.check("profile (N, N) norm", ok, format!("{got:?} vs {exact}"));
    }
    if beta <= 1.0 {
        let idx = LorentzIndex::new(n, 1.0).expect("valid index");
        let got = lorentz_norm(&profile, idx, &opts);
        s.check("profile (N, 1) divergence", got.is_divergent(), format!("{got:?}"));
    }
    Ok(())
}

fn capacity_suite(cfg: &RunConfig, s: &mut Suite) -> Result<(), CliError> {
    let mut spec = BumpSpec::log_default(vec![Dyadic::zero(); cfg.dim as usize], 0.1, 1.0, 0.05);
    spec.profile = cfg.profile.build(cfg.dim);
    match make_bump(spec) {
        Ok(b) => {
            let (inner, outer) = b.continuity_mismatch();
            s.check("bump construction", true, format!("ln delta = {:e}", b.delta.ln()));
            s.check(
                "bump continuity",
                inner <= 1e-9 && outer <= 1e-9,
                format!("mismatch {inner:e} at delta, {outer:e} at eps/2"),
            );
            let norm = b.lip_norm.upper();
            s.check("bump norm budget", norm.is_some_and(|v| v <= 0.05), format!("{:?}", b.lip_norm));
        }
        Err(e) => s.check("bump construction", false, e.to_string()),
    }
    Ok(())
}

fn sharp_suite(cfg: &RunConfig, ex: &SharpExample, s: &mut Suite) -> Result<(), CliError> {
    let depth = probe_depth(cfg, ex);
    let chains = chains(cfg, ex, &[], depth)?;
    let mut errors = Vec::new();
    let mut short = Vec::new();
    let mut separated = true;
    let mut cross = true;
    for c in &chains {
        match probe_chain(ex, c, depth) {
            Ok(p) => {
                for (l, w) in p.lip.iter().zip(&p.witnesses) {
                    if !w.meets_target() {
                        short.push(format!("{} level {}", c.id(), w.level));
                    }
                    separated &= l.bound < w.ratio_lower;
                    if let Some(u) = l.sup_ratio_upper {
                        cross &= u <= l.bound.inflate(1e-9);
                    }
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    s.check("probe chains", errors.is_empty(), errors.join("; "));
    s.check("witness targets", short.is_empty() && errors.is_empty(), short.join("; "));
    s.check("lip below witness", separated, format!("{} chains to depth {}", chains.len(), depth + 1));
    s.check("sup cross-check", cross, "sup_on_ball upper bound within the lip bound");
    Ok(())
}

fn budget_suite(ex: &SharpExample, s: &mut Suite) {
    let b = lip_field_norm_budget(ex);
    s.check("lip norm budget", b.within_two, format!("total {}", b.total));
    if let Some(r) = b.realized {
        s.check("realized budget", r.to_f64() <= b.total_f64 * (1.0 + 1e-12), format!("{r} <= {}", b.total));
    }
}

fn grad_suite(cfg: &RunConfig, s: &mut Suite) -> Result<(), CliError> {
    let dim = cfg.dim as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let center: Vec<Dyadic> = (0..dim).map(|i| Dyadic::new((3 - 8 * i as i64).into(), 8)).collect();
    let mut spec = BumpSpec::log_default(center.clone(), 0.1, 1.0, 0.05);
    spec.profile = cfg.profile.build(cfg.dim);
    let b = make_bump(spec).map_err(|e| CliError::Failed(e.to_string()))?;
    let field = RadialField::bump_lip(&b);
    let f = |x: &[f64]| lipsharp::capacity::eval_bump_f64(&b, x);
    let c: Vec<f64> = center.iter().map(|d| d.to_f64()).collect();
    let mut holds = true;
    for _ in 0..5 {
        let pts: Vec<Vec<f64>> =
            (0..3).map(|_| c.iter().map(|ci| ci + rng.gen_range(-0.08..0.08)).collect()).collect();
        let curve = PolyCurve::new(pts).map_err(|e| CliError::Failed(e.to_string()))?;
        holds &= chain_inequality(&f, &field, &curve, 256).holds;
    }
    s.check("chaining inequality", holds, "5 random curves, 256 arcs");

    let mut dominated = true;
    let mut ordered = true;
    for _ in 0..2 {
        let g = GridField::from_fn(cfg.dim, if dim <= 2 { 17 } else { 5 }, |_| rng.gen_range(0.0..1.0))
            .map_err(|e| CliError::Failed(e.to_string()))?;
        let radii = [g.h(), 2.0 * g.h()];
        let m1 = maximal_function(&g, 1.0, &radii).map_err(|e| CliError::Failed(e.to_string()))?;
        let m2 = maximal_function(&g, 2.0, &radii).map_err(|e| CliError::Failed(e.to_string()))?;
        dominated &= g.values().iter().zip(m1.values()).all(|(a, b)| b >= a);
        ordered &= m1.values().iter().zip(m2.values()).all(|(a, b)| *a <= b * (1.0 + 1e-12));
    }
    s.check("maximal dominates field", dominated, "");
    s.check("maximal power-mean order", ordered, "");
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let selected: Vec<String> = match &cfg.suites {
        Some(s) => s.clone(),
        None => SUITES.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = selected.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(CliError::Config(format!("unknown suite {bad:?} (known: {})", SUITES.join(", "))));
    }
    // fail fast on parameters that cannot be built at all
    cfg.params()?;
    let needs_example = selected.iter().any(|s| s == "sharpfn" || s == "budget");
    let ex = if needs_example { Some(example(cfg)?) } else { None };

    let mut suites = Vec::new();
    for name in SUITES.iter().filter(|n| selected.iter().any(|s| s == *n)) {
        let mut s = Suite::new(name);
        match *name {
            "params" => params_suite(cfg, &mut s)?,
            "measure" => measure_suite(cfg, &mut s)?,
            "lorentz" => lorentz_suite(cfg, &mut s)?,
            "capacity" => capacity_suite(cfg, &mut s)?,
            "sharpfn" => sharp_suite(cfg, ex.as_ref().expect("example built"), &mut s)?,
            "budget" => budget_suite(ex.as_ref().expect("example built"), &mut s),
            "gradcheck" => grad_suite(cfg, &mut s)?,
            _ => unreachable!("suite names validated"),
        }
        suites.push(s);
    }

    let checks: Vec<&Check> = suites.iter().flat_map(|s| &s.checks).collect();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let passed = failed.is_empty();
    let verdict = envelope(
        "verify",
        json!({
            "passed": passed,
            "mode": cfg.params()?.mode,
            "seed": cfg.seed,
            "suites": suites.iter().map(|s| s.name).collect::<Vec<_>>(),
            "checks_run": checks.len(),
            "failed": failed,
            "skipped": suites.iter().flat_map(|s| s.skipped.iter().map(move |k| format!("{}: {k}", s.name))).collect::<Vec<_>>(),
            "flag": if selected.is_empty() { Some("no suites selected") } else { None },
            "checks": checks,
        }),
    );
    write_json(&cfg.out, "verify.json", &verdict)?;
    println!("{}", serde_json::to_string_pretty(&verdict).expect("json values serialize"));
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failing properties: {}", failed.join(", "))))
    }
}
