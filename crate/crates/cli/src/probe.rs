//! `probe`: lip bounds and witness ratios along chains.
//!
//! `probe.csv` has one row per chain and level with the columns
//!
//! | column | meaning |
//! |---|---|
//! | `chain_id` | offsets per level, `/`-separated |
//! | `level` | level `n` of the probe |
//! | `radius_exp` | probe radius `2^-radius_exp` |
//! | `lip_bound`, `lip_mantissa`, `lip_exp2` | bound on the difference quotient at that radius |
//! | `witness_kind` | `center` or `boundary` |
//! | `witness_ratio`, `witness_mantissa`, `witness_exp2` | certified lower bound on the witness quotient |
//! | `target`, `target_mantissa`, `target_exp2` | `2^(j_n - k_n) / (2 sqrt N)` |
//! | `meets_target` | `witness_ratio >= target` |
//! | `witness_point` | coordinates of the witness, `;`-separated dyadics |
//!
//! Decimal columns switch to `m*2^e` once `|log2| > 900`.

use lipsharp::cubetree::CubeChain;
use lipsharp::numeric::Scaled;
use lipsharp::sharpfn::{lip_probe, nondiff_witness, random_chains, LipProbeRow, SharpExample, Witness, WitnessKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{envelope, out_file, scaled_json};
use crate::CliError;

pub fn example(cfg: &RunConfig) -> Result<SharpExample, CliError> {
    let p = cfg.params()?;
    SharpExample::new(p, cfg.profile.build(cfg.dim), cfg.q_s).map_err(|e| CliError::Config(e.to_string()))
}

/// The configured depth, capped at `n_max - 1` with a warning.
pub fn probe_depth(cfg: &RunConfig, ex: &SharpExample) -> usize {
    let cap = ex.params().n_max().saturating_sub(1);
    if cfg.depth > cap {
        eprintln!("warning: depth {} capped to {cap}", cfg.depth);
    }
    cfg.depth.min(cap)
}

/// Extends `chain` by first selected children down to `depth`.
pub fn extend_canonical(ex: &SharpExample, chain: &CubeChain, depth: usize) -> CubeChain {
    let canon = CubeChain::canonical(ex.params(), depth);
    let mut out = chain.clone();
    for n in chain.depth()..depth {
        out.push(canon.offsets[n].clone());
    }
    out
}

pub fn chains(cfg: &RunConfig, ex: &SharpExample, ids: &[String], depth: usize) -> Result<Vec<CubeChain>, CliError> {
    if ids.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        return Ok(random_chains(ex, cfg.chains, depth + 1, &mut rng));
    }
    ids.iter()
        .map(|id| {
            let c = CubeChain::parse_id(id).map_err(|e| CliError::Config(e.to_string()))?;
            c.validate(ex.params()).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(extend_canonical(ex, &c, depth + 1))
        })
        .collect()
}

pub struct ChainProbe {
    pub chain: CubeChain,
    pub lip: Vec<LipProbeRow>,
    pub witnesses: Vec<Witness>,
}

pub fn probe_chain(ex: &SharpExample, chain: &CubeChain, depth: usize) -> Result<ChainProbe, CliError> {
    let fail = |e: lipsharp::sharpfn::SharpError| CliError::Failed(format!("chain {}: {e}", chain.id()));
    let lip = lip_probe(ex, chain, depth).map_err(fail)?;
    let witnesses = (0..=depth)
        .map(|n| nondiff_witness(ex, chain, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    Ok(ChainProbe { chain: chain.clone(), lip, witnesses })
}

#[derive(Serialize)]
struct Row {
    chain_id: String,
    level: usize,
    radius_exp: u64,
    lip_bound: String,
    lip_mantissa: f64,
    lip_exp2: i64,
    witness_kind: &'static str,
    witness_ratio: String,
    witness_mantissa: f64,
    witness_exp2: i64,
    target: String,
    target_mantissa: f64,
    target_exp2: i64,
    meets_target: bool,
    witness_point: String,
}

fn parts(s: Scaled) -> (String, f64, i64) {
    (s.to_string(), s.mantissa, s.exponent)
}

fn rows(probe: &ChainProbe) -> Vec<Row> {
    probe
        .lip
        .iter()
        .zip(&probe.witnesses)
        .map(|(l, w)| {
            let (lip_bound, lip_mantissa, lip_exp2) = parts(l.bound);
            let (witness_ratio, witness_mantissa, witness_exp2) = parts(w.ratio_lower);
            let (target, target_mantissa, target_exp2) = parts(w.target);
            Row {
                chain_id: probe.chain.id(),
                level: l.level,
                radius_exp: l.radius_exp,
                lip_bound,
                lip_mantissa,
                lip_exp2,
                witness_kind: match w.kind {
                    WitnessKind::Center => "center",
                    WitnessKind::Boundary => "boundary",
                },
                witness_ratio,
                witness_mantissa,
                witness_exp2,
                target,
                target_mantissa,
                target_exp2,
                meets_target: w.meets_target(),
                witness_point: w.point.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
            }
        })
        .collect()
}

pub fn run(cfg: &RunConfig, ids: &[String]) -> Result<(), CliError> {
    let ex = example(cfg)?;
    let depth = probe_depth(cfg, &ex);
    let chains = chains(cfg, &ex, ids, depth)?;
    let probes: Vec<ChainProbe> = chains
        .par_iter()
        .map(|c| probe_chain(&ex, c, depth))
        .collect::<Result<_, _>>()?;

    let path = out_file(&cfg.out, "probe.csv")?;
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut all_meet = true;
    for p in &probes {
        for r in rows(p) {
            all_meet &= r.meets_target;
            w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| CliError::Failed(e.to_string()))?;

    let max_lip: Vec<_> = (0..=depth)
        .map(|n| {
            let worst = probes
                .iter()
                .map(|p| p.lip[n].bound)
                .fold(Scaled::zero(), |a, b| if b > a { b } else { a });
            scaled_json(worst)
        })
        .collect();
    let min_ratio: Vec<_> = (0..=depth)
        .map(|n| {
            let least = probes.iter().map(|p| p.witnesses[n].ratio_lower).reduce(|a, b| if b < a { b } else { a });
            least.map(scaled_json)
        })
        .collect();
    let summary = envelope(
        "probe",
        json!({
            "chains": probes.len(),
            "depth": depth,
            "csv": path.display().to_string(),
            "max_lip_bound": max_lip,
            "min_witness_ratio": min_ratio,
            "all_witnesses_meet_target": all_meet,
        }),
    );
    println!("{}", serde_json::to_string_pretty(&summary).expect("json values serialize"));
    if all_meet {
        Ok(())
    } else {
        Err(CliError::Failed("a witness fell short of its target".into()))
    }
}
