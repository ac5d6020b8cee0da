//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lipsharp::capacity::{bump_lip_f64, eval_bump_f64, make_bump, Bump, BumpSpec};
use lipsharp::cubetree::{
    children_count, generation_measure, inner_cube, inner_set_lower_bound, selected_offsets, validate_params,
    DyadicCube, ParamSequence,
};
use lipsharp::cubetree::geometry::DyadicBox;
use lipsharp::gradcheck::{chain_inequality, hajlasz_pair_check, maximal_function, GridField, PolyCurve, RadialField};
use lipsharp::lorentz::{lorentz_norm, lorentz_norm_step, LorentzIndex, NormValue, RadialProfile, StepFunction};
use lipsharp::numeric::{Dyadic, Scaled, TailOptions};
use lipsharp::sharpfn::{eval_f, lip_field_norm_budget, lip_probe, nondiff_witness, random_chains, SharpExample};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lorentz_norms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = rng.gen_range(0.01..100.0);
        let q_exp = rng.gen_range(1.0..6.0);
        let f = StepFunction::indicator(m, 1.0).map_err(|e| e.to_string())?;
        let got = lorentz_norm_step(&f, LorentzIndex::new(q_exp, 1.0).unwrap());
        let want = q_exp * f64::powf(m, 1.0 / q_exp);
        worst = worst.max((got - want).abs() / want);
    }
    ensure!(worst <= 1e-9, "indicator relative error {worst:e}");

    let opts = TailOptions::default();
    let g = RadialProfile::log_critical(2);
    let n22 = lorentz_norm(&g, LorentzIndex::new(2.0, 2.0).unwrap(), &opts);
    let v = n22.finite().ok_or(format!("(2,2) norm not finite: {n22:?}"))?;
    ensure!((v - 1.0).abs() <= 1e-6, "(2,2) norm {v}");
    match lorentz_norm(&g, LorentzIndex::new(2.0, 1.0).unwrap(), &opts) {
        NormValue::Divergent { partial } if partial > 1e6 => {
            Ok(format!("indicator err {worst:.1e}, (2,2) = {v:.9}, (2,1) partial {partial:.2e}"))
        }
        other => Err(format!("(2,1) not certified divergent: {other:?}")),
    }
}

fn bump_at_default() -> Result<Bump, String> {
    let center = vec![Dyadic::new(3.into(), 8), Dyadic::new((-5).into(), 8)];
    make_bump(BumpSpec::log_default(center, 0.1, 1.0, 0.05)).map_err(|e| e.to_string())
}

fn capacity_bump() -> Outcome {
    let b = bump_at_default()?;
    let (m_in, m_out) = b.continuity_mismatch();
    ensure!(m_in <= 1e-9 && m_out <= 1e-9, "continuity mismatch {m_in:e}, {m_out:e}");

    // ‖Lip φ‖_{2,2}^2 = ∫_a^b g(t)^2 dt over the shell, with g(t)^2 = 1/(t (1 + ln(1/t))^2)
    let k = b.tau() * b.c_n * b.lambda;
    let ln_inv_a = -(PI.ln() + 2.0 * b.delta.ln());
    let ln_inv_b = -(PI * 0.05f64.powi(2)).ln();
    let oracle = k * (1.0 / (1.0 + ln_inv_b) - 1.0 / (1.0 + ln_inv_a)).sqrt();
    ensure!(oracle <= 0.05, "norm {oracle}");
    let lib = b.lip_norm.upper().ok_or("no certified norm")?;
    ensure!((lib - oracle).abs() <= 1e-6 * oracle.max(1e-12), "library norm {lib} vs {oracle}");

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c: Vec<f64> = b.center().iter().map(Dyadic::to_f64).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = f64::exp(rng.gen_range((1e-8f64).ln()..(0.049f64).ln()));
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let at = |s: f64| eval_bump_f64(&b, &[c[0] + s * th.cos(), c[1] + s * th.sin()]);
        let h = r * 1e-5;
        let fd = (at(r - h) - at(r + h)) / (2.0 * h);
        let lip = bump_lip_f64(&b, &[c[0] + r * th.cos(), c[1] + r * th.sin()]);
        worst = worst.max((fd - lip).abs() / lip);
    }
    ensure!(worst <= 1e-4, "finite difference relative error {worst:e}");
    Ok(format!("norm {oracle:.6} (library {lib:.6}), mismatch {:.1e}, slope err {worst:.1e}", m_in.max(m_out)))
}

/// Every odd offset whose child keeps `2^-l_n` from `I_Q` and from `∂Q`.
fn brute_children(q: &DyadicCube, n: usize, p: &ParamSequence) -> Vec<DyadicCube> {
    let grid = 1i64 << (p.j[n + 1] - p.j[n]);
    let gap = Dyadic::pow2(-(p.l[n] as i64));
    let inner = inner_cube(q, p);
    let outer = q.bounds(p);
    let odd: Vec<i64> = (-grid + 1..grid).step_by(2).collect();
    let mut out = Vec::new();
    for i in 0..odd.len().pow(p.dim) {
        let mut rest = i;
        let off: Vec<BigInt> = (0..p.dim)
            .map(|_| {
                let c = odd[rest % odd.len()];
                rest /= odd.len();
                BigInt::from(c)
            })
            .collect();
        let child = q.child(&off, p);
        let b = child.bounds(p);
        if inner.dist_inf(&b) >= gap && outer.depth_of(&b) >= gap {
            out.push(child);
        }
    }
    out
}

fn volume(b: &DyadicBox) -> BigRational {
    b.lo.iter().zip(&b.hi).fold(BigRational::from_integer(1.into()), |acc, (lo, hi)| acc * (hi - lo).to_rational())
}

fn pairwise_disjoint(boxes: &[DyadicBox]) -> bool {
    boxes.iter().enumerate().all(|(i, a)| boxes[i + 1..].iter().all(|b| !a.overlaps(b)))
}

fn geometry_oracle() -> Outcome {
    let mut total = 0;
    for (j, l) in [(vec![0, 3, 7], vec![2, 5]), (vec![0, 4, 8], vec![2, 6])] {
        let p = ParamSequence::relaxed(2, j.clone(), Some(l)).map_err(|e| e.to_string())?;
        let mut generation = vec![DyadicCube::root(2)];
        for n in 0..p.n_max() {
            let mut next = Vec::new();
            for q in &generation {
                let kids = brute_children(q, n, &p);
                ensure!(BigInt::from(kids.len()) == children_count(n, &p), "count at level {n} for j = {j:?}");
                let lib: BTreeSet<Vec<Dyadic>> =
                    selected_offsets(n, &p).iter().map(|off| q.child(off, &p).center).collect();
                let brute: BTreeSet<Vec<Dyadic>> = kids.iter().map(|c| c.center.clone()).collect();
                ensure!(lib == brute, "selected children differ at level {n} for j = {j:?}");
                let boxes: Vec<DyadicBox> = kids.iter().map(|c| c.bounds(&p)).collect();
                let parent = q.bounds(&p);
                ensure!(
                    boxes.iter().all(|b| b.lo.iter().zip(&parent.lo).all(|(x, y)| x >= y)
                        && b.hi.iter().zip(&parent.hi).all(|(x, y)| x <= y)),
                    "child escapes its parent at level {n}"
                );
                ensure!(pairwise_disjoint(&boxes), "siblings overlap at level {n}");
                next.extend(kids);
            }
            let boxes: Vec<DyadicBox> = next.iter().map(|c| c.bounds(&p)).collect();
            let measure = boxes.iter().map(volume).fold(BigRational::from_integer(0.into()), |a, v| a + v);
            ensure!(measure == generation_measure(n + 1, &p), "measure at generation {} for j = {j:?}", n + 1);
            generation = next;
        }
        total += generation.len();
    }
    Ok(format!("{total} deepest subcubes enumerated, 0 discrepancies"))
}

fn strict_construction() -> Outcome {
    let p = ParamSequence::default_strict(2);
    let v = validate_params(&p);
    ensure!(v.is_ok(), "violations: {:?}", v.violations);
    let growth = (0..p.n_max()).all(|n| 9 * (p.j[n] + 1) <= p.j[n + 1]);
    ensure!(growth, "growth inequality fails");
    let want = BigRational::new((4 * 221).into(), 256.into());
    let m1 = generation_measure(1, &p);
    ensure!(m1 == want, "generation 1 measure {m1}");
    let bound = inner_set_lower_bound(&p);
    let floor = (-2f64).exp();
    ensure!(bound.running_above_bound.iter().all(|b| *b), "running bound below e^-(2 - 2^(1-n))");
    ensure!(
        bound.running.iter().all(|r| num_traits::ToPrimitive::to_f64(r).unwrap() > floor),
        "running measure at or below the floor"
    );
    ensure!(bound.lower > bound.floor, "lower bound {} <= floor {}", bound.lower, bound.floor);
    Ok(format!("generation 1 measure {m1}, residual lower bound {:.4} > {:.4}", bound.lower, bound.floor))
}

fn separation() -> Outcome {
    let ex = SharpExample::default_strict(2).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    for chain in random_chains(&ex, 25, 3, &mut rng) {
        let rows = lip_probe(&ex, &chain, 1).map_err(|e| format!("{}: {e}", chain.id()))?;
        ensure!(rows[0].bound <= Scaled::pow2(-2), "level 0 bound {} on {}", rows[0].bound, chain.id());
        ensure!(rows[1].bound <= Scaled::pow2(-23), "level 1 bound {} on {}", rows[1].bound, chain.id());
        for (n, min, want) in [(1, &mut min1, 2.82), (2, &mut min2, 3.7e8)] {
            let w = nondiff_witness(&ex, &chain, n).map_err(|e| format!("{}: {e}", chain.id()))?;
            ensure!(w.ratio_lower >= Scaled::from_f64(want), "level {n} ratio {} on {}", w.ratio_lower, chain.id());
            let at_point = eval_f(&ex, &w.point, n).map_err(|e| e.to_string())?;
            let center = &chain.cubes(ex.params())[n].center;
            let at_center = eval_f(&ex, center, n).map_err(|e| e.to_string())?;
            ensure!(at_point.is_exact() && at_center.is_exact(), "witness values not exact on {}", chain.id());
            ensure!(at_point == w.f_y, "witness value changed on {}", chain.id());
            ensure!(at_center.value == ex.height(n), "center value {} on {}", at_center.value, chain.id());
            *min = min.min(w.ratio_lower.to_f64());
        }
    }
    Ok(format!("lip bounds 2^-2, 2^-23; min witness ratios {min1:.3}, {min2:.3e}"))
}

fn budget() -> Outcome {
    let ex = SharpExample::default_strict(2).map_err(|e| e.to_string())?;
    let r = lip_field_norm_budget(&ex);
    let total: BigRational = r.total.parse().map_err(|_| format!("bad total {}", r.total))?;
    ensure!(r.within_two && total <= BigRational::from_integer(2.into()), "budget {}", r.total);
    Ok(format!("budget {} <= 2", r.total))
}

fn chaining() -> Outcome {
    let b = bump_at_default()?;
    let c: Vec<f64> = b.center().iter().map(Dyadic::to_f64).collect();
    let f = |x: &[f64]| eval_bump_f64(&b, x);
    let lip = RadialField::bump_lip(&b);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut missed = 0;
    for i in 0..100 {
        let mut pts: Vec<Vec<f64>> =
            (0..4).map(|_| c.iter().map(|ci| ci + rng.gen_range(-0.08..0.08)).collect()).collect();
        if i % 4 == 0 {
            pts[1] = c.clone();
        }
        let curve = PolyCurve::new(pts).map_err(|e| e.to_string())?;
        let coarse = chain_inequality(&f, &lip, &curve, 1 << 12);
        let fine = chain_inequality(&f, &lip, &curve, 1 << 13);
        ensure!(coarse.holds && fine.holds, "inequality fails on curve {i}: {} > {}", fine.lhs, fine.rhs);
        ensure!(coarse.converged && fine.converged, "integral not converged on curve {i}");
        worst = worst.max((fine.rhs - coarse.rhs).abs());
        if fine.integral == 0.0 {
            missed += 1;
        } else {
            min_slack = min_slack.min(fine.slack);
        }
    }
    ensure!(worst < 1e-6, "refinement changes the right side by {worst:e}");
    Ok(format!("100 curves hold ({missed} miss the support), min slack {min_slack:.3e}, refinement change {worst:.1e}"))
}

fn maximal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let g = GridField::from_fn(2, 17, |_| rng.gen_range(0.0..5.0)).map_err(|e| e.to_string())?;
        let radii = [g.h(), 2.0 * g.h(), 0.5];
        let m1 = maximal_function(&g, 1.0, &radii).map_err(|e| e.to_string())?;
        let m2 = maximal_function(&g, 2.0, &radii).map_err(|e| e.to_string())?;
        ensure!(g.values().iter().zip(m1.values()).all(|(a, b)| b >= a), "M1 < g on field {i}");
        ensure!(m1.values().iter().zip(m2.values()).all(|(a, b)| *a <= b * (1.0 + 1e-12)), "M1 > M2 on field {i}");
    }

    let b = bump_at_default()?;
    let c: Vec<f64> = b.center().iter().map(Dyadic::to_f64).collect();
    let lip = GridField::from_fn(2, 65, |x| bump_lip_f64(&b, x)).map_err(|e| e.to_string())?;
    let h = lip.h();
    let m = maximal_function(&lip, 1.0, &[h, 2.0 * h, 4.0 * h, 8.0 * h, 0.25]).map_err(|e| e.to_string())?;
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..2000)
        .map(|_| {
            let x = c.iter().map(|ci| ci + rng.gen_range(-0.1..0.1)).collect();
            let y = c.iter().map(|ci| ci + rng.gen_range(-0.1..0.1)).collect();
            (x, y)
        })
        .collect();
    let f = |x: &[f64]| eval_bump_f64(&b, x);
    let min_c = hajlasz_pair_check(&f, &m, &pairs, 2.0).min_c;
    let report = hajlasz_pair_check(&f, &m, &pairs, min_c);
    ensure!(report.passes(), "{} violations at C = {min_c}", report.violations.len());
    Ok(format!("20 fields ordered, Hajłasz passes at recorded C = {min_c:.4}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("lorentz norms", lorentz_norms, Duration::from_secs(5)),
        ("capacity bump", capacity_bump, Duration::from_secs(30)),
        ("geometry oracle", geometry_oracle, Duration::from_secs(60)),
        ("strict construction", strict_construction, Duration::from_secs(10)),
        ("lip/Lip separation", separation, Duration::from_secs(300)),
        ("budget", budget, Duration::from_secs(1)),
        ("chaining", chaining, Duration::from_secs(120)),
        ("maximal function", maximal, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let out = match out {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match out {
            Ok(msg) => println!("PASS {} {name} ({took:.2?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({took:.2?}): {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
