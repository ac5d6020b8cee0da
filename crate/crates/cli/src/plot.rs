//! `plot`: cube layout and per-level log plots as SVG.

use std::fmt::Write as _;

use clap::ValueEnum;
use lipsharp::cubetree::CubeChain;
use lipsharp::numeric::Dyadic;
use lipsharp::sharpfn::SharpExample;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::config::RunConfig;
use crate::output::write_text;
use crate::probe::{example, probe_chain};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    /// A cube of the given level with its inner cube, bump support and
    /// selected children (N = 2 only).
    Layout,
    /// log2 of the lip bound against the level.
    Lip,
    /// log2 of the witness ratio and its target against the level.
    Witness,
}

const SIZE: f64 = 600.0;
const PAD: f64 = 60.0;
/// Children drawn one by one up to this count; beyond it the selected ring.
const MAX_DRAWN: usize = 4096;

fn svg_open(title: &str) -> String {
    let total = SIZE + 2.0 * PAD;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total}\" height=\"{total}\" viewBox=\"0 0 {total} {total}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        total / 2.0
    )
}

fn square(cx: f64, cy: f64, half: f64, style: &str) -> String {
    format!(
        "<rect x=\"{:.4}\" y=\"{:.4}\" width=\"{:.4}\" height=\"{:.4}\" {style}/>\n",
        cx - half,
        cy - half,
        2.0 * half,
        2.0 * half
    )
}

pub fn layout_svg(ex: &SharpExample, level: usize) -> Result<String, CliError> {
    let p = ex.params();
    if p.dim != 2 {
        return Err(CliError::Config(format!("layout plots need N = 2, got N = {}", p.dim)));
    }
    if level >= p.n_max() {
        return Err(CliError::Config(format!("layout level {level} must be below n_max = {}", p.n_max())));
    }
    let chain = CubeChain::canonical(p, level);
    let q = chain.cube(p);
    let half = 2f64.powi(-(p.j[level] as i32));
    let scale = SIZE / (2.0 * half);
    let mid = PAD + SIZE / 2.0;
    let to_px = |d: f64| d * scale;

    let mut s = svg_open(&format!("level {level}: j = {}, l = {}, j' = {}", p.j[level], p.l[level], p.j[level + 1]));
    s += &square(mid, mid, to_px(half), "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");

    let rule = p.rule(level);
    let unit = 2f64.powi(-(p.j[level + 1] as i32));
    let count = rule.count(p.dim).to_usize().filter(|&c| c <= MAX_DRAWN);
    match count {
        Some(_) => {
            let g = rule.grid_abs.to_i64().expect("drawn grids are small");
            for a in (-g..=g).step_by(2) {
                for b in (-g..=g).step_by(2) {
                    let off = [BigInt::from(a), BigInt::from(b)];
                    if rule.selects(&off) {
                        s += &square(
                            mid + to_px(a as f64 * unit),
                            mid - to_px(b as f64 * unit),
                            to_px(unit),
                            "fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"",
                        );
                    }
                }
            }
        }
        None => {
            // ring between the outermost and innermost selected layers
            let outer = to_px((rule.max_abs.to_f64().unwrap_or(f64::INFINITY) + 1.0) * unit).min(SIZE / 2.0);
            let inner = to_px((rule.min_abs.to_f64().unwrap_or(0.0) - 1.0) * unit);
            let _ = write!(
                s,
                "<path fill=\"#9ecae1\" fill-rule=\"evenodd\" d=\"M{a},{a} H{b} V{b} H{a} Z M{c},{c} H{d} V{d} H{c} Z\"/>\n",
                a = mid - outer,
                b = mid + outer,
                c = mid - inner,
                d = mid + inner
            );
        }
    }
    let inner_half = 2f64.powi(-(p.l[level] as i32));
    s += &square(mid, mid, to_px(inner_half), "fill=\"#fdae6b\" stroke=\"#e6550d\" stroke-width=\"1\"");
    let _ = writeln!(
        s,
        "<circle cx=\"{mid}\" cy=\"{mid}\" r=\"{:.4}\" fill=\"#e6550d\" fill-opacity=\"0.5\"/>",
        to_px(inner_half / 2.0)
    );
    let center: Vec<String> = q.center.iter().map(Dyadic::to_string).collect();
    let _ = writeln!(
        s,
        "<text x=\"{mid}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">center ({}), {} selected children</text>",
        PAD + SIZE + 30.0,
        center.join(", "),
        rule.count(p.dim)
    );
    s += "</svg>\n";
    Ok(s)
}

/// Line chart of `series` (label, colour, points) against the level.
fn line_plot(title: &str, y_label: &str, series: &[(&str, &str, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, _, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * SIZE;
    let sy = |y: f64| PAD + SIZE - (y - y0) / (y1 - y0) * SIZE;

    let mut s = svg_open(title);
    let _ = writeln!(
        s,
        "<path d=\"M{PAD},{PAD} V{} H{}\" fill=\"none\" stroke=\"black\"/>",
        PAD + SIZE,
        PAD + SIZE
    );
    for t in 0..=4 {
        let y = y0 + (y1 - y0) * t as f64 / 4.0;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{y:.0}</text>",
            PAD - 6.0,
            sy(y) + 4.0
        );
    }
    for x in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{x}</text>",
            sx(x as f64),
            PAD + SIZE + 18.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">level</text>",
        PAD + SIZE / 2.0,
        PAD + SIZE + 40.0
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{y_label}</text>",
        PAD + SIZE / 2.0,
        PAD + SIZE / 2.0
    );
    for (i, (label, colour, points)) in series.iter().enumerate() {
        let d: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\"/>", d.join(" "));
        for &(x, y) in points {
            let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{colour}\"/>", sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{colour}\">{label}</text>",
            PAD + 10.0,
            PAD + 16.0 + 16.0 * i as f64
        );
    }
    s += "</svg>\n";
    s
}

pub fn run(cfg: &RunConfig, artifacts: &[Artifact], level: usize) -> Result<(), CliError> {
    if artifacts.is_empty() {
        eprintln!("no artifacts requested");
        return Ok(());
    }
    let ex = example(cfg)?;
    let n_max = ex.params().n_max();
    let probe = if artifacts.iter().any(|a| *a != Artifact::Layout) {
        let chain = CubeChain::canonical(ex.params(), n_max);
        Some(probe_chain(&ex, &chain, n_max - 1)?)
    } else {
        None
    };
    for a in artifacts {
        let (name, svg) = match a {
            Artifact::Layout => (format!("layout_level{level}.svg"), layout_svg(&ex, level)?),
            Artifact::Lip => {
                let p = probe.as_ref().expect("probe computed");
                let pts = p.lip.iter().map(|r| (r.level as f64, r.bound.log2())).collect();
                ("lip_bound.svg".to_string(), line_plot("lip bound at radius 2^-l_n", "log2 bound", &[("bound", "#3182bd", pts)]))
            }
            Artifact::Witness => {
                let p = probe.as_ref().expect("probe computed");
                let ratio = p.witnesses.iter().map(|w| (w.level as f64, w.ratio_lower.log2())).collect();
                let target = p.witnesses.iter().map(|w| (w.level as f64, w.target.log2())).collect();
                (
                    "witness_ratio.svg".to_string(),
                    line_plot(
                        "witness difference quotients",
                        "log2 ratio",
                        &[("certified ratio", "#e6550d", ratio), ("target", "#636363", target)],
                    ),
                )
            }
        };
        let path = write_text(&cfg.out, &name, &svg)?;
        println!("{}", path.display());
    }
    Ok(())
}
