//! `loxodrome`: log-spiral figures for a list of spiral parameters, a
//! winding family with a common monodromy modulus, and optionally a loxodrome
//! generated from the Frenet system.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;

use super::svg::{parse_center, parse_polylines, plane_curves, Series};
use super::{check_keys, points_csv, write_file, xy, Config};
use crate::diagnostics::loxodrome_length;
use crate::error::{Error, Result};
use crate::frenet::{loxodrome_path, reconstruct_curve, LoxodromeSpec};
use crate::invariants::{curvature_jet, fundamental_invariant, winding_from_turning, Periodicity, SampledCurve};
use crate::mobius::{normal_form, MobiusMap};

pub const LOXODROME_KEYS: &[&str] = &["a", "windings", "theta", "family_a", "turns", "periods", "samples_per_turn", "q0"];

/// Samples dropped at each end before summarizing a measured `Q`.
const Q_TRIM: usize = 40;

/// Turns and growth per turn of a spiral polyline about `center`, measured
/// from the drawing itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralMetrics {
    /// Total turning about the center, in turns (absolute value).
    pub turns: f64,
    /// Radius ratio per full turn about the center (≥ 1).
    pub growth_per_turn: f64,
}

pub fn spiral_metrics(pts: &[(f64, f64)], center: (f64, f64)) -> Option<SpiralMetrics> {
    if pts.len() < 2 {
        return None;
    }
    let rel: Vec<C64> = pts.iter().map(|&(x, y)| C64::new(x - center.0, y - center.1)).collect();
    if rel.iter().any(|z| z.norm() == 0.0) {
        return None;
    }
    let angle: f64 = rel.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
    let log_ratio = (rel[rel.len() - 1].norm() / rel[0].norm()).ln();
    let turns = angle.abs() / (2.0 * PI);
    Some(SpiralMetrics { turns, growth_per_turn: (log_ratio.abs() / turns).exp() })
}

#[derive(Debug, Clone)]
pub struct SpiralFigure {
    pub a: f64,
    pub svg: String,
    pub expected_turns: f64,
    pub measured: SpiralMetrics,
    /// Mean and largest deviation of `Q` measured on the sampled curve.
    pub measured_q: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct WindingFigure {
    pub n: u32,
    pub a: f64,
    pub svg: String,
    pub periods: f64,
    pub measured: SpiralMetrics,
    /// Winding recovered from the turning per period in the drawing.
    pub measured_winding: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct LoxodromeOutcome {
    pub spirals: Vec<SpiralFigure>,
    pub theta: f64,
    pub windings: Vec<WindingFigure>,
    /// `(Q₀, mean, largest deviation)` of the measured invariant over the
    /// middle half of the Frenet-generated loxodrome.
    pub frenet: Option<(f64, f64, f64)>,
    pub report: String,
}

/// `z = e^{(a+i)u}` for `u ∈ [−U, 0]` and the Euclidean distance to the
/// center along the curve, `√(1+a²)/a · e^{au}`.
fn spiral_samples(a: f64, total_angle: f64, samples_per_turn: usize) -> (Vec<f64>, Vec<C64>) {
    let m = ((total_angle / (2.0 * PI)) * samples_per_turn as f64).ceil().max(8.0) as usize;
    (0..=m)
        .map(|i| {
            let u = -total_angle + total_angle * i as f64 / m as f64;
            ((1.0 + a * a).sqrt() / a * (a * u).exp(), (C64::new(a, 1.0) * u).exp())
        })
        .unzip()
}

fn q_summary(q: &[f64]) -> Option<(f64, f64)> {
    if q.is_empty() {
        return None;
    }
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    Some((mean, q.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)))
}

/// The figure curve `e^{(a+i)u}` is the mirror image of an admissible
/// spiral; its reflection `z̄`, traversed toward the center, is measured.
fn measured_spiral_q(arc: &[f64], z: &[C64]) -> Result<Option<(f64, f64)>> {
    let u: Vec<f64> = arc.iter().rev().map(|d| -d).collect();
    let w: Vec<C64> = z.iter().rev().map(|z| z.conj()).collect();
    let curve = SampledCurve::new(u, w, Periodicity::Open)?;
    let q = fundamental_invariant(&curvature_jet(&curve)?)?;
    let n = q.q.len();
    if n <= 2 * Q_TRIM {
        return Ok(None);
    }
    Ok(q_summary(&q.q[Q_TRIM..n - Q_TRIM]))
}

fn measure_svg(svg: &str) -> Result<SpiralMetrics> {
    let line = parse_polylines(svg).into_iter().next().ok_or_else(|| Error::InvalidInput("figure has no curve".into()))?;
    let center = parse_center(svg).ok_or_else(|| Error::InvalidInput("figure has no center marker".into()))?;
    spiral_metrics(&line, center).ok_or_else(|| Error::InvalidInput("degenerate figure".into()))
}

pub fn cmd_loxodrome(cfg: &Config, out: &Path) -> Result<LoxodromeOutcome> {
    check_keys(cfg, LOXODROME_KEYS)?;
    let a_list: Vec<f64> = cfg.get_list("a", vec![0.05, 0.15, 0.45])?;
    let windings: Vec<u32> = cfg.get_list("windings", vec![0, 1, 2])?;
    let theta: f64 = cfg.get("theta", 0.5)?;
    let family_a: f64 = cfg.get("family_a", 0.15)?;
    let turns: f64 = cfg.get("turns", 3.0)?;
    let periods: f64 = cfg.get("periods", 3.0)?;
    let per_turn: usize = cfg.get("samples_per_turn", 400)?;
    if a_list.iter().any(|a| !(*a > 0.0)) || !(family_a > 0.0) {
        return Err(Error::Config("spiral parameters must be positive".into()));
    }
    if !(0.0..PI).contains(&theta) || !(turns > 0.0) || !(periods > 0.0) || per_turn < 16 {
        return Err(Error::Config("need theta in [0, π), positive turns and periods, samples_per_turn ≥ 16".into()));
    }
    let mut report = String::from("loxodrome figures\n");

    let mut spirals = Vec::new();
    let mut all = Vec::new();
    for &a in &a_list {
        let (arc, z) = spiral_samples(a, 2.0 * PI * turns, per_turn);
        let pts = xy(&z);
        let svg = plane_curves(&format!("u -> exp((a+i)u), a = {a}"), &[Series::new(format!("a = {a}"), pts.clone())], Some((0.0, 0.0)));
        let tag = format!("spiral_a{a}");
        write_file(out, &format!("{tag}.svg"), &svg)?;
        let rows = (0..z.len()).map(|i| vec![-arc[i], z[i].re, z[i].im]);
        write_file(out, &format!("{tag}.csv"), &points_csv("u,x,y", rows))?;
        let measured = measure_svg(&svg)?;
        let measured_q = measured_spiral_q(&arc, &z)?;
        let _ = writeln!(
            report,
            "a = {a}: Q = {:.9}, turns = {:.4} (drawn {:.4}), growth per turn = {:.6} (exp(2πa) = {:.6}){}",
            (1.0 - a * a) / (4.0 * a),
            turns,
            measured.turns,
            measured.growth_per_turn,
            (2.0 * PI * a).exp(),
            measured_q.map_or(String::new(), |(m, d)| format!(", measured Q = {m:.9} (max dev {d:.2e})"))
        );
        all.push(Series::new(format!("a = {a}"), pts));
        spirals.push(SpiralFigure { a, svg, expected_turns: turns, measured, measured_q });
    }
    if !all.is_empty() {
        write_file(out, "spirals.svg", &plane_curves("loxodromes, stereographic picture", &all, Some((0.0, 0.0))))?;
    }

    // common modulus: log(1/r²) = a₁ (2π + 2θ)
    let log_r2 = family_a * (2.0 * PI + 2.0 * theta);
    let _ = writeln!(report, "winding family: theta = {theta}, log(1/r^2) = {log_r2:.9}");
    let mut figs = Vec::new();
    let mut fam = Vec::new();
    for &n in &windings {
        let turning = 2.0 * PI * n as f64 + 2.0 * theta;
        if turning <= 0.0 {
            return Err(Error::Config(format!("n = {n} with theta = {theta} has no turning")));
        }
        let a = log_r2 / turning;
        let (_, z) = spiral_samples(a, periods * turning, per_turn);
        let pts = xy(&z);
        let svg = plane_curves(
            &format!("winding n = {n}, theta = {theta}, {periods} periods"),
            &[Series::new(format!("n = {n}, a = {a:.4}"), pts.clone())],
            Some((0.0, 0.0)),
        );
        write_file(out, &format!("winding_n{n}.svg"), &svg)?;
        let rows = z.iter().map(|z| vec![z.re, z.im]);
        write_file(out, &format!("winding_n{n}.csv"), &points_csv("x,y", rows))?;
        let measured = measure_svg(&svg)?;
        let measured_winding = winding_from_turning(2.0 * PI * measured.turns / periods, theta).ok();
        let _ = writeln!(
            report,
            "n = {n}: a = {a:.9}, drawn turning per period = {:.6} rad, winding = {}, growth per turn = {:.6} (exp(2πa) = {:.6})",
            2.0 * PI * measured.turns / periods,
            measured_winding.map_or("?".into(), |w| w.to_string()),
            measured.growth_per_turn,
            (2.0 * PI * a).exp()
        );
        fam.push(Series::new(format!("n = {n}"), pts));
        figs.push(WindingFigure { n, a, svg, periods, measured, measured_winding });
    }
    if !fam.is_empty() {
        write_file(out, "windings.svg", &plane_curves("one monodromy modulus, windings n", &fam, Some((0.0, 0.0))))?;
    }

    let frenet = match cfg.raw("q0") {
        None => None,
        Some(_) => {
            let q0: f64 = cfg.require("q0")?;
            let (q, pts) = frenet_loxodrome(q0, turns, per_turn)?;
            let svg = plane_curves(&format!("loxodrome from the Frenet system, Q = {q0}"), &[Series::new("", xy(&pts))], Some((0.0, 0.0)));
            write_file(out, "loxodrome_q0.svg", &svg)?;
            write_file(out, "loxodrome_q0.csv", &points_csv("x,y", pts.iter().map(|z| vec![z.re, z.im])))?;
            let (mean, dev) = q.unwrap_or((f64::NAN, f64::NAN));
            let _ = writeln!(report, "Frenet loxodrome: Q0 = {q0}, measured Q (middle half) = {mean:.9} (max dev {dev:.2e})");
            Some((q0, mean, dev))
        }
    };
    write_file(out, "loxodrome.txt", &report)?;
    Ok(LoxodromeOutcome { spirals, theta, windings: figs, frenet, report })
}

/// Loxodrome `G(s) = exp(sM(Q₀))` over `turns` turns, projected and moved so
/// that its monodromy is diagonal. Returns the measured `Q` summary and the
/// points.
fn frenet_loxodrome(q0: f64, turns: f64, per_turn: usize) -> Result<(Option<(f64, f64)>, Vec<C64>)> {
    let ell = loxodrome_length(q0);
    let m = (turns * per_turn as f64).ceil() as usize;
    let h = ell / per_turn as f64;
    let path = loxodrome_path(&LoxodromeSpec { q0, g_init: MobiusMap::identity() }, 0.0, h, m);
    let curve = reconstruct_curve(&path)?;
    let q = fundamental_invariant(&curvature_jet(&curve)?)?;
    let n = q.q.len();
    // samples bunch up toward the spiral's center near the ends of the arc
    let summary = q_summary(&q.q[n / 4..n - n / 4]);
    let l = path.g[per_turn].inverse().compose(&path.g[0]);
    let t = normal_form(&l)?.conjugator;
    let pts = curve.z.iter().filter_map(|&z| t.apply_complex(z).finite()).collect();
    Ok((summary, pts))
}
