//! `analyze` and `roundtrip`: the invariants pipeline on sampled curves and
//! its inverse through the Frenet system.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use super::{check_keys, read_numeric_rows, write_file, Config};
use crate::analytic::{generic_test_curve, sample_uniform_tau, CurveJets, LogSpiral};
use crate::error::{Error, Result};
use crate::frenet::{align_three_point, diameter, frenet_matrix, loxodrome_path, propagate, reconstruct_curve, GaussPath, LoxodromeSpec};
use crate::invariants::{
    chart_residual, chart_residual_exponent, curvature_jet, fundamental_invariant, gauss_map_at, winding_from_points,
    winding_number, CurvatureJet, Periodicity, QProfile, SampledCurve,
};
use crate::mobius::{normal_form, MobiusMap, MonodromyClass, ProjectivePoint};
use crate::spline::CubicSpline;

pub const ANALYZE_KEYS: &[&str] = &["input", "period", "trim", "s_min", "s_max"];
pub const ROUNDTRIP_KEYS: &[&str] = &["source", "input", "a", "q_file", "period", "r", "theta", "n", "trim", "tau_end", "samples"];

/// Offset (in samples) of the neighbor used for the per-sample chart residual.
const RESIDUAL_OFFSET: usize = 4;

/// Tolerance for consistency checks of a `Q` profile against a declared
/// period and monodromy.
const CONSISTENCY_TOL: f64 = 1e-6;

/// Loads `x,y` (arc length estimated from the points) or `u,x,y` rows.
pub fn load_curve(path: &Path) -> Result<SampledCurve> {
    let rows = read_numeric_rows(path)?;
    match rows[0].len() {
        2 => SampledCurve::from_points(rows.iter().map(|r| C64::new(r[0], r[1])).collect(), Periodicity::Open),
        3 => SampledCurve::new(
            rows.iter().map(|r| r[0]).collect(),
            rows.iter().map(|r| C64::new(r[1], r[2])).collect(),
            Periodicity::Open,
        ),
        w => Err(Error::InvalidInput(format!("{}: expected 2 or 3 columns, found {w}", path.display()))),
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub jet: CurvatureJet,
    /// `None` when the curve is not admissible.
    pub q: Option<QProfile>,
    pub inadmissible: Option<String>,
    pub class: Option<MonodromyClass>,
    /// `(sample, exponent)` of the fitted decay of the chart defect.
    pub exponents: Vec<(usize, f64)>,
    pub report: String,
    pub csv: String,
}

/// Monodromy from three correspondences `z[i] ↦ z[i + period]`.
fn estimate_monodromy(curve: &SampledCurve, period: usize) -> Result<MobiusMap> {
    let n = curve.len();
    if period + 3 > n {
        return Err(Error::TooFewSamples(format!("{n} samples for period {period}")));
    }
    let span = n - period;
    let idx = [span / 6, span / 2, (5 * span) / 6];
    let src = idx.map(|i| curve.z[i]);
    let dst = idx.map(|i| curve.z[i + period]);
    MobiusMap::from_three_points(src, dst)
}

pub fn analyze_curve(curve: &SampledCurve, period: Option<usize>, trim: usize, s_window: (f64, f64)) -> Result<AnalyzeOutcome> {
    let jet = curvature_jet(curve)?;
    let n = jet.len();
    let mut report = String::from("curve analysis\n");
    let _ = writeln!(report, "samples: {n}");
    let (q, inadmissible) = match fundamental_invariant(&jet) {
        Ok(q) => (Some(q), None),
        Err(Error::Inadmissible(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    match &inadmissible {
        Some(msg) => {
            let _ = writeln!(report, "verdict: INADMISSIBLE");
            let _ = writeln!(report, "reason: {msg}");
        }
        None => {
            let _ = writeln!(report, "verdict: ADMISSIBLE");
        }
    }

    let mut exponents = Vec::new();
    let mut residual = vec![f64::NAN; n];
    if let Some(q) = &q {
        let lo = trim.min(n);
        let hi = n.saturating_sub(trim).max(lo);
        let inner = &q.q[lo..hi];
        if !inner.is_empty() {
            let mean = inner.iter().sum::<f64>() / inner.len() as f64;
            let dev = inner.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
            let _ = writeln!(report, "Q (trimmed {trim}): mean = {mean:.9}, max deviation = {dev:.3e}");
            if mean > 0.0 {
                // a constant profile is a log spiral with (1 − a²)/(4a) = Q
                let a = (4.0 * mean * mean + 1.0).sqrt() - 2.0 * mean;
                let _ = writeln!(report, "spiral parameter if loxodromic: a = {a:.9}");
            }
        }
        let _ = writeln!(report, "invariant length of the sampled arc: {:.9}", q.length());
        for i in 0..n {
            let j = if i + RESIDUAL_OFFSET < n { i + RESIDUAL_OFFSET } else { i.saturating_sub(RESIDUAL_OFFSET) };
            if let Ok(f) = gauss_map_at(curve, &jet, i) {
                residual[i] = chart_residual(&f.g, curve.z[j]).map_or(f64::NAN, f64::abs);
            }
        }
        for i in [n / 4, n / 2, (3 * n) / 4] {
            if let Ok((beta, _, offs, _)) = chart_residual_exponent(curve, &jet, &q.s, i, s_window.0, s_window.1) {
                let _ = writeln!(report, "chart defect exponent at sample {i}: {beta:.4} ({} points)", offs.len());
                exponents.push((i, beta));
            }
        }
    }

    let mut class = None;
    if let Some(p) = period {
        let l = estimate_monodromy(curve, p)?;
        let c = normal_form(&l)?;
        let periodic = SampledCurve::new(curve.u.clone(), curve.z.clone(), Periodicity::Cocompact { monodromy: l, period: p })?;
        let w = winding_number(&periodic, &c)?;
        let c = c.with_winding(w);
        let _ = writeln!(report, "monodromy (period {p} samples): r = {:.9}, theta = {:.9}, winding n = {w}", c.r, c.theta);
        class = Some(c);
    }

    let mut csv = String::from("i,u,k,k_u,s,Q,chart_residual\n");
    for i in 0..n {
        let (s, qv) = q.as_ref().map_or((f64::NAN, f64::NAN), |q| (q.s[i], q.q[i]));
        let _ = writeln!(
            csv,
            "{i},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
            jet.u[i], jet.k[i], jet.k_u[i], s, qv, residual[i]
        );
    }
    Ok(AnalyzeOutcome { jet, q, inadmissible, class, exponents, report, csv })
}

pub fn cmd_analyze(cfg: &Config, out: &Path) -> Result<AnalyzeOutcome> {
    check_keys(cfg, ANALYZE_KEYS)?;
    let input: PathBuf = cfg.require::<String>("input")?.into();
    let period = match cfg.raw("period") {
        None => None,
        Some(_) => Some(cfg.require::<usize>("period")?),
    };
    let trim = cfg.get("trim", 10)?;
    let window = (cfg.get("s_min", 0.05)?, cfg.get("s_max", 0.5)?);
    let curve = load_curve(&input)?;
    let outcome = analyze_curve(&curve, period, trim, window)?;
    write_file(out, "analysis.csv", &outcome.csv)?;
    write_file(out, "analysis.txt", &outcome.report)?;
    Ok(outcome)
}

#[derive(Debug, Clone)]
pub struct RoundtripOutcome {
    /// Largest pointwise distance after the best-fit alignment, and the
    /// diameter of the compared samples.
    pub point_error: Option<(f64, f64)>,
    pub alignment: Option<MobiusMap>,
    /// Largest difference between the input `Q` and `Q` re-measured on the
    /// reconstructed curve (trimmed).
    pub q_error: Option<f64>,
    pub class: Option<MonodromyClass>,
    pub report: String,
}

impl RoundtripOutcome {
    pub fn relative_point_error(&self) -> Option<f64> {
        self.point_error.map(|(e, d)| e / d)
    }
}

/// Gauss frames at the profile samples from `G = I` at the first, using a
/// cubic spline of `Q` between samples and `substeps` RK4 steps per interval.
fn frames_from_profile(q: &QProfile, substeps: usize) -> Result<GaussPath> {
    let sp = CubicSpline::natural(&q.s, &q.q)?;
    let mut g = MobiusMap::identity();
    let mut path = GaussPath { s: vec![q.s[0]], g: vec![g], q: vec![q.q[0]] };
    for i in 0..q.s.len() - 1 {
        let step = propagate(|s| frenet_matrix(sp.eval(s)), q.s[i], q.s[i + 1], substeps)?;
        g = step.compose(&g);
        path.s.push(q.s[i + 1]);
        path.g.push(g);
        path.q.push(q.q[i + 1]);
    }
    Ok(path)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn trimmed<T: Clone>(v: &[T], m: usize) -> Result<Vec<T>> {
    if v.len() <= 2 * m + 8 {
        return Err(Error::TooFewSamples(format!("{} samples with trim {m}", v.len())));
    }
    Ok(v[m..v.len() - m].to_vec())
}

/// Sampled curve → `Q` → Frenet reconstruction → alignment with the input.
pub fn roundtrip_curve(curve: &SampledCurve, trim: usize) -> Result<RoundtripOutcome> {
    let jet = curvature_jet(curve)?;
    let profile = fundamental_invariant(&jet)?;
    let q = QProfile { s: trimmed(&profile.s, trim)?, q: trimmed(&profile.q, trim)? };
    let target = trimmed(&curve.z, trim)?;
    let path = frames_from_profile(&q, 4)?;
    let rebuilt = reconstruct_curve(&path)?;
    let (m, err) = align_three_point(&target, &rebuilt.z)?;
    let diam = diameter(&target);
    let requ = fundamental_invariant(&curvature_jet(&rebuilt)?)?;
    let q_error = max_abs_diff(&trimmed(&requ.q, trim)?, &trimmed(&q.q, trim)?);
    let mut report = String::from("round trip: sampled curve -> Q -> Frenet reconstruction\n");
    let _ = writeln!(report, "samples compared: {}", target.len());
    let _ = writeln!(report, "max alignment error: {err:.3e} (diameter {diam:.6}, relative {:.3e})", err / diam);
    let _ = writeln!(report, "alignment map: {m}");
    let _ = writeln!(report, "max |Q - Q re-measured| (trimmed): {q_error:.3e}");
    Ok(RoundtripOutcome { point_error: Some((err, diam)), alignment: Some(m), q_error: Some(q_error), class: None, report })
}

/// Log spiral with exact invariants → closed-form loxodrome → alignment.
pub fn roundtrip_spiral(a: f64, tau_end: f64, samples: usize) -> Result<RoundtripOutcome> {
    let sp = LogSpiral::new(a);
    let (_, target) = sample_uniform_tau(&sp, 0.0, tau_end, samples);
    let jets = CurveJets::compute(&sp, 0.0, 10, 0);
    let q0 = jets.q_values()[0];
    // ds/dτ is constant along a loxodrome
    let speed = jets.ds_dtau.re();
    let h = speed * tau_end / (samples - 1) as f64;
    let path = loxodrome_path(&LoxodromeSpec { q0, g_init: MobiusMap::identity() }, 0.0, h, samples - 1);
    let rebuilt: Vec<C64> = path
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| p.stereographic().finite().ok_or(Error::ProjectionAtInfinity(i)))
        .collect::<Result<_>>()?;
    let (m, err) = align_three_point(&target, &rebuilt)?;
    let diam = diameter(&target);
    let mut report = String::from("round trip: log spiral -> exact Q -> closed-form loxodrome\n");
    let _ = writeln!(report, "a = {a}, Q = {q0:.12} (expected {:.12})", sp.q());
    let _ = writeln!(report, "max alignment error: {err:.3e} (diameter {diam:.6}, relative {:.3e})", err / diam);
    let _ = writeln!(report, "alignment map: {m}");
    Ok(RoundtripOutcome {
        point_error: Some((err, diam)),
        alignment: Some(m),
        q_error: Some((q0 - sp.q()).abs()),
        class: None,
        report,
    })
}

/// Expected monodromy data for a `Q` profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeclaredPeriod {
    pub ell: f64,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    pub n: Option<u32>,
}

/// `Q` profile → Frenet reconstruction → re-measured `Q`. A declared period
/// and monodromy are checked against the profile; mismatches are INCONSISTENT.
pub fn roundtrip_profile(q: &QProfile, declared: Option<DeclaredPeriod>, trim: usize) -> Result<RoundtripOutcome> {
    if q.s.len() < 8 || q.s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("Q profile needs at least 8 samples with increasing s".into()));
    }
    let mut report = String::from("round trip: Q profile -> Frenet reconstruction -> Q\n");
    let mut class = None;
    if let Some(d) = declared {
        class = Some(check_declared(q, &d, &mut report)?);
    }
    let path = frames_from_profile(q, 4)?;
    let rebuilt = reconstruct_curve(&path)?;
    let requ = fundamental_invariant(&curvature_jet(&rebuilt)?)?;
    let q_error = max_abs_diff(&trimmed(&requ.q, trim)?, &trimmed(&q.q, trim)?);
    let _ = writeln!(report, "max |Q - Q re-measured| (trimmed {trim}): {q_error:.3e}");
    Ok(RoundtripOutcome { point_error: None, alignment: None, q_error: Some(q_error), class, report })
}

fn check_declared(q: &QProfile, d: &DeclaredPeriod, report: &mut String) -> Result<MonodromyClass> {
    let (s0, s1) = (q.s[0], *q.s.last().expect("nonempty"));
    if !(d.ell > 0.0) || s1 - s0 < d.ell {
        return Err(Error::Inconsistent(format!("profile of length {:.6} is shorter than the period {}", s1 - s0, d.ell)));
    }
    let sp = CubicSpline::natural(&q.s, &q.q)?;
    let scale = 1.0 + q.q.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mismatch = q
        .s
        .iter()
        .filter(|&&s| s + d.ell <= s1)
        .map(|&s| (sp.eval(s + d.ell) - sp.eval(s)).abs())
        .fold(0.0, f64::max);
    if mismatch > CONSISTENCY_TOL * scale {
        return Err(Error::Inconsistent(format!("Q is not periodic with period {}: mismatch {mismatch:.3e}", d.ell)));
    }
    let steps = 400;
    let p = propagate(|s| frenet_matrix(sp.eval(s)), s0, s0 + d.ell, steps)?;
    let class = normal_form(&p.inverse())?;
    // points over one period plus two steps for the winding
    let h = d.ell / steps as f64;
    let mut g = MobiusMap::identity();
    let mut pts = vec![ProjectivePoint::origin()];
    for i in 0..steps + 2 {
        let a = s0 + i as f64 * h;
        g = propagate(|s| frenet_matrix(sp.eval(s.min(s1))), a, a + h, 1)?.compose(&g);
        pts.push(g.inverse().apply(&ProjectivePoint::origin()));
    }
    let w = winding_from_points(&pts, &class)?;
    let class = class.with_winding(w);
    let _ = writeln!(report, "monodromy over one period: r = {:.9}, theta = {:.9}, winding n = {w}", class.r, class.theta);
    if let Some(r) = d.r {
        if (r - class.r).abs() > CONSISTENCY_TOL {
            return Err(Error::Inconsistent(format!("declared r = {r} but the profile gives r = {:.9}", class.r)));
        }
    }
    if let Some(t) = d.theta {
        let diff = (t - class.theta).rem_euclid(PI);
        if diff.min(PI - diff) > CONSISTENCY_TOL {
            return Err(Error::Inconsistent(format!("declared theta = {t} but the profile gives theta = {:.9}", class.theta)));
        }
    }
    if let Some(n) = d.n {
        if n != w {
            return Err(Error::Inconsistent(format!("declared winding n = {n} but the profile gives n = {w}")));
        }
    }
    Ok(class)
}

pub fn cmd_roundtrip(cfg: &Config, out: &Path) -> Result<RoundtripOutcome> {
    check_keys(cfg, ROUNDTRIP_KEYS)?;
    let trim: usize = cfg.get("trim", 40)?;
    let outcome = match cfg.raw("source").unwrap_or("generic") {
        "spiral" => roundtrip_spiral(cfg.get("a", 0.5)?, cfg.get("tau_end", 4.0 * PI)?, cfg.get("samples", 801)?)?,
        "generic" => {
            let (u, z) = sample_uniform_tau(&generic_test_curve(), 0.0, cfg.get("tau_end", 8.0)?, cfg.get("samples", 801)?);
            roundtrip_curve(&SampledCurve::new(u, z, Periodicity::Open)?, trim)?
        }
        "curve" => roundtrip_curve(&load_curve(Path::new(&cfg.require::<String>("input")?))?, trim)?,
        "q" => {
            let rows = read_numeric_rows(Path::new(&cfg.require::<String>("q_file")?))?;
            if rows[0].len() < 2 {
                return Err(Error::InvalidInput("q_file needs columns s,Q".into()));
            }
            let profile = QProfile { s: rows.iter().map(|r| r[0]).collect(), q: rows.iter().map(|r| r[1]).collect() };
            let declared = match cfg.raw("period") {
                None => None,
                Some(_) => Some(DeclaredPeriod {
                    ell: cfg.require("period")?,
                    r: if cfg.contains("r") { Some(cfg.require("r")?) } else { None },
                    theta: if cfg.contains("theta") { Some(cfg.require("theta")?) } else { None },
                    n: if cfg.contains("n") { Some(cfg.require("n")?) } else { None },
                }),
            };
            roundtrip_profile(&profile, declared, trim)?
        }
        other => return Err(Error::Config(format!("source = {other}: expected spiral, generic, curve or q"))),
    };
    write_file(out, "roundtrip.txt", &outcome.report)?;
    Ok(outcome)
}
