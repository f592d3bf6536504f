//! `run`: evolve `(Q, ρ)` under the flow and report on the trajectory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use super::svg::{plane_curves, Plot, Series};
use super::{check_keys, read_numeric_rows, write_file, Config};
use crate::diagnostics::{
    fit_decay_rate, lox_length_bound, loxodrome_length, lyapunov_series, max_decrease, max_increase, predict_limit_q,
    predict_limit_q_numeric, Measurements, TimeSeries,
};
use crate::error::{Error, Result};
use crate::flow::{band_limited_noise, evolve, period_map, period_points, FlowState, Scheme, StepperConfig, Termination, Trajectory};
use crate::mobius::MonodromyClass;
use crate::spectral::Spectral;

pub const RUN_KEYS: &[&str] = &[
    "init",
    "q0",
    "amplitude",
    "max_mode",
    "q_file",
    "ell",
    "seeds",
    "threads",
    "rtol",
    "atol",
    "dt_init",
    "dt_min",
    "dt_max",
    "scheme",
    "remesh_interval",
    "remesh_threshold",
    "snapshot_every",
    "convergence_tol",
    "stop_on_convergence",
    "max_steps",
];

#[derive(Debug, Clone, PartialEq)]
pub enum InitialQ {
    Constant(f64),
    Noise { q0: f64, amplitude: f64, max_mode: usize },
    /// One period of samples, one value per row (last column).
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub n: usize,
    pub t_end: f64,
    pub init: InitialQ,
    /// Invariant period length; defaults to the loxodrome length for `q0`.
    pub ell: f64,
    pub stepper: StepperConfig,
    pub svg: bool,
}

impl RunSettings {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        check_keys(cfg, RUN_KEYS)?;
        let n: usize = cfg.get("n_grid", 256)?;
        if !n.is_power_of_two() || n < 16 {
            return Err(Error::Config(format!("n_grid = {n} must be a power of two, at least 16")));
        }
        let q0: f64 = cfg.get("q0", 0.375)?;
        let init = match cfg.raw("init").unwrap_or("noise") {
            "constant" => InitialQ::Constant(q0),
            "noise" => InitialQ::Noise { q0, amplitude: cfg.get("amplitude", 0.5)?, max_mode: cfg.get("max_mode", 8)? },
            "file" => InitialQ::File(cfg.require::<String>("q_file")?.into()),
            other => return Err(Error::Config(format!("init = {other}: expected constant, noise or file"))),
        };
        if let InitialQ::Noise { max_mode, .. } = init {
            if max_mode == 0 || max_mode > n / 3 {
                return Err(Error::Config(format!("max_mode = {max_mode} must lie in 1..={}", n / 3)));
            }
        }
        let d = StepperConfig::default();
        let scheme = match cfg.raw("scheme").unwrap_or("imex") {
            "imex" => Scheme::Imex,
            "erk" => Scheme::Erk,
            other => return Err(Error::Config(format!("scheme = {other}: expected imex or erk"))),
        };
        let stepper = StepperConfig {
            dt_init: cfg.get("dt_init", d.dt_init)?,
            dt_min: cfg.get("dt_min", d.dt_min)?,
            dt_max: cfg.get("dt_max", d.dt_max)?,
            rtol: cfg.get("rtol", d.rtol)?,
            atol: cfg.get("atol", d.atol)?,
            scheme,
            remesh_interval: cfg.get("remesh_interval", d.remesh_interval)?,
            remesh_threshold: cfg.get("remesh_threshold", d.remesh_threshold)?,
            snapshot_every: cfg.get("snapshot_every", d.snapshot_every)?,
            convergence_tol: cfg.get("convergence_tol", d.convergence_tol)?,
            stop_on_convergence: cfg.get_bool("stop_on_convergence", d.stop_on_convergence)?,
            max_steps: cfg.get("max_steps", d.max_steps)?,
        };
        stepper.validate()?;
        let ell = cfg.get("ell", loxodrome_length(q0))?;
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::Config(format!("ell = {ell} must be positive")));
        }
        let t_end: f64 = cfg.get("t_end", 20.0)?;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {t_end} must be positive")));
        }
        Ok(Self { n, t_end, init, ell, stepper, svg: cfg.get_bool("svg", false)? })
    }

    pub fn initial_state(&self, seed: u64) -> Result<FlowState> {
        let q = match &self.init {
            InitialQ::Constant(q0) => vec![*q0; self.n],
            InitialQ::Noise { q0, amplitude, max_mode } => band_limited_noise(self.n, *q0, *amplitude, *max_mode, seed),
            InitialQ::File(p) => {
                let rows = read_numeric_rows(p)?;
                if rows.len() != self.n {
                    return Err(Error::InvalidInput(format!(
                        "{}: {} samples, expected n_grid = {}",
                        p.display(),
                        rows.len(),
                        self.n
                    )));
                }
                rows.iter().map(|r| *r.last().expect("nonempty row")).collect()
            }
        };
        FlowState::new(q, vec![self.ell; self.n], 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    pub trajectory: Trajectory,
    pub class: MonodromyClass,
    pub predicted_q: Option<f64>,
    pub already_loxodromic: bool,
    /// Largest change of the monodromy trace over the snapshots.
    pub trace_drift: f64,
    pub report: String,
    pub summary_csv: String,
}

/// Runs one seed and writes `snapshots.csv`, `summary.csv`, `report.txt` and,
/// when enabled, SVG plots into `out`.
pub fn run_single(settings: &RunSettings, seed: u64, out: &Path) -> Result<RunOutcome> {
    let state0 = settings.initial_state(seed)?;
    let sp = Spectral::new(settings.n)?;
    let mut traces: Vec<C64> = Vec::new();
    let mut trace_err = None;
    let traj = evolve(&state0, settings.t_end, &settings.stepper, |s| match period_map(&sp, &s.q, &s.rho) {
        Ok(l) => traces.push(l.trace()),
        Err(e) => trace_err = Some(e),
    })?;
    if let Some(e) = trace_err {
        return Err(e);
    }
    let trace_drift = traces.iter().map(|t| (t - traces[0]).norm()).fold(0.0, f64::max);
    let class = state0.class;
    let predicted_q = predict_limit_q(&class).ok();
    let already_loxodromic = traj.accepted == 0 && traj.reason == Termination::Converged;

    let summary_csv = summary_csv(&traj);
    write_file(out, "summary.csv", &summary_csv)?;
    write_file(out, "snapshots.csv", &snapshots_csv(&traj))?;
    let report = report(settings, seed, &state0, &traj, predicted_q, already_loxodromic, trace_drift);
    write_file(out, "report.txt", &report)?;
    if settings.svg {
        write_plots(&sp, &traj, out)?;
    }
    Ok(RunOutcome { seed, trajectory: traj, class, predicted_q, already_loxodromic, trace_drift, report, summary_csv })
}

/// Runs every seed on worker threads, each writing into `out/seed_<k>`.
/// Outcomes are returned in seed order.
pub fn run_sweep(settings: &RunSettings, seeds: &[u64], threads: usize, out: &Path) -> Result<Vec<RunOutcome>> {
    let threads = threads.max(1);
    let mut results: Vec<Option<Result<RunOutcome>>> = (0..seeds.len()).map(|_| None).collect();
    for (chunk_seeds, chunk_out) in seeds.chunks(threads).zip(results.chunks_mut(threads)) {
        std::thread::scope(|sc| {
            let handles: Vec<_> = chunk_seeds
                .iter()
                .map(|&seed| {
                    let dir = out.join(format!("seed_{seed}"));
                    sc.spawn(move || run_single(settings, seed, &dir))
                })
                .collect();
            for (slot, h) in chunk_out.iter_mut().zip(handles) {
                *slot = Some(h.join().unwrap_or_else(|_| Err(Error::InvalidInput("worker thread panicked".into()))));
            }
        });
    }
    results.into_iter().map(|r| r.expect("every slot filled")).collect()
}

pub fn summary_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,ell,normQ2,normQs2,dissipation_residual\n");
    for r in &traj.records {
        let _ = writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.t, r.m.ell, r.m.norm_q2, r.m.norm_qs2, r.m.dissipation.residual
        );
    }
    out
}

pub fn snapshots_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,i,u,Q,rho\n");
    for s in &traj.snapshots {
        let n = s.n();
        for i in 0..n {
            let _ = writeln!(out, "{:.12e},{i},{:.12e},{:.12e},{:.12e}", s.t, i as f64 / n as f64, s.q[i], s.rho[i]);
        }
    }
    out
}

fn records(traj: &Trajectory) -> Vec<(f64, Measurements)> {
    traj.records.iter().map(|r| (r.t, r.m)).collect()
}

fn report(
    settings: &RunSettings,
    seed: u64,
    state0: &FlowState,
    traj: &Trajectory,
    predicted: Option<f64>,
    already_loxodromic: bool,
    trace_drift: f64,
) -> String {
    let mut r = String::new();
    let last = traj.last_state();
    let rec = records(traj);
    let class = &state0.class;
    let _ = writeln!(r, "inversive curve-lengthening flow run");
    let _ = writeln!(r, "seed: {seed}");
    let _ = writeln!(r, "grid: N = {}", settings.n);
    let _ = writeln!(r, "initial data: {:?}", settings.init);
    let _ = writeln!(r, "t_end: {}", settings.t_end);
    let _ = writeln!(r, "stepper: {:?}", settings.stepper);
    let _ = writeln!(
        r,
        "monodromy class: r = {:.12}, theta = {:.12}, n = {}",
        class.r,
        class.theta,
        class.n.map_or("?".into(), |n| n.to_string())
    );
    if let Ok(b) = lox_length_bound(class) {
        let _ = writeln!(r, "length bound: corrected = {:.12}, printed-variant = {:.12}", b.corrected, b.printed);
    }
    if already_loxodromic {
        let _ = writeln!(r, "status: already loxodromic (||Q_s|| below tolerance at t = 0); no decay to measure");
    }
    let _ = writeln!(r, "termination: {} at t = {:.6}", traj.reason, last.t);
    let _ = writeln!(r, "steps: accepted = {}, rejected = {}, remeshes = {}", traj.accepted, traj.rejected, traj.remeshes);
    let first = rec.first().map(|x| x.1);
    let end = rec.last().map(|x| x.1);
    if let (Some(a), Some(b)) = (first, end) {
        let _ = writeln!(r, "length: initial = {:.12}, final = {:.12}", a.ell, b.ell);
        let _ = writeln!(r, "||Q||_2^2: initial = {:.6e}, final = {:.6e}", a.norm_q2, b.norm_q2);
        let _ = writeln!(r, "||Q_s||_2^2: initial = {:.6e}, final = {:.6e}", a.norm_qs2, b.norm_qs2);
    }
    let ells: Vec<f64> = rec.iter().map(|x| x.1.ell).collect();
    let q2: Vec<f64> = rec.iter().map(|x| x.1.norm_q2).collect();
    let _ = writeln!(r, "largest decrease of length: {:.3e}", max_decrease(&ells));
    let _ = writeln!(r, "largest increase of ||Q||_2^2: {:.3e}", max_increase(&q2));
    let _ = writeln!(r, "largest increase of Lyapunov functional: {:.3e}", max_increase(&lyapunov_series(&rec)));
    let worst = rec.iter().map(|x| x.1.dissipation.residual).fold(0.0, f64::max);
    let _ = writeln!(r, "largest dissipation-identity residual: {worst:.3e}");
    let _ = writeln!(r, "monodromy trace drift over snapshots: {trace_drift:.3e}");
    if !already_loxodromic {
        match TimeSeries::new(rec.iter().map(|x| x.0).collect(), rec.iter().map(|x| x.1.norm_qs2).collect())
            .and_then(|ts| fit_decay_rate(&ts, ts.last_third()))
        {
            Ok(f) => {
                let _ = writeln!(
                    r,
                    "decay of ||Q_s||_2^2 on last third: rate = {:.6}, R^2 = {:.6}, points = {}",
                    f.rate, f.r2, f.points
                );
            }
            Err(e) => {
                let _ = writeln!(r, "decay fit unavailable: {}", e.code());
            }
        }
    }
    let mean = last.integrate(&last.q) / last.length();
    let spread = last.q.iter().cloned().fold(f64::MIN, f64::max) - last.q.iter().cloned().fold(f64::MAX, f64::min);
    let _ = writeln!(r, "terminal Q: mean = {mean:.12}, spread = {spread:.3e}");
    match predicted {
        Some(p) => {
            let _ = writeln!(r, "predicted Q_inf = {p:.12}, measured = {mean:.12}, difference = {:.3e}", (p - mean).abs());
            if let Ok(pn) = predict_limit_q_numeric(class) {
                let _ = writeln!(r, "predicted Q_inf (numeric match) = {pn:.12}");
            }
        }
        None => {
            let _ = writeln!(r, "predicted Q_inf unavailable");
        }
    }
    r
}

/// Points of the curve over `periods` periods centered on the first, seen in
/// coordinates where the monodromy is diagonal.
pub fn terminal_curve(sp: &Spectral, state: &FlowState, periods: i32) -> Result<Vec<C64>> {
    let (pts, l) = period_points(sp, &state.q, &state.rho)?;
    let t = state.class.conjugator;
    let one = &pts[..pts.len() - 1];
    let mut out = Vec::new();
    let lower = -(periods / 2);
    for k in lower..lower + periods {
        let mut m = crate::mobius::MobiusMap::identity();
        let step = if k >= 0 { l } else { l.inverse() };
        for _ in 0..k.unsigned_abs() {
            m = step.compose(&m);
        }
        let map = t.compose(&m);
        for (i, p) in one.iter().enumerate() {
            if k > lower && i == 0 {
                continue;
            }
            if let Some(z) = map.apply(p).stereographic().finite() {
                out.push(z);
            }
        }
    }
    Ok(out)
}

fn write_plots(sp: &Spectral, traj: &Trajectory, out: &Path) -> Result<()> {
    let rec = records(traj);
    let series = |f: &dyn Fn(&Measurements) -> f64| rec.iter().map(|(t, m)| (*t, f(m))).collect::<Vec<_>>();
    let plots = [
        ("length.svg", "invariant length", "ell", false, series(&|m| m.ell)),
        ("norm_q.svg", "L2 norm of Q", "||Q||_2", false, series(&|m| m.norm_q2.sqrt())),
        ("log_norm_qs.svg", "L2 norm of Q_s (log scale)", "||Q_s||_2", true, series(&|m| m.norm_qs2.sqrt())),
    ];
    for (name, title, ylab, log_y, pts) in plots {
        let plot = Plot {
            title: title.into(),
            x_label: "t".into(),
            y_label: ylab.into(),
            log_y,
            series: vec![Series::new("", pts)],
        };
        write_file(out, name, &plot.render())?;
    }
    let last = traj.last_state();
    let z = terminal_curve(sp, last, 3)?;
    let svg = plane_curves(
        &format!("terminal curve, t = {:.3}", last.t),
        &[Series::new("", super::xy(&z))],
        Some((0.0, 0.0)),
    );
    write_file(out, "curve.svg", &svg)
}
