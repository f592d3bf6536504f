//! Scalar functionals of flow states, the dissipation identity, decay-rate
//! fitting, the loxodromic length bound and the predicted limit invariant.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::flow::{pointwise_rhs, s_derivatives, FlowState};
use crate::frenet::exp_frenet;
use crate::mobius::{normal_form, MobiusMap, MonodromyClass};
use crate::spectral::Spectral;

/// `a` of the one-turn spiral family with invariant `Q₀ = (1 − a²)/(4a)`.
pub fn spiral_parameter(q0: f64) -> f64 {
    (4.0 * q0 * q0 + 1.0).sqrt() - 2.0 * q0
}

/// Invariant length `2π√a` of one turn of the loxodrome with invariant `Q₀`.
pub fn loxodrome_length(q0: f64) -> f64 {
    2.0 * PI * spiral_parameter(q0).sqrt()
}

pub fn length(state: &FlowState) -> f64 {
    state.length()
}

/// `∫(Q⁽ᵖ⁾)² ds`.
pub fn sobolev_seminorm(sp: &Spectral, state: &FlowState, p: usize) -> Result<f64> {
    let d = s_derivatives(sp, &state.q, &state.rho, p)?;
    Ok(state.integrate(&d[p].iter().map(|x| x * x).collect::<Vec<_>>()))
}

/// Both sides of `d/dt ∫Q² ds = −½∫(Q⁽³⁾)² − 15∫Q²Q_s² − 2∫Q_s² − 5∫Q⁽³⁾Q_sQ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationReport {
    /// `2∫Q ∂ₜQ ds − ∫𝒞Q² ds` from the evolution equations.
    pub lhs: f64,
    /// The integrated-by-parts form.
    pub rhs: f64,
    /// `|lhs − rhs| / max(|lhs|, atol)`.
    pub residual: f64,
    /// `−2∫Q_s² − (1/22)∫(Q⁽³⁾)² − (5/4)∫Q²Q_s²`, an upper bound for `rhs`.
    pub young_bound: f64,
}

/// Floor for the relative residual denominator.
pub const DISSIPATION_ATOL: f64 = 1e-14;

/// Functionals recorded at each step of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurements {
    pub ell: f64,
    /// `∫Q² ds`
    pub norm_q2: f64,
    /// `∫Q_s² ds`
    pub norm_qs2: f64,
    /// `∫(Q⁽³⁾)² ds`
    pub norm_q3_2: f64,
    /// `∫Q²Q_s² ds`
    pub norm_qqs2: f64,
    pub dissipation: DissipationReport,
}

impl Measurements {
    /// Integrand of the Lyapunov combination: `(1/22)∫(Q⁽³⁾)² + (5/4)∫Q²Q_s² + 2∫Q_s²`.
    pub fn lyapunov_rate(&self) -> f64 {
        self.norm_q3_2 / 22.0 + 1.25 * self.norm_qqs2 + 2.0 * self.norm_qs2
    }
}

pub fn measure(sp: &Spectral, state: &FlowState) -> Result<Measurements> {
    let d = s_derivatives(sp, &state.q, &state.rho, 6)?;
    let n = state.n();
    let sq = |f: &dyn Fn(usize) -> f64| state.integrate(&(0..n).map(f).collect::<Vec<_>>());
    Ok(Measurements {
        ell: state.length(),
        norm_q2: sq(&|j| d[0][j] * d[0][j]),
        norm_qs2: sq(&|j| d[1][j] * d[1][j]),
        norm_q3_2: sq(&|j| d[3][j] * d[3][j]),
        norm_qqs2: sq(&|j| (d[0][j] * d[1][j]).powi(2)),
        dissipation: dissipation_from_derivatives(state, &d),
    })
}

pub fn dissipation_report(sp: &Spectral, state: &FlowState) -> Result<DissipationReport> {
    let d = s_derivatives(sp, &state.q, &state.rho, 6)?;
    Ok(dissipation_from_derivatives(state, &d))
}

/// `d = [Q, Q_s, …, Q⁽⁶⁾]`.
fn dissipation_from_derivatives(state: &FlowState, d: &[Vec<f64>]) -> DissipationReport {
    let (rhs_q, comm) = pointwise_rhs(d);
    let n = state.n();
    let int = |f: &dyn Fn(usize) -> f64| state.integrate(&(0..n).map(f).collect::<Vec<_>>());
    let (q, q1, q3) = (&d[0], &d[1], &d[3]);
    let lhs = int(&|j| 2.0 * q[j] * rhs_q[j] - comm[j] * q[j] * q[j]);
    let i33 = int(&|j| q3[j] * q3[j]);
    let iqq = int(&|j| (q[j] * q1[j]).powi(2));
    let i11 = int(&|j| q1[j] * q1[j]);
    let i3 = int(&|j| q3[j] * q1[j] * q[j]);
    let rhs = -0.5 * i33 - 15.0 * iqq - 2.0 * i11 - 5.0 * i3;
    let residual = (lhs - rhs).abs() / lhs.abs().max(DISSIPATION_ATOL);
    let young_bound = -2.0 * i11 - i33 / 22.0 - 1.25 * iqq;
    DissipationReport { lhs, rhs, residual, young_bound }
}

/// Corrected and printed forms of the loxodromic length bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthBound {
    /// `√((2πn + 2θ) log(1/r²))`
    pub corrected: f64,
    /// `√((2πn + 2θ) log(1/r))`
    pub printed: f64,
}

fn turning(class: &MonodromyClass) -> Result<f64> {
    let n = class
        .n
        .ok_or_else(|| Error::InvalidInput("monodromy class has no winding number".into()))?;
    let t = 2.0 * PI * n as f64 + 2.0 * class.theta;
    if t <= 0.0 {
        return Err(Error::InvalidInput("total turning 2πn + 2θ must be positive".into()));
    }
    Ok(t)
}

pub fn lox_length_bound(class: &MonodromyClass) -> Result<LengthBound> {
    let t = turning(class)?;
    let log_r = (1.0 / class.r).ln();
    Ok(LengthBound { corrected: (t * 2.0 * log_r).sqrt(), printed: (t * log_r).sqrt() })
}

/// Invariant `Q` of the loxodrome in `class`:
/// `Q∞ = (1 − a²)/(4a)` with `a = log(1/r²)/(2πn + 2θ)`.
pub fn predict_limit_q(class: &MonodromyClass) -> Result<f64> {
    let a = 2.0 * (1.0 / class.r).ln() / turning(class)?;
    Ok((1.0 - a * a) / (4.0 * a))
}

/// `μ = √(−Q₀ − i/2)`; the loxodrome with invariant `Q₀` and period `ℓ` has
/// monodromy eigenvalues `e^{±ℓμ}`.
fn mu(q0: f64) -> C64 {
    C64::new(-q0, -0.5).sqrt()
}

/// Finds the loxodrome in `class` by matching its monodromy numerically: a
/// bisection in `Q₀` on the turning per period, then a check that the
/// propagator `exp(ℓM)` has the requested normal form.
pub fn predict_limit_q_numeric(class: &MonodromyClass) -> Result<f64> {
    let target = turning(class)? / 2.0;
    let log_r = (1.0 / class.r).ln();
    let phase = |q0: f64| {
        let m = mu(q0);
        log_r * m.im.abs() / m.re
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut expand = 0;
    while phase(lo) > target || phase(hi) < target {
        lo *= 2.0;
        hi *= 2.0;
        expand += 1;
        if expand > 60 {
            return Err(Error::NoMatch(format!("no loxodrome with turning {}", 2.0 * target)));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phase(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q0 = 0.5 * (lo + hi);
    let ell = log_r / mu(q0).re;
    let l = MobiusMap::from_mat(exp_frenet(q0, ell))?.inverse();
    let nf = normal_form(&l).map_err(|e| Error::NoMatch(format!("candidate Q₀ = {q0}: {e}")))?;
    let dtheta = (nf.theta - class.theta).abs();
    let dtheta = dtheta.min(PI - dtheta);
    if (nf.r - class.r).abs() > 1e-8 * class.r.max(1e-300) || dtheta > 1e-8 {
        return Err(Error::NoMatch(format!(
            "candidate Q₀ = {q0} has r = {}, θ = {} instead of r = {}, θ = {}",
            nf.r, nf.theta, class.r, class.theta
        )));
    }
    Ok(q0)
}

/// A scalar time series with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput("times and values differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Default fitting window: the last third of the time span.
    pub fn last_third(&self) -> (f64, f64) {
        let (a, b) = (self.times[0], *self.times.last().expect("nonempty"));
        (a + 2.0 * (b - a) / 3.0, b)
    }
}

/// Least-squares fit `log v ≈ c − λt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_decay_rate(series: &TimeSeries, window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(&t, &v)| (t, v))
        .collect();
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonpositiveValues(format!("value {v} at t = {t}")));
    }
    if pts.len() < 2 {
        return Err(Error::TooFewSamples(format!("{} points in the fitting window", pts.len())));
    }
    let (slope, intercept, r2) = linear_fit(&pts.iter().map(|(t, v)| (*t, v.ln())).collect::<Vec<_>>());
    Ok(DecayFit { rate: -slope, intercept, r2, points: pts.len() })
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, R²)`. A constant
/// response gives `R² = 1`.
pub fn linear_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = xy.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    (a, b, r2)
}

/// Largest increase between consecutive values (0 for a nonincreasing series).
pub fn max_increase(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Largest decrease between consecutive values (0 for a nondecreasing series).
pub fn max_decrease(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
}

/// `‖Q‖₂²(t) + ∫₀ᵗ (rate) dτ` along recorded `(t, m)` pairs, with the time
/// integral by the trapezoid rule.
pub fn lyapunov_series(records: &[(f64, Measurements)]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(records.len());
    for (i, (t, m)) in records.iter().enumerate() {
        if i > 0 {
            let (t0, m0) = &records[i - 1];
            acc += 0.5 * (t - t0) * (m0.lyapunov_rate() + m.lyapunov_rate());
        }
        out.push(m.norm_q2 + acc);
    }
    out
}

/// `∫₀ᵗ ∫Q_s² ds dτ` along recorded pairs (trapezoid in time).
pub fn accumulated_dissipation(records: &[(f64, Measurements)]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for w in records.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1.norm_qs2 + w[1].1.norm_qs2);
        out.push(acc);
    }
    out
}
