//! The inversive curve-lengthening flow as the closed system for `(Q, ρ)` on a
//! fixed periodic grid in `u ∈ [0, 1)`:
//!
//! ```text
//! ∂ₜQ = ¼Q⁽⁶⁾ + 2QQ⁽⁴⁾ + 3Q_sQ⁽³⁾ + 2Q_ss² + (4Q² + 1)Q_ss + 2QQ_s²
//! ∂ₜρ = −𝒞ρ,   𝒞 = ½Q⁽⁴⁾ + 2QQ_ss + Q_s²
//! ```
//!
//! with `∂_s = ρ⁻¹∂_u`. The curve itself is recovered through the Frenet system.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{self, Measurements};
use crate::error::{Error, Result};
use crate::frenet::propagate_sampled;
use crate::invariants::winding_from_points;
use crate::mobius::{normal_form, MobiusMap, MonodromyClass, ProjectivePoint};
use crate::spectral::Spectral;

/// Upsampling factor used when integrating the Frenet system over one period.
pub const PERIOD_MAP_UPSAMPLE: usize = 8;

/// Consecutive confirmations required before declaring convergence.
pub const CONVERGENCE_CONFIRMATIONS: usize = 3;

/// A snapshot of the flow: `Q` and the invariant density `ρ = ds/du` on the
/// grid `u_j = j/N`, with the monodromy class fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub q: Vec<f64>,
    pub rho: Vec<f64>,
    pub t: f64,
    pub class: MonodromyClass,
}

impl FlowState {
    /// Builds a state and computes its monodromy class, including the winding.
    pub fn new(q: Vec<f64>, rho: Vec<f64>, t: f64) -> Result<Self> {
        validate(&q, &rho, t)?;
        let sp = Spectral::new(q.len())?;
        let class = monodromy_class(&sp, &q, &rho)?;
        Ok(Self { q, rho, t, class })
    }

    /// A state with a known class (no recomputation).
    pub fn with_class(q: Vec<f64>, rho: Vec<f64>, t: f64, class: MonodromyClass) -> Result<Self> {
        validate(&q, &rho, t)?;
        Ok(Self { q, rho, t, class })
    }

    /// The one-turn loxodrome with constant `Q₀` on a uniform grid.
    pub fn loxodrome(n: usize, q0: f64) -> Result<Self> {
        Self::new(vec![q0; n], vec![diagnostics::loxodrome_length(q0); n], 0.0)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `ℓ = ∫₀¹ ρ du`.
    pub fn length(&self) -> f64 {
        Spectral::mean(&self.rho)
    }

    /// `∫ f ds` for grid values `f`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.rho).map(|(a, r)| a * r).sum::<f64>() / self.n() as f64
    }

    /// `max |ρ/ρ̄ − 1|`.
    pub fn nonuniformity(&self) -> f64 {
        let l = self.length();
        self.rho.iter().map(|r| (r / l - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn validate(q: &[f64], rho: &[f64], t: f64) -> Result<()> {
    if q.len() != rho.len() {
        return Err(Error::InvalidInput(format!("Q has {} samples, rho has {}", q.len(), rho.len())));
    }
    if q.len() < 8 || q.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("grid size {} must be even and at least 8", q.len())));
    }
    if let Some(x) = q.iter().chain(rho).copied().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(x));
    }
    let min_rho = rho.iter().copied().fold(f64::INFINITY, f64::min);
    if min_rho <= 0.0 {
        return Err(Error::RhoNonpositive { t, min_rho });
    }
    Ok(())
}

/// Band-limited noise about `q0`: random Fourier modes `1..=max_mode`, scaled
/// so that `max |Q − q0| = amplitude`. Deterministic for a given seed.
pub fn band_limited_noise(n: usize, q0: f64, amplitude: f64, max_mode: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (0..max_mode).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let dev: Vec<f64> = (0..n)
        .map(|j| {
            let u = j as f64 / n as f64;
            coeffs
                .iter()
                .enumerate()
                .map(|(m, (a, b))| {
                    let x = 2.0 * std::f64::consts::PI * (m + 1) as f64 * u;
                    a * x.cos() + b * x.sin()
                })
                .sum()
        })
        .collect();
    let peak = dev.iter().map(|x: &f64| x.abs()).fold(0.0, f64::max);
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    dev.iter().map(|d| q0 + scale * d).collect()
}

/// Monodromy `L` with `X(u + 1) = L X(u)`, for the Gauss map normalized by
/// `G(0) = I`. The Frenet system `dG/du = ρ M(Q) G` is integrated on an
/// upsampled grid.
pub fn period_map(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<MobiusMap> {
    let (qf, rf) = upsampled(sp, q, rho);
    let phi = propagate_sampled(&qf, &rf)?;
    Ok(phi.last().expect("nonempty").inverse())
}

fn upsampled(sp: &Spectral, q: &[f64], rho: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = PERIOD_MAP_UPSAMPLE * sp.len();
    (sp.upsample(q, m), sp.upsample(rho, m))
}

/// Points `X(u) = G(u)⁻¹[0;1]` over one period plus two samples, on the
/// upsampled grid.
pub fn period_points(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<(Vec<ProjectivePoint>, MobiusMap)> {
    let (qf, rf) = upsampled(sp, q, rho);
    let gs = propagate_sampled(&qf, &rf)?;
    let l = gs.last().expect("nonempty").inverse();
    let origin = ProjectivePoint::origin();
    let mut pts: Vec<ProjectivePoint> = gs.iter().map(|g| g.inverse().apply(&origin)).collect();
    let extra = l.apply(&pts[1]);
    pts.push(extra);
    Ok((pts, l))
}

/// Monodromy class of the curve determined by `(Q, ρ)`, with its winding.
pub fn monodromy_class(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<MonodromyClass> {
    let (pts, l) = period_points(sp, q, rho)?;
    let class = normal_form(&l)?;
    let n = winding_from_points(&pts, &class)?;
    Ok(class.with_winding(n))
}

/// `[f, f_s, …, f⁽ᵖ⁾]` with `∂_s = ρ⁻¹∂_u`, without a resolution check.
fn s_derivatives_raw(sp: &Spectral, f: &[f64], rho: &[f64], p: usize) -> Vec<Vec<f64>> {
    let mut out = vec![f.to_vec()];
    for _ in 0..p {
        let du = sp.derivative(out.last().expect("nonempty"), 1);
        out.push(du.iter().zip(rho).map(|(d, r)| d / r).collect());
    }
    out
}

/// `[f, f_s, …, f⁽ᵖ⁾]`; fails with RESOLUTION when `f` is under-resolved.
pub fn s_derivatives(sp: &Spectral, f: &[f64], rho: &[f64], p: usize) -> Result<Vec<Vec<f64>>> {
    sp.check_resolved(f)?;
    Ok(s_derivatives_raw(sp, f, rho, p))
}

/// `f⁽ᵖ⁾` with respect to invariant arc length, `1 ≤ p ≤ 6`.
pub fn s_derivative(sp: &Spectral, f: &[f64], rho: &[f64], p: usize) -> Result<Vec<f64>> {
    if !(1..=6).contains(&p) {
        return Err(Error::InvalidInput(format!("derivative order {p} outside 1..=6")));
    }
    Ok(s_derivatives(sp, f, rho, p)?.pop().expect("nonempty"))
}

/// Pointwise right-hand sides `(∂ₜQ, 𝒞)` from the s-derivatives `d = [Q, …, Q⁽⁶⁾]`.
pub(crate) fn pointwise_rhs(d: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = d[0].len();
    let mut rhs = Vec::with_capacity(n);
    let mut comm = Vec::with_capacity(n);
    for j in 0..n {
        let (q, q1, q2, q3, q4, q6) = (d[0][j], d[1][j], d[2][j], d[3][j], d[4][j], d[6][j]);
        rhs.push(
            0.25 * q6 + 2.0 * q * q4 + 3.0 * q1 * q3 + 2.0 * q2 * q2 + (4.0 * q * q + 1.0) * q2 + 2.0 * q * q1 * q1,
        );
        comm.push(0.5 * q4 + 2.0 * q * q2 + q1 * q1);
    }
    (rhs, comm)
}

/// `𝒞 = ½Q⁽⁴⁾ + 2QQ_ss + Q_s²`.
pub fn commutator_c(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<Vec<f64>> {
    let d = s_derivatives(sp, q, rho, 4)?;
    Ok((0..q.len()).map(|j| 0.5 * d[4][j] + 2.0 * d[0][j] * d[2][j] + d[1][j] * d[1][j]).collect())
}

/// `∂ₜQ` evaluated pointwise from the six-term expression.
pub fn rhs_q(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<Vec<f64>> {
    let d = s_derivatives(sp, q, rho, 6)?;
    Ok(pointwise_rhs(&d).0)
}

/// Both right-hand sides at once, `(∂ₜQ, 𝒞)`.
pub fn rhs_and_commutator(sp: &Spectral, q: &[f64], rho: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = s_derivatives(sp, q, rho, 6)?;
    Ok(pointwise_rhs(&d))
}

/// Linear growth rate of mode `e^{iωs}` about constant `Q₀`.
pub fn dispersion(q0: f64, omega: f64) -> f64 {
    let w2 = omega * omega;
    -0.25 * w2 * w2 * w2 + 2.0 * q0 * w2 * w2 - (4.0 * q0 * q0 + 1.0) * w2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Exponential time differencing (second order). The linearization about
    /// the mean, `¼∂ₛ⁶ + 2Q̄∂ₛ⁴ + (4Q̄² + 1)∂ₛ²` with `∂ₛ = ρ̄⁻¹∂ᵤ`, is integrated
    /// exactly in Fourier space and the remainder explicitly.
    Imex,
    /// Bogacki–Shampine 3(2) with a stability ceiling on `dt`.
    Erk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub scheme: Scheme,
    /// Remesh after this many accepted steps.
    pub remesh_interval: usize,
    /// Also remesh as soon as `max |ρ/ρ̄ − 1|` exceeds this.
    pub remesh_threshold: f64,
    /// Keep a snapshot (and call the observer) every this many accepted steps.
    pub snapshot_every: usize,
    pub convergence_tol: f64,
    pub stop_on_convergence: bool,
    pub max_steps: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt_init: 1e-8,
            dt_min: 1e-14,
            dt_max: 0.25,
            rtol: 1e-8,
            atol: 1e-12,
            scheme: Scheme::Imex,
            remesh_interval: 20,
            remesh_threshold: 0.05,
            snapshot_every: 50,
            convergence_tol: 1e-10,
            stop_on_convergence: true,
            max_steps: 2_000_000,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_min > 0.0
            && self.dt_min <= self.dt_init
            && self.dt_init <= self.dt_max
            && self.rtol > 0.0
            && self.atol > 0.0
            && self.remesh_interval > 0
            && self.snapshot_every > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("inconsistent stepper configuration {self:?}")))
        }
    }
}

/// `φ₁(z) = (eᶻ − 1)/z` and `φ₂(z) = (eᶻ − 1 − z)/z²` for real `z ≤ 0`.
fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-3 {
        let p1 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
        let p2 = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Outcome of one attempted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub error_ratio: f64,
    pub rejected: usize,
}

/// Adaptive stepper holding FFT plans and the current step size.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub sp: Spectral,
    pub cfg: StepperConfig,
    pub dt: f64,
}

struct Trial {
    q: Vec<f64>,
    rho: Vec<f64>,
    ratio: f64,
}

impl Stepper {
    pub fn new(n: usize, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { sp: Spectral::new(n)?, dt: cfg.dt_init, cfg })
    }

    /// `(∂ₜQ, 𝒞)` with both fields dealiased.
    fn rhs(&self, q: &[f64], rho: &[f64]) -> (Vec<C64>, Vec<f64>) {
        let d = s_derivatives_raw(&self.sp, q, rho, 6);
        let (rhs, comm) = pointwise_rhs(&d);
        let mut rh = self.sp.forward(&rhs);
        self.sp.dealias(&mut rh);
        (rh, self.sp.dealiased(&comm))
    }

    fn error_ratio(&self, q: &[f64], dq: &[f64], rho: &[f64], drho: &[f64]) -> f64 {
        let qmax = q.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let rmax = rho.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let eq = dq.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let er = drho.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let r = (eq / (self.cfg.rtol * qmax + self.cfg.atol)).max(er / (self.cfg.rtol * rmax + self.cfg.atol));
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    }

    /// One ETD2 step for `Q`. `log ρ` follows the same path: the part of `𝒞`
    /// linear about the mean, with symbol `½ω⁴ − 2Q̄ω²`, is integrated along
    /// the exponential predictor, and the remainder by the trapezoid rule.
    fn try_imex(&self, q: &[f64], rho: &[f64], h: f64) -> Trial {
        let sp = &self.sp;
        let n = sp.len();
        let ell = Spectral::mean(rho);
        let qbar = Spectral::mean(q);
        let omega = |j: usize| 2.0 * std::f64::consts::PI * sp.wavenumber(j) as f64 / ell;
        let lin: Vec<f64> = (0..n).map(|j| dispersion(qbar, omega(j))).collect();
        let csym: Vec<f64> = (0..n)
            .map(|j| {
                let w2 = omega(j).powi(2);
                0.5 * w2 * w2 - 2.0 * qbar * w2
            })
            .collect();
        let apply_c = |fh: &[C64]| sp.inverse(&fh.iter().zip(&csym).map(|(f, c)| f * c).collect::<Vec<_>>());

        let qh = sp.forward(q);
        let (r0, c0) = self.rhs(q, rho);
        let n0: Vec<C64> = (0..n).map(|j| r0[j] - qh[j] * lin[j]).collect();
        let mut ah = Vec::with_capacity(n);
        let mut p2 = Vec::with_capacity(n);
        let mut qint = Vec::with_capacity(n);
        for j in 0..n {
            let z = lin[j] * h;
            let (f1, f2) = phi12(z);
            ah.push(qh[j] * z.exp() + n0[j] * (h * f1));
            qint.push(qh[j] * (h * f1) + n0[j] * (h * h * f2));
            p2.push(h * f2);
        }
        sp.dealias(&mut ah);
        let a = sp.inverse(&ah);
        let clin_int = apply_c(&qint);
        let rest0: Vec<f64> = c0.iter().zip(apply_c(&qh)).map(|(c, l)| c - l).collect();
        let rho_a: Vec<f64> = sp.dealiased(&(0..n).map(|j| rho[j] * (-clin_int[j] - h * rest0[j]).exp()).collect::<Vec<_>>());

        let (r1, c1) = self.rhs(&a, &rho_a);
        let corr: Vec<C64> = (0..n).map(|j| (r1[j] - ah[j] * lin[j] - n0[j]) * p2[j]).collect();
        let dq = sp.inverse(&corr);
        let q_new: Vec<f64> = a.iter().zip(&dq).map(|(x, d)| x + d).collect();
        let rest1: Vec<f64> = c1.iter().zip(apply_c(&ah)).map(|(c, l)| c - l).collect();
        let rho_new: Vec<f64> =
            sp.dealiased(&(0..n).map(|j| rho[j] * (-clin_int[j] - 0.5 * h * (rest0[j] + rest1[j])).exp()).collect::<Vec<_>>());
        let drho: Vec<f64> = rho_new.iter().zip(&rho_a).map(|(x, y)| x - y).collect();
        let ratio = self.error_ratio(&q_new, &dq, &rho_new, &drho);
        Trial { q: q_new, rho: rho_new, ratio }
    }

    /// Largest stable explicit step for the current state.
    fn erk_ceiling(&self, q: &[f64], rho: &[f64]) -> f64 {
        let n = self.sp.len();
        let rmin = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let qmax = q.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let w = 2.0 * std::f64::consts::PI * (n / 3) as f64 / rmin;
        let w2 = w * w;
        let stiff = 0.25 * w2 * w2 * w2 + 2.0 * qmax * w2 * w2 + (4.0 * qmax * qmax + 1.0) * w2;
        // real stability interval of the third-order scheme is about 2.5
        2.0 / stiff
    }

    fn try_erk(&self, q: &[f64], rho: &[f64], h: f64) -> Trial {
        let sp = &self.sp;
        let f = |q: &[f64], rho: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let (rh, c) = self.rhs(q, rho);
            let dr: Vec<f64> = c.iter().zip(rho).map(|(c, r)| -c * r).collect();
            (sp.inverse(&rh), dr)
        };
        let axpy = |x: &[f64], terms: &[(f64, &Vec<f64>)]| -> Vec<f64> {
            (0..x.len()).map(|j| x[j] + terms.iter().map(|(c, v)| c * v[j]).sum::<f64>()).collect()
        };
        let (k1q, k1r) = f(q, rho);
        let (k2q, k2r) = f(&axpy(q, &[(0.5 * h, &k1q)]), &axpy(rho, &[(0.5 * h, &k1r)]));
        let (k3q, k3r) = f(&axpy(q, &[(0.75 * h, &k2q)]), &axpy(rho, &[(0.75 * h, &k2r)]));
        let q3 = axpy(q, &[(2.0 / 9.0 * h, &k1q), (1.0 / 3.0 * h, &k2q), (4.0 / 9.0 * h, &k3q)]);
        let r3 = axpy(rho, &[(2.0 / 9.0 * h, &k1r), (1.0 / 3.0 * h, &k2r), (4.0 / 9.0 * h, &k3r)]);
        let (k4q, k4r) = f(&q3, &r3);
        let e = [-5.0 / 72.0, 1.0 / 12.0, 1.0 / 9.0, -1.0 / 8.0];
        let eq = axpy(&vec![0.0; q.len()], &[(e[0] * h, &k1q), (e[1] * h, &k2q), (e[2] * h, &k3q), (e[3] * h, &k4q)]);
        let er = axpy(&vec![0.0; q.len()], &[(e[0] * h, &k1r), (e[1] * h, &k2r), (e[2] * h, &k3r), (e[3] * h, &k4r)]);
        let ratio = self.error_ratio(&q3, &eq, &r3, &er);
        Trial { q: sp.dealiased(&q3), rho: r3, ratio }
    }

    /// Advances by one accepted step no longer than `max_dt`.
    pub fn step(&mut self, state: &FlowState, max_dt: f64) -> Result<(FlowState, StepInfo)> {
        let mut rejected = 0;
        let order = match self.cfg.scheme {
            Scheme::Imex => 2.0,
            Scheme::Erk => 3.0,
        };
        loop {
            let mut h = self.dt.min(max_dt);
            if self.cfg.scheme == Scheme::Erk {
                h = h.min(self.erk_ceiling(&state.q, &state.rho));
            }
            if h < self.cfg.dt_min && h < max_dt {
                return Err(Error::DtUnderflow { t: state.t, dt: h });
            }
            let trial = match self.cfg.scheme {
                Scheme::Imex => self.try_imex(&state.q, &state.rho, h),
                Scheme::Erk => self.try_erk(&state.q, &state.rho, h),
            };
            let ratio = trial.ratio;
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-1.0 / order)).clamp(0.2, 5.0) };
            if ratio <= 1.0 {
                let min_rho = trial.rho.iter().copied().fold(f64::INFINITY, f64::min);
                if !(min_rho > 0.0) {
                    return Err(Error::RhoNonpositive { t: state.t + h, min_rho });
                }
                if h >= self.dt.min(max_dt) * (1.0 - 1e-12) {
                    self.dt = (self.dt * factor).min(self.cfg.dt_max);
                }
                let next = FlowState { q: trial.q, rho: trial.rho, t: state.t + h, class: state.class };
                return Ok((next, StepInfo { dt: h, error_ratio: ratio, rejected }));
            }
            rejected += 1;
            self.dt = h * factor.min(0.9);
        }
    }
}

/// One accepted step with a fresh stepper (convenience for single steps).
pub fn step(state: &FlowState, cfg: &StepperConfig) -> Result<FlowState> {
    let mut st = Stepper::new(state.n(), cfg.clone())?;
    Ok(st.step(state, f64::INFINITY)?.0)
}

/// Resamples `Q` to uniform invariant arc length (`ρ ≡ ℓ`), keeping `u = 0`
/// fixed, by spectral interpolation.
pub fn remesh(sp: &Spectral, state: &FlowState) -> Result<FlowState> {
    sp.check_resolved(&state.q)?;
    sp.check_resolved(&state.rho)?;
    let n = state.n();
    let rh = sp.forward(&state.rho);
    let qh = sp.forward(&state.q);
    let ell = rh[0].re;
    let s_of = |u: f64| ell * u + sp.periodic_antiderivative(&rh, u);
    let mut q_new = Vec::with_capacity(n);
    let mut u = 0.0;
    for j in 0..n {
        let target = ell * j as f64 / n as f64;
        for _ in 0..60 {
            let du = (s_of(u) - target) / sp.interpolate(&rh, u);
            u -= du;
            if du.abs() < 1e-15 {
                break;
            }
        }
        q_new.push(sp.interpolate(&qh, u));
    }
    let q_new = sp.dealiased(&q_new);
    FlowState::with_class(q_new, vec![ell; n], state.t, state.class)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `‖Q_s‖₂` stayed below the convergence tolerance.
    Converged,
    ReachedEnd,
    StepLimit,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::Converged => "converged",
            Termination::ReachedEnd => "reached t_end",
            Termination::StepLimit => "step limit",
        };
        f.write_str(s)
    }
}

/// Per-step diagnostics recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub m: Measurements,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<FlowState>,
    pub records: Vec<StepRecord>,
    pub reason: Termination,
    pub accepted: usize,
    pub rejected: usize,
    pub remeshes: usize,
}

impl Trajectory {
    pub fn last_state(&self) -> &FlowState {
        self.snapshots.last().expect("trajectory has at least the initial state")
    }
}

/// Integrates to `t_end` (or convergence). The observer sees every snapshot.
pub fn evolve<F: FnMut(&FlowState)>(state0: &FlowState, t_end: f64, cfg: &StepperConfig, mut observer: F) -> Result<Trajectory> {
    let mut stepper = Stepper::new(state0.n(), cfg.clone())?;
    let sp = stepper.sp.clone();
    let mut state = state0.clone();
    let m0 = diagnostics::measure(&sp, &state)?;
    let mut traj = Trajectory {
        snapshots: vec![state.clone()],
        records: vec![StepRecord { t: state.t, dt: 0.0, m: m0 }],
        reason: Termination::ReachedEnd,
        accepted: 0,
        rejected: 0,
        remeshes: 0,
    };
    observer(&state);
    if cfg.stop_on_convergence && m0.norm_qs2.sqrt() < cfg.convergence_tol {
        traj.reason = Termination::Converged;
        return Ok(traj);
    }
    let mut confirmations = 0;
    let mut since_remesh = 0;
    while state.t < t_end * (1.0 - 1e-15) {
        if traj.accepted >= cfg.max_steps {
            traj.reason = Termination::StepLimit;
            break;
        }
        let (next, info) = stepper.step(&state, t_end - state.t)?;
        state = next;
        traj.accepted += 1;
        traj.rejected += info.rejected;
        since_remesh += 1;
        if since_remesh >= cfg.remesh_interval || state.nonuniformity() > cfg.remesh_threshold {
            state = remesh(&sp, &state)?;
            traj.remeshes += 1;
            since_remesh = 0;
        }
        let m = diagnostics::measure(&sp, &state)?;
        traj.records.push(StepRecord { t: state.t, dt: info.dt, m });
        if traj.accepted % cfg.snapshot_every == 0 {
            traj.snapshots.push(state.clone());
            observer(&state);
        }
        if m.norm_qs2.sqrt() < cfg.convergence_tol {
            confirmations += 1;
            if cfg.stop_on_convergence && confirmations >= CONVERGENCE_CONFIRMATIONS {
                traj.reason = Termination::Converged;
                break;
            }
        } else {
            confirmations = 0;
        }
    }
    if traj.last_state().t != state.t {
        traj.snapshots.push(state.clone());
        observer(&state);
    }
    Ok(traj)
}
