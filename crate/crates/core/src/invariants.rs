//! Euclidean curvature data, invariant arc length, the fundamental invariant
//! `Q`, the inversive Gauss frame and the winding number of sampled curves.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mobius::{MobiusMap, MonodromyClass, ProjectivePoint, Stereo};
use crate::spline::{fornberg_weights, BSpline, CubicSpline};

/// Relative threshold below which `k_u` counts as vanishing.
pub const ADMISSIBILITY_EPS: f64 = 1e-6;

/// Minimum number of samples accepted by [`curvature_jet`].
pub const MIN_SAMPLES: usize = 16;

/// Largest tangent turning allowed between consecutive samples.
pub const MAX_TURN_PER_SAMPLE: f64 = PI / 8.0;

const STENCIL: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum Periodicity {
    Open,
    /// `z[i + period] = L(z[i])` for all valid `i`.
    Cocompact { monodromy: MobiusMap, period: usize },
}

/// Ordered samples `z(uᵢ)` of a plane curve at Euclidean arc length `uᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub u: Vec<f64>,
    pub z: Vec<C64>,
    pub periodicity: Periodicity,
}

impl SampledCurve {
    /// Validates monotone parameters, distinct points and chord lengths
    /// consistent with the parameter spacing to 1%.
    pub fn new(u: Vec<f64>, z: Vec<C64>, periodicity: Periodicity) -> Result<Self> {
        if u.len() != z.len() {
            return Err(Error::InvalidInput(format!("{} parameters for {} points", u.len(), z.len())));
        }
        if u.len() < 2 {
            return Err(Error::TooFewSamples(format!("{} samples", u.len())));
        }
        for i in 1..u.len() {
            let du = u[i] - u[i - 1];
            if !(du > 0.0) {
                return Err(Error::NonmonotoneParam(i));
            }
            let chord = (z[i] - z[i - 1]).norm();
            if chord == 0.0 {
                return Err(Error::InvalidInput(format!("samples {} and {} coincide", i - 1, i)));
            }
            if (chord / du - 1.0).abs() > 0.01 {
                return Err(Error::InvalidInput(format!(
                    "chord {chord:.3e} inconsistent with parameter step {du:.3e} at sample {i}"
                )));
            }
        }
        if let Periodicity::Cocompact { period, .. } = periodicity {
            if period == 0 || period >= z.len() {
                return Err(Error::InvalidInput(format!("period {period} incompatible with {} samples", z.len())));
            }
        }
        Ok(Self { u, z, periodicity })
    }

    /// Builds a curve from points alone, estimating Euclidean arc length.
    pub fn from_points(z: Vec<C64>, periodicity: Periodicity) -> Result<Self> {
        let u = arclength_from_points(&z)?;
        Self::new(u, z, periodicity)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Same points traversed backwards.
    pub fn reversed(&self) -> SampledCurve {
        let end = *self.u.last().expect("nonempty");
        let u = self.u.iter().rev().map(|v| end - v).collect();
        let z = self.z.iter().rev().copied().collect();
        let periodicity = match &self.periodicity {
            Periodicity::Open => Periodicity::Open,
            Periodicity::Cocompact { monodromy, period } => {
                Periodicity::Cocompact { monodromy: monodromy.inverse(), period: *period }
            }
        };
        SampledCurve { u, z, periodicity }
    }

    /// Mirror image `z ↦ z̄` with the same traversal; flips the sign of `k_u`.
    pub fn reflected(&self) -> SampledCurve {
        let z = self.z.iter().map(|z| z.conj()).collect();
        let periodicity = match &self.periodicity {
            Periodicity::Open => Periodicity::Open,
            Periodicity::Cocompact { monodromy, period } => {
                let m = monodromy.matrix();
                let conj = MobiusMap::new(m.a.conj(), m.b.conj(), m.c.conj(), m.d.conj()).expect("conjugate of invertible map");
                Periodicity::Cocompact { monodromy: conj, period: *period }
            }
        };
        SampledCurve { u: self.u.clone(), z, periodicity }
    }

    /// Image under `m`, with arc length re-estimated from the mapped points.
    pub fn mobius_image(&self, m: &MobiusMap) -> Result<SampledCurve> {
        let z = self
            .z
            .iter()
            .enumerate()
            .map(|(i, &z)| m.apply_complex(z).finite().ok_or(Error::ProjectionAtInfinity(i)))
            .collect::<Result<Vec<_>>>()?;
        let periodicity = match &self.periodicity {
            Periodicity::Open => Periodicity::Open,
            Periodicity::Cocompact { monodromy, period } => Periodicity::Cocompact {
                monodromy: m.compose(&monodromy.compose(&m.inverse())),
                period: *period,
            },
        };
        SampledCurve::from_points(z, periodicity)
    }
}

/// Indices of the `STENCIL` nodes nearest to `i` (clamped at the ends).
fn stencil(i: usize, n: usize) -> std::ops::Range<usize> {
    let w = STENCIL.min(n);
    let start = i.saturating_sub(w / 2).min(n - w);
    start..start + w
}

/// Complex derivative `dz/dt` at every node by local Fornberg stencils.
fn node_derivative(t: &[f64], z: &[C64]) -> Vec<C64> {
    let n = t.len();
    (0..n)
        .map(|i| {
            let r = stencil(i, n);
            let w = fornberg_weights(t[i], &t[r.clone()], 1);
            r.zip(&w[1]).map(|(j, w)| z[j] * *w).sum()
        })
        .collect()
}

/// Euclidean arc length of a sampled curve: parametrize by chord length,
/// differentiate by 7-point stencils, and integrate the speed with the
/// endpoint-corrected trapezoid rule.
pub fn arclength_from_points(z: &[C64]) -> Result<Vec<f64>> {
    let n = z.len();
    if n < STENCIL {
        return Err(Error::TooFewSamples(format!("{n} points")));
    }
    let mut t = vec![0.0; n];
    for i in 1..n {
        let c = (z[i] - z[i - 1]).norm();
        if c == 0.0 {
            return Err(Error::InvalidInput(format!("samples {} and {} coincide", i - 1, i)));
        }
        t[i] = t[i - 1] + c;
    }
    let speed: Vec<f64> = node_derivative(&t, &z.iter().map(|&v| v).collect::<Vec<_>>())
        .iter()
        .map(|d| d.norm())
        .collect();
    let dspeed = node_derivative(&t, &speed.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    Ok(corrected_trapezoid(&t, &speed, &dspeed.iter().map(|d| d.re).collect::<Vec<_>>()))
}

/// Cumulative `∫ f dt` with the Euler–Maclaurin endpoint correction per interval.
pub fn corrected_trapezoid(t: &[f64], f: &[f64], df: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for i in 1..t.len() {
        let h = t[i] - t[i - 1];
        out[i] = out[i - 1] + 0.5 * h * (f[i] + f[i - 1]) - h * h / 12.0 * (df[i] - df[i - 1]);
    }
    out
}

/// Per-sample curvature and its first three Euclidean arc-length derivatives.
///
/// Values within a few samples of either end of an open arc are less accurate
/// than interior values.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureJet {
    pub u: Vec<f64>,
    /// Unwrapped tangent angle.
    pub phi: Vec<f64>,
    pub k: Vec<f64>,
    pub k_u: Vec<f64>,
    pub k_uu: Vec<f64>,
    pub k_uuu: Vec<f64>,
}

impl CurvatureJet {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_admissible(&self) -> bool {
        admissibility_violation(&self.k_u).is_none()
    }
}

/// Options for the smoothing spline behind [`curvature_jet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetOptions {
    /// Target of `Δφ + Δs` (tangent turning plus invariant length) per knot
    /// interval. Smaller values resolve faster variation but amplify roundoff,
    /// which enters `k_uuu` as a fifth derivative of the positions.
    pub knot_spacing: f64,
    /// Minimum number of samples per knot interval.
    pub min_samples_per_knot: usize,
    /// Third-difference penalty weight on the spline coefficients.
    pub smoothing: f64,
    /// Spline degree (at least 5, so that `φ⁗` is continuous).
    pub degree: usize,
}

impl Default for JetOptions {
    fn default() -> Self {
        Self { knot_spacing: 0.08, min_samples_per_knot: 2, smoothing: 1e-12, degree: 7 }
    }
}

pub fn curvature_jet(curve: &SampledCurve) -> Result<CurvatureJet> {
    curvature_jet_with(curve, JetOptions::default())
}

/// Fits a penalized B-spline (degree 7 by default) to the tangent angle as a function of
/// Euclidean arc length and differentiates it: `k = φ′`, …, `k_uuu = φ⁗`.
pub fn curvature_jet_with(curve: &SampledCurve, opts: JetOptions) -> Result<CurvatureJet> {
    let n = curve.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples(format!("{n} samples, need at least {MIN_SAMPLES}")));
    }
    let u = &curve.u;
    for i in 1..n {
        if !(u[i] > u[i - 1]) {
            return Err(Error::NonmonotoneParam(i));
        }
    }
    let dz = node_derivative(u, &curve.z);
    let mut phi = Vec::with_capacity(n);
    let mut prev = dz[0].arg();
    phi.push(prev);
    for (i, d) in dz.iter().enumerate().skip(1) {
        let raw = d.arg();
        let mut step = raw - prev.rem_euclid(2.0 * PI);
        step = (step + PI).rem_euclid(2.0 * PI) - PI;
        if step.abs() > MAX_TURN_PER_SAMPLE {
            return Err(Error::TooFewSamples(format!(
                "tangent turns by {step:.3} rad between samples {} and {i}",
                i - 1
            )));
        }
        prev += step;
        phi.push(prev);
    }
    let min_spk = opts.min_samples_per_knot.max(1);
    // pilot fit on a fixed stride, then knots placed by resolution measure
    let pilot_breaks = breaks_every(u, (2 * min_spk).max(4));
    let pilot = BSpline::fit(u, &phi, &pilot_breaks, opts.degree, opts.smoothing)?;
    let measure: Vec<f64> = u
        .iter()
        .map(|&x| {
            let d = pilot.eval_ders(x, 2);
            d[1].abs() + d[2].abs().sqrt()
        })
        .collect();
    let breaks = adaptive_breaks(u, &measure, opts.knot_spacing, min_spk);
    let sp = BSpline::fit(u, &phi, &breaks, opts.degree, opts.smoothing)?;
    let mut jet = CurvatureJet {
        u: u.clone(),
        phi: Vec::with_capacity(n),
        k: Vec::with_capacity(n),
        k_u: Vec::with_capacity(n),
        k_uu: Vec::with_capacity(n),
        k_uuu: Vec::with_capacity(n),
    };
    for &x in u {
        let d = sp.eval_ders(x, 4);
        jet.phi.push(d[0]);
        jet.k.push(d[1]);
        jet.k_u.push(d[2]);
        jet.k_uu.push(d[3]);
        jet.k_uuu.push(d[4]);
    }
    Ok(jet)
}

fn breaks_every(u: &[f64], stride: usize) -> Vec<f64> {
    let mut b: Vec<f64> = u.iter().step_by(stride).copied().collect();
    if *b.last().expect("nonempty") < u[u.len() - 1] {
        b.push(u[u.len() - 1]);
    }
    b
}

/// Breakpoints at samples where `∫ m du` advances by `delta`, keeping at least
/// `min_spk` samples in every interval.
fn adaptive_breaks(u: &[f64], m: &[f64], delta: f64, min_spk: usize) -> Vec<f64> {
    let n = u.len();
    let mut b = vec![u[0]];
    let (mut acc, mut last) = (0.0, 0usize);
    for i in 1..n {
        acc += 0.5 * (m[i] + m[i - 1]) * (u[i] - u[i - 1]);
        if acc >= delta && i - last >= min_spk && n - 1 - i >= min_spk {
            b.push(u[i]);
            acc = 0.0;
            last = i;
        }
    }
    b.push(u[n - 1]);
    b
}

/// Half-width of the window defining the local scale of `k_u`.
pub const ADMISSIBILITY_WINDOW: usize = 16;

/// First sample where `k_u ≤ ε·max k_u`, the maximum taken over a window of
/// neighbouring samples so that curves whose `k_u` spans many decades (spirals
/// over several turns) are judged against their local scale.
fn admissibility_violation(k_u: &[f64]) -> Option<(usize, f64)> {
    let n = k_u.len();
    (0..n).find_map(|i| {
        let lo = i.saturating_sub(ADMISSIBILITY_WINDOW);
        let hi = (i + ADMISSIBILITY_WINDOW + 1).min(n);
        let max = k_u[lo..hi].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let v = k_u[i];
        if !(max > 0.0) || !(v > ADMISSIBILITY_EPS * max) {
            Some((i, v))
        } else {
            None
        }
    })
}

fn require_admissible(jet: &CurvatureJet) -> Result<()> {
    match admissibility_violation(&jet.k_u) {
        None => Ok(()),
        Some((i, v)) => Err(Error::Inadmissible(format!("k_u = {v:.3e} at sample {i}"))),
    }
}

/// `s(uᵢ) = ∫ √k_u du` from the first sample.
pub fn invariant_arclength(jet: &CurvatureJet) -> Result<Vec<f64>> {
    require_admissible(jet)?;
    let f: Vec<f64> = jet.k_u.iter().map(|v| v.sqrt()).collect();
    let df: Vec<f64> = jet.k_uu.iter().zip(&f).map(|(kuu, r)| kuu / (2.0 * r)).collect();
    Ok(corrected_trapezoid(&jet.u, &f, &df))
}

/// `Q = ¼k²/k′ + 5/16 k″²/k′³ − ¼k‴/k′²` at a point.
pub fn q_pointwise(k: f64, k_u: f64, k_uu: f64, k_uuu: f64) -> f64 {
    0.25 * k * k / k_u + 5.0 / 16.0 * k_uu * k_uu / (k_u * k_u * k_u) - 0.25 * k_uuu / (k_u * k_u)
}

/// The fundamental invariant against invariant arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct QProfile {
    pub s: Vec<f64>,
    pub q: Vec<f64>,
}

impl QProfile {
    /// Restricts to samples with `s` in `[s_a, s_b]`.
    pub fn window(&self, s_a: f64, s_b: f64) -> QProfile {
        let (s, q) = self
            .s
            .iter()
            .zip(&self.q)
            .filter(|(s, _)| **s >= s_a && **s <= s_b)
            .map(|(s, q)| (*s, *q))
            .unzip();
        QProfile { s, q }
    }

    /// Drops `m` samples at each end, where spline derivatives are least reliable.
    pub fn trim(&self, m: usize) -> QProfile {
        let n = self.s.len();
        if 2 * m >= n {
            return QProfile { s: vec![], q: vec![] };
        }
        QProfile { s: self.s[m..n - m].to_vec(), q: self.q[m..n - m].to_vec() }
    }

    pub fn length(&self) -> f64 {
        match (self.s.first(), self.s.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Uniform resampling by natural cubic interpolation.
    pub fn resample_uniform(&self, n: usize) -> Result<QProfile> {
        let sp = CubicSpline::natural(&self.s, &self.q)?;
        let (a, b) = (self.s[0], *self.s.last().expect("nonempty"));
        let s: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let q = s.iter().map(|&x| sp.eval(x)).collect();
        Ok(QProfile { s, q })
    }

    /// Periodic resampling of one period `[s0, s0 + ℓ)` on `n` uniform points.
    pub fn resample_periodic(&self, s0: f64, ell: f64, n: usize) -> Result<Vec<f64>> {
        let sp = CubicSpline::natural(&self.s, &self.q)?;
        if s0 < self.s[0] || s0 + ell > *self.s.last().expect("nonempty") {
            return Err(Error::InvalidInput("requested period extends beyond the profile".into()));
        }
        Ok((0..n).map(|i| sp.eval(s0 + ell * i as f64 / n as f64)).collect())
    }
}

pub fn fundamental_invariant(jet: &CurvatureJet) -> Result<QProfile> {
    let s = invariant_arclength(jet)?;
    let q = (0..jet.len())
        .map(|i| q_pointwise(jet.k[i], jet.k_u[i], jet.k_uu[i], jet.k_uuu[i]))
        .collect();
    Ok(QProfile { s, q })
}

/// Best shift `δ` aligning profile `b(s + δ)` with `a(s)`, searched in
/// `[−max_shift, max_shift]`; returns `(δ, max |a − b|)` over the overlap.
pub fn align_profiles(a: &QProfile, b: &QProfile, max_shift: f64) -> Result<(f64, f64)> {
    let sb = CubicSpline::natural(&b.s, &b.q)?;
    let (b0, b1) = (b.s[0], *b.s.last().expect("nonempty"));
    let mismatch = |d: f64| -> (f64, f64) {
        let (mut sq, mut mx, mut cnt) = (0.0, 0.0f64, 0usize);
        for (&s, &q) in a.s.iter().zip(&a.q) {
            let t = s + d;
            if t >= b0 && t <= b1 {
                let e = (sb.eval(t) - q).abs();
                sq += e * e;
                mx = mx.max(e);
                cnt += 1;
            }
        }
        if cnt == 0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            ((sq / cnt as f64).sqrt(), mx)
        }
    };
    // coarse scan then golden-section refinement
    let steps = 200;
    let mut best = (0.0, mismatch(0.0).0);
    for i in 0..=steps {
        let d = -max_shift + 2.0 * max_shift * i as f64 / steps as f64;
        let m = mismatch(d).0;
        if m < best.1 {
            best = (d, m);
        }
    }
    let h = 2.0 * max_shift / steps as f64;
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if mismatch(x1).0 < mismatch(x2).0 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let d = 0.5 * (lo + hi);
    Ok((d, mismatch(d).1))
}

/// The inversive Gauss frame at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussFrame {
    pub g: MobiusMap,
    pub index: usize,
}

/// `G = G²·G¹` from the local Euclidean data at a point: position `z0`, unit
/// tangent `e^{iφ}`, and `k, k_u, k_uu`.
pub fn gauss_from_local(z0: C64, tangent: C64, k: f64, k_u: f64, k_uu: f64) -> MobiusMap {
    let half = tangent.conj().sqrt();
    let g1 = crate::mobius::Mat2::new(half, -z0 * half, C64::new(0.0, 0.0), half.conj());
    let a = k_u.powf(0.25);
    let b = -k_uu / (4.0 * k_u.powf(1.25));
    let c = k / (2.0 * a);
    let g2 = crate::mobius::Mat2::new(C64::new(a, 0.0), C64::new(0.0, 0.0), C64::new(b, c), C64::new(1.0 / a, 0.0));
    MobiusMap::from_mat(g2 * g1).expect("det(G²G¹) = 1")
}

pub fn gauss_map_at(curve: &SampledCurve, jet: &CurvatureJet, i: usize) -> Result<GaussFrame> {
    if i >= curve.len() {
        return Err(Error::InvalidInput(format!("sample {i} out of range")));
    }
    if !(jet.k_u[i] > 0.0) {
        return Err(Error::Inadmissible(format!("k_u = {:.3e} at sample {i}", jet.k_u[i])));
    }
    let tangent = C64::from_polar(1.0, jet.phi[i]);
    Ok(GaussFrame { g: gauss_from_local(curve.z[i], tangent, jet.k[i], jet.k_u[i], jet.k_uu[i]), index: i })
}

/// Chart defect `H([x+iy; 1]) = y − x³/6` of the normalized curve `G(z)`.
pub fn chart_residual(g: &MobiusMap, z: C64) -> Option<f64> {
    match g.apply_complex(z) {
        Stereo::Finite(w) => Some(w.im - w.re.powi(3) / 6.0),
        Stereo::Infinity => None,
    }
}

/// Least-squares fit `log|r| = log C + β log|s|`; returns `(β, C)`.
pub fn fit_power_law(s: &[f64], r: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .zip(r)
        .filter(|(s, r)| s.abs() > 0.0 && r.abs() > 0.0)
        .map(|(s, r)| (s.abs().ln(), r.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    Some((beta, (my - beta * mx).exp()))
}

/// Decay exponent of `|H∘G_i∘X|` against invariant arc-length offset over the
/// samples with `s_min ≤ |s − s_i| ≤ s_max`. Returns `(β, C, offsets, residuals)`.
pub fn chart_residual_exponent(
    curve: &SampledCurve,
    jet: &CurvatureJet,
    s: &[f64],
    i: usize,
    s_min: f64,
    s_max: f64,
) -> Result<(f64, f64, Vec<f64>, Vec<f64>)> {
    let frame = gauss_map_at(curve, jet, i)?;
    let mut offs = Vec::new();
    let mut res = Vec::new();
    for j in 0..curve.len() {
        let ds = s[j] - s[i];
        if ds.abs() < s_min || ds.abs() > s_max {
            continue;
        }
        if let Some(r) = chart_residual(&frame.g, curve.z[j]) {
            offs.push(ds);
            res.push(r);
        }
    }
    let (beta, c) = fit_power_law(&offs, &res)
        .ok_or_else(|| Error::TooFewSamples("no samples in the fit window".into()))?;
    Ok((beta, c, offs, res))
}

/// Total turning of the polyline `w[a..=b]`: sum of exterior angles between
/// chords `a..a+1` and `b−1..b`.
fn polyline_turning(w: &[C64]) -> f64 {
    let chords: Vec<C64> = w.windows(2).map(|p| p[1] - p[0]).collect();
    chords.windows(2).map(|c| (c[1] / c[0]).arg()).sum()
}

/// Winding number of an `L`-cocompact curve whose monodromy has normal form
/// `class`. The curve is conjugated by `T` and the total turning over one period
/// is compared with `2πn + 2θ`.
pub fn winding_number(curve: &SampledCurve, class: &MonodromyClass) -> Result<u32> {
    let period = match curve.periodicity {
        Periodicity::Cocompact { period, .. } => period,
        Periodicity::Open => return Err(Error::InvalidInput("winding number needs a cocompact curve".into())),
    };
    if curve.len() < period + 2 {
        return Err(Error::TooFewSamples(format!("{} samples for period {period}", curve.len())));
    }
    let pts: Vec<ProjectivePoint> = curve.z[..period + 2].iter().map(|&z| ProjectivePoint::from_complex(z)).collect();
    winding_from_points(&pts, class)
}

/// Winding from one period plus two samples of points on the sphere.
pub fn winding_from_points(pts: &[ProjectivePoint], class: &MonodromyClass) -> Result<u32> {
    if pts.len() < 4 {
        return Err(Error::TooFewSamples(format!("{} points", pts.len())));
    }
    let t = class.conjugator;
    let w = pts
        .iter()
        .enumerate()
        .map(|(i, p)| t.apply(p).stereographic().finite().ok_or(Error::ProjectionAtInfinity(i)))
        .collect::<Result<Vec<_>>>()?;
    winding_from_turning(polyline_turning(&w), class.theta)
}

pub fn winding_from_turning(turning: f64, theta: f64) -> Result<u32> {
    let raw = (turning - 2.0 * theta) / (2.0 * PI);
    let n = raw.round();
    let residual = (raw - n).abs();
    if residual > 0.05 || n < 0.0 || 2.0 * PI * n + 2.0 * theta <= 0.0 {
        return Err(Error::NonIntegral { raw, residual });
    }
    Ok(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sample_uniform_tau, CurveJets, LogSpiral};
    use crate::mobius::normal_form;

    fn spiral_curve(a: f64, turns: f64, per_turn: usize) -> SampledCurve {
        let sp = LogSpiral::new(a);
        let n = (turns * per_turn as f64) as usize + 1;
        let (u, z) = sp.sample(0.0, 2.0 * PI * turns, n);
        SampledCurve::new(u, z, Periodicity::Cocompact { monodromy: sp.monodromy(), period: per_turn }).unwrap()
    }

    #[test]
    fn straight_segment_has_zero_curvature() {
        let u: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let z = u.iter().map(|&t| C64::new(1.0, 2.0) + C64::from_polar(t, 0.3)).collect();
        let c = SampledCurve::new(u, z, Periodicity::Open).unwrap();
        let j = curvature_jet(&c).unwrap();
        for i in 0..j.len() {
            assert!(j.k[i].abs() < 1e-9 && j.k_u[i].abs() < 1e-7 && j.k_uu[i].abs() < 1e-5 && j.k_uuu[i].abs() < 1e-3);
        }
        assert_eq!(invariant_arclength(&j).unwrap_err().code(), "INADMISSIBLE");
    }

    #[test]
    fn circle_is_inadmissible() {
        let r = 2.0;
        let u: Vec<f64> = (0..100).map(|i| i as f64 * 0.05).collect();
        let z = u.iter().map(|&t| C64::from_polar(r, t / r)).collect();
        let c = SampledCurve::new(u, z, Periodicity::Open).unwrap();
        let j = curvature_jet(&c).unwrap();
        for i in 5..95 {
            assert!((j.k[i] - 0.5).abs() < 1e-8);
            assert!(j.k_u[i].abs() < 1e-6);
        }
        assert_eq!(invariant_arclength(&j).unwrap_err().code(), "INADMISSIBLE");
        assert_eq!(fundamental_invariant(&j).unwrap_err().code(), "INADMISSIBLE");
    }

    #[test]
    fn spiral_curvature_derivatives() {
        let a = 1.0;
        let sp = LogSpiral::new(a);
        let c = spiral_curve(a, 2.0, 200);
        let j = curvature_jet(&c).unwrap();
        for i in (20..c.len() - 20).step_by(17) {
            let tau = 2.0 * PI * 2.0 * i as f64 / (c.len() - 1) as f64;
            let w = sp.remaining_length(tau);
            assert!((j.k_u[i] / (1.0 / (a * w * w)) - 1.0).abs() < 1e-4);
            assert!((j.k_uu[i] / (2.0 / (a * w.powi(3))) - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn spiral_invariants() {
        for &(a, ell) in &[(1.0, 2.0 * PI), (0.5, 2.0 * PI / 2f64.sqrt())] {
            let c = spiral_curve(a, 3.0, 240);
            let j = curvature_jet(&c).unwrap();
            let s = invariant_arclength(&j).unwrap();
            // one full turn away from the ends
            let one_turn = s[480] - s[240];
            assert!((one_turn - ell).abs() < 1e-6 * ell, "a={a}: {one_turn}");
            let q = fundamental_invariant(&j).unwrap();
            let want = (1.0 - a * a) / (4.0 * a);
            for i in 20..c.len() - 20 {
                assert!((q.q[i] - want).abs() < 1e-4, "a={a} i={i}: {}", q.q[i]);
            }
        }
    }

    #[test]
    fn reflection_flips_admissibility() {
        let c = spiral_curve(0.5, 1.0, 120);
        let r = c.reflected();
        let jr = curvature_jet(&r).unwrap();
        assert!(jr.k_u.iter().all(|&v| v < 0.0));
        assert_eq!(invariant_arclength(&jr).unwrap_err().code(), "INADMISSIBLE");
        let rr = r.reflected();
        assert!(curvature_jet(&rr).unwrap().is_admissible());
    }

    #[test]
    fn reversed_traversal_keeps_k_u() {
        // k and d/du both change sign, so k_u is unchanged
        let c = spiral_curve(0.5, 1.0, 120);
        let j = curvature_jet(&c).unwrap();
        let jr = curvature_jet(&c.reversed()).unwrap();
        let n = j.len();
        for i in 10..n - 10 {
            assert!((jr.k_u[n - 1 - i] / j.k_u[i] - 1.0).abs() < 1e-6);
            assert!((jr.k[n - 1 - i] + j.k[i]).abs() < 1e-6 * j.k[i].abs());
        }
    }

    #[test]
    fn too_few_and_nonmonotone() {
        let u: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let z = u.iter().map(|&t| C64::new(t, 0.0)).collect();
        let c = SampledCurve::new(u, z, Periodicity::Open).unwrap();
        assert_eq!(curvature_jet(&c).unwrap_err().code(), "TOO_FEW_SAMPLES");
        let pts = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
        let err = SampledCurve::new(vec![0.0, 1.0, 0.5], pts, Periodicity::Open).unwrap_err();
        assert_eq!(err.code(), "NONMONOTONE_PARAM");
        // a coarse circle: tangent turns too far between samples
        let u: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let z: Vec<C64> = u.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let uc = arclength_from_points(&z).unwrap();
        let c = SampledCurve { u: uc, z, periodicity: Periodicity::Open };
        assert_eq!(curvature_jet(&c).unwrap_err().code(), "TOO_FEW_SAMPLES");
    }

    #[test]
    fn gauss_frame_of_model_cubic_is_identity() {
        let x: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 * 0.01).collect();
        let z: Vec<C64> = x.iter().map(|&x| C64::new(x, x.powi(3) / 6.0)).collect();
        let c = SampledCurve::from_points(z, Periodicity::Open).unwrap();
        let j = curvature_jet(&c).unwrap();
        let f = gauss_map_at(&c, &j, 100).unwrap();
        assert!(f.g.projective_eq(&MobiusMap::identity(), 1e-6), "{}", f.g);
        let p = f.g.apply_complex(c.z[100]).finite().unwrap();
        assert!(p.norm() < 1e-8);
    }

    #[test]
    fn gauss_frame_sends_base_point_to_origin() {
        let c = spiral_curve(0.4, 1.0, 200);
        let j = curvature_jet(&c).unwrap();
        for i in [30, 100, 170] {
            let f = gauss_map_at(&c, &j, i).unwrap();
            assert!(f.g.apply(&ProjectivePoint::from_complex(c.z[i])).projective_eq(&ProjectivePoint::origin(), 1e-8));
        }
    }

    #[test]
    fn winding_of_spirals() {
        let sp = LogSpiral::new(0.3);
        let class = normal_form(&sp.monodromy()).unwrap();
        assert!(class.theta.abs() < 1e-12);
        let c = spiral_curve(0.3, 1.5, 100);
        assert_eq!(winding_number(&c, &class).unwrap(), 1);

        // two turns per period: monodromy z ↦ e^{-4πa} z
        let l2 = sp.monodromy().compose(&sp.monodromy());
        let (u, z) = sp.sample(0.0, 6.0 * PI, 301);
        let c2 = SampledCurve::new(u, z, Periodicity::Cocompact { monodromy: l2, period: 200 }).unwrap();
        let class2 = normal_form(&l2).unwrap();
        assert_eq!(winding_number(&c2, &class2).unwrap(), 2);

        // conjugated copy
        let m = MobiusMap::new(C64::new(1.0, 0.2), C64::new(0.3, 0.0), C64::new(0.05, -0.1), C64::new(1.0, 0.0)).unwrap();
        let cm = c.mobius_image(&m).unwrap();
        let lm = match &cm.periodicity {
            Periodicity::Cocompact { monodromy, .. } => *monodromy,
            _ => unreachable!(),
        };
        assert_eq!(winding_number(&cm, &normal_form(&lm).unwrap()).unwrap(), 1);
    }

    #[test]
    fn nonintegral_turning_is_rejected() {
        assert_eq!(winding_from_turning(2.0 * PI + 1.0, 0.0).unwrap_err().code(), "NONINTEGRAL");
        assert_eq!(winding_from_turning(4.0 * PI + 0.6, 0.3).unwrap(), 2);
    }

    #[test]
    fn sampled_q_matches_exact_jets_on_generic_curve() {
        let c = crate::analytic::generic_test_curve();
        let (u, z) = sample_uniform_tau(&c, 0.0, 8.0, 801);
        let sc = SampledCurve::new(u, z, Periodicity::Open).unwrap();
        let j = curvature_jet(&sc).unwrap();
        let q = fundamental_invariant(&j).unwrap();
        for i in (80..720).step_by(20) {
            let tau = 8.0 * i as f64 / 800.0;
            let exact = CurveJets::compute(&c, tau, 10, 0).q_values()[0];
            assert!((q.q[i] - exact).abs() < 1e-4 * (1.0 + exact.abs()), "i={i}: {} vs {exact}", q.q[i]);
        }
    }
}

