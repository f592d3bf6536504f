//! Plane curves given by closed-form analytic parametrizations, with exact
//! (Taylor-mode) curvature jets and inversive invariants. These serve as
//! oracles for the sampled pipelines.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::invariants::gauss_from_local;
use crate::jet::Jet;
use crate::mobius::MobiusMap;

/// A curve `τ ↦ z(τ)` whose value can be evaluated on jets.
///
/// `eval` is only ever called with `Jet::variable(τ0, K)`, so implementors may
/// differentiate the result with respect to the jet variable.
pub trait AnalyticCurve: Send + Sync {
    fn eval(&self, t: &Jet) -> Jet;

    fn point(&self, tau: f64) -> C64 {
        self.eval(&Jet::variable(tau, 0)).value()
    }
}

impl<C: AnalyticCurve + ?Sized> AnalyticCurve for &C {
    fn eval(&self, t: &Jet) -> Jet {
        (**self).eval(t)
    }
}

impl<C: AnalyticCurve + ?Sized> AnalyticCurve for Box<C> {
    fn eval(&self, t: &Jet) -> Jet {
        (**self).eval(t)
    }
}

/// `z(τ) = exp((−a + i)τ)`: the logarithmic spiral traversed toward its
/// center, so that curvature increases along the curve.
#[derive(Debug, Clone, Copy)]
pub struct LogSpiral {
    pub a: f64,
}

impl LogSpiral {
    pub fn new(a: f64) -> Self {
        Self { a }
    }

    /// Euclidean distance to the center `u_c − u` along the curve at `τ`.
    pub fn remaining_length(&self, tau: f64) -> f64 {
        (1.0 + self.a * self.a).sqrt() / self.a * (-self.a * tau).exp()
    }

    /// `n` samples at uniform `τ` on `[τa, τb]`, with Euclidean arc length
    /// `u = −(distance to the center along the curve)`, exact and free of
    /// cancellation near the center.
    pub fn sample(&self, tau_a: f64, tau_b: f64, n: usize) -> (Vec<f64>, Vec<C64>) {
        (0..n)
            .map(|i| {
                let t = tau_a + (tau_b - tau_a) * i as f64 / (n - 1) as f64;
                (-self.remaining_length(t), self.point(t))
            })
            .unzip()
    }

    /// `z ↦ e^{−2πa} z`, mapping the curve at `τ` to the curve at `τ + 2π`.
    pub fn monodromy(&self) -> MobiusMap {
        MobiusMap::diag(C64::new((-PI * self.a).exp(), 0.0))
    }

    /// The constant fundamental invariant `(1 − a²)/(4a)`.
    pub fn q(&self) -> f64 {
        (1.0 - self.a * self.a) / (4.0 * self.a)
    }

    /// Invariant length of one turn, `2π√a`.
    pub fn turn_length(&self) -> f64 {
        2.0 * PI * self.a.sqrt()
    }
}

impl AnalyticCurve for LogSpiral {
    fn eval(&self, t: &Jet) -> Jet {
        (t.clone() * C64::new(-self.a, 1.0)).exp()
    }
}

/// Image of a curve under a Möbius map.
#[derive(Debug, Clone)]
pub struct MobiusImage<C> {
    pub map: MobiusMap,
    pub curve: C,
}

impl<C: AnalyticCurve> AnalyticCurve for MobiusImage<C> {
    fn eval(&self, t: &Jet) -> Jet {
        let z = self.curve.eval(t);
        let m = self.map;
        (z.clone() * m.a() + Jet::constant(m.b(), z.order())) / (z.clone() * m.c() + Jet::constant(m.d(), z.order()))
    }
}

/// A curve given by a closure on jets.
pub struct FnCurve<F>(pub F);

impl<F: Fn(&Jet) -> Jet + Send + Sync> AnalyticCurve for FnCurve<F> {
    fn eval(&self, t: &Jet) -> Jet {
        (self.0)(t)
    }
}

/// A fixed admissible, non-loxodromic test curve: a perturbed spiral,
/// `z = w + ε w²` with `w = exp((−a+i)τ)`, seen through a generic Möbius map.
pub fn generic_test_curve() -> MobiusImage<FnCurve<impl Fn(&Jet) -> Jet + Send + Sync + Clone>> {
    let f = |t: &Jet| {
        let w = (t.clone() * C64::new(-0.3, 1.0)).exp();
        let w2 = (t.clone() * C64::new(-0.6, 2.0)).exp();
        w + w2 * C64::new(0.04, 0.03)
    };
    let map = MobiusMap::new(
        C64::new(1.0, 0.1),
        C64::new(0.2, -0.1),
        C64::new(0.15, 0.05),
        C64::new(1.0, 0.0),
    )
    .expect("fixed map is invertible");
    MobiusImage { map, curve: FnCurve(f) }
}

/// Taylor jets in `τ` of the geometric quantities of an analytic curve at `τ0`.
#[derive(Debug, Clone)]
pub struct CurveJets {
    pub tau0: f64,
    pub z: Jet,
    /// Unit tangent `e^{iφ}`.
    pub tangent: Jet,
    /// Euclidean speed `du/dτ`.
    pub speed: Jet,
    /// `[k, k_u, k_uu, k_uuu]`.
    pub k: Vec<Jet>,
    /// Invariant speed `ds/dτ = √(k_u) du/dτ`.
    pub ds_dtau: Jet,
    /// `[Q, Q_s, Q_ss, ...]`.
    pub q: Vec<Jet>,
}

impl CurveJets {
    pub fn compute<C: AnalyticCurve + ?Sized>(curve: &C, tau0: f64, order: usize, q_derivs: usize) -> Self {
        let z = curve.eval(&Jet::variable(tau0, order));
        let z1 = z.diff();
        let z2 = z1.diff();
        let speed = (z1.clone() * z1.conj()).re_part().sqrt();
        let tangent = z1.clone() / speed.clone();
        let cross = (z2 * z1.conj()).im_part();
        let mut k = vec![cross / speed.clone().powf(3.0)];
        for _ in 0..3 {
            let last = k.last().expect("nonempty");
            let next = last.diff() / speed.clone();
            k.push(next);
        }
        let ku = k[1].clone();
        let ds_dtau = ku.sqrt() * speed.clone();
        let q0 = quartic_q(&k[0], &k[1], &k[2], &k[3]);
        let mut q = vec![q0];
        for _ in 0..q_derivs {
            let last = q.last().expect("nonempty");
            let next = last.diff() / ds_dtau.clone();
            q.push(next);
        }
        Self { tau0, z, tangent, speed, k, ds_dtau, q }
    }

    /// s-derivative of a jet in τ.
    pub fn d_s(&self, f: &Jet) -> Jet {
        f.diff() / self.ds_dtau.clone()
    }

    pub fn k_values(&self) -> [f64; 4] {
        [self.k[0].re(), self.k[1].re(), self.k[2].re(), self.k[3].re()]
    }

    pub fn q_values(&self) -> Vec<f64> {
        self.q.iter().map(|j| j.re()).collect()
    }

    /// Inversive normal `i e^{iφ} / √k_u` as a jet.
    pub fn normal(&self) -> Jet {
        self.tangent.clone() * C64::new(0.0, 1.0) / self.k[1].sqrt()
    }

    /// The inversive Gauss map at `τ0`.
    pub fn gauss_map(&self) -> MobiusMap {
        let [k, ku, kuu, _] = self.k_values();
        gauss_from_local(self.z.value(), self.tangent.value(), k, ku, kuu)
    }
}

/// `Q = ¼k²/k′ + 5/16 k″²/k′³ − ¼k‴/k′²` on jets.
fn quartic_q(k: &Jet, k1: &Jet, k2: &Jet, k3: &Jet) -> Jet {
    let t1 = k.clone() * k.clone() / k1.clone() * 0.25;
    let t2 = k2.clone() * k2.clone() / (k1.clone() * k1.clone() * k1.clone()) * (5.0 / 16.0);
    let t3 = k3.clone() / (k1.clone() * k1.clone()) * 0.25;
    t1 + t2 - t3
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Samples `n` points at uniform `τ` on `[τa, τb]`, returning Euclidean arc
/// length (from `τa`, by 10-point Gauss–Legendre per interval) and positions.
pub fn sample_uniform_tau<C: AnalyticCurve + ?Sized>(curve: &C, tau_a: f64, tau_b: f64, n: usize) -> (Vec<f64>, Vec<C64>) {
    let taus: Vec<f64> = (0..n).map(|i| tau_a + (tau_b - tau_a) * i as f64 / (n - 1) as f64).collect();
    sample_at(curve, &taus)
}

pub fn sample_at<C: AnalyticCurve + ?Sized>(curve: &C, taus: &[f64]) -> (Vec<f64>, Vec<C64>) {
    let (gx, gw) = gauss_legendre(10);
    let speed = |t: f64| curve.eval(&Jet::variable(t, 1)).derivative_value(1).norm();
    let mut u = Vec::with_capacity(taus.len());
    let mut acc = 0.0;
    for (i, &t) in taus.iter().enumerate() {
        if i > 0 {
            let (a, b) = (taus[i - 1], t);
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            acc += h * gx.iter().zip(&gw).map(|(x, w)| w * speed(m + h * x)).sum::<f64>();
        }
        u.push(acc);
    }
    let z = taus.iter().map(|&t| curve.point(t)).collect();
    (u, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_jets_match_closed_form() {
        for &a in &[1.0, 0.5, 0.3] {
            let sp = LogSpiral::new(a);
            let tau = 0.4;
            let j = CurveJets::compute(&sp, tau, 12, 3);
            // k = 1/(a w) with w the remaining Euclidean length
            let w = sp.remaining_length(tau);
            let [k, ku, kuu, kuuu] = j.k_values();
            assert!((k - 1.0 / (a * w)).abs() < 1e-12 * k);
            assert!((ku - 1.0 / (a * w * w)).abs() < 1e-12 * ku);
            assert!((kuu - 2.0 / (a * w.powi(3))).abs() < 1e-11 * kuu);
            assert!((kuuu - 6.0 / (a * w.powi(4))).abs() < 1e-10 * kuuu);
            let q = j.q_values();
            assert!((q[0] - sp.q()).abs() < 1e-11);
            for d in &q[1..] {
                assert!(d.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn mobius_image_preserves_q() {
        let c = generic_test_curve();
        let j1 = CurveJets::compute(&c.curve, 0.5, 12, 2);
        let j2 = CurveJets::compute(&c, 0.5, 12, 2);
        for (a, b) in j1.q_values().iter().zip(j2.q_values()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }
}
