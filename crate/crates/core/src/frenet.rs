//! The inversive Serret–Frenet system `dG/ds = M(Q) G`: integration,
//! loxodromes in closed form, curve reconstruction, the Taylor expansion of
//! the Gauss map and the variation generator.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::invariants::{corrected_trapezoid, Periodicity, SampledCurve};
use crate::mobius::{Mat2, MobiusMap, ProjectivePoint};

/// Largest determinant correction accepted in a single integration step.
pub const MAX_DET_CORRECTION: f64 = 1e-3;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `M(Q) = [[0, −1], [Q + i/2, 0]]`; traceless with `M² = −(Q + i/2) I`.
pub fn frenet_matrix(q: f64) -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(-1.0, 0.0), c(q, 0.5), c(0.0, 0.0))
}

/// A sampled Gauss map along a curve, on the grid `s₀ + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPath {
    pub s: Vec<f64>,
    pub g: Vec<MobiusMap>,
    pub q: Vec<f64>,
}

impl GaussPath {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `X(sᵢ) = G(sᵢ)⁻¹ [0; 1]`.
    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.g.iter().map(|g| g.inverse().apply(&ProjectivePoint::origin())).collect()
    }

    /// `L = G(sᵢ + ℓ)⁻¹ G(sᵢ)` for every `i` with `i + period` on the path, where
    /// `period` is the number of steps in one invariant period.
    pub fn monodromies(&self, period: usize) -> Vec<MobiusMap> {
        (0..self.len().saturating_sub(period))
            .map(|i| self.g[i + period].inverse().compose(&self.g[i]))
            .collect()
    }
}

/// One classical RK4 step of `G′ = A(s) G` given `A` at `s`, `s + h/2`, `s + h`,
/// followed by determinant renormalization.
fn rk4_step(g: Mat2, a0: Mat2, am: Mat2, a1: Mat2, h: f64) -> Result<Mat2> {
    let k1 = a0 * g;
    let k2 = am * (g + k1 * (0.5 * h));
    let k3 = am * (g + k2 * (0.5 * h));
    let k4 = a1 * (g + k3 * h);
    let next = g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    let root = next.det().sqrt();
    let corr = (root - 1.0).norm();
    if !(corr <= MAX_DET_CORRECTION) {
        return Err(Error::StepTooLarge(corr));
    }
    Ok(next.scale(root.inv()))
}

/// Integrates `dG/ds = M(Q(s)) G` from `s₀` with `n` steps of size `h`, with
/// `Q` given as a function of `s`.
pub fn integrate_gauss_fn<F: Fn(f64) -> f64>(q: F, s0: f64, h: f64, n: usize, g_init: MobiusMap) -> Result<GaussPath> {
    let mut g = g_init.matrix();
    let mut path = GaussPath { s: vec![s0], g: vec![g_init], q: vec![q(s0)] };
    for i in 0..n {
        let s = s0 + i as f64 * h;
        let (qa, qm, qb) = (q(s), q(s + 0.5 * h), q(s + h));
        g = rk4_step(g, frenet_matrix(qa), frenet_matrix(qm), frenet_matrix(qb), h)?;
        path.s.push(s + h);
        path.g.push(MobiusMap::renormalized(g));
        path.q.push(qb);
    }
    Ok(path)
}

/// Integrates `dG/ds = M(Q) G` with `Q` sampled on the uniform grid
/// `s₀ + i h`. Midpoint values come from local cubic interpolation, which
/// keeps the scheme fourth order.
pub fn integrate_gauss(q: &[f64], s0: f64, h: f64, g_init: MobiusMap) -> Result<GaussPath> {
    let n = q.len();
    if n < 4 {
        return Err(Error::TooFewSamples(format!("{n} values of Q")));
    }
    let mut g = g_init.matrix();
    let mut path = GaussPath { s: vec![s0], g: vec![g_init], q: vec![q[0]] };
    for i in 0..n - 1 {
        let j = i.saturating_sub(1).min(n - 4);
        // cubic through q[j..j+4] evaluated at i + 1/2
        let x = i as f64 + 0.5 - j as f64;
        let l = [
            -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
            x * (x - 2.0) * (x - 3.0) / 2.0,
            -x * (x - 1.0) * (x - 3.0) / 2.0,
            x * (x - 1.0) * (x - 2.0) / 6.0,
        ];
        let qm: f64 = (0..4).map(|k| l[k] * q[j + k]).sum();
        g = rk4_step(g, frenet_matrix(q[i]), frenet_matrix(qm), frenet_matrix(q[i + 1]), h)?;
        path.s.push(s0 + (i + 1) as f64 * h);
        path.g.push(MobiusMap::renormalized(g));
        path.q.push(q[i + 1]);
    }
    Ok(path)
}

/// Propagator of `G′ = A(x) G` over `[a, b]` with `n` RK4 steps.
pub fn propagate<F: Fn(f64) -> Mat2>(coef: F, a: f64, b: f64, n: usize) -> Result<MobiusMap> {
    let h = (b - a) / n as f64;
    let mut g = Mat2::identity();
    for i in 0..n {
        let x = a + i as f64 * h;
        g = rk4_step(g, coef(x), coef(x + 0.5 * h), coef(x + h), h)?;
    }
    MobiusMap::from_mat(g)
}

/// Integrates `dG/du = ρ(u) M(Q(u)) G` over one period `u ∈ [0, 1]` from
/// `G(0) = I`, with `q` and `rho` sampled periodically on `m` uniform points
/// (`m` even). Even samples are RK4 nodes and odd samples the midpoints, so
/// the result holds `G` at `u = 2j/m`, `j = 0..=m/2`.
pub fn propagate_sampled(q: &[f64], rho: &[f64]) -> Result<Vec<MobiusMap>> {
    let m = q.len();
    if m != rho.len() || m < 4 || m % 2 != 0 {
        return Err(Error::InvalidInput(format!("periodic samples must have equal even length, got {m} and {}", rho.len())));
    }
    let h = 2.0 / m as f64;
    let coef = |j: usize| frenet_matrix(q[j % m]) * rho[j % m];
    let mut g = Mat2::identity();
    let mut out = vec![MobiusMap::identity()];
    for i in 0..m / 2 {
        g = rk4_step(g, coef(2 * i), coef(2 * i + 1), coef(2 * i + 2), h)?;
        out.push(MobiusMap::renormalized(g));
    }
    Ok(out)
}

/// A loxodrome: constant `Q₀` and initial frame `G_init`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoxodromeSpec {
    pub q0: f64,
    pub g_init: MobiusMap,
}

/// `exp(sM) = cos(√q s) I + sin(√q s)/√q M` with `q = Q₀ + i/2` (principal root).
pub fn exp_frenet(q0: f64, s: f64) -> Mat2 {
    let q = c(q0, 0.5);
    let w = q.sqrt();
    let x = w * s;
    let sinc = if x.norm() < 1e-4 {
        // sin(x)/x series, times s
        (C64::new(1.0, 0.0) - x * x / 6.0 + x * x * x * x / 120.0) * s
    } else {
        x.sin() / w
    };
    Mat2::identity().scale(x.cos()) + frenet_matrix(q0).scale(sinc)
}

/// `G(s) = exp(sM) G_init`.
pub fn loxodrome(spec: &LoxodromeSpec, s: f64) -> MobiusMap {
    MobiusMap::renormalized(exp_frenet(spec.q0, s) * spec.g_init.matrix())
}

/// Gauss path of a loxodrome on the grid `s₀ + i h`, `i = 0..n`.
pub fn loxodrome_path(spec: &LoxodromeSpec, s0: f64, h: f64, n: usize) -> GaussPath {
    let s: Vec<f64> = (0..=n).map(|i| s0 + i as f64 * h).collect();
    let g = s.iter().map(|&x| loxodrome(spec, x)).collect();
    GaussPath { q: vec![spec.q0; s.len()], s, g }
}

/// Projects `X = G⁻¹[0;1]` to the plane and recovers Euclidean arc length from
/// `dz/ds = 1/δ²`, where `δ` is the lower-right entry of `G⁻¹`.
pub fn reconstruct_curve(path: &GaussPath) -> Result<SampledCurve> {
    let n = path.len();
    let mut z = Vec::with_capacity(n);
    let mut speed = Vec::with_capacity(n);
    let mut dspeed = Vec::with_capacity(n);
    let scale = path.g.iter().map(|g| g.matrix().frobenius()).fold(0.0, f64::max);
    for (i, g) in path.g.iter().enumerate() {
        let inv = g.inverse().matrix();
        let (beta, gamma, delta) = (inv.b, inv.c, inv.d);
        if delta.norm() <= 1e-12 * scale {
            return Err(Error::ProjectionAtInfinity(i));
        }
        z.push(beta / delta);
        let sp = 1.0 / delta.norm_sqr();
        speed.push(sp);
        // d|δ|⁻²/ds with δ′ = γ
        dspeed.push(-2.0 * (gamma / delta).re * sp);
    }
    let u = corrected_trapezoid(&path.s, &speed, &dspeed);
    SampledCurve::new(u, z, Periodicity::Open)
}

/// `G(0) G⁻¹(s)` through order `s⁴` in terms of `Q` and its derivatives at 0.
pub fn taylor_gauss_inverse_matrix(q: f64, qs: f64, qss: f64, qsss: f64, s: f64) -> Mat2 {
    let qi = c(q, 0.5);
    let m1 = frenet_matrix(q);
    let m2 = Mat2::new(qi, c(0.0, 0.0), c(qs, 0.0), qi);
    let e = c(qss - q * q + 0.25, -q);
    let m3 = Mat2::new(c(2.0 * qs, 0.0), qi, e, c(qs, 0.0));
    let m4 = Mat2::new(
        c(3.0 * qss - q * q + 0.25, -q),
        c(2.0 * qs, 0.0),
        c(qsss - 4.0 * q * qs, -2.0 * qs),
        e,
    );
    Mat2::identity() - m1 * s - m2 * (s * s / 2.0) - m3 * (s.powi(3) / 6.0) - m4 * (s.powi(4) / 24.0)
}

pub fn taylor_gauss_inverse(q: f64, qs: f64, qss: f64, qsss: f64, s: f64) -> MobiusMap {
    MobiusMap::renormalized(taylor_gauss_inverse_matrix(q, qs, qss, qsss, s))
}

/// The traceless generator `T` with `∂ₜG = T G` for the normal variation
/// `∂ₜX = f 𝒩`. Arguments are `f, f_s, …, f_ssss` and `Q, Q_s, Q_ss`.
pub fn variation_generator(f: [f64; 5], q: f64, qs: f64, qss: f64) -> Mat2 {
    let [f0, f1, f2, f3, f4] = f;
    let a = 0.25 * f3 + q * f1 + 0.5 * qs * f0;
    let t11 = c(a, -0.5 * f1);
    let t12 = c(0.0, -f0);
    let t21 = c(
        -0.25 * f4 - q * f2 - 1.5 * qs * f1 - 0.5 * (qss + 1.0) * f0,
        0.5 * f2 + q * f0,
    );
    Mat2::new(t11, t12, t21, -t11)
}

/// Best-fit Möbius alignment of `moving` onto `target` from three
/// well-separated correspondences (indices at 1/6, 1/2 and 5/6 of the range).
/// Returns the map and the largest pointwise distance after alignment.
pub fn align_three_point(target: &[C64], moving: &[C64]) -> Result<(MobiusMap, f64)> {
    let n = target.len();
    if n != moving.len() || n < 3 {
        return Err(Error::InvalidInput("alignment needs matched point lists of length ≥ 3".into()));
    }
    let idx = [n / 6, n / 2, (5 * n) / 6];
    let src = [moving[idx[0]], moving[idx[1]], moving[idx[2]]];
    let dst = [target[idx[0]], target[idx[1]], target[idx[2]]];
    let m = MobiusMap::from_three_points(src, dst)?;
    let mut err = 0.0f64;
    for (i, (&t, &p)) in target.iter().zip(moving).enumerate() {
        let w = m.apply_complex(p).finite().ok_or(Error::ProjectionAtInfinity(i))?;
        err = err.max((w - t).norm());
    }
    Ok((m, err))
}

/// Largest distance between any two points (sampled diameter).
pub fn diameter(z: &[C64]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            d = d.max((z[i] - z[j]).norm());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{AnalyticCurve, LogSpiral};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn generic_q(s: f64) -> f64 {
        0.3 + 0.2 * (1.3 * s).sin() - 0.1 * (0.7 * s + 0.4).cos()
    }

    fn g0() -> MobiusMap {
        MobiusMap::new(c(1.0, 0.3), c(0.2, 0.0), c(-0.1, 0.4), c(0.9, 0.0)).unwrap()
    }

    #[test]
    fn frenet_matrix_squares_to_scalar() {
        for &q in &[0.0, 0.375, -2.0] {
            let m = frenet_matrix(q);
            let m2 = m * m;
            let want = Mat2::identity().scale(-c(q, 0.5));
            assert!((m2 - want).frobenius() < 1e-15);
            assert_eq!(m.trace(), c(0.0, 0.0));
        }
    }

    #[test]
    fn constant_q_matches_closed_form() {
        for &q0 in &[0.0, 0.375, -0.3] {
            let h = 2.0 * PI / 2000.0;
            let path = integrate_gauss(&vec![q0; 2001], 0.0, h, g0()).unwrap();
            let spec = LoxodromeSpec { q0, g_init: g0() };
            for (s, g) in path.s.iter().zip(&path.g) {
                assert!(g.projective_distance(&loxodrome(&spec, *s)) < 1e-8);
            }
        }
        let p = integrate_gauss(&[0.1; 5], 0.0, 0.1, MobiusMap::identity()).unwrap();
        assert!(p.g[0].projective_eq(&MobiusMap::identity(), 0.0));
        let spec = LoxodromeSpec { q0: 0.2, g_init: g0() };
        assert!(loxodrome(&spec, 0.0).projective_eq(&g0(), 1e-15));
    }

    #[test]
    fn fourth_order_convergence() {
        let s_end = 3.0;
        let reference = integrate_gauss_fn(generic_q, 0.0, s_end / 4096.0, 4096, g0()).unwrap();
        let exact = *reference.g.last().unwrap();
        let mut errs = vec![];
        for &n in &[50usize, 100] {
            let h = s_end / n as f64;
            let q: Vec<f64> = (0..=n).map(|i| generic_q(i as f64 * h)).collect();
            let p = integrate_gauss(&q, 0.0, h, g0()).unwrap();
            errs.push(p.g.last().unwrap().projective_distance(&exact));
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 16.0).abs() < 3.0, "ratio {ratio}");
    }

    #[test]
    fn det_stays_one() {
        let h = 0.01;
        let q: Vec<f64> = (0..2000).map(|i| generic_q(i as f64 * h)).collect();
        let p = integrate_gauss(&q, 0.0, h, g0()).unwrap();
        for g in &p.g {
            assert!((g.det() - 1.0).norm() < 1e-14 * g.matrix().frobenius().powi(2));
        }
    }

    #[test]
    fn huge_step_is_rejected() {
        let err = integrate_gauss(&[100.0; 4], 0.0, 1.0, MobiusMap::identity()).unwrap_err();
        assert_eq!(err.code(), "STEP_TOO_LARGE");
    }

    #[test]
    fn loxodrome_is_homogeneous() {
        let spec = LoxodromeSpec { q0: 0.375, g_init: g0() };
        let d = 0.7;
        let first = loxodrome(&spec, 0.3 + d).compose(&loxodrome(&spec, 0.3).inverse());
        for &s in &[1.0, 2.5, -4.0] {
            let other = loxodrome(&spec, s + d).compose(&loxodrome(&spec, s).inverse());
            assert!(other.projective_eq(&first, 1e-12));
        }
    }

    #[test]
    fn sinc_guard_is_continuous() {
        let a = exp_frenet(0.0, 1e-5 * 0.99);
        let b = exp_frenet(0.0, 1e-5 * 1.01);
        assert!((a - b).frobenius() < 1e-6);
        let tiny = exp_frenet(0.2, 1e-9);
        assert!((tiny - Mat2::identity() - frenet_matrix(0.2) * 1e-9).frobenius() < 1e-17);
    }

    #[test]
    fn identity_path_gives_constant_point() {
        let path = GaussPath { s: vec![0.0, 1.0, 2.0], g: vec![MobiusMap::identity(); 3], q: vec![0.0; 3] };
        for p in path.points() {
            assert!(p.projective_eq(&ProjectivePoint::origin(), 1e-15));
        }
    }

    #[test]
    fn loxodrome_projects_to_spiral() {
        // a = 1: Q = 0, s = √a τ
        let sp = LogSpiral::new(1.0);
        let path = loxodrome_path(&LoxodromeSpec { q0: sp.q(), g_init: MobiusMap::identity() }, 0.0, 0.01, 600);
        let curve = reconstruct_curve(&path).unwrap();
        let target: Vec<C64> = path.s.iter().map(|&s| sp.point(s / sp.a.sqrt())).collect();
        let (_, err) = align_three_point(&target, &curve.z).unwrap();
        assert!(err < 1e-10 * diameter(&target), "{err}");
    }

    #[test]
    fn monodromy_is_constant_along_path() {
        let ell = 2.0;
        let n = 400;
        let h = ell / n as f64;
        let qf = |s: f64| 0.4 + 0.2 * (2.0 * PI * s / ell).sin();
        let p = integrate_gauss_fn(qf, 0.0, h, 2 * n, g0()).unwrap();
        let ls = p.monodromies(n);
        for l in &ls {
            assert!(l.projective_distance(&ls[0]) < 1e-8);
        }
    }

    #[test]
    fn different_initial_frames_differ_by_left_action() {
        let h = 0.01;
        let q: Vec<f64> = (0..500).map(|i| generic_q(i as f64 * h)).collect();
        let a = integrate_gauss(&q, 0.0, h, MobiusMap::identity()).unwrap();
        let b = integrate_gauss(&q, 0.0, h, g0()).unwrap();
        // G_b = G_a A with A = g0, so X_b = A⁻¹ X_a
        let act = g0().inverse();
        for (pa, pb) in a.points().iter().zip(b.points()) {
            assert!(act.apply(pa).projective_eq(&pb, 1e-10));
        }
    }

    #[test]
    fn taylor_expansion_is_fifth_order() {
        // derivatives of generic_q at 0
        let q = generic_q(0.0);
        let d1 = 0.2 * 1.3 + 0.1 * 0.7 * 0.4f64.sin();
        let d2 = 0.1 * 0.49 * 0.4f64.cos();
        let d3 = -0.2 * 1.3f64.powi(3) - 0.1 * 0.343 * 0.4f64.sin();
        let mut errs = vec![];
        let ss = [0.05, 0.1, 0.2];
        for &s in &ss {
            let n = 2000;
            let p = integrate_gauss_fn(generic_q, 0.0, s / n as f64, n, MobiusMap::identity()).unwrap();
            let exact = p.g.last().unwrap().inverse().matrix();
            let approx = taylor_gauss_inverse_matrix(q, d1, d2, d3, s);
            let sign = if (exact.a.conj() * approx.a).re < 0.0 { -1.0 } else { 1.0 };
            errs.push((exact * sign - approx).frobenius());
        }
        let slope = (errs[2] / errs[0]).ln() / (ss[2] / ss[0]).ln();
        assert!((slope - 5.0).abs() < 0.3, "slope {slope}");
        let first = taylor_gauss_inverse_matrix(q, d1, d2, d3, 1e-3);
        let lin = (first - Mat2::identity()) * 1e3;
        assert!((lin + frenet_matrix(q)).frobenius() < 1e-2);
        assert!(taylor_gauss_inverse(q, d1, d2, d3, 0.0).projective_eq(&MobiusMap::identity(), 0.0));
    }

    #[test]
    fn variation_generator_basics() {
        let t = variation_generator([0.0; 5], 0.3, 0.1, 0.2);
        assert_eq!(t.frobenius(), 0.0);
    }

    #[test]
    fn variation_generator_matches_finite_difference() {
        use crate::analytic::{generic_test_curve, CurveJets, FnCurve};
        use crate::jet::Jet;
        let base = generic_test_curve();
        let f_of = |t: &Jet| (t.clone() * 0.8).sin() * 0.3 + 0.1;
        let perturbed = |eps: f64| {
            let base = &base;
            FnCurve(move |t: &Jet| {
                let order = t.order();
                let bj = CurveJets::compute(base, t.re(), order + 3, 0);
                let nrm = bj.normal().truncate(order);
                bj.z.truncate(order) + f_of(t) * nrm * C64::new(eps, 0.0)
            })
        };
        for &tau0 in &[0.5, 2.0, 4.0] {
            let bj = CurveJets::compute(&base, tau0, 10, 2);
            let mut fj = vec![f_of(&Jet::variable(tau0, 10))];
            for _ in 0..4 {
                let next = bj.d_s(fj.last().unwrap());
                fj.push(next);
            }
            let fv = [fj[0].re(), fj[1].re(), fj[2].re(), fj[3].re(), fj[4].re()];
            let qv = bj.q_values();
            let t = variation_generator(fv, qv[0], qv[1], qv[2]);

            let eps = 1e-5;
            let g = bj.gauss_map().matrix();
            let gp = CurveJets::compute(&perturbed(eps), tau0, 8, 0).gauss_map().matrix();
            let gm = CurveJets::compute(&perturbed(-eps), tau0, 8, 0).gauss_map().matrix();
            let align = |m: Mat2| if (m.a.conj() * g.a + m.d.conj() * g.d).re < 0.0 { m * -1.0 } else { m };
            let dg = (align(gp) - align(gm)) * (0.5 / eps);
            let t_fd = dg * g.inverse().unwrap();
            assert!((t_fd - t).frobenius() < 1e-6 * (1.0 + t.frobenius()), "tau0 {tau0}: fd {t_fd:?} vs {t:?}");
        }
    }

    #[test]
    fn q_variation_matches_finite_difference() {
        use crate::analytic::{generic_test_curve, CurveJets, FnCurve};
        use crate::jet::Jet;
        let base = generic_test_curve();
        let f_of = |t: &Jet| (t.clone() * 0.8).sin() * 0.3 + 0.1;
        let perturbed = |eps: f64| {
            let base = &base;
            FnCurve(move |t: &Jet| {
                let order = t.order();
                let bj = CurveJets::compute(base, t.re(), order + 3, 0);
                bj.z.truncate(order) + f_of(t) * bj.normal().truncate(order) * C64::new(eps, 0.0)
            })
        };
        for &tau0 in &[0.5, 2.0, 4.0] {
            let bj = CurveJets::compute(&base, tau0, 12, 3);
            let mut fj = vec![f_of(&Jet::variable(tau0, 12))];
            for _ in 0..5 {
                let next = bj.d_s(fj.last().unwrap());
                fj.push(next);
            }
            let f: Vec<f64> = fj.iter().map(|j| j.re()).collect();
            let qv = bj.q_values();
            let (q, qs, qss, qsss) = (qv[0], qv[1], qv[2], qv[3]);
            let want = -0.25 * f[5] - 2.0 * q * f[3] - 2.5 * qs * f[2]
                - (4.0 * q * q + 2.0 * qss + 1.0) * f[1]
                - (2.0 * q * qs + 0.5 * qsss) * f[0];
            let eps = 1e-5;
            let qp = CurveJets::compute(&perturbed(eps), tau0, 8, 0).q_values()[0];
            let qm = CurveJets::compute(&perturbed(-eps), tau0, 8, 0).q_values()[0];
            let fd = (qp - qm) / (2.0 * eps);
            assert!((fd - want).abs() < 1e-6 * (1.0 + want.abs()), "tau0 {tau0}: {fd} vs {want}");

            // ∂ₜ(ds/dτ) = −𝒞 ds/dτ
            let comm = -0.5 * f[3] - 2.0 * q * f[1] - qs * f[0];
            let sp = CurveJets::compute(&perturbed(eps), tau0, 8, 0).ds_dtau.re();
            let sm = CurveJets::compute(&perturbed(-eps), tau0, 8, 0).ds_dtau.re();
            let rate = (sp - sm) / (2.0 * eps) / bj.ds_dtau.re();
            assert!((rate + comm).abs() < 1e-6 * (1.0 + comm.abs()), "tau0 {tau0}: {rate} vs {}", -comm);
        }
    }

    proptest! {
        #[test]
        fn variation_generator_is_traceless(f in prop::array::uniform5(-3.0f64..3.0), q in -2.0f64..2.0, qs in -2.0f64..2.0, qss in -2.0f64..2.0) {
            let t = variation_generator(f, q, qs, qss);
            prop_assert!(t.trace().norm() < 1e-14);
        }
    }
}
