//! PSL(2,C) arithmetic, its action on the projective line, and the
//! conjugacy normal form of loxodromic monodromies.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-300;

/// Tolerance on `||lambda| - 1|` below which an eigenvalue counts as unimodular.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Plain 2x2 complex matrix. Used for Lie algebra elements (Frenet coefficients,
/// variation generators) and as scratch space for group elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self::new(o, z, z, o)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Inverse via the adjugate; fails on (numerically) singular input.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() <= DET_TOL {
            return Err(Error::Degenerate(det.norm()));
        }
        Ok(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply_vec(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, r: Mat2) -> Mat2 {
        Mat2::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, r: Mat2) -> Mat2 {
        Mat2::new(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(C64::new(s, 0.0))
    }
}

/// An element of SL(2,C) standing for its class in PSL(2,C).
///
/// The determinant is renormalized to one on construction; `M` and `-M`
/// describe the same transformation and compare equal under
/// [`MobiusMap::projective_eq`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    m: Mat2,
}

impl MobiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::from_mat(Mat2::new(a, b, c, d))
    }

    pub fn from_mat(m: Mat2) -> Result<Self> {
        let det = m.det();
        if det.norm() <= DET_TOL || !det.is_finite() {
            return Err(Error::Degenerate(det.norm()));
        }
        Ok(Self { m: m.scale(det.sqrt().inv()) })
    }

    /// Renormalizes a matrix already known to be invertible (e.g. a product of
    /// two group elements). Panics only if `m` is singular.
    pub(crate) fn renormalized(m: Mat2) -> Self {
        Self::from_mat(m).expect("product of invertible matrices is invertible")
    }

    pub fn identity() -> Self {
        Self { m: Mat2::identity() }
    }

    /// `diag(lambda, 1/lambda)`.
    pub fn diag(lambda: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self { m: Mat2::new(lambda, z, z, lambda.inv()) }
    }

    pub fn a(&self) -> C64 {
        self.m.a
    }
    pub fn b(&self) -> C64 {
        self.m.b
    }
    pub fn c(&self) -> C64 {
        self.m.c
    }
    pub fn d(&self) -> C64 {
        self.m.d
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn det(&self) -> C64 {
        self.m.det()
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// `self ∘ other`: acts as `other` first, then `self`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        Self::renormalized(self.m * other.m)
    }

    pub fn inverse(&self) -> MobiusMap {
        let m = self.m;
        // det is one, so the adjugate is the inverse
        Self { m: Mat2::new(m.d, -m.b, -m.c, m.a) }
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let v = self.m.apply_vec([p.z1, p.z2]);
        ProjectivePoint::new(v[0], v[1]).expect("invertible map sends nonzero vectors to nonzero vectors")
    }

    /// Action on the extended plane (finite input).
    pub fn apply_complex(&self, z: C64) -> Stereo {
        self.apply(&ProjectivePoint::from_complex(z)).stereographic()
    }

    /// Frobenius distance after aligning the sign of `other` with `self`
    /// through the entry of largest modulus.
    pub fn projective_distance(&self, other: &MobiusMap) -> f64 {
        let ea = self.m.entries();
        let eb = other.m.entries();
        let idx = (0..4)
            .max_by(|&i, &j| ea[i].norm().total_cmp(&ea[j].norm()))
            .unwrap_or(0);
        let sign = if (ea[idx].conj() * eb[idx]).re < 0.0 { -1.0 } else { 1.0 };
        (self.m - other.m * sign).frobenius()
    }

    pub fn projective_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    /// The map sending `(z1, z2, z3)` to `(0, 1, ∞)`.
    pub fn to_zero_one_infinity(z1: C64, z2: C64, z3: C64) -> Result<MobiusMap> {
        // z ↦ (z - z1)(z2 - z3) / ((z - z3)(z2 - z1))
        let a = z2 - z3;
        let b = -z1 * (z2 - z3);
        let c = z2 - z1;
        let d = -z3 * (z2 - z1);
        Self::new(a, b, c, d)
    }

    /// The unique map sending each `src[i]` to `dst[i]`.
    pub fn from_three_points(src: [C64; 3], dst: [C64; 3]) -> Result<MobiusMap> {
        let s = Self::to_zero_one_infinity(src[0], src[1], src[2])?;
        let t = Self::to_zero_one_infinity(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().compose(&s))
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        self.compose(&rhs)
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m.a, m.b, m.c, m.d)
    }
}

/// A point of CP^1 in homogeneous coordinates, stored with unit Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    pub z1: C64,
    pub z2: C64,
}

impl ProjectivePoint {
    pub fn new(z1: C64, z2: C64) -> Result<Self> {
        let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput("homogeneous coordinates must be finite and not both zero".into()));
        }
        Ok(Self { z1: z1 / n, z2: z2 / n })
    }

    /// `[z; 1]`.
    pub fn from_complex(z: C64) -> Self {
        Self::new(z, C64::new(1.0, 0.0)).expect("[z;1] is nonzero")
    }

    pub fn origin() -> Self {
        Self::from_complex(C64::new(0.0, 0.0))
    }

    pub fn infinity() -> Self {
        Self { z1: C64::new(1.0, 0.0), z2: C64::new(0.0, 0.0) }
    }

    /// `|z1 w2 - z2 w1|` of the unit representatives: zero iff the points coincide.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        (self.z1 * other.z2 - self.z2 * other.z1).norm()
    }

    pub fn projective_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// `[z1; z2] ↦ z1 / z2`, with ∞ as an explicit tagged value.
    pub fn stereographic(&self) -> Stereo {
        if self.z2.norm() <= f64::EPSILON * 1e-2 * self.z1.norm() || self.z2.norm() == 0.0 {
            Stereo::Infinity
        } else {
            Stereo::Finite(self.z1 / self.z2)
        }
    }
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stereo {
    Finite(C64),
    Infinity,
}

impl Stereo {
    pub fn finite(self) -> Option<C64> {
        match self {
            Stereo::Finite(z) => Some(z),
            Stereo::Infinity => None,
        }
    }
}

/// Conjugacy data of an admissible monodromy `L = T^{-1} diag(λ, 1/λ) T`,
/// `λ = r e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyClass {
    pub r: f64,
    pub theta: f64,
    /// Winding integer; `None` until computed from a curve.
    pub n: Option<u32>,
    pub conjugator: MobiusMap,
}

impl MonodromyClass {
    /// A class given directly by its invariants, with identity conjugator.
    pub fn new(r: f64, theta: f64, n: u32) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!("r = {r} must lie in (0,1)")));
        }
        if !(0.0..PI).contains(&theta) {
            return Err(Error::InvalidInput(format!("theta = {theta} must lie in [0,π)")));
        }
        if 2.0 * PI * n as f64 + 2.0 * theta <= 0.0 {
            return Err(Error::InvalidInput("2πn + 2θ must be positive".into()));
        }
        Ok(Self { r, theta, n: Some(n), conjugator: MobiusMap::identity() })
    }

    /// Class of the one-turn logarithmic spiral `u ↦ exp((a+i)u)`.
    pub fn spiral(a: f64) -> Result<Self> {
        Self::new((-PI * a).exp(), 0.0, 1)
    }

    pub fn lambda(&self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }

    pub fn with_winding(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    /// Total turning `2πn + 2θ` of one period of the normalized projected curve.
    pub fn turning(&self) -> Option<f64> {
        self.n.map(|n| 2.0 * PI * n as f64 + 2.0 * self.theta)
    }

    /// `T^{-1} diag(λ,1/λ) T`.
    pub fn monodromy(&self) -> MobiusMap {
        self.conjugator.inverse().compose(&MobiusMap::diag(self.lambda()).compose(&self.conjugator))
    }
}

fn eigenvector(m: &Mat2, mu: C64) -> [C64; 2] {
    // rows of (M - mu I) are orthogonal to the eigenvector
    let v1 = [m.b, mu - m.a];
    let v2 = [mu - m.d, m.c];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let v = if n1 >= n2 { v1 } else { v2 };
    // canonical scaling: unit norm, largest component real positive
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let big = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    let phase = big.conj() / big.norm();
    [v[0] * phase / n, v[1] * phase / n]
}

/// Conjugacy normal form `L = T^{-1} diag(λ, 1/λ) T` with `0 < |λ| < 1` and
/// `arg λ ∈ [0, π)` (using the sign freedom of PSL(2,C)). The winding is left unset.
pub fn normal_form(l: &MobiusMap) -> Result<MonodromyClass> {
    let m = l.matrix();
    let tr = m.trace();
    let disc = (tr * tr - 4.0).sqrt();
    let mu1 = (tr + disc) * 0.5;
    let mu2 = (tr - disc) * 0.5;
    if (mu1 - mu2).norm() <= UNIT_CIRCLE_TOL {
        return Err(Error::Parabolic(format!("{tr}")));
    }
    let (lam, lam_inv) = if mu1.norm() < mu2.norm() { (mu1, mu2) } else { (mu2, mu1) };
    if (lam.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL {
        return Err(Error::EigenvalueOnUnitCircle(lam.norm()));
    }
    let v1 = eigenvector(&m, lam);
    let v2 = eigenvector(&m, lam_inv);
    let vmat = Mat2::new(v1[0], v2[0], v1[1], v2[1]);
    let t = MobiusMap::from_mat(vmat)?.inverse();
    let theta = lam.arg().rem_euclid(PI);
    let theta = if PI - theta < 1e-15 { 0.0 } else { theta };
    Ok(MonodromyClass { r: lam.norm(), theta, n: None, conjugator: t })
}
