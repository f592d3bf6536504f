//! Fourier collocation on the uniform periodic grid `u_j = j/N`, `u ∈ [0, 1)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Coefficients below this fraction of the largest one are treated as
/// roundoff and zeroed before differentiation.
pub const SNAP_REL: f64 = 1e-13;

/// Fraction of the (non-mean) energy allowed above 2/3 of the Nyquist mode.
pub const RESOLUTION_TAIL: f64 = 0.01;

/// FFT plans for one grid size.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectral({})", self.n)
    }
}

impl Spectral {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!("grid size {n} must be even and at least 8")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed wavenumber of coefficient `j`; the Nyquist mode is reported as `−N/2`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Coefficients `f̂_k` with `f(u) = Σ f̂_k e^{2πiku}`.
    pub fn forward(&self, f: &[f64]) -> Vec<C64> {
        assert_eq!(f.len(), self.n);
        let mut buf: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    pub fn inverse(&self, fh: &[C64]) -> Vec<f64> {
        assert_eq!(fh.len(), self.n);
        let mut buf = fh.to_vec();
        self.inv.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// `(2πik)^p f̂_k`, with the Nyquist mode zeroed.
    pub fn derivative_coeffs(&self, fh: &[C64], p: u32) -> Vec<C64> {
        let half = self.n / 2;
        fh.iter()
            .enumerate()
            .map(|(j, &c)| {
                if j == half {
                    return C64::new(0.0, 0.0);
                }
                let w = C64::new(0.0, 2.0 * PI * self.wavenumber(j) as f64);
                c * w.powu(p)
            })
            .collect()
    }

    /// Zeroes coefficients below `SNAP_REL` of the largest, so that roundoff
    /// in unresolved modes is not amplified by repeated differentiation.
    pub fn snap(&self, fh: &mut [C64]) {
        let peak = fh.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for c in fh.iter_mut() {
            if c.norm() < SNAP_REL * peak {
                *c = C64::new(0.0, 0.0);
            }
        }
    }

    /// p-th u-derivative of grid values.
    pub fn derivative(&self, f: &[f64], p: u32) -> Vec<f64> {
        let mut fh = self.forward(f);
        self.snap(&mut fh);
        self.inverse(&self.derivative_coeffs(&fh, p))
    }

    /// Zeroes all modes with `|k| > N/3` (and the Nyquist mode).
    pub fn dealias(&self, fh: &mut [C64]) {
        let cut = (self.n / 3) as i64;
        for (j, c) in fh.iter_mut().enumerate() {
            let k = self.wavenumber(j);
            if k.abs() > cut || j == self.n / 2 {
                *c = C64::new(0.0, 0.0);
            }
        }
    }

    pub fn dealiased(&self, f: &[f64]) -> Vec<f64> {
        let mut fh = self.forward(f);
        self.dealias(&mut fh);
        self.inverse(&fh)
    }

    /// Share of the non-mean energy carried by modes above 2/3 of the Nyquist mode.
    pub fn tail_fraction(&self, fh: &[C64]) -> f64 {
        let cut = (self.n / 3) as i64;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (j, c) in fh.iter().enumerate().skip(1) {
            let e = c.norm_sqr();
            total += e;
            if self.wavenumber(j).abs() > cut {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    pub fn check_resolved(&self, f: &[f64]) -> Result<()> {
        let frac = self.tail_fraction(&self.forward(f));
        if frac > RESOLUTION_TAIL {
            return Err(Error::Resolution(frac));
        }
        Ok(())
    }

    /// Evaluates the trigonometric interpolant at arbitrary `u`. The Nyquist
    /// mode is split symmetrically so the interpolant is real.
    pub fn interpolate(&self, fh: &[C64], u: f64) -> f64 {
        let w = C64::from_polar(1.0, 2.0 * PI * u);
        let half = self.n / 2;
        let mut acc = fh[0].re;
        let mut e = w;
        for k in 1..half {
            acc += 2.0 * (fh[k] * e).re;
            e *= w;
        }
        // Nyquist: f̂ (e^{iπNu} + e^{−iπNu})/2
        acc + fh[half].re * e.re
    }

    /// Value and u-derivative of the interpolant at `u`.
    pub fn interpolate_with_derivative(&self, fh: &[C64], u: f64) -> (f64, f64) {
        let w = C64::from_polar(1.0, 2.0 * PI * u);
        let half = self.n / 2;
        let mut v = fh[0].re;
        let mut d = 0.0;
        let mut e = w;
        for k in 1..half {
            let t = fh[k] * e;
            v += 2.0 * t.re;
            d += -2.0 * 2.0 * PI * k as f64 * t.im;
            e *= w;
        }
        (v + fh[half].re * e.re, d)
    }

    /// Values of the interpolant on a uniform grid of `m ≥ N` points.
    pub fn upsample(&self, f: &[f64], m: usize) -> Vec<f64> {
        assert!(m >= self.n && m % 2 == 0);
        let fh = self.forward(f);
        let half = self.n / 2;
        let mut big = vec![C64::new(0.0, 0.0); m];
        for k in 0..half {
            big[k] = fh[k];
        }
        for k in 1..half {
            big[m - k] = fh[self.n - k];
        }
        big[half] += fh[half] * 0.5;
        big[m - half] += fh[half] * 0.5;
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m).process(&mut big);
        big.iter().map(|c| c.re).collect()
    }

    /// `∫₀¹ f du` (exact for trigonometric polynomials of degree < N).
    pub fn mean(f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / f.len() as f64
    }

    /// `F(u) = ∫₀ᵘ f du` on the grid.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let fh = self.forward(f);
        let mean = fh[0].re;
        (0..self.n)
            .map(|j| {
                let u = j as f64 / self.n as f64;
                mean * u + self.periodic_antiderivative(&fh, u)
            })
            .collect()
    }

    /// Periodic part of the antiderivative, zero at `u = 0`.
    pub fn periodic_antiderivative(&self, fh: &[C64], u: f64) -> f64 {
        let w = C64::from_polar(1.0, 2.0 * PI * u);
        let mut acc = 0.0;
        let mut e = w;
        for k in 1..self.n / 2 {
            let i2pk = C64::new(0.0, 2.0 * PI * k as f64);
            acc += 2.0 * (fh[k] / i2pk * (e - 1.0)).re;
            e *= w;
        }
        acc
    }
}
