//! Finite-difference weights, smoothing B-spline regression and cubic
//! interpolating splines.

use crate::error::{Error, Result};

/// Fornberg's weights for derivatives `0..=m` at `x0` from nodes `xs`.
/// Returns `w[d][j]`, the weight of node `j` in derivative `d`.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A clamped B-spline of degree `p` on a (possibly nonuniform) knot vector.
#[derive(Debug, Clone)]
pub struct BSpline {
    pub degree: usize,
    pub knots: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl BSpline {
    /// Clamped knot vector with the given interior breakpoints (strictly
    /// increasing, including both ends).
    pub fn clamped_knots(breaks: &[f64], degree: usize) -> Vec<f64> {
        let mut k = Vec::with_capacity(breaks.len() + 2 * degree);
        k.extend(std::iter::repeat(breaks[0]).take(degree));
        k.extend_from_slice(breaks);
        k.extend(std::iter::repeat(*breaks.last().expect("nonempty")).take(degree));
        k
    }

    pub fn n_basis(knots: &[f64], degree: usize) -> usize {
        knots.len() - degree - 1
    }

    fn span(knots: &[f64], degree: usize, x: f64) -> usize {
        let n = Self::n_basis(knots, degree);
        if x >= knots[n] {
            return n - 1;
        }
        if x <= knots[degree] {
            return degree;
        }
        let (mut lo, mut hi) = (degree, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Nonzero basis functions at `x` and their derivatives up to `nd`.
    /// Returns `(span, ders)` with `ders[k][r]` the `k`-th derivative of basis
    /// `span − p + r`.
    pub fn basis_ders(knots: &[f64], p: usize, x: f64, nd: usize) -> (usize, Vec<Vec<f64>>) {
        let i = Self::span(knots, p, x);
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - knots[i + 1 - j];
            right[j] = knots[i + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let nd = nd.min(p);
        let mut ders = vec![vec![0.0; p + 1]; nd + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=nd {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut fac = p as f64;
        for k in 1..=nd {
            for v in ders[k].iter_mut() {
                *v *= fac;
            }
            fac *= (p - k) as f64;
        }
        (i, ders)
    }

    /// Value and derivatives `0..=nd` at `x`.
    pub fn eval_ders(&self, x: f64, nd: usize) -> Vec<f64> {
        let p = self.degree;
        let (span, ders) = Self::basis_ders(&self.knots, p, x, nd);
        let mut out = vec![0.0; nd + 1];
        for (k, row) in ders.iter().enumerate() {
            out[k] = (0..=p).map(|r| row[r] * self.coeffs[span - p + r]).sum();
        }
        out
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_ders(x, 0)[0]
    }

    /// Penalized least-squares fit `min Σ (f(xᵢ) − yᵢ)² + λ Σ (Δ³c)²`, solved
    /// by Givens QR on the banded design matrix.
    pub fn fit(xs: &[f64], ys: &[f64], breaks: &[f64], degree: usize, lambda: f64) -> Result<BSpline> {
        let knots = Self::clamped_knots(breaks, degree);
        let nb = Self::n_basis(&knots, degree);
        if xs.len() < nb {
            return Err(Error::TooFewSamples(format!("{} samples for {} spline coefficients", xs.len(), nb)));
        }
        let mut qr = BandedQr::new(nb, (degree + 1).max(4));
        for (&x, &y) in xs.iter().zip(ys) {
            let (span, ders) = Self::basis_ders(&knots, degree, x, 0);
            qr.add_row(span - degree, &ders[0], y);
        }
        if lambda > 0.0 {
            let w = lambda.sqrt();
            let d3 = [-w, 3.0 * w, -3.0 * w, w];
            for i in 0..nb.saturating_sub(3) {
                qr.add_row(i, &d3, 0.0);
            }
        }
        let coeffs = qr.solve()?;
        Ok(BSpline { degree, knots, coeffs })
    }
}

/// Upper-triangular banded factor built row by row with Givens rotations.
struct BandedQr {
    n: usize,
    bw: usize,
    // r[i][d] = R[i][i+d]
    r: Vec<Vec<f64>>,
    z: Vec<f64>,
}

impl BandedQr {
    fn new(n: usize, bw: usize) -> Self {
        Self { n, bw, r: vec![vec![0.0; bw]; n], z: vec![0.0; n] }
    }

    /// Adds the observation `Σ_j row[j] c[start + j] = y`.
    fn add_row(&mut self, start: usize, row: &[f64], y: f64) {
        let mut h = vec![0.0; self.bw];
        h[..row.len()].copy_from_slice(row);
        let mut y = y;
        for i in start..self.n {
            if h.iter().all(|&v| v == 0.0) {
                break;
            }
            let (a, b) = (self.r[i][0], h[0]);
            if b != 0.0 {
                let rho = a.hypot(b);
                let (c, s) = (a / rho, b / rho);
                for d in 0..self.bw {
                    let (ri, hi) = (self.r[i][d], h[d]);
                    self.r[i][d] = c * ri + s * hi;
                    h[d] = -s * ri + c * hi;
                }
                let zi = self.z[i];
                self.z[i] = c * zi + s * y;
                y = -s * zi + c * y;
            }
            h.rotate_left(1);
            h[self.bw - 1] = 0.0;
        }
    }

    fn solve(self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut c = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = self.z[i];
            for d in 1..self.bw {
                if i + d < n {
                    acc -= self.r[i][d] * c[i + d];
                }
            }
            let diag = self.r[i][0];
            if diag.abs() < 1e-300 {
                return Err(Error::Degenerate(diag.abs()));
            }
            c[i] = acc / diag;
        }
        Ok(c)
    }
}

/// Interpolating cubic spline, natural or periodic.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    period: Option<f64>,
}

impl CubicSpline {
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(Error::TooFewSamples(format!("{n} nodes for a cubic spline")));
        }
        check_increasing(x)?;
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            r[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        let m = thomas(&a, &b, &c, &r);
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m, period: None })
    }

    /// Periodic spline through `(xᵢ, yᵢ)`, `x` in `[x0, x0 + period)`.
    pub fn periodic(x: &[f64], y: &[f64], period: f64) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(Error::TooFewSamples(format!("{n} nodes for a cubic spline")));
        }
        check_increasing(x)?;
        if x[n - 1] - x[0] >= period {
            return Err(Error::InvalidInput("periodic nodes exceed one period".into()));
        }
        let h: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { x[i + 1] - x[i] } else { x[0] + period - x[n - 1] })
            .collect();
        let yn = |i: usize| y[i % n];
        // cyclic tridiagonal system for second derivatives
        let mut mat = vec![vec![0.0; n]; n];
        let mut r = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            let hi = h[i];
            mat[i][(i + n - 1) % n] += hp;
            mat[i][i] += 2.0 * (hp + hi);
            mat[i][(i + 1) % n] += hi;
            r[i] = 6.0 * ((yn(i + 1) - y[i]) / hi - (y[i] - yn(i + n - 1)) / hp);
        }
        let m = dense_solve(mat, r)?;
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m, period: Some(period) })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let (t, segs) = match self.period {
            Some(p) => (self.x[0] + (t - self.x[0]).rem_euclid(p), n),
            None => (t, n - 1),
        };
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(segs - 1),
        };
        let (x0, x1) = if i + 1 < n { (self.x[i], self.x[i + 1]) } else { (self.x[i], self.x[0] + self.period.unwrap_or(0.0)) };
        let (y0, y1) = (self.y[i], self.y[(i + 1) % n]);
        let (m0, m1) = (self.m[i], self.m[(i + 1) % n]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

fn check_increasing(x: &[f64]) -> Result<()> {
    for (i, w) in x.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonmonotoneParam(i + 1));
        }
    }
    Ok(())
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = r[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (r[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Degenerate(a[piv][col].abs()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * b[k]).sum();
        b[row] = (b[row] - s) / a[row][row];
    }
    Ok(b)
}
