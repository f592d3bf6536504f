//! Truncated Taylor series (univariate jets) with complex coefficients.
//!
//! A jet of order `K` stores `c[k] = f^(k)(t0) / k!` for `k = 0..=K`. Real
//! quantities are carried with zero imaginary parts. Used to evaluate exact
//! curvature jets and invariants of analytic test curves.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<C64>,
}

impl Jet {
    pub fn constant(v: C64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = v;
        Self { c }
    }

    pub fn real(v: f64, order: usize) -> Self {
        Self::constant(C64::new(v, 0.0), order)
    }

    /// The independent variable `t0 + h`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Self::real(t0, order);
        if order >= 1 {
            j.c[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(c: Vec<C64>) -> Self {
        assert!(!c.is_empty());
        Self { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn re(&self) -> f64 {
        self.c[0].re
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> C64 {
        self.c[k] * factorial(k)
    }

    /// d/dt as a jet of order one lower.
    pub fn diff(&self) -> Jet {
        let k = self.order();
        if k == 0 {
            return Jet::real(0.0, 0);
        }
        Jet { c: (1..=k).map(|i| self.c[i] * i as f64).collect() }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { c: self.c[..=order.min(self.order())].to_vec() }
    }

    pub fn conj(&self) -> Jet {
        Jet { c: self.c.iter().map(|z| z.conj()).collect() }
    }

    pub fn re_part(&self) -> Jet {
        Jet { c: self.c.iter().map(|z| C64::new(z.re, 0.0)).collect() }
    }

    pub fn im_part(&self) -> Jet {
        Jet { c: self.c.iter().map(|z| C64::new(z.im, 0.0)).collect() }
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { c: self.c.iter().map(|z| z * s).collect() }
    }

    pub fn recip(&self) -> Jet {
        Jet::real(1.0, self.order()) / self.clone()
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut l = vec![C64::new(0.0, 0.0); n];
        l[0] = a0.ln();
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..k {
                acc += l[j] * self.c[k - j] * j as f64;
            }
            l[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Jet { c: l }
    }

    /// Principal-branch power `self^p` (requires nonzero constant term).
    pub fn powf(&self, p: f64) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[0] = a0.powf(p);
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * y[k - j] * ((p + 1.0) * j as f64 - k as f64);
            }
            y[k] = acc / (a0 * k as f64);
        }
        Jet { c: y }
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = vec![C64::new(0.0, 0.0); n];
        let mut c = vec![C64::new(0.0, 0.0); n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let (mut as_, mut ac) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for j in 1..=k {
                let w = self.c[j] * j as f64;
                as_ += w * c[k - j];
                ac += w * s[k - j];
            }
            s[k] = as_ / k as f64;
            c[k] = -ac / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn common(a: &Jet, b: &Jet) -> usize {
    a.c.len().min(b.c.len())
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, r: Jet) -> Jet {
        let n = common(&self, &r);
        Jet { c: (0..n).map(|i| self.c[i] + r.c[i]).collect() }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, r: Jet) -> Jet {
        let n = common(&self, &r);
        Jet { c: (0..n).map(|i| self.c[i] - r.c[i]).collect() }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.into_iter().map(|z| -z).collect() }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, r: Jet) -> Jet {
        let n = common(&self, &r);
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * r.c[k - j];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, r: Jet) -> Jet {
        let n = common(&self, &r);
        let mut c = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= r.c[j] * c[k - j];
            }
            c[k] = acc / r.c[0];
        }
        Jet { c }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, r: f64) -> Jet {
        self.c[0] += r;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, r: f64) -> Jet {
        self.scale(C64::new(r, 0.0))
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, r: C64) -> Jet {
        self.scale(r)
    }
}
