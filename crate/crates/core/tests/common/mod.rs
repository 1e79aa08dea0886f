//! Closed-form references shared by the integration tests.
#![allow(dead_code)]

use arkc_core::arkc::LinearSplit;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(T_n, T_n', T_n'')` from the trigonometric or hyperbolic forms.
pub fn chebyshev(n: usize, x: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    if x == 1.0 {
        return (1.0, nf * nf, nf * nf * (nf * nf - 1.0) / 3.0);
    }
    let (t, dt) = if x.abs() < 1.0 {
        let th = x.acos();
        ((nf * th).cos(), nf * (nf * th).sin() / th.sin())
    } else if x > 1.0 {
        let th = x.acosh();
        ((nf * th).cosh(), nf * (nf * th).sinh() / th.sinh())
    } else {
        let th = (-x).acosh();
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sign * (nf * th).cosh(), -sign * nf * (nf * th).sinh() / th.sinh())
    };
    // (1 - x^2) T'' - x T' + n^2 T = 0
    let d2t = (nf * nf * t - x * dt) / (x * x - 1.0);
    (t, dt, d2t)
}

/// Reference stability polynomial and interval length for order 1 or 2.
pub struct ClosedForm {
    pub order: u8,
    pub s: usize,
    pub omega0: f64,
    pub omega1: f64,
    pub ell: f64,
}

impl ClosedForm {
    pub fn new(order: u8, s: usize, eps: f64) -> Self {
        let omega0 = 1.0 + eps / (s * s) as f64;
        let (t, dt, d2t) = chebyshev(s, omega0);
        let omega1 = if order == 1 { t / dt } else { dt / d2t };
        ClosedForm { order, s, omega0, omega1, ell: (1.0 + omega0) / omega1 }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let (t0, dt0, d2t0) = chebyshev(self.s, self.omega0);
        let (tz, _, _) = chebyshev(self.s, self.omega0 + self.omega1 * z);
        if self.order == 1 {
            tz / t0
        } else {
            let b = d2t0 / (dt0 * dt0);
            (1.0 - b * t0) + b * tz
        }
    }
}

/// First and second derivative at 0 by Richardson-extrapolated central differences.
///
/// The stencil error of a polynomial of degree `deg` is a finite even series in
/// `h^2`, so `deg / 2 + 1` levels remove it entirely.
pub fn derivatives_at_zero(f: impl Fn(f64) -> f64, deg: usize, h0: f64) -> (f64, f64) {
    let levels = deg / 2 + 1;
    let f0 = f(0.0);
    let mut d1 = Vec::with_capacity(levels);
    let mut d2 = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / 2f64.powi(k as i32);
        let (p, m) = (f(h), f(-h));
        d1.push((p - m) / (2.0 * h));
        d2.push((p - 2.0 * f0 + m) / (h * h));
    }
    (richardson(d1), richardson(d2))
}

fn richardson(mut t: Vec<f64>) -> f64 {
    let n = t.len();
    for col in 1..n {
        let w = 4f64.powi(col as i32);
        for r in (col..n).rev() {
            t[r] = (w * t[r] - t[r - 1]) / (w - 1.0);
        }
    }
    t[n - 1]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric negative definite `n x n` matrix `-(Q^T Q + I)`, row-major.
pub fn dissipative_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    let q: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut a = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            let dot: f64 = (0..n).map(|k| q[k * n + r] * q[k * n + c]).sum();
            a[r * n + c] = -scale * (dot + if r == c { 1.0 } else { 0.0 });
        }
    }
    a
}

pub fn row_bound(a: &[f64], n: usize, rows: impl Fn(usize) -> bool) -> f64 {
    (0..n).filter(|&r| rows(r)).map(|r| a[r * n..(r + 1) * n].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Linear split with Gershgorin spectral radii for each part.
pub fn linear_split(a: Vec<f64>, mask: Vec<bool>) -> LinearSplit {
    let n = mask.len();
    let rho_f = row_bound(&a, n, |r| mask[r]);
    let rho_s = row_bound(&a, n, |r| !mask[r]);
    LinearSplit::new(a, mask, rho_f, rho_s).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
