//! Gauss–Legendre panels with adaptive bisection, and adaptive Simpson as an
//! independent second scheme.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

/// Values that can be integrated: real or complex.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// One 32-point Gauss–Legendre panel on `[a, b]`.
pub fn gl_panel<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> T {
    let (x, w) = gl32();
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = T::zero();
    for i in 0..x.len() {
        s = s + f(m + h * x[i]) * w[i];
    }
    s * h
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

/// Adaptive Gauss–Legendre integration: `[a, b]` is split into `panels`
/// equal panels, each bisected until the panel and its halves agree.
pub fn adaptive_gl<T: Scalar, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    max_depth: u32,
) -> Integral<T> {
    let mut total = T::zero();
    let mut err = 0.0;
    let mut converged = true;
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let whole = gl_panel(&mut f, lo, hi);
        let r = gl_recurse(&mut f, lo, hi, whole, tol / panels as f64, max_depth);
        total = total + r.value;
        err += r.error;
        converged &= r.converged;
    }
    Integral { value: total, error: err, converged }
}

fn gl_recurse<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64, whole: T, tol: f64, depth: u32) -> Integral<T> {
    let m = 0.5 * (a + b);
    let left = gl_panel(f, a, m);
    let right = gl_panel(f, m, b);
    let both = left + right;
    let diff = (both - whole).magnitude();
    if diff <= tol || diff <= 1e-15 * both.magnitude() {
        return Integral { value: both, error: diff, converged: true };
    }
    if depth == 0 {
        return Integral { value: both, error: diff, converged: false };
    }
    let l = gl_recurse(f, a, m, left, tol / 2.0, depth - 1);
    let r = gl_recurse(f, m, b, right, tol / 2.0, depth - 1);
    Integral { value: l.value + r.value, error: l.error + r.error, converged: l.converged && r.converged }
}

/// Adaptive Simpson integration with Richardson correction.
pub fn adaptive_simpson<T: Scalar, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Integral<T> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    simpson_recurse(&mut f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<T: Scalar, F: FnMut(f64) -> T>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: f64,
    depth: u32,
) -> Integral<T> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if depth == 0 || delta.magnitude() <= 15.0 * tol {
        return Integral {
            value: left + right + delta * (1.0 / 15.0),
            error: delta.magnitude() / 15.0,
            converged: depth > 0,
        };
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1);
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
    Integral { value: l.value + r.value, error: l.error + r.error, converged: l.converged && r.converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(32);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(62)).sum();
        assert!((s - 2.0 / 63.0).abs() < 1e-14);
    }

    #[test]
    fn both_schemes_agree_on_smooth_integrand() {
        let f = |t: f64| (3.0 * t).sin() * (-t * t).exp();
        let g = adaptive_gl(f, 0.0, 4.0, 4, 1e-13, 20);
        let s = adaptive_simpson(f, 0.0, 4.0, 1e-12, 40);
        assert!(g.converged && s.converged);
        assert!((g.value - s.value).abs() < 1e-10);
    }
}
