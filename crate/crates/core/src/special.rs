//! Special functions: complex log-gamma, zeta and the completed zeta, the
//! modified Bessel function `K` of imaginary and of real order, the Bessel
//! moment `∫_X^∞ u^{-1/2} K_{ir}(u) du`, and the logarithmic integral.

use crate::quadrature::{adaptive_gl, gl_panel};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_2, B_4, ..., B_26.
const BERNOULLI_EVEN: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Principal-branch-compatible `ln Γ(z)` (exact up to multiples of `2πi`
/// in the imaginary part when `Re z < 1/2`).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        return c(PI.ln(), 0.0) - (z * PI).sin().ln() - ln_gamma(1.0 - z);
    }
    let mut z = z;
    let mut product = c(1.0, 0.0);
    while z.norm() < 16.0 {
        product *= z;
        z += 1.0;
    }
    let shift = product.ln();
    let mut s = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let mut p = zinv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let k = (k + 1) as f64;
        s += p * (b / (2.0 * k * (2.0 * k - 1.0)));
        p *= z2;
    }
    s - shift
}

/// `Γ(z)` for complex `z`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Riemann zeta function by Euler–Maclaurin summation (`s != 1`).
pub fn zeta(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        if s == c(0.0, 0.0) {
            return c(-0.5, 0.0);
        }
        // ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s).
        let t = 1.0 - s;
        return (s * (2.0 * PI).ln()).exp() / PI * (s * PI / 2.0).sin() * gamma(t) * zeta(t);
    }
    let n = 40usize;
    let nf = n as f64;
    let mut sum = c(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_s = (-s * nf.ln()).exp();
    sum += n_s * nf / (s - 1.0) + n_s * 0.5;
    // Tail corrections B_{2j}/(2j)! * s(s+1)...(s+2j-2) N^{-s-2j+1}.
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut npow = n_s / nf; // N^{-s-1}
    let mut fact = 2.0; // (2j)!
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        let term = rising * npow * (b / fact);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        let jf = j as f64;
        rising *= (s + (2.0 * jf - 1.0)) * (s + 2.0 * jf);
        npow /= nf * nf;
        fact *= (2.0 * jf + 1.0) * (2.0 * jf + 2.0);
    }
    sum
}

/// Completed zeta `ξ(s) = π^{-s/2} Γ(s/2) ζ(s)`, symmetric under `s -> 1 - s`.
pub fn xi(s: Complex64) -> Complex64 {
    let s = if s.re < 0.5 { 1.0 - s } else { s };
    (-s / 2.0 * PI.ln()).exp() * gamma(s / 2.0) * zeta(s)
}

/// Trapezoid evaluation of
/// `K_{ir}(x) = e^{-rθ} ∫_0^∞ e^{-x cosθ cosh u} cos(r u - x sinθ sinh u) du`,
/// the integral over the line `Im t = θ`.
fn k_contour(r: f64, x: f64, theta: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    // Half-width of the analyticity strip that stays inside the decay region.
    let a = (0.5 * (PI / 2.0 - theta)).min(0.6);
    let h = 2.0 * PI * a / (r * a + 42.0);
    let xc = x * ct;
    let xs = x * st;
    let umax = (1.0 + 44.0 / xc).acosh();
    let n = (umax / h).ceil() as usize;
    let mut sum = 0.5 * (-xc).exp() * 1.0;
    for j in 1..=n {
        let u = j as f64 * h;
        let (su, cu) = (u.sinh(), u.cosh());
        sum += (-xc * cu).exp() * (r * u - xs * su).cos();
    }
    (-r * theta).exp() * h * sum
}

/// Power series data for `K_{ir}`: returns `(prefactor, phase at x, S(x))`
/// with `K_{ir}(x) = -prefactor · Im(e^{i phase} S)`.
fn k_series_parts(r: f64, x: f64, moment: bool) -> (f64, f64, Complex64) {
    let lg = ln_gamma(c(1.0, r));
    let pref = (PI / (r * (PI * r).sinh())).sqrt();
    let phase = r * (x / 2.0).ln() - lg.im;
    let q = x * x / 4.0;
    let mut term = c(1.0, 0.0);
    let mut sum = if moment { term / c(0.5, r) } else { term };
    let mut k = 0.0;
    loop {
        k += 1.0;
        term = term * q / (c(k, r) * k);
        let add = if moment { term / c(0.5 + 2.0 * k, r) } else { term };
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) && k > q.sqrt() {
            break;
        }
        if k > 2000.0 {
            break;
        }
    }
    (pref, phase, sum)
}

/// Modified Bessel function `K_{ir}(x)` of purely imaginary order, `x > 0`.
pub fn bessel_k_imag(r: f64, x: f64) -> f64 {
    let r = r.abs();
    if r <= 2.0 {
        return k_contour(r, x, 0.0);
    }
    if x <= r {
        let (pref, phase, s) = k_series_parts(r, x, false);
        return -pref * (c(0.0, phase).exp() * s).im;
    }
    let theta = (r / x).asin().min(PI / 2.0 - 2.3 / r);
    k_contour(r, x, theta)
}

/// Modified Bessel function `K_ν(x)` of real order, `x > 0`, from
/// `∫_0^∞ e^{-x cosh t} cosh(νt) dt`.
pub fn bessel_k_real(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    let h = 0.05;
    let f = |t: f64| (-x * t.cosh() + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    let mut sum = 0.5 * f(0.0);
    let mut peak = sum;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let v = f(t);
        sum += v;
        peak = peak.max(v);
        // Past the peak of the integrand and negligible.
        if v < 1e-19 * peak && x * t.sinh() > nu {
            break;
        }
        j += 1;
    }
    h * sum
}

/// `∫_X^∞ u^{-1/2} K_{ir}(u) du` for `X >= 0`.
pub fn bessel_k_moment(r: f64, x: f64) -> f64 {
    let r = r.abs();
    let j0 = 2f64.powf(-1.5) * (2.0 * ln_gamma(c(0.25, r / 2.0)).re).exp();
    if x <= 0.0 {
        return j0;
    }
    if x <= r.max(2.0) && r >= 0.5 {
        let (pref, phase, s) = k_series_parts(r, x, true);
        let head = -pref * x.sqrt() * (c(0.0, phase).exp() * s).im;
        return j0 - head;
    }
    let upper = x.max(r) + 50.0;
    let panels = ((upper - x) / 2.0).ceil() as usize;
    let scale = (bessel_k_imag(r, x).abs() / x.sqrt()).max(1e-300);
    adaptive_gl(|u: f64| bessel_k_imag(r, u) / u.sqrt(), x, upper, panels, 1e-16 * scale, 12).value
}

/// Piecewise Chebyshev interpolant of `e^X J(X)`, `J` the Bessel moment
/// `∫_X^∞ u^{-1/2} K_{ir}(u) du`, for fast repeated evaluation at fixed `r`.
#[derive(Clone, Debug)]
pub struct BesselMomentTable {
    r: f64,
    lo: f64,
    hi: f64,
    width: f64,
    /// Chebyshev coefficients, `DEGREE + 1` per panel.
    coeffs: Vec<f64>,
}

impl BesselMomentTable {
    const DEGREE: usize = 18;
    const SPAN: f64 = 60.0;

    /// Builds the table for order `r` (about `SPAN * (DEGREE + 1)` direct evaluations).
    pub fn new(r: f64) -> Self {
        let r = r.abs();
        let lo = if r >= 0.5 { r.max(2.0) } else { 0.0 };
        let hi = lo + Self::SPAN;
        let width = 0.5;
        let panels = (Self::SPAN / width).round() as usize;
        let n = Self::DEGREE + 1;
        let integrand = |u: f64| bessel_k_imag(r, u) / u.sqrt();
        let nodes: Vec<f64> = (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect();
        let mut coeffs = vec![0.0; panels * n];
        // Sweep downward, accumulating J from the top of the range.
        let mut j_top = bessel_k_moment(r, hi);
        for p in (0..panels).rev() {
            let a = lo + width * p as f64;
            let b = a + width;
            let vals: Vec<f64> = nodes
                .iter()
                .map(|&u| {
                    let x = a + 0.5 * width * (u + 1.0);
                    let mut f = integrand;
                    (j_top + gl_panel(&mut f, x, b)) * x.exp()
                })
                .collect();
            let mut f = integrand;
            j_top += gl_panel(&mut f, a, b);
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += vals[j] * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
                }
                coeffs[p * n + k] = s * 2.0 / n as f64 * if k == 0 { 0.5 } else { 1.0 };
            }
        }
        BesselMomentTable { r, lo, hi, width, coeffs }
    }

    pub fn order(&self) -> f64 {
        self.r
    }

    /// `J(X)`; outside the tabulated range the direct evaluation is used.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return bessel_k_moment(self.r, x);
        }
        let n = Self::DEGREE + 1;
        let p = (((x - self.lo) / self.width) as usize).min(self.coeffs.len() / n - 1);
        let a = self.lo + self.width * p as f64;
        let u = 2.0 * (x - a) / self.width - 1.0;
        let c = &self.coeffs[p * n..(p + 1) * n];
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        (u * b1 - b2 + c[0]) * (-x).exp()
    }
}

/// Upper incomplete gamma `Γ(n, x)` for a positive integer `n`.
pub fn upper_gamma_int(n: u32, x: f64) -> f64 {
    // (n-1)! e^{-x} Σ_{k<n} x^k / k!
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    fact * (-x).exp() * sum
}

/// The offset logarithmic integral `Li(x) = ∫_2^x dt / log t`.
pub fn log_integral(x: f64) -> f64 {
    const LI2: f64 = 1.045_163_780_117_492_8;
    li(x) - LI2
}

/// `li(x)` for `x > 1` by Ramanujan's series.
fn li(x: f64) -> f64 {
    let l = x.ln();
    let mut sum = 0.0;
    let mut inner = 0.0;
    let mut fact_pow = 1.0; // (log x)^n / (n! 2^{n-1})
    for n in 1..400 {
        let nf = n as f64;
        fact_pow *= l / nf / if n == 1 { 1.0 } else { 2.0 };
        if (n - 1) % 2 == 0 {
            inner += 1.0 / nf;
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let t = sign * fact_pow * inner;
        sum += t;
        if t.abs() < 1e-17 * sum.abs() && nf > l {
            break;
        }
    }
    EULER_GAMMA + l.ln() + x.sqrt() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(c(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        // |Γ(1 + i r)|^2 = π r / sinh(π r)
        for r in [0.3, 2.0, 9.5, 30.0] {
            let g = gamma(c(1.0, r)).norm_sqr();
            let want = PI * r / (PI * r).sinh();
            assert!((g / want - 1.0).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(c(2.0, 0.0)).re - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(c(4.0, 0.0)).re - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(c(0.0, 0.0)).re + 0.5).abs() < 1e-13);
        assert!((zeta(c(-1.0, 0.0)).re + 1.0 / 12.0).abs() < 1e-13);
    }

    #[test]
    fn bessel_real_order_closed_forms() {
        // K_{1/2}(x) = sqrt(π/(2x)) e^{-x}
        for x in [0.01, 0.5, 3.0, 20.0] {
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((bessel_k_real(0.5, x) / want - 1.0).abs() < 1e-13);
            let want32 = want * (1.0 + 1.0 / x);
            assert!((bessel_k_real(1.5, x) / want32 - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn moment_table_matches_direct_evaluation() {
        for r in [1.0, 9.533_695_261_353_557] {
            let t = BesselMomentTable::new(r);
            for x in [0.3, 2.5, 7.77, 10.1, 14.2, 23.9, 41.0, 75.0] {
                let d = bessel_k_moment(r, x);
                let scale = (-x).exp() / x.sqrt();
                assert!((t.eval(x) - d).abs() <= 1e-12 * scale.max(d.abs()), "r={r} x={x}");
            }
        }
    }

    #[test]
    fn incomplete_gamma_matches_definition() {
        assert!((upper_gamma_int(1, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
        assert!((upper_gamma_int(6, 0.0) - 120.0).abs() < 1e-12);
    }
}
