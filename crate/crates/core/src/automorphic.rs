//! Automorphic forms on `PSL2(Z) \ H` and their lifts to `PSL2(R)`.
//!
//! Every form is handled as a weight-`k` function `f(z)` with
//! `f(γz) = j_γ(z)^k f(z)`, `j_γ(z) = (cz + d)/|cz + d|`:
//!
//! * holomorphic eigenforms enter through `y^{k/2} Σ a(n) e(nz)`;
//! * Maass cusp forms through `√y Σ a(n) K_{iR}(2πny) cos(2πnx)` (even) or
//!   `sin(2πnx)` (odd);
//! * the completed Eisenstein series `E*(z, s)` of weight zero through
//!   `ξ(2s) y^s + ξ(2-2s) y^{1-s} + 4√y Σ n^{s-1/2} σ_{1-2s}(n) K_{s-1/2}(2πny) cos(2πnx)`.

use crate::error::{Error, Result};
use crate::hyperbolic::{reduce_complex, RealMatrix};
use crate::special::{bessel_k_imag, bessel_k_real, xi, EULER_GAMMA};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use std::path::Path;

/// Tolerances accepted by the evaluators.
pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-3;

/// Parity of a Maass form under `x -> -x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A holomorphic Hecke eigenform, normalised by `a(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicForm {
    pub weight: u32,
    /// `coeffs[n - 1] = a(n)`.
    pub coeffs: Vec<BigInt>,
    coeffs_f64: Vec<f64>,
}

impl HolomorphicForm {
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        if weight < 12 || weight % 2 == 1 {
            return Err(Error::Domain(format!("holomorphic cusp forms need even weight >= 12, got {weight}")));
        }
        if coeffs.first() != Some(&BigInt::from(1)) {
            return Err(Error::Domain("eigenform must satisfy a(1) = 1".into()));
        }
        let coeffs_f64 = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
        Ok(HolomorphicForm { weight, coeffs, coeffs_f64 })
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs_f64[n - 1]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// A Maass cusp form with externally supplied coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MaassForm {
    pub r: f64,
    pub parity: Parity,
    /// `coeffs[n - 1] = a(n)`.
    pub coeffs: Vec<f64>,
    /// Stated absolute precision of the coefficients.
    pub precision: f64,
}

/// The completed Eisenstein series `E*(z, s)` of weight zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EisensteinSeries {
    pub s: Complex64,
}

impl EisensteinSeries {
    /// The series on the critical line, `s = 1/2 + it`.
    pub fn critical(t: f64) -> Self {
        EisensteinSeries { s: Complex64::new(0.5, t) }
    }

    /// Test-mode series at a real point `s`.
    pub fn real(s: f64) -> Self {
        EisensteinSeries { s: Complex64::new(s, 0.0) }
    }

    pub fn t(&self) -> f64 {
        self.s.im
    }

    fn check(&self) -> Result<()> {
        if self.s.im != 0.0 && self.s.re != 0.5 {
            return Err(Error::Domain("Eisenstein series supported for real s or Re s = 1/2".into()));
        }
        if self.s.im == 0.0 && (self.s.re == 0.0 || self.s.re == 1.0) {
            return Err(Error::Domain("Eisenstein series has a pole at s = 0, 1".into()));
        }
        Ok(())
    }

    /// Constant-term data `(A, B)`: at `s = 1/2 + it`, `f_∞(y) = A y^{1/2-it} + B y^{1/2+it}`.
    /// At `t = 0` the term is `A y^{1/2} + B y^{1/2} log y`.
    pub fn constant_term_data(&self) -> (Complex64, Complex64) {
        let t = self.t();
        if self.s.re == 0.5 && t == 0.0 {
            return (Complex64::new(EULER_GAMMA - (4.0 * PI).ln(), 0.0), Complex64::new(1.0, 0.0));
        }
        let two_s = self.s * 2.0;
        (xi(2.0 - two_s), xi(two_s))
    }

    /// The order `s - 1/2` of the Bessel functions in the expansion.
    fn order(&self) -> Complex64 {
        self.s - 0.5
    }

    /// `n^{s-1/2} σ_{1-2s}(n) = Σ_{d | n} (n/d²)^{s-1/2}` (real on the supported lines).
    pub fn coefficient(&self, n: u64) -> f64 {
        let nu = self.order();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                let e = d;
                let f = n / d;
                sum += (nu * ((n as f64) / (e as f64 * e as f64)).ln()).exp();
                if f != e {
                    sum += (nu * ((n as f64) / (f as f64 * f as f64)).ln()).exp();
                }
            }
            d += 1;
        }
        sum.re
    }

    fn bessel(&self, x: f64) -> f64 {
        let nu = self.order();
        if nu.im == 0.0 {
            bessel_k_real(nu.re, x)
        } else {
            bessel_k_imag(nu.im, x)
        }
    }
}

/// Constant Fourier term of `E*(·, 1/2 + it)` at height `y`.
pub fn eisenstein_constant_term(t: f64, y: f64) -> Complex64 {
    let e = EisensteinSeries::critical(t);
    let (a, b) = e.constant_term_data();
    if t == 0.0 {
        return (a + b * y.ln()) * y.sqrt();
    }
    let it = Complex64::new(0.0, t);
    let ly = y.ln();
    a * ((0.5 - it) * ly).exp() + b * ((0.5 + it) * ly).exp()
}

/// An automorphic form on the modular surface.
#[derive(Clone, Debug, PartialEq)]
pub enum AutomorphicForm {
    HolomorphicCusp(HolomorphicForm),
    MaassCusp(MaassForm),
    Eisenstein(EisensteinSeries),
    /// The constant function with the given value (weight zero).
    Constant(f64),
}

impl AutomorphicForm {
    /// Ramanujan's Δ with `M` coefficients.
    pub fn delta(m: usize) -> Self {
        AutomorphicForm::HolomorphicCusp(HolomorphicForm::new(12, delta_coefficients(m)).expect("tau(1) = 1"))
    }

    pub fn zero() -> Self {
        AutomorphicForm::Constant(0.0)
    }

    pub fn weight(&self) -> u32 {
        match self {
            AutomorphicForm::HolomorphicCusp(h) => h.weight,
            _ => 0,
        }
    }

    pub fn is_cusp_form(&self) -> bool {
        matches!(self, AutomorphicForm::HolomorphicCusp(_) | AutomorphicForm::MaassCusp(_))
            || matches!(self, AutomorphicForm::Constant(v) if *v == 0.0)
    }

    pub fn name(&self) -> String {
        match self {
            AutomorphicForm::HolomorphicCusp(h) if h.weight == 12 => "delta".into(),
            AutomorphicForm::HolomorphicCusp(h) => format!("holomorphic-k{}", h.weight),
            AutomorphicForm::MaassCusp(m) => format!("maass-R{:.6}", m.r),
            AutomorphicForm::Eisenstein(e) => format!("eisenstein-s{}+{}i", e.s.re, e.s.im),
            AutomorphicForm::Constant(v) => format!("constant-{v}"),
        }
    }

    /// Number of Fourier terms needed so that the tail beyond them is below
    /// `tol` at height `y`.
    pub fn terms_needed(&self, y: f64, tol: f64) -> usize {
        let q = (-2.0 * PI * y).exp();
        match self {
            AutomorphicForm::HolomorphicCusp(h) => {
                // |a(n)| <= d(n) n^{(k-1)/2} <= 2 n^{k/2}.
                let half_k = h.weight as f64 / 2.0;
                let mut n = 1usize;
                loop {
                    let np = (n + 1) as f64;
                    let term = 2.0 * (y * np).powf(half_k) * (-2.0 * PI * np * y).exp();
                    // The remaining terms decay at least geometrically from here on.
                    let ratio = ((np + 1.0) / np).powf(half_k) * q;
                    if ratio < 1.0 && term / (1.0 - ratio) < tol {
                        return n;
                    }
                    n += 1;
                }
            }
            AutomorphicForm::MaassCusp(_) | AutomorphicForm::Eisenstein(_) => {
                // |a(n)| <= 2 sqrt(n) with a safety factor 10, |K| <= K_0, so each
                // term is below C e^{-2πny} with C = 10 (Maass) or 4 (Eisenstein).
                let (cst, extra) = match self {
                    AutomorphicForm::Eisenstein(e) => {
                        let nu = e.order().re.abs();
                        (4.0, nu)
                    }
                    _ => (10.0, 0.0),
                };
                let mut n = 1usize;
                loop {
                    let np = (n + 1) as f64;
                    let x = 2.0 * PI * np * y;
                    let term = cst * np.powf(extra) * (1.0 + extra * extra / x) * (-x).exp();
                    if term / (1.0 - q) < tol {
                        return n;
                    }
                    n += 1;
                }
            }
            AutomorphicForm::Constant(_) => 0,
        }
    }

    fn available_terms(&self) -> usize {
        match self {
            AutomorphicForm::HolomorphicCusp(h) => h.len(),
            AutomorphicForm::MaassCusp(m) => m.coeffs.len(),
            _ => usize::MAX,
        }
    }

    /// The Fourier expansion at `z` with the first `m` terms.
    pub fn fourier_sum(&self, z: Complex64, m: usize) -> Complex64 {
        let (x, y) = (z.re, z.im);
        match self {
            AutomorphicForm::HolomorphicCusp(h) => {
                let q = Complex64::from_polar((-2.0 * PI * y).exp(), 2.0 * PI * x);
                let mut qn = q;
                let mut s = Complex64::new(0.0, 0.0);
                for n in 1..=m {
                    s += qn * h.coeff(n);
                    qn *= q;
                }
                s * y.powi(h.weight as i32 / 2)
            }
            AutomorphicForm::MaassCusp(f) => {
                let mut s = 0.0;
                for n in 1..=m {
                    let nf = n as f64;
                    let arg = 2.0 * PI * nf * x;
                    let trig = match f.parity {
                        Parity::Even => arg.cos(),
                        Parity::Odd => arg.sin(),
                    };
                    s += f.coeffs[n - 1] * bessel_k_imag(f.r, 2.0 * PI * nf * y) * trig;
                }
                Complex64::new(s * y.sqrt(), 0.0)
            }
            AutomorphicForm::Eisenstein(e) => {
                let mut s = 0.0;
                for n in 1..=m {
                    let nf = n as f64;
                    s += e.coefficient(n as u64) * e.bessel(2.0 * PI * nf * y) * (2.0 * PI * nf * x).cos();
                }
                let constant = if e.s.im == 0.0 && e.s.re != 0.5 {
                    let (a, b) = e.constant_term_data();
                    b * y.powf(e.s.re) + a * y.powf(1.0 - e.s.re)
                } else {
                    eisenstein_constant_term(e.t(), y)
                };
                constant + 4.0 * y.sqrt() * s
            }
            AutomorphicForm::Constant(v) => Complex64::new(*v, 0.0),
        }
    }

    /// Value at a point already in the fundamental domain (or any point with
    /// enough coefficients).
    pub fn eval_direct(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        if let AutomorphicForm::Eisenstein(e) = self {
            e.check()?;
        }
        let m = self.terms_needed(z.im, tol);
        let have = self.available_terms();
        if m > have {
            return Err(Error::InsufficientCoefficients { needed: m, have });
        }
        Ok(self.fourier_sum(z, m))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::Domain(format!("tolerance {tol} outside [{MIN_TOL}, {MAX_TOL}]")));
    }
    Ok(())
}

/// Value of `f` at `z`. With `reduce` set, `z` is first moved into the
/// fundamental domain and the weight-`k` cocycle is applied.
pub fn eval_form(f: &AutomorphicForm, z: Complex64, tol: f64, reduce: bool) -> Result<Complex64> {
    check_tol(tol)?;
    if !reduce {
        if z.im < 0.5 {
            return Err(Error::Domain("points below height 1/2 must be reduced first".into()));
        }
        return f.eval_direct(z, tol);
    }
    let (w, sigma) = reduce_complex(z)?;
    let v = f.eval_direct(w, tol)?;
    let k = f.weight() as i32;
    if k == 0 {
        return Ok(v);
    }
    let j = sigma.to_real().unit_cocycle(z);
    Ok(v * j.powi(-k))
}

/// The lift `F(g) = j_g(i)^{-k} f(g i)`.
pub fn eval_lift(f: &AutomorphicForm, g: &RealMatrix, tol: f64) -> Result<Complex64> {
    check_tol(tol)?;
    let i = Complex64::new(0.0, 1.0);
    let z = g.apply(i);
    let (w, sigma) = reduce_complex(z)?;
    let v = f.eval_direct(w, tol)?;
    let k = f.weight() as i32;
    if k == 0 {
        return Ok(v);
    }
    let j = sigma.to_real().unit_cocycle(z) * g.unit_cocycle(i);
    Ok(v * j.powi(-k))
}

/// Coefficients `τ(1), ..., τ(m)` of `Δ = q Π (1 - q^n)^24`.
///
/// Uses the power recurrence for `E^24`, `E = Π(1 - q^n)` being the sparse
/// pentagonal series: `n p_n = Σ_k (25k - n) e_k p_{n-k}`.
pub fn delta_coefficients(m: usize) -> Vec<BigInt> {
    if m == 0 {
        return Vec::new();
    }
    // Pentagonal exponents with signs.
    let mut pent: Vec<(usize, i128)> = Vec::new();
    let mut j = 1i64;
    loop {
        let k1 = (j * (3 * j - 1) / 2) as usize;
        let k2 = (j * (3 * j + 1) / 2) as usize;
        if k1 >= m {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        pent.push((k1, sign));
        if k2 < m {
            pent.push((k2, sign));
        }
        j += 1;
    }
    pent.sort_unstable();
    match delta_i128(m, &pent) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => delta_bigint(m, &pent),
    }
}

fn delta_i128(m: usize, pent: &[(usize, i128)]) -> Option<Vec<i128>> {
    let mut p = vec![0i128; m];
    p[0] = 1;
    for n in 1..m {
        let mut acc: i128 = 0;
        for &(k, e) in pent {
            if k > n {
                break;
            }
            let w = (25 * k as i128 - n as i128).checked_mul(e)?;
            acc = acc.checked_add(w.checked_mul(p[n - k])?)?;
        }
        p[n] = acc / n as i128;
    }
    Some(p)
}

fn delta_bigint(m: usize, pent: &[(usize, i128)]) -> Vec<BigInt> {
    let mut p: Vec<BigInt> = vec![BigInt::from(0); m];
    p[0] = BigInt::from(1);
    for n in 1..m {
        let mut acc = BigInt::from(0);
        for &(k, e) in pent {
            if k > n {
                break;
            }
            acc += BigInt::from((25 * k as i128 - n as i128) * e) * &p[n - k];
        }
        p[n] = acc / BigInt::from(n);
    }
    p
}

/// Parses a Maass coefficient file (see the README for the format).
pub fn parse_maass_coefficients(text: &str) -> Result<AutomorphicForm> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some("MAASS v1") {
        return Err(Error::MalformedFile("first line must be `MAASS v1`".into()));
    }
    let header = lines.next().ok_or_else(|| Error::MalformedFile("missing parameter line".into()))?;
    let (mut r, mut parity, mut m, mut prec) = (None, None, None, None);
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::MalformedFile(format!("bad header field `{field}`")))?;
        let bad = |_| Error::MalformedFile(format!("bad value in `{field}`"));
        match key {
            "R" => r = Some(value.parse::<f64>().map_err(bad)?),
            "parity" => {
                parity = Some(match value {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    _ => return Err(Error::MalformedFile(format!("unknown parity `{value}`"))),
                })
            }
            "M" => m = Some(value.parse::<usize>().map_err(|_| Error::MalformedFile(format!("bad M `{value}`")))?),
            "prec" => prec = Some(value.parse::<f64>().map_err(bad)?),
            _ => return Err(Error::MalformedFile(format!("unknown header key `{key}`"))),
        }
    }
    let (r, parity, m, prec) = match (r, parity, m, prec) {
        (Some(r), Some(p), Some(m), Some(e)) => (r, p, m, e),
        _ => return Err(Error::MalformedFile("header needs R, parity, M and prec".into())),
    };
    if !(r > 0.0) {
        return Err(Error::MalformedFile("R must be positive".into()));
    }
    let mut coeffs = vec![f64::NAN; m];
    for line in lines {
        let mut it = line.split_whitespace();
        let (n, v) = match (it.next(), it.next(), it.next()) {
            (Some(n), Some(v), None) => (n, v),
            _ => return Err(Error::MalformedFile(format!("bad coefficient line `{line}`"))),
        };
        let n: usize = n.parse().map_err(|_| Error::MalformedFile(format!("bad index `{n}`")))?;
        let v: f64 = v.parse().map_err(|_| Error::MalformedFile(format!("bad value `{v}`")))?;
        if n == 0 || n > m {
            return Err(Error::MalformedFile(format!("index {n} outside 1..={m}")));
        }
        coeffs[n - 1] = v;
    }
    if let Some(missing) = coeffs.iter().position(|v| v.is_nan()) {
        return Err(Error::MalformedFile(format!("coefficient a({}) missing", missing + 1)));
    }
    if m < 6 {
        return Err(Error::SelfCheck(format!("need at least 6 coefficients for the Hecke check, have {m}")));
    }
    let tol = 10.0 * prec;
    if (coeffs[0] - 1.0).abs() > tol {
        return Err(Error::SelfCheck(format!("a(1) = {} is not 1", coeffs[0])));
    }
    let resid = (coeffs[1] * coeffs[2] - coeffs[5]).abs();
    if resid > tol {
        return Err(Error::SelfCheck(format!("|a(2)a(3) - a(6)| = {resid:e} exceeds {tol:e}")));
    }
    Ok(AutomorphicForm::MaassCusp(MaassForm { r, parity, coeffs, precision: prec }))
}

/// Reads and validates a Maass coefficient file.
pub fn ingest_maass_coefficients(path: impl AsRef<Path>) -> Result<AutomorphicForm> {
    let text = std::fs::read_to_string(path)?;
    parse_maass_coefficients(&text)
}

/// The bundled odd Maass form with `R ≈ 9.5337`.
pub fn bundled_maass_form() -> AutomorphicForm {
    parse_maass_coefficients(BUNDLED_MAASS).expect("bundled file is valid")
}

/// Contents of the bundled coefficient file.
pub const BUNDLED_MAASS: &str = include_str!("../data/maass_odd_9.5337.txt");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        let t = delta_coefficients(12);
        let want = [1i64, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944];
        for (a, b) in t.iter().zip(want) {
            assert_eq!(*a, BigInt::from(b));
        }
        assert_eq!(delta_coefficients(1), vec![BigInt::from(1)]);
    }

    #[test]
    fn bigint_path_agrees() {
        let m = 200;
        let a = delta_coefficients(m);
        let pent: Vec<(usize, i128)> = {
            let mut v = Vec::new();
            for j in 1..20i64 {
                let s = if j % 2 == 0 { 1 } else { -1 };
                for k in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
                    if (k as usize) < m {
                        v.push((k as usize, s));
                    }
                }
            }
            v.sort_unstable();
            v
        };
        assert_eq!(a, delta_bigint(m, &pent));
    }

    #[test]
    fn maass_file_rejections() {
        assert!(matches!(parse_maass_coefficients(""), Err(Error::MalformedFile(_))));
        let bad = "MAASS v1\nR=9.5 parity=odd M=6 prec=1e-10\n1 1\n2 -1\n3 -0.5\n4 0\n5 0\n6 0.9\n";
        assert!(matches!(parse_maass_coefficients(bad), Err(Error::SelfCheck(_))));
        let short = "MAASS v1\nR=9.5 parity=odd M=3 prec=1e-10\n1 1\n2 -1\n3 -0.5\n";
        assert!(parse_maass_coefficients(short).is_err());
    }

    #[test]
    fn bundled_form_loads() {
        match bundled_maass_form() {
            AutomorphicForm::MaassCusp(m) => {
                assert!((m.r - 9.5337).abs() < 1e-4);
                assert_eq!(m.parity, Parity::Odd);
                assert_eq!(m.coeffs.len(), 100);
            }
            _ => panic!("wrong variant"),
        }
    }
}
