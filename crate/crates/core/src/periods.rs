//! Geodesic periods `∫_0^ℓ F(g_0 a_t) dt` and vertical periods
//! `∫_0^∞ f(a/c + iy) dy/y`, and the residual between the two.

use crate::automorphic::{eval_lift, AutomorphicForm, Parity};
use crate::enumeration::{mod_inverse, DoubleCoset, GeodesicClass};
use crate::error::{Error, Result};
use crate::hyperbolic::{GeodesicAxis, RealMatrix};
use crate::quadrature::{adaptive_gl, adaptive_simpson};
use crate::special::{upper_gamma_int, BesselMomentTable};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use num_complex::Complex64;
use std::f64::consts::PI;

/// How a period was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    GaussLegendre,
    Simpson,
    FourierSeries,
    Quadrature,
}

/// A computed period with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodValue {
    pub value: Complex64,
    pub estimated_error: f64,
    pub method: Method,
}

/// Maximal bisection depth for the geodesic quadrature.
const MAX_DEPTH: u32 = 14;

fn lift_along(f: &AutomorphicForm, frame: &RealMatrix, t: f64, tol: f64) -> Complex64 {
    let g = frame.mul(&RealMatrix::geodesic_flow(t));
    eval_lift(f, &g, tol).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// Geodesic period over the window `[t0, t0 + ℓ]` of the orbit starting at
/// the apex of the axis, by the chosen quadrature.
pub fn geodesic_period_window(
    f: &AutomorphicForm,
    axis: &GeodesicAxis,
    length: f64,
    t0: f64,
    tol: f64,
    method: Method,
) -> Result<PeriodValue> {
    let frame = axis.frame();
    // Pointwise evaluation accuracy well inside the integral budget.
    let point_tol = (0.1 * tol / length).clamp(1e-14, 1e-3);
    // Probe once so that evaluation errors surface as errors, not NaNs.
    eval_lift(f, &frame, point_tol)?;
    let integrand = |t: f64| lift_along(f, &frame, t, point_tol);
    let r = match method {
        Method::GaussLegendre => {
            let panels = (length.ceil() as usize).max(2);
            adaptive_gl(integrand, t0, t0 + length, panels, tol, MAX_DEPTH)
        }
        Method::Simpson => adaptive_simpson(integrand, t0, t0 + length, tol, 40),
        _ => return Err(Error::Domain("geodesic periods use GL or Simpson quadrature".into())),
    };
    if !r.converged || !r.value.re.is_finite() || !r.value.im.is_finite() {
        return Err(Error::Quadrature(format!("geodesic period did not reach {tol:e} (estimate {:e})", r.error)));
    }
    Ok(PeriodValue { value: r.value, estimated_error: r.error, method })
}

/// The geodesic period `P_f(C)` of a class, using its canonical
/// representative and the window centred on the apex.
pub fn geodesic_period(f: &AutomorphicForm, class: &GeodesicClass, tol: f64) -> Result<PeriodValue> {
    if let AutomorphicForm::Constant(v) = f {
        return Ok(PeriodValue { value: Complex64::new(v * class.length, 0.0), estimated_error: 0.0, method: Method::FourierSeries });
    }
    geodesic_period_window(f, &class.axis, class.length, -0.5 * class.length, tol, Method::GaussLegendre)
}

/// Number of `n` needed for `Σ_n bound(n) < tol` when the bound decays in
/// `x_n = 2πn/c` like `e^{-x}` times a slowly varying factor.
fn series_length(c: f64, tol: f64, bound: impl Fn(f64) -> f64) -> usize {
    let step = 2.0 * PI / c;
    let geometric = 1.0 / (1.0 - (-step).exp());
    let mut n = 1usize;
    loop {
        let x = step * n as f64;
        if x > 1.0 && bound(x) * geometric < tol {
            return n;
        }
        n += 1;
    }
}

/// Shared Bessel-moment table for order `r`.
pub fn moment_table(r: f64) -> Arc<BesselMomentTable> {
    static TABLES: OnceLock<Mutex<HashMap<u64, Arc<BesselMomentTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let key = r.abs().to_bits();
    if let Some(t) = tables.lock().expect("table cache poisoned").get(&key) {
        return t.clone();
    }
    let t = Arc::new(BesselMomentTable::new(r));
    tables.lock().expect("table cache poisoned").entry(key).or_insert(t).clone()
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// `x mod 1` for the fraction `p/q`, computed exactly before dividing.
fn frac(p: i128, q: i128) -> f64 {
    p.rem_euclid(q) as f64 / q as f64
}

/// Vertical period `L_f(a/c)` with the integral split at height `h`.
pub fn vertical_period_split(f: &AutomorphicForm, a: i64, c: i64, h: f64, tol: f64) -> Result<PeriodValue> {
    if c <= 0 {
        return Err(Error::Domain("vertical periods need c > 0".into()));
    }
    let x = DoubleCoset::new(c, a)?;
    let (a, c) = (x.a_mod_c as i128, c as i128);
    let d = mod_inverse(a as i64, c as i64) as i128;
    let cf = c as f64;
    // The piece below h is mapped by γ^{-1} to the line over -d/c at height >= hh.
    let hh = 1.0 / (cf * cf * h);
    let hmin = h.min(hh);
    match f {
        AutomorphicForm::Constant(v) if *v == 0.0 => {
            Ok(PeriodValue { value: Complex64::new(0.0, 0.0), estimated_error: 0.0, method: Method::FourierSeries })
        }
        AutomorphicForm::Constant(_) => Err(Error::Domain("vertical period of a non-zero constant diverges".into())),
        AutomorphicForm::HolomorphicCusp(form) => {
            let k = form.weight;
            let half = k / 2;
            let sign = if half % 2 == 0 { 1.0 } else { -1.0 };
            let norm = (2.0 * PI).powi(-(half as i32));
            // |a(n)| <= 2 n^{k/2}; each of the two pieces is then below
            // 2 (2π)^{-k/2} Γ(k/2, 2πn h).
            let m = series_length(1.0 / hmin, tol, |x| 4.0 * norm * upper_gamma_int(half, x));
            if m > form.len() {
                return Err(Error::InsufficientCoefficients { needed: m, have: form.len() });
            }
            let mut s = Complex64::new(0.0, 0.0);
            for n in 1..=m {
                let nf = n as f64;
                let w = form.coeff(n) * (2.0 * PI * nf).powi(-(half as i32));
                let up = e(frac(n as i128 * a, c)) * upper_gamma_int(half, 2.0 * PI * nf * h);
                let lo = e(frac(-(n as i128) * d, c)) * (sign * upper_gamma_int(half, 2.0 * PI * nf * hh));
                s += (up + lo) * w;
            }
            Ok(PeriodValue { value: s, estimated_error: tol, method: Method::FourierSeries })
        }
        AutomorphicForm::MaassCusp(form) => {
            // Heuristic bound |a(n)| <= 20 sqrt(n), J(X) <= sqrt(π/2) e^{-X}/X.
            let m = series_length(1.0 / hmin, tol, |x| 20.0 * (-x).exp() / x);
            if m > form.coeffs.len() {
                return Err(Error::InsufficientCoefficients { needed: m, have: form.coeffs.len() });
            }
            let trig = |p: f64| match form.parity {
                Parity::Even => (2.0 * PI * p).cos(),
                Parity::Odd => (2.0 * PI * p).sin(),
            };
            let table = moment_table(form.r);
            let mut s = 0.0;
            for n in 1..=m {
                let nf = n as f64;
                let w = form.coeffs[n - 1] / (2.0 * PI * nf).sqrt();
                let up = trig(frac(n as i128 * a, c)) * table.eval(2.0 * PI * nf * h);
                let lo = trig(frac(-(n as i128) * d, c)) * table.eval(2.0 * PI * nf * hh);
                s += w * (up + lo);
            }
            Ok(PeriodValue { value: Complex64::new(s, 0.0), estimated_error: tol, method: Method::FourierSeries })
        }
        AutomorphicForm::Eisenstein(es) => {
            let t = es.t();
            if es.s.re != 0.5 || t <= 0.0 {
                return Err(Error::Domain("vertical periods of Eisenstein series need s = 1/2 + it, t > 0".into()));
            }
            let m = series_length(1.0 / hmin, tol, |x| 8.0 * (-x).exp() / x);
            let table = moment_table(t);
            let mut s = 0.0;
            for n in 1..=m {
                let nf = n as f64;
                let w = 4.0 * es.coefficient(n as u64) / (2.0 * PI * nf).sqrt();
                let up = (2.0 * PI * frac(n as i128 * a, c)).cos() * table.eval(2.0 * PI * nf * h);
                let lo = (2.0 * PI * frac(-(n as i128) * d, c)).cos() * table.eval(2.0 * PI * nf * hh);
                s += w * (up + lo);
            }
            let (ca, cb) = es.constant_term_data();
            let it = Complex64::new(0.0, t);
            let pw = |y: f64, ex: Complex64| (ex * y.ln()).exp();
            let ea = 0.5 - it;
            let eb = 0.5 + it;
            let constant = ca * (pw(h, ea) + pw(hh, ea)) / ea + cb * (pw(h, eb) + pw(hh, eb)) / eb;
            Ok(PeriodValue { value: Complex64::new(s, 0.0) - constant, estimated_error: tol, method: Method::FourierSeries })
        }
    }
}

/// Vertical period `L_f(a/c)`, split at height `1/c`. For Eisenstein series
/// this is the regularised value of `∫_0^∞ (f(a/c + iy) - f_∞(y)) dy/y`.
pub fn vertical_period(f: &AutomorphicForm, a: i64, c: i64, tol: f64) -> Result<PeriodValue> {
    vertical_period_split(f, a, c, 1.0 / c as f64, tol)
}

/// Vertical period at the cusp of a double coset.
pub fn vertical_period_coset(f: &AutomorphicForm, x: &DoubleCoset, tol: f64) -> Result<PeriodValue> {
    vertical_period(f, x.a_mod_c, x.c, tol)
}

/// Direct quadrature of `∫_0^∞ f(a/c + iy) dy/y` for cusp forms, used as
/// an independent check of the series.
pub fn vertical_period_quadrature(f: &AutomorphicForm, a: i64, c: i64, tol: f64) -> Result<PeriodValue> {
    let x0 = a as f64 / c as f64;
    // Substitute y = e^u; the integrand decays doubly exponentially at both ends.
    let point_tol = (0.01 * tol).max(1e-14);
    let integrand = |u: f64| {
        let z = Complex64::new(x0, u.exp());
        crate::automorphic::eval_form(f, z, point_tol, true).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let lo = -(c as f64).ln() * 2.0 - 6.0;
    let hi = 6.0;
    let r = adaptive_gl(integrand, lo, hi, 48, tol, 16);
    if !r.converged {
        return Err(Error::Quadrature("vertical quadrature did not converge".into()));
    }
    Ok(PeriodValue { value: r.value, estimated_error: r.error, method: Method::Quadrature })
}

/// Explicit Eisenstein terms `A c^{-1/2-it}(1+(-1)^{k/2})/(1/2+it) + B c^{-1/2+it}(1+(-1)^{k/2})/(1/2-it)`
/// at weight zero.
pub fn eisenstein_bridge_terms(a_coef: Complex64, b_coef: Complex64, t: f64, c: f64) -> Complex64 {
    let it = Complex64::new(0.0, t);
    let lc = c.ln();
    a_coef * ((-0.5 - it) * lc).exp() * 2.0 / (0.5 + it) + b_coef * ((-0.5 + it) * lc).exp() * 2.0 / (0.5 - it)
}

/// Sign of the vertical period in the bridge at weight `k`: `(-1)^{k/2}`.
///
/// With the lift `F(g) = j_g(i)^{-k} f(g i)` and the positive arc-length
/// measure on the geodesic, the weight-0 main term is `+L_f`; the
/// alternative sign `(-1)^{k/2+1}` is kept in [`BridgeResidual::residual_alt`].
pub fn bridge_sign(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One evaluated edge of the bridge between geodesic and vertical periods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BridgeResidual {
    pub geodesic: Complex64,
    pub vertical: Complex64,
    /// Explicit Eisenstein terms (zero for cusp forms).
    pub explicit: Complex64,
    /// `geodesic - [(-1)^{k/2} vertical + explicit]`.
    pub residual: Complex64,
    /// `geodesic - [(-1)^{k/2+1} vertical + explicit]`.
    pub residual_alt: Complex64,
    pub c: i64,
    pub trace: i64,
    /// `c / |tr|`.
    pub ratio: f64,
}

impl BridgeResidual {
    /// The residual with the explicit Eisenstein terms omitted.
    pub fn residual_without_explicit(&self) -> Complex64 {
        self.residual + self.explicit
    }
}

/// Residual of the geodesic period of the class of the edge's matrix
/// against the vertical period at its cusp `a/c`.
pub fn bridge_residual(f: &AutomorphicForm, x: &DoubleCoset, signed_trace: i64, tol: f64) -> Result<BridgeResidual> {
    let g = x.realize(signed_trace)?;
    let class = crate::enumeration::canonical_class(&g)?;
    let p = geodesic_period(f, &class, tol)?.value;
    let l = vertical_period_coset(f, x, tol)?.value;
    let sign = bridge_sign(f.weight());
    let explicit = match f {
        AutomorphicForm::Eisenstein(es) => {
            let (a, b) = es.constant_term_data();
            eisenstein_bridge_terms(a, b, es.t(), x.c as f64)
        }
        _ => Complex64::new(0.0, 0.0),
    };
    Ok(BridgeResidual {
        geodesic: p,
        vertical: l,
        explicit,
        residual: p - (l * sign + explicit),
        residual_alt: p - (l * -sign + explicit),
        c: x.c,
        trace: signed_trace,
        ratio: x.c as f64 / signed_trace.unsigned_abs() as f64,
    })
}

/// Least-squares slope of `log(|r| - K)` against `log(ratio)`, with the
/// additive constant `K` profiled out over `[0, min |r|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfiledFit {
    pub slope: f64,
    pub intercept: f64,
    pub constant: f64,
    /// Mean squared residual of the log–log fit at the chosen constant.
    pub mse: f64,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mse = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n;
    (slope, intercept, mse)
}

/// Profiled log–log regression of magnitudes against ratios.
pub fn profiled_loglog_fit(ratios: &[f64], magnitudes: &[f64]) -> Result<ProfiledFit> {
    if ratios.len() != magnitudes.len() || ratios.len() < 3 {
        return Err(Error::Empty("regression needs at least three samples"));
    }
    if ratios.iter().chain(magnitudes).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("regression needs positive finite data".into()));
    }
    let lx: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let floor = magnitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut best: Option<ProfiledFit> = None;
    for step in 0..100 {
        let constant = floor * step as f64 / 100.0;
        let ly: Vec<f64> = magnitudes.iter().map(|m| (m - constant).ln()).collect();
        let (slope, intercept, mse) = linear_fit(&lx, &ly);
        if best.map_or(true, |b| mse < b.mse) {
            best = Some(ProfiledFit { slope, intercept, constant, mse });
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Envelope test for the bridge: `K` is fitted on the even-indexed samples as
/// twice the largest `|r| / g(ratio)`, then checked on the odd-indexed ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeFit {
    pub k: f64,
    /// Largest `|r| / (K g(ratio))` over the held-out samples.
    pub worst_holdout: f64,
}

pub fn envelope_fit(ratios: &[f64], magnitudes: &[f64], g: impl Fn(f64) -> f64) -> EnvelopeFit {
    let scaled: Vec<f64> = ratios.iter().zip(magnitudes).map(|(&r, &m)| m / g(r)).collect();
    let k = 2.0 * scaled.iter().step_by(2).cloned().fold(0.0, f64::max);
    let worst = scaled.iter().skip(1).step_by(2).cloned().fold(0.0, f64::max) / k;
    EnvelopeFit { k, worst_holdout: worst }
}

/// Cusp-form envelope `1 + ratio^{0.51}`.
pub fn cusp_envelope(ratio: f64) -> f64 {
    1.0 + ratio.powf(0.51)
}

/// Eisenstein envelope `ratio^{0.51} + ratio^{-0.51}`.
pub fn eisenstein_envelope(ratio: f64) -> f64 {
    ratio.powf(0.51) + ratio.powf(-0.51)
}

/// `n` edges `(coset, signed trace)` drawn uniformly with replacement from
/// an edge list, deterministically from `seed`.
pub fn sample_edges(g: &crate::enumeration::EdgeList, n: usize, seed: u64) -> Vec<(DoubleCoset, i64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if g.edges.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|_| {
            let e = &g.edges[rng.gen_range(0..g.edges.len())];
            (g.cosets[e.x as usize], g.signed_trace(e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::canonical_class;
    use crate::hyperbolic::GroupElement;

    #[test]
    fn constant_form_gives_length() {
        let cls = canonical_class(&GroupElement::new(2, 1, 1, 1).unwrap()).unwrap();
        let p = geodesic_period(&AutomorphicForm::Constant(1.0), &cls, 1e-10).unwrap();
        assert!((p.value.re - cls.length).abs() < 1e-10);
        // Through the quadrature path as well.
        let q = geodesic_period_window(&AutomorphicForm::Constant(1.0), &cls.axis, cls.length, 0.0, 1e-10, Method::GaussLegendre)
            .unwrap();
        assert!((q.value.re - cls.length).abs() < 1e-10);
    }

    #[test]
    fn zero_form_vertical_is_zero() {
        let v = vertical_period(&AutomorphicForm::zero(), 1, 3, 1e-10).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }
}
