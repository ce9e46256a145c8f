//! Statistics over the modular graph: Kolmogorov–Smirnov comparisons of
//! vertical and graph-weighted geodesic periods with the Gaussian law,
//! small-period census, degree against strip sojourn length, and the strip
//! mass of collections of closed geodesics.

use crate::automorphic::AutomorphicForm;
use crate::enumeration::{enumerate_cosets, enumerate_edges, restrict_by_trace, DoubleCoset, EdgeList, GeodesicClass};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, FiniteMeasure};
use crate::hyperbolic::strip_intersection_length;
use crate::periods::{geodesic_period, vertical_period_coset};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;
use std::f64::consts::PI;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov–Smirnov distance between the weighted empirical law of
/// `values` and the standard normal law. Weights are normalised internally.
pub fn ks_normal_weighted(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::Empty("KS distance needs matching non-empty samples"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidMeasure("KS weights have no mass".into()));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cum = 0.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let x = values[idx[i]];
        let phi = normal_cdf(x);
        d = d.max((cum - phi).abs());
        // Absorb ties.
        while i < idx.len() && values[idx[i]] == x {
            cum += weights[idx[i]] / total;
            i += 1;
        }
        d = d.max((cum - phi).abs());
    }
    Ok(d.min(1.0))
}

/// Unweighted Kolmogorov–Smirnov distance to the standard normal law.
pub fn ks_normal(values: &[f64]) -> Result<f64> {
    ks_normal_weighted(values, &vec![1.0; values.len()])
}

/// Histogram of standardized values on `[-4, 4]`; values outside are
/// counted in the extreme bins so the masses sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn new(values: &[f64], weights: &[f64], bins: usize) -> Self {
        let (lo, hi) = (-4.0, 4.0);
        let mut masses = vec![0.0; bins];
        let total: f64 = weights.iter().sum();
        for (v, w) in values.iter().zip(weights) {
            let b = (((v - lo) / (hi - lo)) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
            masses[b] += w / total;
        }
        Histogram { lo, hi, masses }
    }
}

/// Empirical law of a family of complex periods.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionReport {
    pub samples: usize,
    pub mean: Complex64,
    pub variance_re: f64,
    pub variance_im: f64,
    /// `Ĉ_f`: the standard deviation of the periods divided by `sqrt(log N)`.
    pub c_hat: f64,
    /// Exponent of `log log N` in the normalisation (0 for cusp forms).
    pub delta_f: f64,
    /// KS distance of the real part standardised by its own mean and deviation.
    pub ks_real: f64,
    /// Same for the imaginary part (0 when the periods are real).
    pub ks_imag: f64,
    /// KS distance of `Re P / (Ĉ sqrt(log N) / sqrt 2)`, the complex-Gaussian normalisation.
    pub ks_real_pooled: f64,
    pub histogram_real: Histogram,
    /// 5% and 95% bootstrap quantiles of `ks_real`.
    pub bootstrap_band: (f64, f64),
    /// All periods vanish (no law to compare).
    pub degenerate: bool,
}

fn weighted_moments(values: &[f64], w: &[f64]) -> (f64, f64) {
    let total: f64 = w.iter().sum();
    let mean = values.iter().zip(w).map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values.iter().zip(w).map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total;
    (mean, var)
}

fn standardized_ks(values: &[f64], w: &[f64]) -> Result<f64> {
    let (m, v) = weighted_moments(values, w);
    if v <= 0.0 {
        return Ok(1.0);
    }
    let s = v.sqrt();
    let z: Vec<f64> = values.iter().map(|x| (x - m) / s).collect();
    ks_normal_weighted(&z, w)
}

/// Number of bootstrap resamples behind the reported band.
pub const BOOTSTRAP_RESAMPLES: usize = 100;

/// Builds the report for periods with optional weights, at scale `n`.
pub fn distribution_report(periods: &[Complex64], weights: Option<&[f64]>, n: i64, delta_f: f64, seed: u64) -> Result<DistributionReport> {
    if periods.is_empty() {
        return Err(Error::Empty("distribution report needs periods"));
    }
    let w: Vec<f64> = weights.map(|w| w.to_vec()).unwrap_or_else(|| vec![1.0; periods.len()]);
    let total: f64 = w.iter().sum();
    let re: Vec<f64> = periods.iter().map(|p| p.re).collect();
    let im: Vec<f64> = periods.iter().map(|p| p.im).collect();
    let (mre, vre) = weighted_moments(&re, &w);
    let (mim, vim) = weighted_moments(&im, &w);
    let degenerate = periods.iter().all(|p| p.norm() == 0.0);
    let log_n = (n as f64).ln();
    let scale = log_n.sqrt() * log_n.ln().max(1.0).powf(delta_f);
    let second: f64 = periods.iter().zip(&w).map(|(p, w)| w * p.norm_sqr()).sum::<f64>() / total;
    let c_hat = second.sqrt() / scale;
    if degenerate {
        return Ok(DistributionReport {
            samples: periods.len(),
            mean: Complex64::new(0.0, 0.0),
            variance_re: 0.0,
            variance_im: 0.0,
            c_hat: 0.0,
            delta_f,
            ks_real: 1.0,
            ks_imag: 1.0,
            ks_real_pooled: 1.0,
            histogram_real: Histogram::new(&re, &w, 32),
            bootstrap_band: (1.0, 1.0),
            degenerate,
        });
    }
    let ks_real = standardized_ks(&re, &w)?;
    let ks_imag = if vim > 0.0 { standardized_ks(&im, &w)? } else { 0.0 };
    // Complex Gaussian with E|Z|^2 = 1 has real part of variance 1/2.
    let pooled: Vec<f64> = re.iter().map(|x| x / (c_hat * scale / std::f64::consts::SQRT_2)).collect();
    let ks_real_pooled = if vim > 0.0 { ks_normal_weighted(&pooled, &w)? } else { standardized_ks(&re, &w)? };
    let z: Vec<f64> = re.iter().map(|x| (x - mre) / vre.sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let idx: Vec<usize> = (0..re.len()).map(|_| rng.gen_range(0..re.len())).collect();
            let v: Vec<f64> = idx.iter().map(|&i| re[i]).collect();
            let ww: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
            standardized_ks(&v, &ww).unwrap_or(1.0)
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let q = |p: f64| boots[((p * (boots.len() - 1) as f64).round()) as usize];
    Ok(DistributionReport {
        samples: periods.len(),
        mean: Complex64::new(mre, mim),
        variance_re: vre,
        variance_im: vim,
        c_hat,
        delta_f,
        ks_real,
        ks_imag,
        ks_real_pooled,
        histogram_real: Histogram::new(&z, &w, 32),
        bootstrap_band: (q(0.05), q(0.95)),
        degenerate,
    })
}

/// `δ_f`: 0 for cusp forms, 3/2 for Eisenstein series.
pub fn delta_exponent(f: &AutomorphicForm) -> f64 {
    if matches!(f, AutomorphicForm::Eisenstein(_)) {
        1.5
    } else {
        0.0
    }
}

/// Up to `samples` cosets of `X_N`, uniformly without replacement (all of
/// them when `samples >= |X_N|`), in enumeration order.
pub fn sample_cosets(n: i64, samples: usize, seed: u64) -> Vec<DoubleCoset> {
    let all = enumerate_cosets(n);
    if samples >= all.len() {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = rand::seq::index::sample(&mut rng, all.len(), samples).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| all[i]).collect()
}

/// Empirical law of vertical periods `L_f(x)` over (a sample of) `X_N`.
pub fn vertical_clt_report(f: &AutomorphicForm, n: i64, samples: usize, tol: f64, seed: u64) -> Result<DistributionReport> {
    if n > 5000 {
        return Err(Error::Domain(format!("N = {n} above the supported 5000")));
    }
    let xs = sample_cosets(n, samples, seed);
    let periods: Vec<Complex64> =
        xs.par_iter().map(|x| vertical_period_coset(f, x, tol).map(|p| p.value)).collect::<Result<_>>()?;
    distribution_report(&periods, None, n, delta_exponent(f), seed)
}

/// The graph `G'_N` (classes with `N/2 <= tr <= N`) and the lifted measure.
#[derive(Clone, Debug)]
pub struct LiftedMeasure {
    pub graph: EdgeList,
    /// Cosets without neighbours in `G'_N` (excluded from `μ'_N`).
    pub isolated: usize,
    /// `μ'_N = G(uniform on non-isolated cosets)` on the classes of `G'_N`.
    pub weights: FiniteMeasure,
}

/// Builds `G'_N` from `G_N` and pushes the uniform measure through it.
pub fn lifted_measure(full: &EdgeList) -> Result<LiftedMeasure> {
    let n = full.n;
    let graph = restrict_by_trace(full, ((n + 1) / 2) as i128, n as i128);
    let isolated = graph.deg_x.iter().filter(|&&d| d == 0).count();
    let live = graph.cosets.len() - isolated;
    if live == 0 {
        return Err(Error::Empty("no coset has a neighbour in the restricted graph"));
    }
    let mu = FiniteMeasure::new(graph.deg_x.iter().map(|&d| if d > 0 { 1.0 / live as f64 } else { 0.0 }).collect())?;
    let weights = BipartiteGraph::from_edge_list(&graph).g_transform(&mu)?;
    Ok(LiftedMeasure { graph, isolated, weights })
}

/// The lifted law and the uniform law of geodesic periods over `G'_N`.
#[derive(Clone, Debug)]
pub struct LiftedReport {
    pub n: i64,
    pub classes: usize,
    pub isolated_cosets: usize,
    pub mass: f64,
    pub lifted: DistributionReport,
    pub uniform: DistributionReport,
}

/// Geodesic periods of `f` over the classes of `G'_N`, weighted by `μ'_N`.
pub fn lifted_distribution_report(f: &AutomorphicForm, n: i64, tol: f64, seed: u64) -> Result<LiftedReport> {
    let lm = lifted_measure(&enumerate_edges(n))?;
    let periods: Vec<Complex64> =
        lm.graph.classes.par_iter().map(|c| geodesic_period(f, c, tol).map(|p| p.value)).collect::<Result<_>>()?;
    lifted_report_from(&lm, &periods, f, seed)
}

/// Assembles the lifted report from precomputed periods (one per class of `G'_N`).
pub fn lifted_report_from(lm: &LiftedMeasure, periods: &[Complex64], f: &AutomorphicForm, seed: u64) -> Result<LiftedReport> {
    let n = lm.graph.n;
    let w = lm.weights.weights();
    Ok(LiftedReport {
        n,
        classes: periods.len(),
        isolated_cosets: lm.isolated,
        mass: w.iter().sum(),
        lifted: distribution_report(periods, Some(w), n, delta_exponent(f), seed)?,
        uniform: distribution_report(periods, None, n, delta_exponent(f), seed)?,
    })
}

/// Periods below this are indistinguishable from zero at tolerance 1e-9.
pub const ZERO_THRESHOLD: f64 = 1e-7;

/// Census of small geodesic periods at one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub n: i64,
    pub classes: usize,
    /// Classes with `|P| < ZERO_THRESHOLD`.
    pub numerically_zero: usize,
    /// Per threshold exponent `δ`: classes with `|P| / Ĉ <= (log N)^{1/2 - δ}`.
    pub below: Vec<usize>,
}

/// Small-period census over a ladder of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonvanishingReport {
    pub deltas: Vec<f64>,
    /// `Ĉ_f` frozen at the largest `N`.
    pub c_hat: f64,
    pub rows: Vec<CensusRow>,
    /// Least-squares exponent of the census against `N`, per `δ`.
    pub exponents: Vec<Option<f64>>,
}

/// Counts small periods of primitive classes over `ladder` (ascending).
pub fn small_period_census(f: &AutomorphicForm, ladder: &[i64], deltas: &[f64], tol: f64) -> Result<NonvanishingReport> {
    let top = *ladder.iter().max().ok_or(Error::Empty("census ladder"))?;
    let classes = crate::enumeration::enumerate_classes(top, true);
    let periods: Vec<f64> =
        classes.par_iter().map(|c| geodesic_period(f, c, tol).map(|p| p.value.norm())).collect::<Result<_>>()?;
    census_from(&classes, &periods, ladder, deltas)
}

/// Census from precomputed period magnitudes of the primitive classes up to the top of the ladder.
pub fn census_from(classes: &[GeodesicClass], magnitudes: &[f64], ladder: &[i64], deltas: &[f64]) -> Result<NonvanishingReport> {
    let top = *ladder.iter().max().ok_or(Error::Empty("census ladder"))?;
    let log_top = (top as f64).ln();
    let second = magnitudes.iter().map(|m| m * m).sum::<f64>() / magnitudes.len().max(1) as f64;
    let c_hat = second.sqrt() / log_top.sqrt();
    let mut rows = Vec::new();
    for &n in ladder {
        let log_n = (n as f64).ln();
        let sel: Vec<f64> =
            classes.iter().zip(magnitudes).filter(|(c, _)| c.trace <= n as i128).map(|(_, &m)| m).collect();
        let below = deltas
            .iter()
            .map(|&d| {
                let thr = c_hat * log_n.powf(0.5 - d);
                sel.iter().filter(|&&m| m <= thr && m >= ZERO_THRESHOLD).count()
            })
            .collect();
        rows.push(CensusRow {
            n,
            classes: sel.len(),
            numerically_zero: sel.iter().filter(|&&m| m < ZERO_THRESHOLD).count(),
            below,
        });
    }
    let exponents = (0..deltas.len())
        .map(|j| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.below[j] > 0)
                .map(|r| ((r.n as f64).ln(), (r.below[j] as f64).ln()))
                .collect();
            if pts.len() < 2 {
                return None;
            }
            let m = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            Some(sxy / sxx)
        })
        .collect();
    Ok(NonvanishingReport { deltas: deltas.to_vec(), c_hat, rows, exponents })
}

/// `ℓ(C ∩ B)` from the reduction cycle: every form `(A, B, C)` of the cycle
/// contributes the arc of its axis circle (radius `√D / 2|A|`) in the band
/// `T <= y <= 2T`.
pub fn strip_length_cycle(class: &GeodesicClass, t: f64) -> f64 {
    let d = (class.key.form.discriminant() as f64).sqrt();
    class.key.form.cycle().iter().map(|f| strip_intersection_length(d / (2.0 * f.a.abs() as f64), t)).sum()
}

/// `ℓ(C ∩ B)` from the edges into a class: one axis of radius
/// `√(tr² − 4) / 2c` per edge (requires `N >= trace`).
pub fn strip_length_edges(g: &EdgeList, class_index: usize, t: f64) -> f64 {
    let tr = g.classes[class_index].trace as f64;
    let root = (tr * tr - 4.0).sqrt();
    g.edges
        .iter()
        .filter(|e| e.y as usize == class_index)
        .map(|e| strip_intersection_length(root / (2.0 * g.cosets[e.x as usize].c as f64), t))
        .sum()
}

/// Degree of each primitive class against its strip sojourn length.
#[derive(Clone, Debug, PartialEq)]
pub struct StripReport {
    pub n: i64,
    pub t: f64,
    /// `(class index, multiplicity degree, ℓ(C ∩ B))`.
    pub rows: Vec<(usize, u32, f64)>,
    /// `min deg / ℓ(C ∩ B)` over classes with positive strip length.
    pub c_hat: f64,
    pub positive: usize,
}

pub fn degree_vs_strip_report(g: &EdgeList, t: f64) -> Result<StripReport> {
    if t < 1.0 {
        return Err(Error::Domain(format!("strip height {t} below 1")));
    }
    let rows: Vec<(usize, u32, f64)> = g
        .classes
        .par_iter()
        .enumerate()
        .filter(|(_, c)| c.is_primitive)
        .map(|(i, c)| (i, g.deg_y[i], strip_length_cycle(c, t)))
        .collect();
    let pos: Vec<f64> = rows.iter().filter(|r| r.2 > 0.0).map(|r| r.1 as f64 / r.2).collect();
    let c_hat = pos.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(StripReport { n: g.n, t, positive: pos.len(), c_hat: if pos.is_empty() { 0.0 } else { c_hat }, rows })
}

/// `vol(B) / vol(X) = (1/2T) / (π/3)`.
pub fn strip_mass_target(t: f64) -> f64 {
    3.0 / (2.0 * PI * t)
}

/// Strip mass of a collection of closed geodesics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassReport {
    pub classes: usize,
    pub total_length: f64,
    pub strip_length: f64,
    pub ratio: f64,
    pub target: f64,
    pub relative_error: f64,
}

pub fn equidistribution_mass_report(classes: &[GeodesicClass], t: f64) -> Result<MassReport> {
    if classes.is_empty() {
        return Err(Error::Empty("mass report needs classes"));
    }
    let strip: f64 = classes.par_iter().map(|c| strip_length_cycle(c, t)).sum();
    let total: f64 = classes.iter().map(|c| c.length).sum();
    let ratio = strip / total;
    let target = strip_mass_target(t);
    Ok(MassReport {
        classes: classes.len(),
        total_length: total,
        strip_length: strip,
        ratio,
        target,
        relative_error: (ratio - target).abs() / target,
    })
}

/// Mass reports of `trials` random subsets keeping each class with probability `density`.
pub fn random_subset_masses(classes: &[GeodesicClass], density: f64, trials: usize, t: f64, seed: u64) -> Result<Vec<MassReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let mut subset: Vec<GeodesicClass> = classes.iter().filter(|_| rng.gen_bool(density)).copied().collect();
            if subset.is_empty() {
                subset.push(*classes.choose(&mut rng).ok_or(Error::Empty("mass report needs classes"))?);
            }
            equidistribution_mass_report(&subset, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        // Midpoint quantiles of N(0,1) approximate the law to within 1/(2n).
        let n = 2000;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                // Bisection for the normal quantile.
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..100 {
                    let m = 0.5 * (lo + hi);
                    if normal_cdf(m) < p {
                        lo = m
                    } else {
                        hi = m
                    }
                }
                lo
            })
            .collect();
        assert!(ks_normal(&v).unwrap() <= 0.5 / n as f64 + 1e-9);
    }

    #[test]
    fn zero_periods_are_degenerate() {
        let r = distribution_report(&[Complex64::new(0.0, 0.0); 5], None, 100, 0.0, 1).unwrap();
        assert!(r.degenerate);
    }
}
