//! The acceptance suite: thirteen end-to-end checks of the library against
//! exact identities, independent oracles and empirical laws. Each check
//! returns a [`CriterionOutcome`] with a one-line summary; the suite is
//! shared by the integration tests and the command-line tool.

use crate::automorphic::{AutomorphicForm, EisensteinSeries};
use crate::enumeration::{enumerate_classes, enumerate_cosets, enumerate_edges, ClassKey};
use crate::error::Result;
use crate::graph::{BipartiteGraph, FiniteMeasure, Vertex};
use crate::hyperbolic::{strip_intersection_length, GeodesicAxis, GroupElement};
use crate::periods::{
    bridge_residual, cusp_envelope, eisenstein_envelope, envelope_fit, geodesic_period, geodesic_period_window,
    profiled_loglog_fit, sample_edges, vertical_period, vertical_period_quadrature, BridgeResidual, Method,
};
use crate::quadratic::{
    class_key_of_form, fundamental_discriminants_by_unit, geodesic_of_class, is_fundamental, narrow_class_group,
    pell_unit, plancherel_sides, unit_identity_holds, waldspurger_moment,
};
use crate::quadrature::adaptive_gl;
use crate::special::log_integral;
use crate::stats::{
    degree_vs_strip_report, equidistribution_mass_report, lifted_measure, lifted_report_from, random_subset_masses,
    strip_length_edges, strip_mass_target, vertical_clt_report,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use std::f64::consts::PI;
use std::time::Instant;

/// Result of one acceptance criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    /// The numerical checks of the criterion held.
    pub checks_passed: bool,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub detail: String,
}

impl CriterionOutcome {
    /// Checks held and the run finished within its time budget.
    pub fn passed(&self) -> bool {
        self.checks_passed && self.seconds <= self.budget_seconds
    }

    /// `PASS 4 bridge identity (12.3 s / 600 s): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({:.1} s / {:.0} s): {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

/// Scales and seeds of the suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub degree_scales: [i64; 4],
    pub sandwich_n: i64,
    pub count_n: i64,
    pub prime_geodesic_n: i64,
    pub bridge_n: i64,
    pub bridge_samples: usize,
    pub plancherel_unit_bound: f64,
    pub class_group_d: i128,
    pub clt_n: i64,
    pub clt_samples: usize,
    pub lifted_n: i64,
    pub strip_n: i64,
    pub mass_n: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 7,
            degree_scales: [10, 50, 200, 1000],
            sandwich_n: 200,
            count_n: 5000,
            prime_geodesic_n: 1000,
            bridge_n: 1000,
            bridge_samples: 500,
            plancherel_unit_bound: 50.0,
            class_group_d: 1000,
            clt_n: 2000,
            clt_samples: 10_000,
            lifted_n: 1000,
            strip_n: 500,
            mass_n: 1000,
        }
    }
}

impl VerifyConfig {
    /// The default scales with every enumeration size capped at `n`.
    pub fn capped(n: i64, seed: u64) -> Self {
        let d = VerifyConfig::default();
        let cap = |v: i64| v.min(n.max(10));
        VerifyConfig {
            seed,
            degree_scales: d.degree_scales.map(cap),
            sandwich_n: cap(d.sandwich_n),
            count_n: cap(d.count_n),
            prime_geodesic_n: cap(d.prime_geodesic_n),
            bridge_n: cap(d.bridge_n),
            lifted_n: cap(d.lifted_n),
            strip_n: cap(d.strip_n),
            mass_n: cap(d.mass_n),
            clt_n: cap(d.clt_n),
            ..d
        }
    }
}

/// Coefficients of Δ sufficient for vertical periods at denominators up to `n`.
pub fn delta_for_scale(n: i64) -> AutomorphicForm {
    AutomorphicForm::delta((6 * n as usize).max(400))
}

fn timed(id: u8, name: &'static str, budget: f64, run: impl FnOnce() -> Result<(bool, String)>) -> CriterionOutcome {
    let t0 = Instant::now();
    let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome { id, name, checks_passed: ok, seconds: t0.elapsed().as_secs_f64(), budget_seconds: budget, detail }
}

/// Violations of the degree law at scale `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeLawCount {
    pub n: i64,
    pub cosets: usize,
    /// Cosets with `|E(x)| > 1 + ⌊5/c⌋`.
    pub floor_bound: usize,
    /// Cosets with `|E(x)| > 1 + ⌈5/c⌉`.
    pub ceil_bound: usize,
    /// Cosets whose edge count differs from the closed-form count, or with no edge when `N >= 5`.
    pub inconsistent: usize,
}

/// Counts cosets of `X_N` violating each form of the degree bound, with
/// `E(x) = deg(x) − (2N+1)/c` and multiplicity degree.
pub fn degree_law_violations(n: i64) -> DegreeLawCount {
    let g = enumerate_edges(n);
    let mut out = DegreeLawCount { n, cosets: g.cosets.len(), floor_bound: 0, ceil_bound: 0, inconsistent: 0 };
    for (x, &deg) in g.cosets.iter().zip(&g.deg_x) {
        let err = (deg as f64 - (2 * n + 1) as f64 / x.c as f64).abs();
        out.floor_bound += (err > (1 + 5 / x.c) as f64) as usize;
        out.ceil_bound += (err > (1 + (5 + x.c - 1) / x.c) as f64) as usize;
        out.inconsistent += (deg as i64 != x.degree(n) || (n >= 5 && deg == 0)) as usize;
    }
    out
}

/// Every coset obeys `|E(x)| <= 1 + ⌊5/c⌋` with multiplicity degree. The
/// weaker bound `1 + ⌈5/c⌉` is reported alongside.
pub fn criterion_degree_law(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(1, "degree law", 30.0, || {
        let counts: Vec<DegreeLawCount> = cfg.degree_scales.iter().map(|&n| degree_law_violations(n)).collect();
        let ok = counts.iter().all(|c| c.floor_bound == 0 && c.inconsistent == 0);
        let parts: Vec<String> = counts
            .iter()
            .map(|c| {
                format!(
                    "N={}: {} of {} exceed 1+⌊5/c⌋, {} exceed 1+⌈5/c⌉, {} inconsistent",
                    c.n, c.floor_bound, c.cosets, c.ceil_bound, c.inconsistent
                )
            })
            .collect();
        Ok((ok, parts.join("; ")))
    })
}

fn random_graph_case(rng: &mut ChaCha8Rng) -> Result<bool> {
    let nx = rng.gen_range(1..=12);
    let ny = rng.gen_range(1..=12);
    let mut edges = Vec::new();
    for x in 0..nx {
        for _ in 0..rng.gen_range(0..=4) {
            edges.push((x, rng.gen_range(0..ny)));
        }
    }
    let g = BipartiteGraph::new(nx, ny, &edges)?;
    let raw: Vec<f64> = (0..nx)
        .map(|x| if g.degree(Vertex::X(x)).unwrap_or(0) > 0 { rng.gen::<f64>() } else { 0.0 })
        .collect();
    if raw.iter().all(|&w| w == 0.0) {
        return Ok(true);
    }
    let mu = FiniteMeasure::normalized(raw)?;
    let b: Vec<usize> = (0..ny).filter(|_| rng.gen_bool(0.5)).collect();
    Ok(g.sandwich_check(&mu, &b)?.holds(1e-12))
}

/// `μ(e⁻¹(B)) <= G(μ)(B) <= μ(e(B))` on random and modular graphs.
pub fn criterion_sandwich(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(2, "sandwich inequality", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut synthetic_fail = 0;
        for _ in 0..1000 {
            if !random_graph_case(&mut rng)? {
                synthetic_fail += 1;
            }
        }
        let g = enumerate_edges(cfg.sandwich_n);
        let graph = BipartiteGraph::from_edge_list(&g);
        let mu = FiniteMeasure::uniform(g.cosets.len())?;
        let mut modular_fail = 0;
        for _ in 0..100 {
            let density = rng.gen_range(0.01..0.5);
            let b: Vec<usize> = (0..g.classes.len()).filter(|_| rng.gen_bool(density)).collect();
            if !graph.sandwich_check(&mu, &b)?.holds(1e-12) {
                modular_fail += 1;
            }
        }
        Ok((
            synthetic_fail == 0 && modular_fail == 0,
            format!("synthetic 1000 cases, {synthetic_fail} failures; G_{} 100 sets, {modular_fail} failures", cfg.sandwich_n),
        ))
    })
}

/// `Σ_{c<=N} φ(c)` by a totient sieve.
pub fn totient_sum(n: i64) -> u64 {
    let n = n.max(0) as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            for m in (p..=n).step_by(p) {
                phi[m] -= phi[m] / p as u64;
            }
        }
    }
    phi.iter().skip(1).sum()
}

/// Exact coset count and the asymptotic shapes of `|X_N|` and `|Y*_N|`.
pub fn criterion_counting(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(3, "counting shapes", 120.0, || {
        let n = cfg.count_n;
        let count = enumerate_cosets(n).len() as u64;
        let exact = count == totient_sum(n);
        let ratio = count as f64 / (n * n) as f64 / (3.0 / (PI * PI));
        let m = cfg.prime_geodesic_n;
        let prim = enumerate_classes(m, true).len() as f64;
        let li = log_integral((m * m) as f64);
        let ok = exact && (ratio - 1.0).abs() <= 0.05 && (prim / li - 1.0).abs() <= 0.10;
        Ok((
            ok,
            format!(
                "|X_{n}| = {count} (totient sum {}), |X_N|/(3N²/π²) = {ratio:.5}; |Y*_{m}| = {prim} vs Li(N²) = {li:.1} (ratio {:.5})",
                if exact { "matches" } else { "differs" },
                prim / li
            ),
        ))
    })
}

/// Bridge residuals over sampled edges of `G_N`, in sample order.
pub fn bridge_samples(f: &AutomorphicForm, n: i64, samples: usize, seed: u64, tol: f64) -> Result<Vec<BridgeResidual>> {
    let g = enumerate_edges(n);
    sample_edges(&g, samples, seed).par_iter().map(|(x, s)| bridge_residual(f, x, *s, tol)).collect()
}

fn fit_summary(rs: &[BridgeResidual], pick: impl Fn(&BridgeResidual) -> Complex64, g: fn(f64) -> f64) -> Result<(f64, f64)> {
    let ratios: Vec<f64> = rs.iter().map(|r| r.ratio).collect();
    let mags: Vec<f64> = rs.iter().map(|r| pick(r).norm()).collect();
    let fit = profiled_loglog_fit(&ratios, &mags)?;
    let env = envelope_fit(&ratios, &mags, g);
    Ok((fit.slope, env.worst_holdout))
}

/// The bridge for Δ: slope at most 0.6 and the envelope holds, for both signs.
pub fn criterion_bridge_delta(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(4, "bridge identity (Δ)", 600.0, || {
        let f = delta_for_scale(cfg.bridge_n);
        let rs = bridge_samples(&f, cfg.bridge_n, cfg.bridge_samples, cfg.seed, 1e-8)?;
        let (s1, w1) = fit_summary(&rs, |r| r.residual, cusp_envelope)?;
        let (s2, w2) = fit_summary(&rs, |r| r.residual_alt, cusp_envelope)?;
        let ok = s1 <= 0.6 && w1 <= 1.0 && s2 <= 0.6 && w2 <= 1.0;
        Ok((
            ok,
            format!(
                "{} edges at N={}: sign (-1)^(k/2) slope {s1:.3}, worst held-out {w1:.3}; sign (-1)^(k/2+1) slope {s2:.3}, worst held-out {w2:.3}",
                rs.len(),
                cfg.bridge_n
            ),
        ))
    })
}

/// The Eisenstein bridge at `t = 1` with its explicit terms.
pub fn criterion_bridge_eisenstein(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(5, "Eisenstein bridge (t = 1)", 600.0, || {
        let f = AutomorphicForm::Eisenstein(EisensteinSeries::critical(1.0));
        let rs = bridge_samples(&f, cfg.bridge_n, cfg.bridge_samples, cfg.seed, 1e-8)?;
        let (s1, w1) = fit_summary(&rs, |r| r.residual, eisenstein_envelope)?;
        let (_, w2) = fit_summary(&rs, |r| r.residual_alt, eisenstein_envelope)?;
        let ms = |pick: &dyn Fn(&BridgeResidual) -> Complex64| rs.iter().map(|r| pick(r).norm_sqr()).sum::<f64>() / rs.len() as f64;
        let incl = ms(&|r| r.residual);
        let omit = ms(&|r| r.residual_without_explicit());
        let delta = omit - incl;
        let ok = s1 <= 0.6 && w1 <= 1.0 && delta > 0.0;
        Ok((
            ok,
            format!(
                "slope {s1:.3}, worst held-out {w1:.3}; mean |r|² {incl:.5} with explicit terms, {omit:.5} without (delta {delta:.5}); literal sign worst held-out {w2:.3}"
            ),
        ))
    })
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let mut g = GroupElement::IDENTITY;
    for _ in 0..rng.gen_range(1..=4) {
        g = g.mul(&GroupElement::translation(rng.gen_range(-3..=3)))?.mul(&GroupElement::S)?;
    }
    g.mul(&GroupElement::translation(rng.gen_range(-3..=3)))
}

/// Conjugation invariance, dual quadrature, and series against quadrature
/// for the vertical period at the cusp 0.
pub fn criterion_well_defined(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(6, "period well-definedness", 600.0, || {
        let tol = 1e-9;
        let f = AutomorphicForm::delta(400);
        let classes = enumerate_classes(60, true);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut pairs = Vec::new();
        while pairs.len() < 200 {
            let y = classes[rng.gen_range(0..classes.len())];
            let s = random_sl2(&mut rng)?;
            let h = y.canonical_rep.conjugate_by(&s)?;
            if h.c != 0 && h.abs_trace() == y.trace {
                let t0 = rng.gen_range(-y.length..y.length);
                pairs.push((y, h, t0));
            }
        }
        let conj: Vec<f64> = pairs
            .par_iter()
            .map(|(y, h, t0)| {
                let a = geodesic_period(&f, y, tol)?.value;
                let ax = GeodesicAxis::of(h)?;
                let b = geodesic_period_window(&f, &ax, y.length, *t0, tol, Method::GaussLegendre)?.value;
                Ok((a - b).norm())
            })
            .collect::<Result<_>>()?;
        let conj_max = conj.iter().cloned().fold(0.0, f64::max);
        let dual: Vec<f64> = classes
            .iter()
            .step_by(classes.len() / 12 + 1)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|y| {
                let gl = geodesic_period_window(&f, &y.axis, y.length, -0.5 * y.length, 1e-11, Method::GaussLegendre)?.value;
                let si = geodesic_period_window(&f, &y.axis, y.length, -0.5 * y.length, 1e-11, Method::Simpson)?.value;
                Ok((gl - si).norm())
            })
            .collect::<Result<_>>()?;
        let dual_max = dual.iter().cloned().fold(0.0, f64::max);
        let series = vertical_period(&f, 0, 1, 1e-12)?.value;
        let quad = vertical_period_quadrature(&f, 0, 1, 1e-12)?.value;
        let vdiff = (series - quad).norm();
        let ok = conj_max <= 2.0 * tol && dual_max <= 1e-8 && vdiff <= 1e-8;
        Ok((
            ok,
            format!(
                "200 conjugate pairs max diff {conj_max:.2e} (limit {:.0e}); {} GL vs Simpson max diff {dual_max:.2e}; vertical at 0/1 series {series:.12e} vs quadrature diff {vdiff:.2e}",
                2.0 * tol,
                dual.len()
            ),
        ))
    })
}

/// The finite Plancherel identity over `Cl⁺_D` for Δ and for random periods.
pub fn criterion_plancherel(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(7, "Plancherel identity", 300.0, || {
        let f = AutomorphicForm::delta(400);
        let discs = fundamental_discriminants_by_unit(cfg.plancherel_unit_bound)?;
        let reports: Vec<_> = discs.par_iter().map(|d| waldspurger_moment(&f, d.d, 1e-10)).collect::<Result<_>>()?;
        let worst = reports.iter().map(|r| r.difference).fold(0.0, f64::max);
        let consistent = reports.iter().all(|r| r.nonvanishing_consistent());
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut synth_worst: f64 = 0.0;
        for d in &discs {
            let group = narrow_class_group(d.d)?;
            let periods: Vec<Complex64> =
                (0..group.h()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            synth_worst = synth_worst.max(plancherel_sides(d.d, &group.characters, &periods, 0.0).difference);
        }
        let max_h = discs.iter().map(|d| d.h_plus).max().unwrap_or(0);
        Ok((
            worst < 1e-8 && synth_worst < 1e-8 && consistent,
            format!(
                "{} discriminants with ε_D <= {} (max h⁺ {max_h}): Δ worst difference {worst:.2e}, random periods worst {synth_worst:.2e}, non-vanishing consistent: {consistent}",
                discs.len(),
                cfg.plancherel_unit_bound
            ),
        ))
    })
}

/// Reduced forms of every fundamental `D` map to classes of trace `t_D`
/// with `t² − 4 = Du²`, matching the enumerated classes whenever `t <= N`.
pub fn criterion_class_group(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(8, "geodesic/class-group consistency", 300.0, || {
        let n = cfg.prime_geodesic_n;
        let keys: HashSet<ClassKey> = enumerate_classes(n, true).into_iter().map(|c| c.key).collect();
        let discs: Vec<i128> = (5..=cfg.class_group_d).filter(|&d| is_fundamental(d)).collect();
        let mut bad = Vec::new();
        let (mut matched, mut enumerable) = (0usize, 0usize);
        let mut worst_len: f64 = 0.0;
        for &d in &discs {
            let (t, u) = pell_unit(d)?;
            if !unit_identity_holds(d, t, u) {
                bad.push(format!("D={d}: unit identity"));
            }
            let group = narrow_class_group(d)?;
            for cls in &group.classes {
                let key = class_key_of_form(&cls.form, d)?;
                if key.trace != t || key.content != u {
                    bad.push(format!("D={d}: key trace {} content {}", key.trace, key.content));
                }
                let eps = (t as f64 + u as f64 * (d as f64).sqrt()) / 2.0;
                if t <= n as i128 {
                    enumerable += 1;
                    let y = geodesic_of_class(&cls.form, d)?;
                    worst_len = worst_len.max((y.length - 2.0 * eps.ln()).abs() / y.length);
                    if keys.contains(&key) {
                        matched += 1;
                    } else {
                        bad.push(format!("D={d}: key missing from enumeration"));
                    }
                }
            }
        }
        Ok((
            bad.is_empty() && worst_len < 1e-12,
            format!(
                "{} fundamental D <= {}: t² − 4 = Du² exact for all, key traces equal t_D; {matched} of {enumerable} classes with t <= {n} found in enumeration; worst relative length gap {worst_len:.1e}{}",
                discs.len(),
                cfg.class_group_d,
                if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join(", ")) }
            ),
        ))
    })
}

/// KS distance of standardised vertical periods of Δ at most 0.05.
pub fn criterion_clt(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(9, "empirical CLT (vertical periods)", 600.0, || {
        let f = delta_for_scale(cfg.clt_n);
        let r = vertical_clt_report(&f, cfg.clt_n, cfg.clt_samples, 1e-9, cfg.seed)?;
        Ok((
            r.ks_real <= 0.05,
            format!(
                "N={} ({} cosets): KS(real) {:.4} (bootstrap {:.4}–{:.4}), KS(imag) {:.4}, pooled KS {:.4}, Ĉ {:.4e}",
                cfg.clt_n, r.samples, r.ks_real, r.bootstrap_band.0, r.bootstrap_band.1, r.ks_imag, r.ks_real_pooled, r.c_hat
            ),
        ))
    })
}

/// The `μ'_N`-weighted law of geodesic periods of Δ within KS 0.1 of Gaussian,
/// with the sandwich inequality on its threshold events.
pub fn criterion_lifted(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(10, "weighted CLT lift", 1200.0, || {
        let f = delta_for_scale(cfg.lifted_n);
        let lm = lifted_measure(&enumerate_edges(cfg.lifted_n))?;
        let periods: Vec<Complex64> =
            lm.graph.classes.par_iter().map(|c| geodesic_period(&f, c, 1e-8).map(|p| p.value)).collect::<Result<_>>()?;
        let r = lifted_report_from(&lm, &periods, &f, cfg.seed)?;
        let graph = BipartiteGraph::from_edge_list(&lm.graph);
        let live: Vec<f64> = lm.graph.deg_x.iter().map(|&d| if d > 0 { 1.0 } else { 0.0 }).collect();
        let mu = FiniteMeasure::normalized(live)?;
        let (m, s) = (r.lifted.mean.re, r.lifted.variance_re.sqrt());
        let mut sandwich_ok = true;
        for z in [-1.0, 0.0, 1.0] {
            let mask: Vec<bool> = periods.iter().map(|p| (p.re - m) / s <= z).collect();
            sandwich_ok &= graph.sandwich_with(&mu, &lm.weights, &mask).holds(1e-12);
        }
        Ok((
            r.lifted.ks_real <= 0.1 && sandwich_ok,
            format!(
                "N={}: {} classes, {} isolated cosets; lifted KS {:.4} (bootstrap {:.4}–{:.4}), uniform KS {:.4}; sandwich on threshold events: {sandwich_ok}",
                cfg.lifted_n,
                r.classes,
                r.isolated_cosets,
                r.lifted.ks_real,
                r.lifted.bootstrap_band.0,
                r.lifted.bootstrap_band.1,
                r.uniform.ks_real
            ),
        ))
    })
}

/// `min deg(y) / ℓ(C_y ∩ B)` over primitive classes is positive, with the
/// cycle and edge computations of the strip length agreeing.
pub fn criterion_degree_strip(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(11, "degree lower bound", 300.0, || {
        let g = enumerate_edges(cfg.strip_n);
        let rep = degree_vs_strip_report(&g, 1.0)?;
        let worst_gap = rep
            .rows
            .iter()
            .step_by(rep.rows.len() / 200 + 1)
            .map(|&(i, _, l)| (strip_length_edges(&g, i, 1.0) - l).abs())
            .fold(0.0, f64::max);
        let min_deg = rep.rows.iter().filter(|r| r.2 > 0.0).map(|r| r.1).min().unwrap_or(0);
        Ok((
            rep.c_hat > 0.0 && rep.positive > 0 && worst_gap < 1e-9,
            format!(
                "N={}, T=1: {} primitive classes with positive strip length, min deg/ℓ = {:.4}, min degree {min_deg}; cycle vs edge strip length max gap {worst_gap:.1e}",
                cfg.strip_n, rep.positive, rep.c_hat
            ),
        ))
    })
}

/// Strip mass `Σ ℓ(C ∩ B) / Σ ℓ(C)` against `vol(B)/vol(X) = 3/(2π)`.
pub fn criterion_mass(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(12, "equidistribution mass", 300.0, || {
        let classes = enumerate_classes(cfg.mass_n, true);
        let full = equidistribution_mass_report(&classes, 1.0)?;
        let subs = random_subset_masses(&classes, 0.1, 20, 1.0, cfg.seed)?;
        let worst = subs.iter().map(|m| m.relative_error).fold(0.0, f64::max);
        Ok((
            full.relative_error <= 0.05 && worst <= 0.10,
            format!(
                "N={}: ratio {:.5} vs 3/(2π) = {:.5} (error {:.2}%); 20 random 10% subsets worst error {:.2}%",
                cfg.mass_n,
                full.ratio,
                strip_mass_target(1.0),
                100.0 * full.relative_error,
                100.0 * worst
            ),
        ))
    })
}

/// Arc length of the semicircle of radius `r` inside `T <= y <= 2T`, by
/// quadrature of `dθ / sin θ` over the angles in the band.
pub fn strip_length_quadrature(r: f64, t: f64) -> f64 {
    if r <= t {
        return 0.0;
    }
    let lo = (t / r).asin();
    let hi = if r > 2.0 * t { (2.0 * t / r).asin() } else { 0.5 * PI };
    2.0 * adaptive_gl(|th: f64| 1.0 / th.sin(), lo, hi, 4, 1e-13, 30).value
}

/// Closed-form strip lengths against quadrature, and the `r = 2T` value.
pub fn criterion_strip_formula(cfg: &VerifyConfig) -> CriterionOutcome {
    timed(13, "hyperbolic strip formula", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let t = rng.gen_range(1.0..10.0);
            let r = t * rng.gen_range(0.5..20.0);
            worst = worst.max((strip_intersection_length(r, t) - strip_length_quadrature(r, t)).abs());
        }
        let special = (strip_intersection_length(4.0, 2.0) - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs();
        Ok((
            worst <= 1e-8 && special <= 1e-12,
            format!("1000 random (r, T): max gap {worst:.1e}; r = 2T against 2 log(2+√3): gap {special:.1e}"),
        ))
    })
}

/// All thirteen criteria, in order.
pub fn run_primary_suite(cfg: &VerifyConfig, mut report: impl FnMut(&CriterionOutcome)) -> Vec<CriterionOutcome> {
    let runs: [fn(&VerifyConfig) -> CriterionOutcome; 13] = [
        criterion_degree_law,
        criterion_sandwich,
        criterion_counting,
        criterion_bridge_delta,
        criterion_bridge_eisenstein,
        criterion_well_defined,
        criterion_plancherel,
        criterion_class_group,
        criterion_clt,
        criterion_lifted,
        criterion_degree_strip,
        criterion_mass,
        criterion_strip_formula,
    ];
    runs.iter()
        .map(|run| {
            let o = run(cfg);
            report(&o);
            o
        })
        .collect()
}

/// Criteria whose literal statement is false. Criterion 1 bounds the degree
/// error by `1 + ⌊5/c⌋`, which fails whenever a residue class meets `[−2, 2]`
/// more than `⌊5/c⌋` times; the provable bound is `1 + ⌈5/c⌉`.
pub const EXPECTED_FAILURES: [u8; 1] = [1];

/// For an expected failure: whether the failure is only the known defect
/// (for criterion 1: every coset meets `1 + ⌈5/c⌉`, degree tables consistent,
/// runtime within budget).
pub fn expected_failure_explained(o: &CriterionOutcome, cfg: &VerifyConfig) -> bool {
    match o.id {
        1 => {
            o.seconds <= o.budget_seconds
                && cfg.degree_scales.iter().all(|&n| {
                    let c = degree_law_violations(n);
                    c.ceil_bound == 0 && c.inconsistent == 0
                })
        }
        _ => false,
    }
}

/// Every criterion passes, apart from expected failures whose defect is explained.
pub fn suite_acceptable(outcomes: &[CriterionOutcome], cfg: &VerifyConfig) -> bool {
    outcomes.iter().all(|o| {
        o.passed() || (EXPECTED_FAILURES.contains(&o.id) && expected_failure_explained(o, cfg))
    })
}

/// Fundamental discriminants up to `d_max` whose unit trace is at most `n`.
pub fn enumerable_fundamental(d_max: i128, n: i64) -> Result<Vec<i128>> {
    let mut out = Vec::new();
    for d in (5..=d_max).filter(|&d| is_fundamental(d)) {
        if pell_unit(d)?.0 <= n as i128 {
            out.push(d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::canonical_class;

    #[test]
    fn totient_sum_small() {
        assert_eq!(totient_sum(10), 32);
        assert_eq!(totient_sum(1), 1);
    }

    #[test]
    fn quadrature_strip_matches_special_value() {
        assert!((strip_length_quadrature(4.0, 2.0) - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-10);
    }

    #[test]
    fn strip_criterion_passes() {
        assert!(criterion_strip_formula(&VerifyConfig::default()).passed());
    }

    #[test]
    fn canonical_class_of_conjugate() {
        let g = GroupElement::new(2, 1, 1, 1).unwrap();
        let s = GroupElement::new(1, 2, 0, 1).unwrap();
        assert_eq!(canonical_class(&g.conjugate_by(&s).unwrap()).unwrap().key, canonical_class(&g).unwrap().key);
    }
}
