//! The subcommands. Each returns a [`Report`] and whether its checks held.

use crate::config::RunConfig;
use crate::output::{Cell, Report, Table};
use crate::CliError;
use geolab::automorphic::{bundled_maass_form, ingest_maass_coefficients, AutomorphicForm, EisensteinSeries};
use geolab::cache::{cache_path, load_edge_list, store_edge_list, Kind};
use geolab::enumeration::{enumerate_edges, EdgeList};
use geolab::graph::{BipartiteGraph, FiniteMeasure};
use geolab::periods::{
    bridge_residual, cusp_envelope, eisenstein_envelope, envelope_fit, geodesic_period, profiled_loglog_fit, sample_edges,
    vertical_period_coset,
};
use geolab::quadratic::{fundamental_discriminants_by_unit, waldspurger_moment};
use geolab::stats::{
    degree_vs_strip_report, lifted_measure, lifted_report_from, normal_cdf, small_period_census, vertical_clt_report,
    DistributionReport,
};
use geolab::verify::{
    degree_law_violations, delta_for_scale, expected_failure_explained, run_primary_suite, VerifyConfig, EXPECTED_FAILURES,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of a subcommand: its report and whether its checks held.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

/// The form selected by `--form` / `--maass-file`, with coefficients for scale `N`.
pub fn select_form(cfg: &RunConfig) -> Result<AutomorphicForm, CliError> {
    let name = cfg.form.as_str();
    match name {
        "delta" => Ok(delta_for_scale(cfg.n)),
        "maass" => match &cfg.maass_file {
            Some(p) => Ok(ingest_maass_coefficients(p)?),
            None => Ok(bundled_maass_form()),
        },
        "eisenstein" => Ok(AutomorphicForm::Eisenstein(EisensteinSeries::critical(1.0))),
        _ => match name.strip_prefix("eisenstein:") {
            Some(t) => {
                let t: f64 = t.parse().map_err(|_| CliError::Usage(format!("bad spectral parameter in {name:?}")))?;
                Ok(AutomorphicForm::Eisenstein(EisensteinSeries::critical(t)))
            }
            None => Err(CliError::Usage(format!("unknown form {name:?} (delta, maass, eisenstein, eisenstein:<t>)"))),
        },
    }
}

/// Loads `G_N` from the cache. A missing cache is an error telling the user
/// to run `enumerate`; a corrupt one is recomputed and rewritten.
pub fn cached_graph(cfg: &RunConfig) -> Result<EdgeList, CliError> {
    let dir = &cfg.cache_dir;
    let missing = [Kind::Cosets, Kind::Classes, Kind::Edges].iter().any(|&k| !cache_path(dir, cfg.n, k).exists());
    if missing {
        return Err(CliError::MissingCache(format!(
            "no enumeration cache for N = {} in {}; run `geolab enumerate --N {} --cache-dir {}` first",
            cfg.n,
            dir.display(),
            cfg.n,
            dir.display()
        )));
    }
    match load_edge_list(dir, cfg.n) {
        Ok(g) => Ok(g),
        Err(e) => {
            eprintln!("warning: cache for N = {} is invalid ({e}); recomputing", cfg.n);
            let g = enumerate_edges(cfg.n);
            store_edge_list(dir, &g)?;
            Ok(g)
        }
    }
}

pub fn enumerate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let g = enumerate_edges(cfg.n);
    store_edge_list(&cfg.cache_dir, &g)?;
    let mut t = Table::new("summary", &["kind", "N", "count", "file"]);
    for (kind, count) in [(Kind::Cosets, g.cosets.len()), (Kind::Classes, g.classes.len()), (Kind::Edges, g.edges.len())] {
        t.push(vec![
            kind.name().into(),
            cfg.n.into(),
            count.into(),
            cache_path(&cfg.cache_dir, cfg.n, kind).display().to_string().into(),
        ]);
    }
    Ok(Outcome { report: Report { command: "enumerate", tables: vec![t] }, ok: true })
}

/// Which periods the `periods` subcommand computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PeriodKind {
    Geodesic,
    Vertical,
}

pub fn periods(cfg: &RunConfig, kind: PeriodKind) -> Result<Outcome, CliError> {
    let f = select_form(cfg)?;
    let g = cached_graph(cfg)?;
    let table = match kind {
        PeriodKind::Geodesic => {
            let vals: Vec<_> =
                g.classes.par_iter().map(|c| geodesic_period(&f, c, cfg.tol)).collect::<geolab::Result<_>>()?;
            let mut t = Table::new(
                "geodesic",
                &["trace", "content", "A", "B", "C", "length", "primitive", "re", "im", "estimated_error"],
            );
            for (c, p) in g.classes.iter().zip(vals) {
                t.push(vec![
                    c.trace.into(),
                    c.key.content.into(),
                    c.key.form.a.into(),
                    c.key.form.b.into(),
                    c.key.form.c.into(),
                    c.length.into(),
                    c.is_primitive.into(),
                    p.value.re.into(),
                    p.value.im.into(),
                    p.estimated_error.into(),
                ]);
            }
            t
        }
        PeriodKind::Vertical => {
            let vals: Vec<_> =
                g.cosets.par_iter().map(|x| vertical_period_coset(&f, x, cfg.tol)).collect::<geolab::Result<_>>()?;
            let mut t = Table::new("vertical", &["c", "a", "re", "im", "estimated_error"]);
            for (x, p) in g.cosets.iter().zip(vals) {
                t.push(vec![x.c.into(), x.a_mod_c.into(), p.value.re.into(), p.value.im.into(), p.estimated_error.into()]);
            }
            t
        }
    };
    Ok(Outcome { report: Report { command: "periods", tables: vec![table] }, ok: true })
}

pub fn bridge(cfg: &RunConfig, samples: usize) -> Result<Outcome, CliError> {
    let f = select_form(cfg)?;
    let g = cached_graph(cfg)?;
    let rs: Vec<_> = sample_edges(&g, samples, cfg.seed)
        .par_iter()
        .map(|(x, s)| bridge_residual(&f, x, *s, cfg.tol))
        .collect::<geolab::Result<_>>()?;
    let mut t = Table::new(
        "residuals",
        &[
            "c", "trace", "ratio", "geodesic_re", "geodesic_im", "vertical_re", "vertical_im", "explicit_re", "explicit_im",
            "residual_re", "residual_im", "residual_alt_re", "residual_alt_im",
        ],
    );
    for r in &rs {
        t.push(vec![
            r.c.into(),
            r.trace.into(),
            r.ratio.into(),
            r.geodesic.re.into(),
            r.geodesic.im.into(),
            r.vertical.re.into(),
            r.vertical.im.into(),
            r.explicit.re.into(),
            r.explicit.im.into(),
            r.residual.re.into(),
            r.residual.im.into(),
            r.residual_alt.re.into(),
            r.residual_alt.im.into(),
        ]);
    }
    let env: fn(f64) -> f64 = if f.is_cusp_form() { cusp_envelope } else { eisenstein_envelope };
    let ratios: Vec<f64> = rs.iter().map(|r| r.ratio).collect();
    let mut s = Table::new("fit", &["residual", "slope", "profiled_constant", "envelope_k", "worst_holdout", "mean_square"]);
    let mut ok = true;
    let variants: [(&str, fn(&geolab::periods::BridgeResidual) -> Complex64); 3] = [
        ("sign_even", |r| r.residual),
        ("sign_odd", |r| r.residual_alt),
        ("without_explicit", |r| r.residual_without_explicit()),
    ];
    for (i, (name, pick)) in variants.iter().enumerate() {
        let mags: Vec<f64> = rs.iter().map(|r| pick(r).norm()).collect();
        let fit = profiled_loglog_fit(&ratios, &mags)?;
        let e = envelope_fit(&ratios, &mags, env);
        if i == 0 {
            ok = fit.slope <= 0.6 && e.worst_holdout <= 1.0;
        }
        let ms = mags.iter().map(|m| m * m).sum::<f64>() / mags.len() as f64;
        s.push(vec![(*name).into(), fit.slope.into(), fit.constant.into(), e.k.into(), e.worst_holdout.into(), ms.into()]);
    }
    Ok(Outcome { report: Report { command: "bridge", tables: vec![t, s] }, ok })
}

pub fn graph_stats(cfg: &RunConfig, strip_height: f64) -> Result<Outcome, CliError> {
    let g = cached_graph(cfg)?;
    let law = degree_law_violations(cfg.n);
    let mut d = Table::new(
        "degree_law",
        &["N", "cosets", "classes", "edges", "exceed_floor_bound", "exceed_ceil_bound", "inconsistent", "min_deg_x", "max_deg_x", "multiplicity_discrepancies"],
    );
    d.push(vec![
        cfg.n.into(),
        g.cosets.len().into(),
        g.classes.len().into(),
        g.edges.len().into(),
        law.floor_bound.into(),
        law.ceil_bound.into(),
        law.inconsistent.into(),
        g.deg_x.iter().min().copied().unwrap_or(0).into(),
        g.deg_x.iter().max().copied().unwrap_or(0).into(),
        g.multiplicity_discrepancies().len().into(),
    ]);
    let graph = BipartiteGraph::from_edge_list(&g);
    let live: Vec<f64> = g.deg_x.iter().map(|&k| if k > 0 { 1.0 } else { 0.0 }).collect();
    let mu = FiniteMeasure::normalized(live)?;
    let lifted = graph.g_transform(&mu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sw = Table::new("sandwich", &["set", "size", "lower", "value", "upper", "holds"]);
    let mut ok = law.ceil_bound == 0 && law.inconsistent == 0;
    for i in 0..100usize {
        let density = rng.gen_range(0.01..0.5);
        let mask: Vec<bool> = (0..g.classes.len()).map(|_| rng.gen_bool(density)).collect();
        let s = graph.sandwich_with(&mu, &lifted, &mask);
        let holds = s.holds(1e-12);
        ok &= holds;
        sw.push(vec![i.into(), mask.iter().filter(|&&b| b).count().into(), s.lower.into(), s.value.into(), s.upper.into(), holds.into()]);
    }
    let rep = degree_vs_strip_report(&g, strip_height)?;
    ok &= rep.positive == 0 || rep.c_hat > 0.0;
    let mut st = Table::new("strip", &["trace", "A", "B", "C", "degree", "strip_length", "ratio"]);
    for &(i, deg, l) in &rep.rows {
        let c = &g.classes[i];
        st.push(vec![
            c.trace.into(),
            c.key.form.a.into(),
            c.key.form.b.into(),
            c.key.form.c.into(),
            deg.into(),
            l.into(),
            (if l > 0.0 { deg as f64 / l } else { f64::INFINITY }).into(),
        ]);
    }
    let mut sm = Table::new("strip_summary", &["N", "T", "primitive_classes", "positive_strip", "min_ratio"]);
    sm.push(vec![cfg.n.into(), strip_height.into(), rep.rows.len().into(), rep.positive.into(), rep.c_hat.into()]);
    Ok(Outcome { report: Report { command: "graph-stats", tables: vec![d, sw, sm, st] }, ok })
}

/// Which law the `distribution` subcommand reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DistributionKind {
    Vertical,
    Lifted,
}

fn distribution_tables(label: &str, r: &DistributionReport, summary: &mut Table, hist: &mut Table) {
    summary.push(vec![
        label.into(),
        r.samples.into(),
        r.mean.re.into(),
        r.mean.im.into(),
        r.variance_re.into(),
        r.variance_im.into(),
        r.c_hat.into(),
        r.delta_f.into(),
        r.ks_real.into(),
        r.ks_imag.into(),
        r.ks_real_pooled.into(),
        r.bootstrap_band.0.into(),
        r.bootstrap_band.1.into(),
        r.degenerate.into(),
    ]);
    let h = &r.histogram_real;
    let width = (h.hi - h.lo) / h.masses.len() as f64;
    for (i, m) in h.masses.iter().enumerate() {
        let lo = h.lo + width * i as f64;
        let hi = lo + width;
        let expect = normal_cdf(hi) - normal_cdf(lo);
        hist.push(vec![label.into(), lo.into(), hi.into(), (*m).into(), expect.into()]);
    }
}

const SUMMARY_COLUMNS: [&str; 14] = [
    "weights", "samples", "mean_re", "mean_im", "variance_re", "variance_im", "c_hat", "delta_f", "ks_real", "ks_imag",
    "ks_real_pooled", "bootstrap_lo", "bootstrap_hi", "degenerate",
];

pub fn distribution(cfg: &RunConfig, kind: DistributionKind, samples: usize) -> Result<Outcome, CliError> {
    let f = select_form(cfg)?;
    let mut summary = Table::new("summary", &SUMMARY_COLUMNS);
    let mut hist = Table::new("histogram", &["weights", "bin_lo", "bin_hi", "mass", "gaussian_mass"]);
    match kind {
        DistributionKind::Vertical => {
            let r = vertical_clt_report(&f, cfg.n, samples, cfg.tol, cfg.seed)?;
            distribution_tables("uniform", &r, &mut summary, &mut hist);
        }
        DistributionKind::Lifted => {
            let lm = lifted_measure(&cached_graph(cfg)?)?;
            let periods: Vec<Complex64> = lm
                .graph
                .classes
                .par_iter()
                .map(|c| geodesic_period(&f, c, cfg.tol).map(|p| p.value))
                .collect::<geolab::Result<_>>()?;
            let r = lifted_report_from(&lm, &periods, &f, cfg.seed)?;
            distribution_tables("lifted", &r.lifted, &mut summary, &mut hist);
            distribution_tables("uniform", &r.uniform, &mut summary, &mut hist);
        }
    }
    Ok(Outcome { report: Report { command: "distribution", tables: vec![summary, hist] }, ok: true })
}

pub fn census(cfg: &RunConfig, ladder: &[i64], deltas: &[f64]) -> Result<Outcome, CliError> {
    let f = select_form(cfg)?;
    let ladder: Vec<i64> = if ladder.is_empty() { vec![cfg.n / 8, cfg.n / 4, cfg.n / 2, cfg.n] } else { ladder.to_vec() };
    if ladder.iter().any(|&n| n < 3 || n > cfg.n) {
        return Err(CliError::Usage(format!("census ladder must lie in [3, N = {}]", cfg.n)));
    }
    let r = small_period_census(&f, &ladder, deltas, cfg.tol)?;
    let mut rows = Table::new("counts", &["N", "delta", "classes", "numerically_zero", "below_threshold"]);
    for row in &r.rows {
        for (j, d) in r.deltas.iter().enumerate() {
            rows.push(vec![row.n.into(), (*d).into(), row.classes.into(), row.numerically_zero.into(), row.below[j].into()]);
        }
    }
    let mut ex = Table::new("exponents", &["delta", "c_hat", "exponent"]);
    for (d, e) in r.deltas.iter().zip(&r.exponents) {
        ex.push(vec![(*d).into(), r.c_hat.into(), e.map(Cell::from).unwrap_or_else(|| "undetermined".into())]);
    }
    Ok(Outcome { report: Report { command: "census", tables: vec![rows, ex] }, ok: true })
}

pub fn waldspurger(cfg: &RunConfig, unit_bound: f64) -> Result<Outcome, CliError> {
    let f = select_form(cfg)?;
    let discs = fundamental_discriminants_by_unit(unit_bound)?;
    let reps: Vec<_> = discs.par_iter().map(|d| waldspurger_moment(&f, d.d, cfg.tol)).collect::<geolab::Result<_>>()?;
    let mut t = Table::new(
        "moments",
        &["D", "h_plus", "unit_length", "lhs", "rhs", "difference", "some_character_nonzero", "some_period_nonzero"],
    );
    let mut ok = true;
    for (d, r) in discs.iter().zip(&reps) {
        ok &= r.difference <= 1e-8 * r.rhs.max(1.0) && r.nonvanishing_consistent();
        t.push(vec![
            d.d.into(),
            r.h.into(),
            d.length().into(),
            r.lhs.into(),
            r.rhs.into(),
            r.difference.into(),
            r.some_character_nonzero.into(),
            r.some_period_nonzero.into(),
        ]);
    }
    Ok(Outcome { report: Report { command: "waldspurger", tables: vec![t] }, ok })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let vc = if cfg.n_explicit { VerifyConfig::capped(cfg.n, cfg.seed) } else { VerifyConfig { seed: cfg.seed, ..VerifyConfig::default() } };
    let outcomes = run_primary_suite(&vc, |o| eprintln!("{}", o.line()));
    let mut t = Table::new("criteria", &["id", "name", "status", "detail"]);
    let mut ok = true;
    for o in &outcomes {
        let status = if o.passed() {
            "pass"
        } else if EXPECTED_FAILURES.contains(&o.id) && expected_failure_explained(o, &vc) {
            "expected-fail"
        } else {
            ok = false;
            "fail"
        };
        t.push(vec![o.id.into(), o.name.into(), status.into(), o.detail.clone().into()]);
    }
    Ok(Outcome { report: Report { command: "verify", tables: vec![t] }, ok })
}
