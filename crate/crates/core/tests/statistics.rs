//! Monte Carlo and small-scale checks of the statistical layer, and the
//! on-disk enumeration cache.

use geolab::automorphic::AutomorphicForm;
use geolab::cache::{cache_path, load_edge_list, store_edge_list, Kind};
use geolab::enumeration::{enumerate_classes, enumerate_edges};
use geolab::hyperbolic::reduce_complex;
use geolab::stats::{equidistribution_mass_report, ks_normal, small_period_census, strip_mass_target};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Points with `|x| <= 1/2`, `y >= √3/2` sampled from `dx dy / y²`; the
/// fraction already reduced, times the box volume, estimates `vol(X) = π/3`.
#[test]
fn fundamental_domain_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let box_volume = 2.0 / 3f64.sqrt();
    let samples = 200_000;
    let mut inside = 0usize;
    for _ in 0..samples {
        let x = rng.gen_range(-0.5..0.5);
        let y = 1.0 / rng.gen_range(f64::MIN_POSITIVE..box_volume);
        let z = Complex64::new(x, y);
        let (w, _) = reduce_complex(z).unwrap();
        if (w - z).norm() < 1e-12 {
            inside += 1;
        }
    }
    let estimate = box_volume * inside as f64 / samples as f64;
    assert!((estimate - PI / 3.0).abs() < 5e-3, "{estimate}");
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let (u, v): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

#[test]
fn ks_separates_normal_from_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 20_000;
    let normal: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
    let uniform: Vec<f64> = (0..n).map(|_| rng.gen_range(-3f64.sqrt()..3f64.sqrt())).collect();
    let critical = 1.63 / (n as f64).sqrt();
    assert!(ks_normal(&normal).unwrap() < critical);
    assert!(ks_normal(&uniform).unwrap() > 3.0 * critical);
}

#[test]
fn strip_mass_at_small_scale() {
    let classes = enumerate_classes(400, true);
    let r = equidistribution_mass_report(&classes, 1.0).unwrap();
    assert_eq!(r.target, strip_mass_target(1.0));
    assert!(r.relative_error < 0.05, "{r:?}");
}

#[test]
fn census_is_monotone_in_threshold_and_scale() {
    let f = AutomorphicForm::delta(1000);
    let report = small_period_census(&f, &[20, 40, 80], &[0.1, 0.25], 1e-10).unwrap();
    assert_eq!(report.rows.len(), 3);
    for w in report.rows.windows(2) {
        assert!(w[0].classes <= w[1].classes);
    }
    for row in &report.rows {
        assert!(row.below[1] <= row.below[0] && row.below[0] <= row.classes);
        assert!(row.numerically_zero <= row.classes);
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = std::env::temp_dir().join(format!("geolab-cache-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = enumerate_edges(60);
    store_edge_list(&dir, &g).unwrap();
    let back = load_edge_list(&dir, 60).unwrap();
    assert_eq!(back.cosets, g.cosets);
    assert_eq!(back.edges, g.edges);
    assert_eq!(back.deg_y, g.deg_y);
    assert_eq!(back.classes.iter().map(|c| c.key).collect::<Vec<_>>(), g.classes.iter().map(|c| c.key).collect::<Vec<_>>());
    let path = cache_path(&dir, 60, Kind::Edges);
    let mut bytes = std::fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&path, bytes).unwrap();
    assert!(load_edge_list(&dir, 60).is_err());
    assert!(load_edge_list(&dir, 61).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
