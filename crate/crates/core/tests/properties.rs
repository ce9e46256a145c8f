//! Structural invariants: conjugation invariance of class keys, group laws
//! of narrow class groups, the sandwich and lifting bounds on random
//! graphs, and agreement between independent evaluations of periods and
//! strip lengths.

use geolab::automorphic::{bundled_maass_form, AutomorphicForm};
use geolab::enumeration::{canonical_class, enumerate_classes};
use geolab::graph::{BipartiteGraph, FiniteMeasure};
use geolab::hyperbolic::{strip_intersection_length, GroupElement};
use geolab::periods::{geodesic_period_window, vertical_period, vertical_period_split, Method};
use geolab::quadratic::{is_fundamental, narrow_class_group, narrow_class_number};
use geolab::verify::strip_length_quadrature;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A product of `T^k S` factors with `|k| <= bound`.
fn random_word(rng: &mut ChaCha8Rng, len: usize, bound: i128) -> GroupElement {
    let mut g = GroupElement::IDENTITY;
    for _ in 0..len {
        let k = rng.gen_range(-bound..=bound);
        g = g.mul(&GroupElement::translation(k)).unwrap().mul(&GroupElement::S).unwrap();
    }
    g
}

#[test]
fn class_key_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100_000 {
        let len = rng.gen_range(2..=4);
        let g = random_word(&mut rng, len, 6);
        if !g.is_hyperbolic() {
            continue;
        }
        let len = rng.gen_range(1..=3);
        let s = random_word(&mut rng, len, 12);
        let h = g.conjugate_by(&s).unwrap();
        if [h.a, h.b, h.c, h.d].iter().any(|e| e.abs() > 1_000_000) {
            continue;
        }
        assert_eq!(canonical_class(&g).unwrap().key, canonical_class(&h).unwrap().key, "g = {g:?}, s = {s:?}");
        checked += 1;
    }
}

#[test]
fn inverse_class_reverses_orientation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let g = random_word(&mut rng, 3, 6);
        if !g.is_hyperbolic() {
            continue;
        }
        let c = canonical_class(&g).unwrap();
        assert_eq!(c.inverse().key, canonical_class(&g.inverse()).unwrap().key);
        assert_eq!(c.inverse().inverse().key, c.key);
        assert_eq!(c.inverse().trace, c.trace);
    }
}

#[test]
fn narrow_class_groups_satisfy_group_axioms() {
    for d in (5..=500).filter(|&d| is_fundamental(d)) {
        let g = narrow_class_group(d).unwrap();
        let h = g.h();
        assert_eq!(h, narrow_class_number(d).unwrap());
        assert_eq!(g.orders.iter().product::<usize>(), h, "D = {d}");
        for i in 0..h {
            assert_eq!(g.table[g.identity][i], i);
            assert_eq!(g.table[i][g.inverse(i)], g.identity);
            for j in 0..h {
                assert_eq!(g.table[i][j], g.table[j][i], "D = {d}");
                for k in 0..h {
                    assert_eq!(g.table[g.table[i][j]][k], g.table[i][g.table[j][k]], "D = {d}");
                }
            }
        }
        assert!(g.characters.orthonormality_defect() < 1e-12, "D = {d}");
    }
}

/// Random bipartite multigraph with every `x` adjacent to something.
fn graph_strategy() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize)>)> {
    (1usize..10, 1usize..10).prop_flat_map(|(nx, ny)| {
        let extra = proptest::collection::vec((0..nx, 0..ny), 0..30);
        let first = proptest::collection::vec(0..ny, nx);
        (Just(nx), Just(ny), first, extra).prop_map(|(nx, ny, first, extra)| {
            let mut edges: Vec<(usize, usize)> = first.into_iter().enumerate().collect();
            edges.extend(extra);
            (nx, ny, edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sandwich_holds_on_random_graphs(
        (nx, ny, edges) in graph_strategy(),
        raw in proptest::collection::vec(0.0f64..1.0, 10),
        subset in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let g = BipartiteGraph::new(nx, ny, &edges).unwrap();
        let mut w: Vec<f64> = raw[..nx].to_vec();
        w[0] += 0.1;
        let mu = FiniteMeasure::normalized(w).unwrap();
        let b: Vec<usize> = (0..ny).filter(|&y| subset[y]).collect();
        let s = g.sandwich_check(&mu, &b).unwrap();
        prop_assert!(s.holds(1e-12), "{s:?}");
        let total = g.g_transform(&mu).unwrap().weights().iter().sum::<f64>();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifting_bound_on_random_graphs(
        (nx, ny, edges) in graph_strategy(),
        raw in proptest::collection::vec(0.01f64..1.0, 10),
        values in proptest::collection::vec(-3.0f64..3.0, 10),
        z in -3.0f64..3.0,
    ) {
        let g = BipartiteGraph::new(nx, ny, &edges).unwrap();
        let mu = FiniteMeasure::normalized(raw[..nx].to_vec()).unwrap();
        let gv = &values[..ny];
        // f(x) is the mean of g over the neighbours of x, and eps the
        // largest gap along an edge.
        let f: Vec<f64> = (0..nx)
            .map(|x| {
                let ns: Vec<usize> = edges.iter().filter(|e| e.0 == x).map(|e| e.1).collect();
                ns.iter().map(|&y| gv[y]).sum::<f64>() / ns.len() as f64
            })
            .collect();
        let eps = edges.iter().map(|&(x, y)| (f[x] - gv[y]).abs()).fold(0.0, f64::max) + 1e-12;
        let lifted = g.g_transform(&mu).unwrap();
        let below: f64 = (0..ny).filter(|&y| gv[y] <= z).map(|y| lifted.weights()[y]).sum();
        let lo: f64 = (0..nx).filter(|&x| f[x] <= z - eps).map(|x| mu.weights()[x]).sum();
        let hi: f64 = (0..nx).filter(|&x| f[x] <= z + eps).map(|x| mu.weights()[x]).sum();
        prop_assert!(lo <= below + 1e-12 && below <= hi + 1e-12, "{lo} {below} {hi}");
    }

    #[test]
    fn strip_closed_form_matches_quadrature(r in 0.5f64..40.0, t in 1.0f64..6.0) {
        let closed = strip_intersection_length(r, t);
        let quad = strip_length_quadrature(r, t);
        prop_assert!((closed - quad).abs() < 1e-10 * closed.max(1.0), "{closed} vs {quad}");
        prop_assert!(closed >= 0.0);
    }
}

#[test]
fn vertical_period_independent_of_split_height() {
    let f = AutomorphicForm::delta(2000);
    for (a, c) in [(1, 2), (2, 5), (5, 13), (7, 30)] {
        let reference = vertical_period(&f, a, c, 1e-12).unwrap().value;
        for h in [0.5, 1.0, 2.0, 4.0] {
            let v = vertical_period_split(&f, a, c, h / c as f64, 1e-12).unwrap().value;
            assert!((v - reference).norm() < 1e-11, "a/c = {a}/{c}, h = {h}: {v} vs {reference}");
        }
    }
}

#[test]
fn geodesic_periods_agree_across_quadratures() {
    let forms = [AutomorphicForm::delta(2000), bundled_maass_form()];
    let classes = enumerate_classes(12, true);
    for f in &forms {
        for c in classes.iter().take(8) {
            let run = |m| geodesic_period_window(f, &c.axis, c.length, 0.0, 1e-10, m).unwrap().value;
            let (gl, simpson) = (run(Method::GaussLegendre), run(Method::Simpson));
            assert!((gl - simpson).norm() < 1e-8, "{} trace {}: {gl} vs {simpson}", f.name(), c.trace);
        }
    }
}

#[test]
fn geodesic_period_independent_of_start_point() {
    let f = AutomorphicForm::delta(2000);
    for c in enumerate_classes(10, true).iter().take(6) {
        let run = |t0| geodesic_period_window(&f, &c.axis, c.length, t0, 1e-11, Method::GaussLegendre).unwrap().value;
        let base = run(0.0);
        for t0 in [0.3, 1.7] {
            assert!((run(t0) - base).norm() < 1e-9, "trace {}", c.trace);
        }
    }
}
