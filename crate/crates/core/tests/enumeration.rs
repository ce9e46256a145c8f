//! The graph `G_N` against a direct search over matrices, growth of the
//! non-primitive classes, and the degree table.

use geolab::enumeration::{canonical_class, enumerate_classes, enumerate_cosets, enumerate_edges, DoubleCoset};
use num_integer::Integer;
use std::collections::BTreeMap;

const N: i64 = 200;

/// Every matrix with `1 <= c <= N` and `2 < |tr| <= N`, keyed by class.
fn brute_force_classes(n: i64) -> BTreeMap<String, usize> {
    let mut seen = BTreeMap::new();
    for c in 1..=n {
        for a in (0..c).filter(|a| a.gcd(&c) == 1) {
            let x = DoubleCoset::new(c, a).unwrap();
            for s in -n..=n {
                if s.abs() <= 2 || (s - x.theta_mod_c).rem_euclid(c) != 0 {
                    continue;
                }
                let key = canonical_class(&x.realize(s).unwrap()).unwrap().key;
                *seen.entry(format!("{key:?}")).or_insert(0) += 1;
            }
        }
    }
    seen
}

#[test]
fn graph_matches_direct_search() {
    let g = enumerate_edges(N);
    let brute = brute_force_classes(N);
    assert_eq!(g.edges.len(), brute.values().sum::<usize>());
    assert_eq!(g.classes.len(), brute.len());
    for (i, y) in g.classes.iter().enumerate() {
        assert_eq!(brute.get(&format!("{:?}", y.key)).copied(), Some(g.deg_y[i] as usize), "class {:?}", y.key);
        assert!(g.deg_y[i] >= 1);
    }
    let listed: Vec<String> = enumerate_classes(N, false).iter().map(|y| format!("{:?}", y.key)).collect();
    assert_eq!(listed.len(), brute.len());
    assert!(listed.iter().all(|k| brute.contains_key(k)));
}

#[test]
fn coset_count_is_totient_sum() {
    let phi_sum: usize = (1..=N).map(|c| (0..c).filter(|a| a.gcd(&c) == 1).count()).sum();
    assert_eq!(enumerate_cosets(N).len(), phi_sum);
}

#[test]
fn degrees_add_up_on_both_sides() {
    let g = enumerate_edges(N);
    let from_x: u64 = g.deg_x.iter().map(|&d| d as u64).sum();
    let from_y: u64 = g.deg_y.iter().map(|&d| d as u64).sum();
    assert_eq!(from_x, g.edges.len() as u64);
    assert_eq!(from_y, g.edges.len() as u64);
    for (i, x) in g.cosets.iter().enumerate() {
        assert_eq!(g.deg_x[i] as i64, x.degree(N));
    }
}

#[test]
fn non_primitive_classes_grow_linearly() {
    let mut ratios = Vec::new();
    for n in [100, 200, 400, 800] {
        let all = enumerate_classes(n, false).len();
        let primitive = enumerate_classes(n, true).len();
        ratios.push((all - primitive) as f64 / n as f64);
    }
    assert!(ratios.iter().all(|&r| r <= 2.0), "{ratios:?}");
    assert!(ratios[3] <= 1.5 * ratios[1], "{ratios:?}");
}
