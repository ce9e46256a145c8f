//! Double cosets, hyperbolic conjugacy classes and the bipartite graph
//! joining them.
//!
//! A hyperbolic class is canonicalised through its fixed-point form: the
//! element `[[a, b], [c, d]]` with positive trace `t` maps to the primitive
//! form `(c, d - a, -b) / u`, whose reduction cycle minimum together with
//! `(t, u)` determines the class.

use crate::binary_form::BinaryForm;
use crate::error::{Error, Result};
use crate::hyperbolic::{length_from_trace, GeodesicAxis, GroupElement};
use num_integer::Integer;
use rayon::prelude::*;
use std::collections::HashMap;

/// The double coset `Gamma_inf g Gamma_inf`, determined by `c` and `a mod c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleCoset {
    pub c: i64,
    pub a_mod_c: i64,
    pub theta_mod_c: i64,
}

impl DoubleCoset {
    pub fn new(c: i64, a: i64) -> Result<Self> {
        if c <= 0 {
            return Err(Error::Domain(format!("double coset needs c > 0, got {c}")));
        }
        let a = a.rem_euclid(c);
        if a.gcd(&c) != 1 {
            return Err(Error::Domain(format!("gcd({a}, {c}) != 1")));
        }
        let ainv = mod_inverse(a, c);
        Ok(DoubleCoset { c, a_mod_c: a, theta_mod_c: (a + ainv) % c })
    }

    /// The cusp `a / c` as a float.
    pub fn cusp(&self) -> f64 {
        self.a_mod_c as f64 / self.c as f64
    }

    /// `d mod c`, the inverse of `a` modulo `c`.
    pub fn d_mod_c(&self) -> i64 {
        mod_inverse(self.a_mod_c, self.c)
    }

    /// The matrix of this coset with signed trace `s` (`s ≡ theta mod c`).
    pub fn realize(&self, s: i64) -> Result<GroupElement> {
        let (a, c, s) = (self.a_mod_c as i128, self.c as i128, s as i128);
        if (s - self.theta_mod_c as i128).rem_euclid(c) != 0 {
            return Err(Error::Domain(format!("trace {s} is not {} mod {c}", self.theta_mod_c)));
        }
        let d = s - a;
        GroupElement::new(a, (a * d - 1) / c, c, d)
    }

    /// Number of `k` with `2 < |theta + k c| <= n`.
    pub fn degree(&self, n: i64) -> i64 {
        signed_traces(self, n).count() as i64
    }
}

/// Inverse of `a` modulo `m` (`m >= 1`), in `[0, m)`.
pub fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as i64
}

/// The `(k, s = theta + k c)` pairs with `2 < |s| <= n`.
fn signed_traces(x: &DoubleCoset, n: i64) -> impl Iterator<Item = (i64, i64)> + '_ {
    let c = x.c;
    let th = x.theta_mod_c;
    let kmin = Integer::div_ceil(&(-n - th), &c);
    let kmax = Integer::div_floor(&(n - th), &c);
    (kmin..=kmax).map(move |k| (k, th + k * c)).filter(|&(_, s)| s.abs() > 2)
}

/// Key of the double coset containing `g`.
pub fn coset_key(g: &GroupElement) -> Result<DoubleCoset> {
    if g.c == 0 {
        return Err(Error::Domain("element of Gamma_inf has no double coset key".into()));
    }
    let c = i64::try_from(g.c).map_err(|_| Error::Overflow("coset key"))?;
    let a = (g.a.rem_euclid(g.c)) as i64;
    DoubleCoset::new(c, a)
}

/// Canonical key of an oriented hyperbolic conjugacy class: positive trace,
/// content of the fixed-point form, and the least form on its cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub trace: i128,
    pub content: i128,
    pub form: BinaryForm,
}

impl ClassKey {
    pub fn discriminant(&self) -> i128 {
        self.trace * self.trace - 4
    }

    /// The representative `[[(t - Bu)/2, -Cu], [Au, (t + Bu)/2]]`.
    pub fn representative(&self) -> GroupElement {
        let (t, u) = (self.trace, self.content);
        let f = self.form;
        GroupElement::new((t - f.b * u) / 2, -f.c * u, f.a * u, (t + f.b * u) / 2)
            .expect("class representative is unimodular")
    }
}

/// Canonical key of the conjugacy class of a hyperbolic element.
pub fn class_key(g: &GroupElement) -> Result<ClassKey> {
    if !g.is_hyperbolic() {
        return Err(Error::NotHyperbolic(g.abs_trace()));
    }
    let (a, b, c, d) = if g.trace() > 0 { (g.a, g.b, g.c, g.d) } else { (-g.a, -g.b, -g.c, -g.d) };
    let u = c.gcd(&(d - a)).gcd(&b);
    let f = BinaryForm::new(c / u, (d - a) / u, -b / u);
    Ok(ClassKey { trace: a + d, content: u, form: f.canonical() })
}

/// A hyperbolic conjugacy class with its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicClass {
    pub key: ClassKey,
    pub canonical_rep: GroupElement,
    pub trace: i128,
    pub discriminant: i128,
    pub length: f64,
    pub is_primitive: bool,
    pub axis: GeodesicAxis,
}

impl GeodesicClass {
    pub fn from_key(key: ClassKey) -> Self {
        let rep = key.representative();
        GeodesicClass {
            key,
            canonical_rep: rep,
            trace: key.trace,
            discriminant: key.discriminant(),
            length: length_from_trace(key.trace),
            is_primitive: is_primitive_trace_content(key.trace, &rep),
            axis: GeodesicAxis::of(&rep).expect("reduced representative has c != 0"),
        }
    }

    /// The class of the inverse element (opposite orientation).
    pub fn inverse(&self) -> GeodesicClass {
        canonical_class(&self.canonical_rep.inverse()).expect("inverse is hyperbolic")
    }
}

/// Canonical class of a hyperbolic element.
pub fn canonical_class(g: &GroupElement) -> Result<GeodesicClass> {
    Ok(GeodesicClass::from_key(class_key(g)?))
}

/// Whether `g` is not a proper power in PSL2(Z).
pub fn is_primitive(g: &GroupElement) -> Result<bool> {
    if !g.is_hyperbolic() {
        return Err(Error::NotHyperbolic(g.abs_trace()));
    }
    Ok(is_primitive_trace_content(g.abs_trace(), g))
}

/// Chebyshev-type sequences: `V_m(t1)` (trace of `delta^m`) and `s_m`, with
/// `delta^m = s_m delta - s_{m-1} I`. Returns `None` on overflow past `limit`.
fn chebyshev(t1: i128, m: u32, limit: i128) -> Option<(i128, i128, i128)> {
    let (mut v0, mut v1) = (2i128, t1);
    let (mut s0, mut s1) = (0i128, 1i128);
    for _ in 1..m {
        let v2 = t1.checked_mul(v1)?.checked_sub(v0)?;
        let s2 = t1.checked_mul(s1)?.checked_sub(s0)?;
        v0 = v1;
        v1 = v2;
        s0 = s1;
        s1 = s2;
        if v1 > limit {
            return Some((v1, s1, s0));
        }
    }
    Some((v1, s1, s0))
}

fn is_primitive_trace_content(t: i128, g: &GroupElement) -> bool {
    let (a, b, c, d) = if g.trace() > 0 { (g.a, g.b, g.c, g.d) } else { (-g.a, -g.b, -g.c, -g.d) };
    let mut m = 2u32;
    loop {
        // Smallest possible V_m is at t1 = 3.
        match chebyshev(3, m, t) {
            Some((v, _, _)) if v <= t => {}
            _ => return true,
        }
        // Binary search t1 in [3, t] with V_m(t1) = t.
        let (mut lo, mut hi) = (3i128, t);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match chebyshev(mid, m, t) {
                Some((v, _, _)) if v < t => lo = mid + 1,
                _ => hi = mid,
            }
        }
        if let Some((v, sm, sm1)) = chebyshev(lo, m, t) {
            if v == t {
                // delta = (g + s_{m-1} I) / s_m must be integral.
                if (a + sm1) % sm == 0 && b % sm == 0 && c % sm == 0 && (d + sm1) % sm == 0 {
                    return false;
                }
            }
        }
        m += 1;
    }
}

/// Every double coset with `c <= n`, ordered by `(c, a)`.
pub fn enumerate_cosets(n: i64) -> Vec<DoubleCoset> {
    let mut out = Vec::new();
    for c in 1..=n.max(0) {
        for a in 0..c {
            if a.gcd(&c) == 1 {
                out.push(DoubleCoset::new(c, a).expect("coprime residue"));
            }
        }
    }
    out
}

/// An edge `(x, y, k)`: the matrix of coset `x` with signed trace
/// `theta + k c` lies in class `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub x: u32,
    pub y: u32,
    pub k: i64,
}

/// The graph `G_N` with degree tables.
#[derive(Clone, Debug)]
pub struct EdgeList {
    pub n: i64,
    pub cosets: Vec<DoubleCoset>,
    pub classes: Vec<GeodesicClass>,
    /// Sorted by `(x, k)`.
    pub edges: Vec<Edge>,
    /// Multiplicity degree of each coset.
    pub deg_x: Vec<u32>,
    /// Multiplicity degree of each class.
    pub deg_y: Vec<u32>,
    /// Number of distinct classes adjacent to each coset.
    pub distinct_deg_x: Vec<u32>,
    /// Number of distinct cosets adjacent to each class.
    pub distinct_deg_y: Vec<u32>,
}

impl EdgeList {
    pub fn signed_trace(&self, e: &Edge) -> i64 {
        let x = &self.cosets[e.x as usize];
        x.theta_mod_c + e.k * x.c
    }

    /// The matrix realising an edge.
    pub fn realize(&self, e: &Edge) -> GroupElement {
        self.cosets[e.x as usize].realize(self.signed_trace(e)).expect("edge trace matches coset")
    }

    /// Cosets whose edges reach the same class through two different `k`.
    pub fn multiplicity_discrepancies(&self) -> Vec<u32> {
        (0..self.cosets.len() as u32)
            .filter(|&x| self.deg_x[x as usize] != self.distinct_deg_x[x as usize])
            .collect()
    }
}

fn raw_edges_for_c(c: i64, n: i64, only_reduced: bool) -> Vec<(DoubleCoset, i64, ClassKey)> {
    let mut out = Vec::new();
    for a in 0..c {
        if a.gcd(&c) != 1 {
            continue;
        }
        let x = DoubleCoset::new(c, a).expect("coprime residue");
        for (k, s) in signed_traces(&x, n) {
            if only_reduced && c >= s.abs() {
                continue;
            }
            let g = x.realize(s).expect("trace in residue class");
            out.push((x, k, class_key(&g).expect("|s| > 2")));
        }
    }
    out
}

/// All class keys with `2 < trace <= n`, sorted.
fn class_keys_upto(n: i64) -> Vec<ClassKey> {
    // Every class has a reduced representative with 0 < c < trace, so it is
    // enough to sweep those edges.
    let mut keys: Vec<ClassKey> = (1..=n)
        .into_par_iter()
        .flat_map_iter(|c| raw_edges_for_c(c, n, true).into_iter().map(|(_, _, y)| y))
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    keys
}

/// One class per conjugacy class with `2 < |trace| <= n`, sorted by key.
pub fn enumerate_classes(n: i64, primitive_only: bool) -> Vec<GeodesicClass> {
    if n < 3 {
        return Vec::new();
    }
    class_keys_upto(n)
        .into_par_iter()
        .map(GeodesicClass::from_key)
        .filter(|g| !primitive_only || g.is_primitive)
        .collect()
}

/// The full graph `G_N`.
pub fn enumerate_edges(n: i64) -> EdgeList {
    let cosets = enumerate_cosets(n);
    let classes = enumerate_classes(n, false);
    let index: HashMap<ClassKey, u32> =
        classes.iter().enumerate().map(|(i, c)| (c.key, i as u32)).collect();
    // Offsets of each c inside the coset list.
    let mut first = vec![cosets.len(); n.max(0) as usize + 2];
    for (i, x) in cosets.iter().enumerate().rev() {
        first[x.c as usize] = i;
    }
    let per_c: Vec<Vec<Edge>> = (1..=n)
        .into_par_iter()
        .map(|c| {
            let block = &cosets[first[c as usize]..first[c as usize + 1]];
            raw_edges_for_c(c, n, false)
                .into_iter()
                .map(|(x, k, key)| {
                    let off = block.binary_search_by_key(&x.a_mod_c, |z| z.a_mod_c).expect("coset listed");
                    Edge { x: (first[c as usize] + off) as u32, y: index[&key], k }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let edges: Vec<Edge> = per_c.into_iter().flatten().collect();
    build_edge_list(n, cosets, classes, edges)
}

/// Restricts `G_N` to classes with `lo <= trace <= hi` (edges follow).
pub fn restrict_by_trace(g: &EdgeList, lo: i128, hi: i128) -> EdgeList {
    let keep: Vec<Option<u32>> = {
        let mut next = 0u32;
        g.classes
            .iter()
            .map(|c| {
                if c.trace >= lo && c.trace <= hi {
                    next += 1;
                    Some(next - 1)
                } else {
                    None
                }
            })
            .collect()
    };
    let classes: Vec<GeodesicClass> =
        g.classes.iter().filter(|c| c.trace >= lo && c.trace <= hi).copied().collect();
    let edges: Vec<Edge> = g
        .edges
        .iter()
        .filter_map(|e| keep[e.y as usize].map(|y| Edge { x: e.x, y, k: e.k }))
        .collect();
    build_edge_list(g.n, g.cosets.clone(), classes, edges)
}

/// Assembles degree tables for an edge set sorted by `(x, k)`.
pub fn build_edge_list(n: i64, cosets: Vec<DoubleCoset>, classes: Vec<GeodesicClass>, edges: Vec<Edge>) -> EdgeList {
    let mut deg_x = vec![0u32; cosets.len()];
    let mut deg_y = vec![0u32; classes.len()];
    let mut distinct_deg_x = vec![0u32; cosets.len()];
    let mut distinct_deg_y = vec![0u32; classes.len()];
    for e in &edges {
        deg_x[e.x as usize] += 1;
        deg_y[e.y as usize] += 1;
    }
    let mut pairs: Vec<(u32, u32)> = edges.iter().map(|e| (e.x, e.y)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    for &(x, y) in &pairs {
        distinct_deg_x[x as usize] += 1;
        distinct_deg_y[y as usize] += 1;
    }
    EdgeList { n, cosets, classes, edges, deg_x, deg_y, distinct_deg_x, distinct_deg_y }
}

/// The degree of `x` in `G_N` and its deviation from `(2N + 1)/c`.
pub fn degree_formula_check(x: &DoubleCoset, n: i64) -> (i64, f64) {
    let deg = x.degree(n);
    (deg, deg as f64 - (2 * n + 1) as f64 / x.c as f64)
}

/// The bound `1 + floor(5/c)` on the deviation in [`degree_formula_check`].
pub fn degree_error_bound(c: i64) -> f64 {
    (1 + 5 / c) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(a: i128, b: i128, c: i128, d: i128) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn coset_examples() {
        assert_eq!(enumerate_cosets(1).len(), 1);
        assert_eq!(enumerate_cosets(2).len(), 2);
        assert_eq!(enumerate_cosets(4).len(), 6);
        assert!(enumerate_cosets(0).is_empty());
        let k = coset_key(&GroupElement::S).unwrap();
        assert_eq!((k.c, k.a_mod_c), (1, 0));
        let g = ge(1, 0, 1, 1);
        let h = GroupElement::T.mul(&g).unwrap().mul(&GroupElement::T).unwrap();
        assert_eq!(coset_key(&g).unwrap(), coset_key(&h).unwrap());
        assert_eq!(coset_key(&ge(2, 1, 1, 1)).unwrap().a_mod_c, 0);
        assert!(coset_key(&GroupElement::T).is_err());
    }

    #[test]
    fn class_examples() {
        let g = ge(2, 1, 1, 1);
        let k = class_key(&g).unwrap();
        assert_eq!(k.trace, 3);
        assert_eq!(class_key(&k.representative()).unwrap(), k);
        assert!(class_key(&GroupElement::T).is_err());
        assert!(enumerate_classes(2, false).is_empty());
        assert_eq!(enumerate_classes(3, false).len(), 1);
    }

    #[test]
    fn primitivity_examples() {
        let g = ge(2, 1, 1, 1);
        assert!(is_primitive(&g).unwrap());
        assert!(!is_primitive(&g.pow(2).unwrap()).unwrap());
        assert!(!is_primitive(&g.pow(3).unwrap()).unwrap());
        assert!(is_primitive(&ge(1, 1, 1, 2)).unwrap());
        // A negative-trace square.
        let h = ge(-5, 2, -3, 1);
        assert!(!is_primitive(&h.pow(2).unwrap()).unwrap());
    }

    #[test]
    fn degree_examples() {
        let x = DoubleCoset::new(1, 0).unwrap();
        let (deg, err) = degree_formula_check(&x, 5);
        assert_eq!(deg, 6);
        assert_eq!(err, -5.0);
        let n = 1000;
        let x = DoubleCoset::new(n, 1).unwrap();
        assert!((1..=3).contains(&x.degree(n)));
    }

    #[test]
    fn edges_small() {
        let g = enumerate_edges(12);
        assert_eq!(g.edges.len() as u32, g.deg_x.iter().sum::<u32>());
        for e in &g.edges {
            let m = g.realize(e);
            assert_eq!(coset_key(&m).unwrap(), g.cosets[e.x as usize]);
            assert_eq!(class_key(&m).unwrap(), g.classes[e.y as usize].key);
        }
        for (i, x) in g.cosets.iter().enumerate() {
            assert_eq!(g.deg_x[i] as i64, x.degree(12));
        }
    }
}
