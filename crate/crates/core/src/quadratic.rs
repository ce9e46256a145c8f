//! Real quadratic arithmetic at level one: fundamental discriminants, the
//! automorph unit `ε_D = (t + u√D)/2`, narrow class groups of indefinite
//! forms with their character tables, the closed geodesics attached to form
//! classes, and the finite Plancherel identity over class-group characters.

use crate::automorphic::AutomorphicForm;
use crate::binary_form::{BinaryForm, Transform, IDENTITY_TRANSFORM};
use crate::enumeration::{canonical_class, ClassKey, GeodesicClass};
use crate::error::{Error, Result};
use crate::hyperbolic::{isqrt, GroupElement};
use crate::periods::geodesic_period;
use crate::special::log_integral;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

fn is_squarefree(mut n: i128) -> bool {
    let mut p = 2i128;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Whether `d` is a discriminant of an indefinite form: `d > 0`,
/// `d ≡ 0, 1 (mod 4)` and not a square.
pub fn is_discriminant(d: i128) -> bool {
    d > 0 && (d % 4 == 0 || d % 4 == 1) && isqrt(d).pow(2) != d
}

/// Fundamental discriminants: `D ≡ 1 (mod 4)` square-free, or `D = 4m` with
/// `m ≡ 2, 3 (mod 4)` square-free.
pub fn is_fundamental(d: i128) -> bool {
    if d <= 1 {
        return false;
    }
    match d % 4 {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// The smallest solution `(t, u)`, `t, u > 0`, of `t² − D u² = 4`, read off
/// the automorph of the principal reduced cycle.
pub fn pell_unit(d: i128) -> Result<(i128, i128)> {
    if !is_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a non-square discriminant")));
    }
    let b = if d % 2 == 0 { 0 } else { 1 };
    let start = BinaryForm::new(1, b, (b * b - d) / 4).reduce();
    let mut f = start;
    let mut m: Transform = IDENTITY_TRANSFORM;
    loop {
        let (g, step) = f.rho_with_transform();
        m = mul_checked(&m, &step)?;
        f = g;
        if f == start {
            break;
        }
    }
    let t = (m[0][0] + m[1][1]).abs();
    let u = (m[1][0] / start.a).abs();
    if !unit_identity_holds(d, t, u) {
        return Err(Error::SelfCheck(format!("automorph of D = {d} gives t = {t}, u = {u}")));
    }
    Ok((t, u))
}

fn mul_checked(m: &Transform, n: &Transform) -> Result<Transform> {
    let e = |a: i128, b: i128, c: i128, d: i128| -> Result<i128> {
        a.checked_mul(b)
            .and_then(|x| c.checked_mul(d).and_then(|y| x.checked_add(y)))
            .ok_or(Error::Overflow("automorph product"))
    };
    Ok([
        [e(m[0][0], n[0][0], m[0][1], n[1][0])?, e(m[0][0], n[0][1], m[0][1], n[1][1])?],
        [e(m[1][0], n[0][0], m[1][1], n[1][0])?, e(m[1][0], n[0][1], m[1][1], n[1][1])?],
    ])
}

/// A discriminant with its automorph unit and narrow class number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discriminant {
    pub d: i128,
    pub is_fundamental: bool,
    /// `(t, u)` with `t² − D u² = 4`, minimal.
    pub epsilon: (i128, i128),
    pub h_plus: usize,
}

impl Discriminant {
    pub fn new(d: i128) -> Result<Self> {
        let epsilon = pell_unit(d)?;
        Ok(Discriminant { d, is_fundamental: is_fundamental(d), epsilon, h_plus: narrow_class_number(d)? })
    }

    /// `ε_D = (t + u√D)/2`.
    pub fn unit(&self) -> f64 {
        let (t, u) = self.epsilon;
        (t as f64 + u as f64 * (self.d as f64).sqrt()) / 2.0
    }

    /// The geodesic length `2 log ε_D`.
    pub fn length(&self) -> f64 {
        crate::hyperbolic::length_from_trace(self.epsilon.0)
    }
}

/// Exact test `ε ≤ X` for `ε = (t + √(t²−4))/2`: equivalent to `t ≤ X + 1/X`.
pub fn unit_at_most(t: i128, x: f64) -> bool {
    x >= 1.0 && (t as f64) * x <= x * x + 1.0
}

/// Every `(D, t, u)` with `D = (t² − 4)/u²` a discriminant, for `3 <= t <= t_max`,
/// keeping only the first (hence fundamental) `t` for each `D`.
fn units_by_trace(t_max: i128, fundamental_only: bool) -> Vec<(i128, i128, i128)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for t in 3..=t_max {
        let n = t * t - 4;
        let mut u = 1i128;
        while u * u <= n {
            if n % (u * u) == 0 {
                let d = n / (u * u);
                if is_discriminant(d) && (!fundamental_only || is_fundamental(d)) && seen.insert(d) {
                    out.push((d, t, u));
                }
            }
            u += 1;
        }
    }
    out.sort_unstable();
    out
}

/// All fundamental discriminants with `ε_D <= X`, sorted by `D`.
pub fn fundamental_discriminants_by_unit(x: f64) -> Result<Vec<Discriminant>> {
    if !(x.is_finite() && x >= (1.0 + 5f64.sqrt()) / 2.0) {
        return Err(Error::Domain(format!("X = {x} is below the golden ratio")));
    }
    let t_max = (x + 1.0 / x).floor() as i128 + 1;
    let found: Vec<(i128, i128, i128)> =
        units_by_trace(t_max, true).into_iter().filter(|&(_, t, _)| unit_at_most(t, x)).collect();
    let max_n = found.iter().map(|&(d, _, _)| d / 4).max().unwrap_or(1) as usize;
    let sieve = DivisorSieve::new(max_n.max(1));
    found
        .into_par_iter()
        .map(|(d, t, u)| {
            Ok(Discriminant { d, is_fundamental: true, epsilon: (t, u), h_plus: narrow_class_number_with(d, Some(&sieve))? })
        })
        .collect()
}

/// Smallest-prime-factor table for fast divisor enumeration.
#[derive(Clone, Debug)]
pub struct DivisorSieve {
    spf: Vec<u32>,
}

impl DivisorSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        DivisorSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// All positive divisors of `n` (`1 <= n <= limit`), unsorted.
    pub fn divisors(&self, mut n: usize) -> Vec<usize> {
        let mut divs = vec![1usize];
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            let base = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..base {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

fn trial_divisors(n: i128) -> Vec<i128> {
    let mut out = Vec::new();
    let mut a = 1i128;
    while a * a <= n {
        if n % a == 0 {
            out.push(a);
            if a * a != n {
                out.push(n / a);
            }
        }
        a += 1;
    }
    out
}

/// Reduced forms of discriminant `d` (only primitive ones when `primitive`).
pub fn reduced_forms(d: i128, primitive: bool) -> Vec<BinaryForm> {
    reduced_forms_with(d, primitive, None)
}

fn reduced_forms_with(d: i128, primitive: bool, sieve: Option<&DivisorSieve>) -> Vec<BinaryForm> {
    let s = isqrt(d);
    let mut out = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (d - b * b) / 4;
        let divs: Vec<i128> = match sieve {
            Some(sv) if (n as usize) <= sv.limit() => sv.divisors(n as usize).into_iter().map(|x| x as i128).collect(),
            _ => trial_divisors(n),
        };
        for a in divs {
            // Reduced: sqrt(D) - b < 2|a| < sqrt(D) + b.
            let two_a = 2 * a;
            if two_a > s + b || (two_a + b) * (two_a + b) <= d {
                continue;
            }
            for sgn in [1, -1] {
                let f = BinaryForm::new(sgn * a, b, -sgn * (n / a));
                if f.is_reduced() && (!primitive || f.is_primitive()) {
                    out.push(f);
                }
            }
        }
        b += 2;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of proper classes of primitive forms of discriminant `d`.
pub fn narrow_class_number(d: i128) -> Result<usize> {
    narrow_class_number_with(d, None)
}

fn narrow_class_number_with(d: i128, sieve: Option<&DivisorSieve>) -> Result<usize> {
    if !is_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a non-square discriminant")));
    }
    let forms = reduced_forms_with(d, true, sieve);
    let index: HashMap<BinaryForm, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for i in 0..forms.len() {
        if seen[i] {
            continue;
        }
        cycles += 1;
        let mut f = forms[i];
        loop {
            seen[index[&f]] = true;
            f = f.rho();
            if f == forms[i] {
                break;
            }
        }
    }
    Ok(cycles)
}

/// Dirichlet composition of two primitive forms of the same discriminant,
/// returned reduced and canonical.
pub fn compose(f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    let d = f.discriminant();
    if g.discriminant() != d {
        return Err(Error::Composition(d));
    }
    let bsum = (f.b + g.b) / 2;
    // x a1 + y a2 + z B = e.
    let g1 = f.a.extended_gcd(&g.a);
    let g2 = g1.gcd.extended_gcd(&bsum);
    let e = g2.gcd.abs();
    let sign = g2.gcd.signum();
    let (x, y, z) = (g1.x * g2.x * sign, g1.y * g2.x * sign, g2.y * sign);
    let a3 = f.a * g.a / (e * e);
    let num = x * f.a * g.b + y * g.a * f.b + z * (f.b * g.b + d) / 2;
    if num % e != 0 {
        return Err(Error::Composition(d));
    }
    let b3 = (num / e).rem_euclid(2 * a3.abs());
    if (b3 * b3 - d) % (4 * a3) != 0 {
        return Err(Error::Composition(d));
    }
    let c3 = (b3 * b3 - d) / (4 * a3);
    Ok(BinaryForm::new(a3, b3, c3).canonical())
}

/// One element of the narrow class group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormClass {
    /// Canonical reduced representative.
    pub form: BinaryForm,
    /// Index in [`ClassGroup::classes`].
    pub index: usize,
}

/// Characters `χ_j(g) = e(Σ_i j_i v_i(g) / m_i)` of the class group.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    /// `values[χ][A]`.
    pub values: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    /// Largest deviation of `Σ_A χ(A) χ'(A)* / h` from `δ_{χχ'}`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = self.values.len();
        let mut worst: f64 = 0.0;
        for i in 0..h {
            for j in 0..h {
                let s: Complex64 = (0..h).map(|a| self.values[i][a] * self.values[j][a].conj()).sum::<Complex64>() / h as f64;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - want).norm());
            }
        }
        worst
    }
}

/// The narrow class group `Cl⁺_D` with a cyclic decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGroup {
    pub d: i128,
    pub classes: Vec<FormClass>,
    /// `table[i][j]` is the index of the product of classes `i` and `j`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    /// Invariant orders `m_i` of the cyclic factors.
    pub orders: Vec<usize>,
    /// Exponent vector of each class in the cyclic decomposition.
    pub exponents: Vec<Vec<usize>>,
    pub characters: CharacterTable,
}

impl ClassGroup {
    pub fn h(&self) -> usize {
        self.classes.len()
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.h()).find(|&j| self.table[i][j] == self.identity).expect("group has inverses")
    }
}

/// Computes `Cl⁺_D`, its multiplication table, a decomposition into cyclic
/// factors and the full character table.
pub fn narrow_class_group(d: i128) -> Result<ClassGroup> {
    if !is_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a non-square discriminant")));
    }
    let mut reps: Vec<BinaryForm> = reduced_forms(d, true).iter().map(|f| f.canonical()).collect();
    reps.sort_unstable();
    reps.dedup();
    let h = reps.len();
    let index: HashMap<BinaryForm, usize> = reps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let lookup = |f: &BinaryForm| index.get(f).copied().ok_or(Error::Composition(d));
    let mut table = vec![vec![0usize; h]; h];
    for i in 0..h {
        for j in i..h {
            let k = lookup(&compose(&reps[i], &reps[j])?)?;
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    let b = if d % 2 == 0 { 0 } else { 1 };
    let identity = lookup(&BinaryForm::new(1, b, (b * b - d) / 4).canonical())?;
    if (0..h).any(|i| table[identity][i] != i) {
        return Err(Error::Composition(d));
    }
    let (orders, exponents) = cyclic_decomposition(&table, identity)?;
    let characters = character_table(&orders, &exponents);
    let classes = reps.iter().enumerate().map(|(i, f)| FormClass { form: *f, index: i }).collect();
    Ok(ClassGroup { d, classes, table, identity, orders, exponents, characters })
}

fn power(table: &[Vec<usize>], identity: usize, g: usize, n: usize) -> usize {
    (0..n).fold(identity, |acc, _| table[acc][g])
}

fn order(table: &[Vec<usize>], identity: usize, g: usize) -> usize {
    let mut x = g;
    let mut n = 1;
    while x != identity {
        x = table[x][g];
        n += 1;
    }
    n
}

/// Greedy decomposition: repeatedly take an element of maximal order modulo
/// the subgroup built so far and correct it to have that order exactly.
fn cyclic_decomposition(table: &[Vec<usize>], identity: usize) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let h = table.len();
    // Exponent vectors of the subgroup elements generated so far.
    let mut sub: Vec<Option<Vec<usize>>> = vec![None; h];
    sub[identity] = Some(Vec::new());
    let mut orders = Vec::new();
    let mut size = 1usize;
    while size < h {
        // Order of g modulo the subgroup.
        let rel_order = |g: usize| {
            let mut x = g;
            let mut n = 1;
            while sub[x].is_none() {
                x = table[x][g];
                n += 1;
            }
            n
        };
        let (g, m) = (0..h).map(|g| (g, rel_order(g))).max_by_key(|&(g, m)| (m, std::cmp::Reverse(g))).expect("h > 0");
        let gm = power(table, identity, g, m);
        // s in the subgroup with s^m = g^m, then g' = g s^{-1} has order m.
        let s = (0..h)
            .filter(|&s| sub[s].is_some())
            .find(|&s| power(table, identity, s, m) == gm)
            .ok_or(Error::SelfCheck("cyclic decomposition failed".into()))?;
        let s_inv = (0..h).find(|&j| table[s][j] == identity).expect("inverse exists");
        let gp = table[g][s_inv];
        debug_assert_eq!(order(table, identity, gp), m);
        let old: Vec<(usize, Vec<usize>)> =
            (0..h).filter_map(|x| sub[x].clone().map(|v| (x, v))).collect();
        let mut next = vec![None; h];
        let mut gk = identity;
        for k in 0..m {
            for (x, v) in &old {
                let y = table[*x][gk];
                let mut w = v.clone();
                w.push(k);
                next[y] = Some(w);
            }
            gk = table[gk][gp];
        }
        sub = next;
        orders.push(m);
        size *= m;
    }
    let exponents: Vec<Vec<usize>> = sub
        .into_iter()
        .map(|v| v.ok_or(Error::SelfCheck("decomposition does not cover the group".into())))
        .collect::<Result<_>>()?;
    Ok((orders, exponents))
}

fn character_table(orders: &[usize], exponents: &[Vec<usize>]) -> CharacterTable {
    let h = exponents.len();
    // Characters are indexed by exponent vectors in the same mixed radix.
    let mut labels: Vec<Vec<usize>> = vec![Vec::new()];
    for &m in orders {
        labels = labels
            .into_iter()
            .flat_map(|l| {
                (0..m).map(move |j| {
                    let mut l = l.clone();
                    l.push(j);
                    l
                })
            })
            .collect();
    }
    debug_assert_eq!(labels.len(), h);
    let values = labels
        .iter()
        .map(|j| {
            exponents
                .iter()
                .map(|v| {
                    let phase: f64 = j.iter().zip(v).zip(orders).map(|((&j, &v), &m)| (j * v % m) as f64 / m as f64).sum();
                    Complex64::from_polar(1.0, 2.0 * PI * phase)
                })
                .collect()
        })
        .collect();
    CharacterTable { values }
}

/// The canonical key of the geodesic `C_A`: trace `t`, content `u` and the
/// canonical form of `A`, computed without building the automorph matrix.
pub fn class_key_of_form(form: &BinaryForm, d: i128) -> Result<ClassKey> {
    if form.discriminant() != d {
        return Err(Error::Domain(format!("form {form:?} does not have discriminant {d}")));
    }
    if !form.is_primitive() {
        return Err(Error::Domain("form is not primitive".into()));
    }
    let (t, u) = pell_unit(d)?;
    if (t - form.b * u) % 2 != 0 {
        return Err(Error::SelfCheck(format!("automorph of {form:?} is not integral")));
    }
    Ok(ClassKey { trace: t, content: u, form: form.canonical() })
}

/// Exact check `t² − 4 = D u²` in arbitrary precision.
pub fn unit_identity_holds(d: i128, t: i128, u: i128) -> bool {
    let (t, u, d) = (BigInt::from(t), BigInt::from(u), BigInt::from(d));
    &t * &t - 4 == d * &u * &u
}

/// Largest trace whose automorph matrix can be formed in `i128` arithmetic.
pub const MAX_MATRIX_TRACE: i128 = 1 << 60;

/// The closed geodesic `C_A` of a form class: the class of its automorph
/// `[[(t − Bu)/2, −Cu], [Au, (t + Bu)/2]]`.
pub fn geodesic_of_class(form: &BinaryForm, d: i128) -> Result<GeodesicClass> {
    let key = class_key_of_form(form, d)?;
    if key.trace > MAX_MATRIX_TRACE {
        return Err(Error::Overflow("automorph unit too large for a matrix representative"));
    }
    let (t, u) = (key.trace, key.content);
    let g = GroupElement::new((t - form.b * u) / 2, -form.c * u, form.a * u, (t + form.b * u) / 2)?;
    let class = canonical_class(&g)?;
    if class.key != key {
        return Err(Error::SelfCheck(format!("automorph class of {form:?} has a different key")));
    }
    Ok(class)
}

/// The finite Plancherel identity `(1/h) Σ_χ |Σ_A χ(A) P_A|² = Σ_A |P_A|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlancherelReport {
    pub d: i128,
    pub h: usize,
    pub periods: Vec<Complex64>,
    /// `|Σ_A χ(A) P_A|²` per character.
    pub wide_moments: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// Some character sum is above the noise threshold.
    pub some_character_nonzero: bool,
    /// Some period is above the noise threshold.
    pub some_period_nonzero: bool,
}

impl PlancherelReport {
    /// The two non-vanishing statements agree.
    pub fn nonvanishing_consistent(&self) -> bool {
        self.some_character_nonzero == self.some_period_nonzero
    }
}

/// Evaluates the identity for given character values and periods.
pub fn plancherel_sides(d: i128, characters: &CharacterTable, periods: &[Complex64], noise: f64) -> PlancherelReport {
    let h = periods.len();
    let wide_moments: Vec<f64> = characters
        .values
        .iter()
        .map(|chi| chi.iter().zip(periods).map(|(c, p)| c * p).sum::<Complex64>().norm_sqr())
        .collect();
    let lhs = wide_moments.iter().sum::<f64>() / h as f64;
    let rhs: f64 = periods.iter().map(|p| p.norm_sqr()).sum();
    PlancherelReport {
        d,
        h,
        periods: periods.to_vec(),
        some_character_nonzero: wide_moments.iter().any(|m| m.sqrt() > noise),
        some_period_nonzero: periods.iter().any(|p| p.norm() > noise),
        wide_moments,
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
    }
}

/// Zero-detection threshold for periods computed at tolerance `tol`.
pub fn noise_threshold(tol: f64) -> f64 {
    100.0 * tol
}

/// The Plancherel report for the geodesic periods of `f` over `Cl⁺_D`.
pub fn waldspurger_moment(f: &AutomorphicForm, d: i128, tol: f64) -> Result<PlancherelReport> {
    let group = narrow_class_group(d)?;
    let periods: Vec<Complex64> = group
        .classes
        .iter()
        .map(|a| Ok(geodesic_period(f, &geodesic_of_class(&a.form, d)?, tol)?.value))
        .collect::<Result<_>>()?;
    Ok(plancherel_sides(d, &group.characters, &periods, noise_threshold(tol)))
}

/// `Σ_{D fundamental, ε_D ≤ X} h⁺(D)^k` with trend ratios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassNumberMoment {
    pub x: f64,
    pub k: u32,
    pub count: usize,
    pub sum: f64,
    /// `sum / Li(X²)` (first-moment shape).
    pub ratio_li: f64,
    /// `sum / ∫_2^X (t / log t)^k dt`.
    pub ratio_integral: f64,
}

/// Exact class-number moment over fundamental discriminants with `ε_D ≤ X`.
pub fn class_number_moments(x: f64, k: u32) -> Result<ClassNumberMoment> {
    if !(x.is_finite() && x <= 1e4) {
        return Err(Error::Domain(format!("X = {x} outside the supported range")));
    }
    if k > 2 {
        return Err(Error::Domain(format!("moment order {k} not supported")));
    }
    let discs = if x < (1.0 + 5f64.sqrt()) / 2.0 { Vec::new() } else { fundamental_discriminants_by_unit(x)? };
    let sum: f64 = discs.iter().map(|d| (d.h_plus as f64).powi(k as i32)).sum();
    let li = if x > 2.0 { log_integral(x * x) } else { 0.0 };
    let integral = if x > 2.0 {
        crate::quadrature::adaptive_gl(|t: f64| (t / t.ln()).powi(k as i32), 2.0, x, 8, 1e-10, 20).value
    } else {
        0.0
    };
    Ok(ClassNumberMoment {
        x,
        k,
        count: discs.len(),
        sum,
        ratio_li: if li > 0.0 { sum / li } else { 0.0 },
        ratio_integral: if integral > 0.0 { sum / integral } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert!(is_fundamental(5) && is_fundamental(12) && is_fundamental(8));
        assert!(!is_fundamental(20) && !is_fundamental(9) && !is_fundamental(7));
        assert_eq!(pell_unit(5).unwrap(), (3, 1));
        assert_eq!(pell_unit(12).unwrap(), (4, 1));
        assert_eq!(narrow_class_number(5).unwrap(), 1);
        assert_eq!(narrow_class_number(12).unwrap(), 2);
    }

    #[test]
    fn composition_identity_and_inverse() {
        let g = narrow_class_group(12).unwrap();
        assert_eq!(g.h(), 2);
        for i in 0..g.h() {
            assert_eq!(g.table[g.identity][i], i);
            let f = g.classes[i].form;
            let inv = BinaryForm::new(f.a, -f.b, f.c).canonical();
            assert_eq!(compose(&f, &inv).unwrap(), g.classes[g.identity].form);
        }
        assert!(g.characters.orthonormality_defect() < 1e-12);
    }
}
