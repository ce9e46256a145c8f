//! Indefinite integral binary quadratic forms `ax^2 + bxy + cy^2`.
//!
//! Reduction follows the classical rho operator: a form is reduced when
//! `0 < b < sqrt(D)` and `sqrt(D) - b < 2|a| < sqrt(D) + b`. All comparisons
//! with `sqrt(D)` are done exactly via the integer square root, which is
//! valid because the discriminants met here are never perfect squares.

use crate::hyperbolic::isqrt;
use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// A proper change of variables `[[p, q], [r, s]]` (determinant one).
pub type Transform = [[i128; 2]; 2];

pub const IDENTITY_TRANSFORM: Transform = [[1, 0], [0, 1]];

fn compose(m: &Transform, n: &Transform) -> Transform {
    [
        [m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]],
        [m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]],
    ]
}

impl BinaryForm {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn discriminant(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i128 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn negate(&self) -> Self {
        BinaryForm { a: -self.a, b: -self.b, c: -self.c }
    }

    /// The form `f(px + qy, rx + sy)`.
    pub fn transform(&self, m: &Transform) -> Self {
        let (p, q, r, s) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        BinaryForm {
            a: self.eval(p, r),
            b: 2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            c: self.eval(q, s),
        }
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        let s = isqrt(d);
        let two_a = 2 * self.a.abs();
        self.b > 0
            && self.b <= s
            && (two_a + self.b) * (two_a + self.b) > d
            && (two_a - self.b <= 0 || (two_a - self.b) * (two_a - self.b) < d)
    }

    /// One rho step together with its transformation matrix.
    pub fn rho_with_transform(&self) -> (Self, Transform) {
        let d = self.discriminant();
        let s = isqrt(d);
        let c = self.c;
        assert!(c != 0, "rho applied to a form with c = 0");
        let m = 2 * c.abs();
        let r = if c * c > d {
            // r = -b mod 2|c| placed in (-|c|, |c|].
            let mut r = (-self.b).rem_euclid(m);
            if r > c.abs() {
                r -= m;
            }
            r
        } else {
            s - (s + self.b).rem_euclid(m)
        };
        let shift = (r + self.b) / (2 * c);
        let next = BinaryForm { a: c, b: r, c: (r * r - d) / (4 * c) };
        (next, [[0, -1], [1, shift]])
    }

    pub fn rho(&self) -> Self {
        self.rho_with_transform().0
    }

    /// A reduced form properly equivalent to `self` and the transformation
    /// `m` with `self.transform(m) == reduced`.
    pub fn reduce_with_transform(&self) -> (Self, Transform) {
        let mut f = *self;
        let mut m = IDENTITY_TRANSFORM;
        let mut guard = 0usize;
        while !f.is_reduced() {
            let (g, step) = f.rho_with_transform();
            f = g;
            m = compose(&m, &step);
            guard += 1;
            assert!(guard < 100_000, "form reduction failed to terminate for {self:?}");
        }
        (f, m)
    }

    pub fn reduce(&self) -> Self {
        let mut f = *self;
        let mut guard = 0usize;
        while !f.is_reduced() {
            f = f.rho();
            guard += 1;
            assert!(guard < 100_000, "form reduction failed to terminate for {self:?}");
        }
        f
    }

    /// The rho cycle of a reduced form, starting with the form itself.
    pub fn cycle(&self) -> Vec<Self> {
        debug_assert!(self.is_reduced());
        let mut out = vec![*self];
        let mut f = self.rho();
        while f != *self {
            out.push(f);
            f = f.rho();
        }
        out
    }

    /// Lexicographically least form on the reduction cycle of `self`.
    pub fn canonical(&self) -> Self {
        let start = self.reduce();
        let mut best = start;
        let mut f = start.rho();
        while f != start {
            if f < best {
                best = f;
            }
            f = f.rho();
        }
        best
    }

    /// Whether two forms are properly equivalent.
    pub fn equivalent(&self, o: &Self) -> bool {
        self.discriminant() == o.discriminant() && self.canonical() == o.canonical()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_preserves_discriminant_and_class() {
        let f = BinaryForm::new(7, 31, -5);
        let (g, m) = f.reduce_with_transform();
        assert!(g.is_reduced());
        assert_eq!(g.discriminant(), f.discriminant());
        assert_eq!(f.transform(&m), g);
        assert_eq!(m[0][0] * m[1][1] - m[0][1] * m[1][0], 1);
    }

    #[test]
    fn principal_cycle_d5() {
        let f = BinaryForm::new(1, 1, -1).reduce();
        let cyc = f.cycle();
        assert!(cyc.iter().all(|g| g.is_reduced() && g.discriminant() == 5));
        assert!(cyc.contains(&BinaryForm::new(-1, 1, 1)));
    }

    #[test]
    fn d12_has_two_classes() {
        let p = BinaryForm::new(1, 2, -2);
        let q = BinaryForm::new(-1, 2, 2);
        assert!(!p.equivalent(&q));
        assert!(p.equivalent(&BinaryForm::new(-2, 2, 1)));
    }
}
