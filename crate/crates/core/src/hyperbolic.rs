//! Exact PSL2(Z) arithmetic and the hyperbolic geometry built on top of it.
//!
//! Group elements carry `i128` entries and every operation is overflow
//! checked. Real-valued geometry (Möbius action, geodesic flow, strip
//! lengths) is done in binary64.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// Largest number of flip/translate steps the reduction loop may take.
pub const REDUCTION_CAP: usize = 10_000;

/// An element of PSL2(Z), stored through its sign-normalised representative
/// (c > 0, or c = 0 and d > 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

fn cmul(x: i128, y: i128) -> Result<i128> {
    x.checked_mul(y).ok_or(Error::Overflow("matrix product"))
}

fn cadd(x: i128, y: i128) -> Result<i128> {
    x.checked_add(y).ok_or(Error::Overflow("matrix sum"))
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };
    /// The inversion z -> -1/z.
    pub const S: GroupElement = GroupElement { a: 0, b: -1, c: 1, d: 0 };
    /// The translation z -> z + 1.
    pub const T: GroupElement = GroupElement { a: 1, b: 1, c: 0, d: 1 };

    /// Builds the normalised element from a raw integer matrix `[[a, b], [c, d]]`.
    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        let det = cmul(a, d)?
            .checked_sub(cmul(b, c)?)
            .ok_or(Error::Overflow("determinant"))?;
        if det != 1 {
            return Err(Error::Determinant(det));
        }
        let flip = c < 0 || (c == 0 && d < 0);
        if flip {
            let neg = |v: i128| v.checked_neg().ok_or(Error::Overflow("negation"));
            Ok(GroupElement { a: neg(a)?, b: neg(b)?, c: neg(c)?, d: neg(d)? })
        } else {
            Ok(GroupElement { a, b, c, d })
        }
    }

    pub fn translation(n: i128) -> Self {
        GroupElement { a: 1, b: n, c: 0, d: 1 }
    }

    /// Signed trace of the normalised representative.
    pub fn trace(&self) -> i128 {
        self.a + self.d
    }

    pub fn abs_trace(&self) -> i128 {
        self.trace().abs()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.abs_trace() > 2
    }

    pub fn mul(&self, o: &GroupElement) -> Result<GroupElement> {
        let a = cadd(cmul(self.a, o.a)?, cmul(self.b, o.c)?)?;
        let b = cadd(cmul(self.a, o.b)?, cmul(self.b, o.d)?)?;
        let c = cadd(cmul(self.c, o.a)?, cmul(self.d, o.c)?)?;
        let d = cadd(cmul(self.c, o.b)?, cmul(self.d, o.d)?)?;
        GroupElement::new(a, b, c, d)
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.d, -self.b, -self.c, self.a).expect("inverse of a unimodular matrix")
    }

    /// `self^m` for m >= 0 by repeated squaring.
    pub fn pow(&self, mut m: u32) -> Result<GroupElement> {
        let mut acc = GroupElement::IDENTITY;
        let mut base = *self;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// The conjugate `s * self * s^-1`.
    pub fn conjugate_by(&self, s: &GroupElement) -> Result<GroupElement> {
        s.mul(self)?.mul(&s.inverse())
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix { a: self.a as f64, b: self.b as f64, c: self.c as f64, d: self.d as f64 }
    }

    /// Automorphy factor `cz + d`.
    pub fn cocycle(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Alias for [`GroupElement::new`].
pub fn normalize(m: [[i128; 2]; 2]) -> Result<GroupElement> {
    GroupElement::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Length `2 acosh(|t|/2)` of the closed geodesic attached to `g`.
pub fn geodesic_length(g: &GroupElement) -> Result<f64> {
    if !g.is_hyperbolic() {
        return Err(Error::NotHyperbolic(g.abs_trace()));
    }
    Ok(length_from_trace(g.abs_trace()))
}

/// `2 log((t + sqrt(t^2 - 4)) / 2)` for an integer trace `t > 2`.
pub fn length_from_trace(t: i128) -> f64 {
    2.0 * (t as f64 / 2.0).acosh()
}

/// A real quadratic irrational `(p + sqrt(d)) / q` with integer data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadIrrational {
    pub p: i128,
    pub q: i128,
    pub d: i128,
}

impl QuadIrrational {
    pub fn value(&self) -> f64 {
        (self.p as f64 + (self.d as f64).sqrt()) / self.q as f64
    }

    /// Exact equality of the represented real numbers.
    pub fn same_value(&self, o: &QuadIrrational) -> bool {
        let sq = |v: i128| -> Option<i128> {
            let r = isqrt(v);
            (r * r == v).then_some(r)
        };
        match (sq(self.d), sq(o.d)) {
            // Both rational: compare (p1 + r1) q2 and (p2 + r2) q1.
            (Some(r1), Some(r2)) => (self.p + r1) * o.q == (o.p + r2) * self.q,
            (None, None) => {
                self.p * o.q == o.p * self.q
                    && (self.q > 0) == (o.q > 0)
                    && self.d * o.q * o.q == o.d * self.q * self.q
            }
            _ => false,
        }
    }

    /// Exact image under the Möbius action of `s`.
    pub fn apply(&self, s: &GroupElement) -> QuadIrrational {
        // s((p + r)/q) = (P1 + alpha r) / (P2 + gamma r) with r = sqrt(d).
        let (al, be, ga, de) = (s.a, s.b, s.c, s.d);
        let p1 = al * self.p + be * self.q;
        let p2 = ga * self.p + de * self.q;
        // Multiply through by the conjugate (P2 - gamma r).
        let num_rat = p1 * p2 - al * ga * self.d;
        let num_irr = al * p2 - ga * p1;
        let den = p2 * p2 - ga * ga * self.d;
        let (p, q) = if num_irr >= 0 { (num_rat, den) } else { (-num_rat, -den) };
        QuadIrrational { p, q, d: num_irr * num_irr * self.d }
    }
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0, "isqrt of a negative number");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The geodesic joining the two real fixed points of a hyperbolic element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicAxis {
    /// The smaller endpoint, `(p - sqrt(D)) / q` with `q > 0`.
    pub endpoint_minus: QuadIrrational,
    /// The larger endpoint, `(p + sqrt(D)) / q` with `q > 0`.
    pub endpoint_plus: QuadIrrational,
    /// Center as the exact fraction `(num, den)`.
    pub center: (i128, i128),
    pub radius: f64,
    /// `true` when the flow of the generating element runs from the minus
    /// endpoint to the plus endpoint.
    pub forward: bool,
}

impl GeodesicAxis {
    /// Axis of a hyperbolic element.
    pub fn of(g: &GroupElement) -> Result<Self> {
        if !g.is_hyperbolic() {
            return Err(Error::NotHyperbolic(g.abs_trace()));
        }
        if g.c == 0 {
            return Err(Error::VerticalAxis);
        }
        let t = g.trace();
        let disc = t * t - 4;
        let p = g.a - g.d;
        let q = 2 * g.c;
        Ok(GeodesicAxis {
            endpoint_minus: QuadIrrational { p: -p, q: -q, d: disc },
            endpoint_plus: QuadIrrational { p, q, d: disc },
            center: (p, q),
            radius: (disc as f64).sqrt() / q as f64,
            // For c > 0 the larger fixed point attracts iff the trace is positive.
            forward: t > 0,
        })
    }

    /// Axis with endpoints `(p ± sqrt(d)) / q`, `q > 0`, oriented from minus to plus.
    pub fn from_exact(p: i128, q: i128, d: i128) -> Self {
        assert!(q > 0 && d > 0);
        GeodesicAxis {
            endpoint_minus: QuadIrrational { p: -p, q: -q, d },
            endpoint_plus: QuadIrrational { p, q, d },
            center: (p, q),
            radius: (d as f64).sqrt() / q as f64,
            forward: true,
        }
    }

    pub fn minus(&self) -> f64 {
        let e = &self.endpoint_minus;
        // (-p + sqrt d)/(-q) = (p - sqrt d)/q
        (-(e.p as f64) - (e.d as f64).sqrt()) / -(e.q as f64)
    }

    pub fn plus(&self) -> f64 {
        self.endpoint_plus.value()
    }

    pub fn center_value(&self) -> f64 {
        self.center.0 as f64 / self.center.1 as f64
    }

    /// The apex `center + i radius`.
    pub fn apex(&self) -> Complex64 {
        Complex64::new(self.center_value(), self.radius)
    }

    /// The element `g0` of SL2(R) with `g0(0)` the source endpoint,
    /// `g0(inf)` the target endpoint and `g0(i)` the apex.
    pub fn frame(&self) -> RealMatrix {
        // Work relative to the center to keep cancellation small.
        let c0 = self.center_value();
        let r = self.radius;
        let s = 1.0 / (2.0 * r).sqrt();
        if self.forward {
            let (es, et) = (c0 - r, c0 + r);
            RealMatrix { a: et * s, b: es * s, c: s, d: s }
        } else {
            let (es, et) = (c0 + r, c0 - r);
            RealMatrix { a: et * s, b: -es * s, c: s, d: -s }
        }
    }
}

/// Alias for [`GeodesicAxis::of`].
pub fn axis(g: &GroupElement) -> Result<GeodesicAxis> {
    GeodesicAxis::of(g)
}

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("point ({x}, {y}) is not in the upper half-plane")));
        }
        Ok(UpperHalfPlanePoint { x, y })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Self {
        UpperHalfPlanePoint { x: z.re, y: z.im }
    }
}

/// Hyperbolic distance between two points of the upper half-plane.
pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm_sqr();
    (1.0 + num / (2.0 * z.im * w.im)).acosh()
}

/// Möbius action of an integer matrix.
pub fn mobius(g: &GroupElement, z: UpperHalfPlanePoint) -> UpperHalfPlanePoint {
    UpperHalfPlanePoint::from_complex(g.to_real().apply(z.z()))
}

/// A real 2x2 matrix of determinant one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMatrix {
    pub const IDENTITY: RealMatrix = RealMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn mul(&self, o: &RealMatrix) -> RealMatrix {
        RealMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// The diagonal element `a_t = diag(e^{t/2}, e^{-t/2})`.
    pub fn geodesic_flow(t: f64) -> RealMatrix {
        let e = (t / 2.0).exp();
        RealMatrix { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    /// Rotation `k_theta = [[cos, -sin], [sin, cos]]` fixing `i`.
    pub fn rotation(theta: f64) -> RealMatrix {
        let (s, c) = theta.sin_cos();
        RealMatrix { a: c, b: -s, c: s, d: c }
    }

    /// Unit automorphy factor `(c z + d) / |c z + d|`.
    pub fn unit_cocycle(&self, z: Complex64) -> Complex64 {
        let w = z * self.c + self.d;
        w / w.norm()
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

/// Closed-form length of the part of the half-circle of radius `r` lying in
/// the band `T <= Im z <= 2T`.
pub fn strip_intersection_length(r: f64, t: f64) -> f64 {
    let f = |h: f64| if r > h { 2.0 * (r / h).acosh() } else { 0.0 };
    f(t) - f(2.0 * t)
}

/// The region `{|Re z| <= 1/2, T <= Im z <= 2T}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripRegion {
    pub t: f64,
}

impl StripRegion {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("strip height {t} must be at least 1")));
        }
        Ok(StripRegion { t })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re.abs() <= 0.5 && z.im >= self.t && z.im <= 2.0 * self.t
    }

    /// Hyperbolic area `1/(2T)`.
    pub fn area(&self) -> f64 {
        0.5 / self.t
    }
}

/// Moves `z` into the standard fundamental domain.
///
/// Returns `(z', sigma)` with `sigma z = z'`, `|Re z'| <= 1/2`, `|z'| >= 1`.
pub fn reduce_to_fundamental_domain(z: UpperHalfPlanePoint) -> Result<(UpperHalfPlanePoint, GroupElement)> {
    let (w, s) = reduce_complex(z.z())?;
    Ok((UpperHalfPlanePoint::from_complex(w), s))
}

/// [`reduce_to_fundamental_domain`] on a raw complex number.
pub fn reduce_complex(z: Complex64) -> Result<(Complex64, GroupElement)> {
    let (mut x, mut y) = (z.re, z.im);
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("point {z} is not in the upper half-plane")));
    }
    // Accumulated sigma, kept as plain integers and normalised at the end.
    let (mut sa, mut sb, mut sc, mut sd) = (1i128, 0i128, 0i128, 1i128);
    for _ in 0..REDUCTION_CAP {
        let n = x.round();
        if n != 0.0 {
            x -= n;
            let n = n as i128;
            sa -= n * sc;
            sb -= n * sd;
        }
        if x > 0.5 {
            x -= 1.0;
            sa -= sc;
            sb -= sd;
        } else if x < -0.5 {
            x += 1.0;
            sa += sc;
            sb += sd;
        }
        let r2 = x * x + y * y;
        if r2 >= 1.0 {
            let g = GroupElement::new(sa, sb, sc, sd)?;
            return Ok((Complex64::new(x, y), g));
        }
        let nx = -x / r2;
        let ny = y / r2;
        if nx * nx + ny * ny < 1.0 && nx.abs() <= 0.5 {
            // Rounding left us just inside the unit circle on its boundary arc;
            // snap to the arc, which moves the point by an ulp or so.
            x = nx;
            y = (1.0 - x * x).sqrt();
            while x * x + y * y < 1.0 {
                y = f64::from_bits(y.to_bits() + 1);
            }
            let (na, nb, nc, nd) = (-sc, -sd, sa, sb);
            let g = GroupElement::new(na, nb, nc, nd)?;
            return Ok((Complex64::new(x, y), g));
        }
        x = nx;
        y = ny;
        let (na, nb, nc, nd) = (-sc, -sd, sa, sb);
        sa = na;
        sb = nb;
        sc = nc;
        sd = nd;
    }
    Err(Error::ReductionCap(REDUCTION_CAP))
}

/// Point `z(t) = g0 (i e^t)` on the axis and the matrix `g0 a_t`.
pub fn geodesic_parametrization(ax: &GeodesicAxis, t: f64) -> (UpperHalfPlanePoint, RealMatrix) {
    let g = ax.frame().mul(&RealMatrix::geodesic_flow(t));
    let z = g.apply(Complex64::new(0.0, 1.0));
    (UpperHalfPlanePoint::from_complex(z), g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(a: i128, b: i128, c: i128, d: i128) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize([[-1, 0], [0, -1]]).unwrap(), GroupElement::IDENTITY);
        assert_eq!(normalize([[0, -1], [1, 0]]).unwrap(), GroupElement::S);
        assert_eq!(normalize([[-2, -1], [-1, -1]]).unwrap(), ge(2, 1, 1, 1));
        assert!(matches!(normalize([[2, 0], [0, 1]]), Err(Error::Determinant(2))));
    }

    #[test]
    fn length_examples() {
        let g = ge(2, 1, 1, 1);
        let l = geodesic_length(&g).unwrap();
        assert!((l - 1.9248473002).abs() < 1e-9);
        assert!((geodesic_length(&g.pow(2).unwrap()).unwrap() - 2.0 * l).abs() < 1e-12);
        assert!(geodesic_length(&GroupElement::T).is_err());
    }

    #[test]
    fn axis_examples() {
        let ax = axis(&ge(2, 1, 1, 1)).unwrap();
        let s5 = 5f64.sqrt();
        assert!((ax.plus() - (1.0 + s5) / 2.0).abs() < 1e-15);
        assert!((ax.minus() - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!((ax.radius - s5 / 2.0).abs() < 1e-15);
        assert!(axis(&GroupElement::S).is_err());
    }

    #[test]
    fn mobius_examples() {
        let i = UpperHalfPlanePoint::new(0.0, 1.0).unwrap();
        assert_eq!(mobius(&GroupElement::T, i), UpperHalfPlanePoint { x: 1.0, y: 1.0 });
        let w = mobius(&GroupElement::S, UpperHalfPlanePoint { x: 0.0, y: 0.5 });
        assert!((w.x).abs() < 1e-15 && (w.y - 2.0).abs() < 1e-15);
    }

    #[test]
    fn strip_examples() {
        assert_eq!(strip_intersection_length(0.5, 1.0), 0.0);
        assert_eq!(strip_intersection_length(1.0, 1.0), 0.0);
        let v = strip_intersection_length(2.0, 1.0);
        assert!((v - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let (z, s) = reduce_to_fundamental_domain(UpperHalfPlanePoint { x: 0.0, y: 2.0 }).unwrap();
        assert_eq!((z.x, z.y, s), (0.0, 2.0, GroupElement::IDENTITY));
        let (z, s) = reduce_to_fundamental_domain(UpperHalfPlanePoint { x: 1.0, y: 2.0 }).unwrap();
        assert_eq!((z.x, z.y, s), (0.0, 2.0, ge(1, -1, 0, 1)));
        let (z, s) = reduce_to_fundamental_domain(UpperHalfPlanePoint { x: 0.0, y: 0.5 }).unwrap();
        assert!(z.x.abs() < 1e-15 && (z.y - 2.0).abs() < 1e-15);
        assert_eq!(s, GroupElement::S);
    }

    #[test]
    fn parametrization_examples() {
        let ax = GeodesicAxis::from_exact(0, 1, 1);
        let (z, _) = geodesic_parametrization(&ax, 0.0);
        assert!((z.x).abs() < 1e-15 && (z.y - 1.0).abs() < 1e-15);
        let (z1, _) = geodesic_parametrization(&ax, 1.0);
        assert!((hyperbolic_distance(z.z(), z1.z()) - 1.0).abs() < 1e-12);
        let ax = axis(&ge(2, 1, 1, 1)).unwrap();
        let (z, _) = geodesic_parametrization(&ax, 0.0);
        assert!((z.x - 0.5).abs() < 1e-15 && (z.y - 5f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn flow_is_translated_by_generator() {
        // g g0 = g0 a_l: the generator pushes the base point forward by its length.
        for g in [ge(2, 1, 1, 1), ge(-5, 2, -3, 1), ge(5, 2, 2, 1)] {
            let ax = axis(&g).unwrap();
            let l = geodesic_length(&g).unwrap();
            let (z0, _) = geodesic_parametrization(&ax, 0.0);
            let (zl, _) = geodesic_parametrization(&ax, l);
            let w = g.to_real().apply(z0.z());
            assert!((w - zl.z()).norm() < 1e-12 * (1.0 + w.norm()), "{g}");
        }
    }
}
