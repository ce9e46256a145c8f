//! Values from independent high-precision computations, frozen here.
//!
//! * `K_{ir}(x)` from an arbitrary-precision Bessel routine.
//! * Vertical periods of Δ by adaptive quadrature of `Δ(a/c + iy) y^5`, with
//!   Δ evaluated from its product expansion after reduction to the
//!   fundamental domain.
//! * Narrow class numbers from the analytic class number formula
//!   (log-sine sums for `L(1, χ_D)`) and the norm of the fundamental unit.

#![allow(clippy::excessive_precision)]

use geolab::automorphic::AutomorphicForm;
use geolab::periods::vertical_period;
use geolab::quadratic::{is_fundamental, narrow_class_number, pell_unit};
use geolab::special::bessel_k_imag;

const BESSEL: [(f64, f64, f64); 30] = [
    (0.5, 0.1, 1.573689487378572078),
    (0.5, 1.0, 0.38404301690509269863),
    (0.5, 5.0, 0.0036074271313261712002),
    (0.5, 9.5, 0.000029683443578849536052),
    (0.5, 15.0, 9.7405692452758305607e-8),
    (0.5, 30.0, 2.1237528932394136301e-14),
    (1.0, 0.1, 0.22538188530156776969),
    (1.0, 1.0, 0.28942803702599212763),
    (1.0, 5.0, 0.0033670999885610447448),
    (1.0, 9.5, 0.000028587084302472569401),
    (1.0, 15.0, 9.5073840784874525327e-8),
    (1.0, 30.0, 2.0977904626674200832e-14),
    (9.533695261353557, 0.1, -1.1294090222818062231e-7),
    (9.533695261353557, 1.0, 1.2779928215119844664e-7),
    (9.533695261353557, 5.0, -2.7507076322173909061e-7),
    (9.533695261353557, 9.5, 2.1081927084813514164e-7),
    (9.533695261353557, 15.0, 4.7451429795510110118e-9),
    (9.533695261353557, 30.0, 4.7468673439801434181e-15),
    (13.7797513519, 0.1, 2.6850960267510707493e-10),
    (13.7797513519, 1.0, 2.5915217522574476031e-10),
    (13.7797513519, 5.0, -2.7812262336009951789e-10),
    (13.7797513519, 9.5, -8.3595660067351155141e-11),
    (13.7797513519, 15.0, 1.3193334776426846046e-10),
    (13.7797513519, 30.0, 8.9802174592537487738e-16),
    (20.0, 0.1, 1.0132437403052950754e-15),
    (20.0, 1.0, -1.1699083627287349295e-14),
    (20.0, 5.0, -8.2646568034237979036e-15),
    (20.0, 9.5, -1.2943712281467163582e-14),
    (20.0, 15.0, -4.564848969604686863e-15),
    (20.0, 30.0, 2.3367689472259342889e-17),
];

/// In the oscillatory range the natural size of `K_{ir}` is `e^{−πr/2}`;
/// errors are measured against the larger of that envelope and the value.
#[test]
fn bessel_k_imaginary_order() {
    for (r, x, want) in BESSEL {
        let got = bessel_k_imag(r, x);
        let scale = if x < r + 5.0 { want.abs().max((-std::f64::consts::FRAC_PI_2 * r).exp()) } else { want.abs() };
        assert!((got - want).abs() <= 1e-10 * scale, "K_i{r}({x}) = {got:e}, expected {want:e}");
    }
}

const VERTICAL_DELTA: [(i64, i64, f64, f64); 4] = [
    (0, 1, 1.544879360395027206e-3, 0.0),
    (1, 3, -7.4383080315316124735e-4, 0.0),
    (2, 5, -1.955199318515946432e-3, 5.270585353982159817e-3),
    (3, 7, -2.3157104615000845125e-3, 4.8999164726584903397e-3),
];

#[test]
fn vertical_periods_of_delta() {
    let f = AutomorphicForm::delta(400);
    for (a, c, re, im) in VERTICAL_DELTA {
        let v = vertical_period(&f, a, c, 1e-13).unwrap().value;
        assert!((v.re - re).abs() < 1e-12 && (v.im - im).abs() < 1e-12, "L({a}/{c}) = {v}, expected {re} + {im}i");
    }
}

const NARROW_CLASS_NUMBERS: [(i128, usize); 153] = [
    (5, 1), (8, 1), (12, 2), (13, 1), (17, 1), (21, 2), (24, 2), (28, 2), (29, 1), (33, 2), (37, 1), (40, 2), (41, 1),
    (44, 2), (53, 1), (56, 2), (57, 2), (60, 4), (61, 1), (65, 2), (69, 2), (73, 1), (76, 2), (77, 2), (85, 2), (88, 2),
    (89, 1), (92, 2), (93, 2), (97, 1), (101, 1), (104, 2), (105, 4), (109, 1), (113, 1), (120, 4), (124, 2), (129, 2),
    (133, 2), (136, 4), (137, 1), (140, 4), (141, 2), (145, 4), (149, 1), (152, 2), (156, 4), (157, 1), (161, 2),
    (165, 4), (168, 4), (172, 2), (173, 1), (177, 2), (181, 1), (184, 2), (185, 2), (188, 2), (193, 1), (197, 1),
    (201, 2), (204, 4), (205, 4), (209, 2), (213, 2), (217, 2), (220, 4), (221, 4), (229, 3), (232, 2), (233, 1),
    (236, 2), (237, 2), (241, 1), (248, 2), (249, 2), (253, 2), (257, 3), (264, 4), (265, 2), (268, 2), (269, 1),
    (273, 4), (277, 1), (280, 4), (281, 1), (284, 2), (285, 4), (293, 1), (296, 2), (301, 2), (305, 4), (309, 2),
    (312, 4), (313, 1), (316, 6), (317, 1), (321, 6), (328, 4), (329, 2), (332, 2), (337, 1), (341, 2), (344, 2),
    (345, 4), (348, 4), (349, 1), (353, 1), (357, 4), (364, 4), (365, 2), (373, 1), (376, 2), (377, 4), (380, 4),
    (381, 2), (385, 4), (389, 1), (393, 2), (397, 1), (401, 5), (408, 4), (409, 1), (412, 2), (413, 2), (417, 2),
    (421, 1), (424, 2), (428, 2), (429, 4), (433, 1), (437, 2), (440, 4), (444, 4), (445, 4), (449, 1), (453, 2),
    (456, 4), (457, 1), (460, 4), (461, 1), (465, 4), (469, 6), (472, 2), (473, 6), (476, 4), (481, 2), (485, 2),
    (488, 2), (489, 2), (492, 4), (493, 2), (497, 2),
];

#[test]
fn narrow_class_numbers_match_analytic_formula() {
    let fundamental: Vec<i128> = (5..=500).filter(|&d| is_fundamental(d)).collect();
    assert_eq!(fundamental, NARROW_CLASS_NUMBERS.iter().map(|p| p.0).collect::<Vec<_>>());
    for (d, h) in NARROW_CLASS_NUMBERS {
        assert_eq!(narrow_class_number(d).unwrap(), h, "h⁺({d})");
    }
}

/// Smallest `u >= 1` with `Du² + 4` a perfect square, by direct search.
fn brute_force_unit(d: i128) -> (i128, i128) {
    let mut u: i128 = 1;
    loop {
        let v = d * u * u + 4;
        let t = (v as f64).sqrt() as i128;
        for s in [t - 1, t, t + 1] {
            if s > 0 && s * s == v {
                return (s, u);
            }
        }
        u += 1;
    }
}

#[test]
fn pell_units_by_exhaustive_search() {
    for d in (5..=100).filter(|&d| is_fundamental(d)) {
        assert_eq!(pell_unit(d).unwrap(), brute_force_unit(d), "D = {d}");
    }
}
