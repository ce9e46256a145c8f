//! The thirteen acceptance criteria at full scale. Prints one pass/fail line
//! per criterion.
//!
//! The degree law with bound `1 + ⌊5/c⌋` is false (for example `c = 9`,
//! `θ ≡ 2`, `N = 10` has `deg = 1` and `E = −4/3`), so criterion 1 is
//! expected to fail. For it the test asserts instead that the failure is
//! exactly the off-by-one in the bound: no coset exceeds `1 + ⌈5/c⌉` and the
//! degrees are consistent. Every other criterion must pass.

use std::io::Write;

use geolab::verify::{
    degree_law_violations, expected_failure_explained, run_primary_suite, VerifyConfig, EXPECTED_FAILURES,
};

/// Writes to the stderr handle directly so the lines survive output capture.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

#[test]
fn acceptance_criteria() {
    let cfg = VerifyConfig::default();
    let outcomes = run_primary_suite(&cfg, |o| report(&o.line()));
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    report(&format!("{passed} of {} criteria passed", outcomes.len()));

    let unexpected: Vec<u8> =
        outcomes.iter().filter(|o| !o.passed() && !EXPECTED_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
    for o in outcomes.iter().filter(|o| !o.passed()) {
        assert!(expected_failure_explained(o, &cfg), "criterion {} failed beyond its known defect", o.id);
        report(&format!("criterion {}: failure limited to the known defect in the stated bound", o.id));
    }
}

#[test]
fn degree_law_counterexample() {
    use geolab::enumeration::DoubleCoset;
    let x = DoubleCoset::new(9, 1).unwrap();
    assert_eq!(x.theta_mod_c, 2);
    assert_eq!(x.degree(10), 1);
    let e: f64 = 1.0 - 21.0 / 9.0;
    assert!(e.abs() > 1.0 && e.abs() <= 2.0);
    let c = degree_law_violations(10);
    assert!(c.floor_bound > 0);
    assert_eq!(c.ceil_bound, 0);
}
