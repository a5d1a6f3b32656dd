//! End-to-end verification of every bundled fixture, plus structural checks
//! that go beyond the golden-value comparisons.

use toricmirror_core::error::Error;
use toricmirror_core::fixtures::{load, verify_fixture, NAMES};
use toricmirror_core::toricring::hypersurface_ring;
use toricmirror_core::triangulation::enumerate_regular_triangulations;

fn assert_verified(name: &str) {
    let report = verify_fixture(name).unwrap();
    assert_eq!(report.fixture, name);
    assert!(!report.checks.is_empty());
    for check in &report.checks {
        assert!(
            check.ok,
            "{name}: {} expected {} got {}",
            check.label, check.expected, check.got
        );
    }
    assert!(report.passed());
}

#[test]
fn quintic_pipeline_matches_goldens() {
    assert_verified("quintic");
}

#[test]
fn weierstrass_pipeline_matches_goldens() {
    assert_verified("weierstrass");
}

#[test]
fn elliptic_lambda_pipeline_matches_goldens() {
    assert_verified("elliptic-lambda");
}

#[test]
fn k3_six_lines_pipeline_matches_goldens() {
    assert_verified("k3-six-lines");
}

#[test]
fn p4xp4_pipeline_matches_goldens() {
    assert_verified("p4xp4");
}

#[test]
fn square_toy_pipeline_matches_goldens() {
    assert_verified("square-toy");
}

#[test]
fn every_fixture_name_is_covered() {
    for name in NAMES {
        load(name).unwrap();
    }
}

/// The four-parameter K3 chart cannot carry a hypersurface ring: the chart
/// has 4 coordinates but the surface has 20 algebraic classes, so the
/// divisor restriction is rejected rather than silently truncated.
#[test]
fn k3_chart_admits_no_hypersurface_ring() {
    let fixture = load("k3-six-lines").unwrap();
    let triangulations = enumerate_regular_triangulations(&fixture.config).unwrap();
    let base = fixture.base_index(&triangulations);
    let chart = fixture.chart_basis(&triangulations).unwrap();
    let err =
        hypersurface_ring(&fixture.config, &triangulations[base], &chart, (20, 0)).unwrap_err();
    assert!(matches!(err, Error::TwistedSectorMismatch { .. }), "got {err}");
}
