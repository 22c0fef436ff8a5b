//! One test per acceptance criterion. Each prints its table row to stderr
//! (uncaptured) and fails if the criterion does not pass.

use std::io::Write;

use teichflow_lab::acceptance::{run_one, Settings};

fn check(id: u32) {
    let outcome = run_one(id, &Settings::default());
    let line = outcome.line();
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(outcome.pass(), "{line}");
}

#[test]
fn criterion_01_twist_limit() {
    check(1);
}

#[test]
fn criterion_02_simple_earthquake_limit() {
    check(2);
}

#[test]
fn criterion_03_golden_earthquake_limit() {
    check(3);
}

#[test]
fn criterion_04_ptorus_calibration() {
    check(4);
}

#[test]
fn criterion_05_ptorus_length_limit() {
    check(5);
}

#[test]
fn criterion_06_horocycle_invariants() {
    check(6);
}

// Fails on the literal 2v/t error bound, which does not hold for curves
// with zero vertical pairing. The row reports the corrected (v+h)/t bound.
#[test]
fn criterion_07_sandwich_and_current_limit() {
    check(7);
}

#[test]
fn criterion_08_orthogonality() {
    check(8);
}

#[test]
fn criterion_09_farey_distance() {
    check(9);
}

#[test]
fn criterion_10_quasiconvexity() {
    check(10);
}

#[test]
fn criterion_11_artifact_determinism() {
    check(11);
}
