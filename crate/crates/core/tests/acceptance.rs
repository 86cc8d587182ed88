//! Acceptance suite: one test per criterion, printing a pass/fail line.
//! The same checks back the CLI `verify-all` subcommand.

use rdtoeplitz::verify;

fn assert_criterion(result: verify::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_1_spectral_closed_forms() {
    assert_criterion(verify::criterion_spectral());
}

#[test]
fn criterion_2_minor_recursion_identity() {
    assert_criterion(verify::criterion_minor_recursion());
}

#[test]
fn criterion_3_derivative_closed_forms() {
    assert_criterion(verify::criterion_derivatives());
}

#[test]
fn criterion_4_condition_soundness() {
    assert_criterion(verify::criterion_condition_soundness());
}

#[test]
fn criterion_5_simulator_convergence() {
    assert_criterion(verify::criterion_convergence());
}

#[test]
fn criterion_6_invariance_and_cross_check() {
    assert_criterion(verify::criterion_invariance());
}

#[test]
fn criterion_7_gronwall_and_blowup() {
    assert_criterion(verify::criterion_gronwall_and_blowup());
}

#[test]
fn criterion_8_region_lattice() {
    assert_criterion(verify::criterion_region_lattice());
}
