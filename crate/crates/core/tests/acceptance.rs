//! One test per acceptance criterion. The suite runs once and each test
//! reports its own line.

use std::sync::OnceLock;

use syncgame::suite::{run_suite, CriterionResult, SuiteOptions};

fn results() -> &'static [CriterionResult] {
    static RESULTS: OnceLock<Vec<CriterionResult>> = OnceLock::new();
    RESULTS.get_or_init(|| run_suite(&SuiteOptions::default()))
}

fn check(id: u8) {
    let r = results()
        .iter()
        .find(|r| r.id == id)
        .expect("criterion is part of the suite");
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_bisync_sizes() {
    check(1);
}

#[test]
fn criterion_02_three_output_sizes() {
    check(2);
}

#[test]
fn criterion_03_classical_emptiness() {
    check(3);
}

#[test]
fn criterion_04_symbolic_isomorphisms() {
    check(4);
}

#[test]
fn criterion_05_bisync_closure_structure() {
    check(5);
}

#[test]
fn criterion_06_row_sums() {
    check(6);
}

#[test]
fn criterion_07_deterministic_transport() {
    check(7);
}

#[test]
fn criterion_08_nonsignalling_counterexample() {
    check(8);
}

#[test]
fn criterion_09_projection_lemmas() {
    check(9);
}

#[test]
fn criterion_10_engine_oracle_consistency() {
    check(10);
}
