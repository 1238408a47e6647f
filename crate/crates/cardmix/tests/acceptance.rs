//! The acceptance suite: every headline claim, one test per criterion,
//! printing a pass/fail line each. Exact checks carry no tolerance; the
//! Monte Carlo checks run pinned seeds with wide exponent brackets.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines (the same table `cardmix suite` prints).

use cardmix::suite::{run_one, CriterionOutcome};

fn check(id: usize) {
    let outcome: CriterionOutcome = run_one(id).expect("criterion id");
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_cayley_length_equals_bfs_distance() {
    check(1);
}

#[test]
fn criterion_02_greedy_subsequence_completeness() {
    check(2);
}

#[test]
fn criterion_03_conditioned_nonuniformity_counterexample() {
    check(3);
}

#[test]
fn criterion_04_pairwise_path_swap_equality() {
    check(4);
}

#[test]
fn criterion_05_separation_bounded_by_stopping_tail() {
    check(5);
}

#[test]
fn criterion_06_mutation_maps_roundtrip_exhaustively() {
    check(6);
}

#[test]
fn criterion_07_all_families_fair() {
    check(7);
}

#[test]
fn criterion_08_detectors_sound() {
    check(8);
}

#[test]
fn criterion_09_merge_equivalence_and_jumbled_piles() {
    check(9);
}

#[test]
fn criteria_10_and_11_scaling_and_combining_log() {
    // These two share one pinned wash study, so they run together.
    let outcomes = cardmix::suite::run_all_scaling();
    for o in &outcomes {
        println!("{}", o.line());
    }
    assert!(outcomes.iter().all(|o| o.passed), "scaling criteria failed");
}

#[test]
fn criterion_12_spanning_experiment_emission() {
    check(12);
}
