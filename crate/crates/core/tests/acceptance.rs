//! The acceptance gate: one test per criterion, each printing its verdict
//! line. Seeds are fixed here so verdicts are reproducible; the CLI `verify`
//! command runs the same suite.

use semihyp::verification::{run_criterion, CRITERIA};

const SEED: u64 = 0x5EED_2026;

fn run(id: &str) {
    let result = run_criterion(id, SEED).expect("known criterion");
    let verdict = if result.passed { "pass" } else { "FAIL" };
    println!(
        "{}: {verdict} - {} [{}]",
        result.id, result.title, result.details
    );
    assert!(result.passed, "{}: {}", result.id, result.details);
}

#[test]
fn criteria_table_is_complete() {
    assert_eq!(CRITERIA.len(), 13);
}

#[test]
fn ac1_walk_unique_digraphs_have_delta_zero() {
    run("AC1");
}

#[test]
fn ac2_transitive_delta_controls_global_delta() {
    run("AC2");
}

#[test]
fn ac3_detour_triangles_are_not_half_n_thin() {
    run("AC3");
}

#[test]
fn ac4_rung_family_defects_grow() {
    run("AC4");
}

#[test]
fn ac5_exponential_divergence_bound_holds() {
    run("AC5");
}

#[test]
fn ac6_ball_profiles_bounded_by_degree_sum() {
    run("AC6");
}

#[test]
fn ac7_explicit_bounds_hold_on_transitive_triangles() {
    run("AC7");
}

#[test]
fn ac8_chain_distance_two_sided_bound() {
    run("AC8");
}

#[test]
fn ac9_boundary_and_ends_of_the_bridge_family() {
    run("AC9");
}

#[test]
fn ac10_rho_growth_separates_ordered_classes() {
    run("AC10");
}

#[test]
fn ac11_graded_monoid_ball_properties() {
    run("AC11");
}

#[test]
fn ac12_geodesic_counts_match_enumeration() {
    run("AC12");
}

#[test]
fn ac13_stability_defects_within_gamma_plus_c() {
    run("AC13");
}
