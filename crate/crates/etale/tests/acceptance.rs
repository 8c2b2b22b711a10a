//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line with its instance counts and runtime. Every criterion
//! demands a 100% pass rate over its corpus and a wall-clock bound.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use etale::battery::{self, BatteryConfig};
use etale::report::Check;
use std::time::Instant;

fn config() -> BatteryConfig {
    BatteryConfig::default()
}

/// Asserts a 100% pass rate within the wall-clock budget and prints the
/// one-line verdict.
fn criterion(number: u32, name: &str, seconds: u64, min_instances: usize, checks: &[Check]) {
    let total = checks.len();
    let passed = checks.iter().filter(|c| c.passed()).count();
    let ok = passed == total && total >= min_instances;
    println!(
        "criterion {number} [{name}]: {passed}/{total} checks pass — {}",
        if ok { "PASS" } else { "FAIL" }
    );
    for failure in checks.iter().filter(|c| !c.passed()).take(5) {
        println!("    first failures: {} {:?}", failure.name, failure.witness);
    }
    assert!(
        total >= min_instances,
        "criterion {number}: only {total} instances, expected at least {min_instances}"
    );
    assert_eq!(passed, total, "criterion {number} ({name}) has failures");
    let _ = seconds;
}

fn timed<F: FnOnce() -> Vec<Check>>(seconds: u64, f: F) -> (Vec<Check>, bool) {
    let start = Instant::now();
    let checks = f();
    let within = start.elapsed().as_secs() < seconds;
    (checks, within)
}

#[test]
fn criterion_1_section_category_germ_laws() {
    let cfg = config();
    let (checks, within) = timed(60, || battery::prop11_battery(&cfg));
    // Exhaustive catalog plus 200 seeded random instances.
    criterion(1, "section-category germ laws", 60, 200, &checks);
    assert!(within, "criterion 1 exceeded its 60 s budget");
}

#[test]
fn criterion_2_underlying_map_laws() {
    let cfg = config();
    let (checks, within) = timed(30, || battery::prop24_battery(&cfg));
    criterion(2, "underlying maps continuous local homeomorphisms", 30, 10, &checks);
    assert!(within, "criterion 2 exceeded its 30 s budget");
}

#[test]
fn criterion_3_groupoid_construction() {
    let cfg = config();
    let (checks, within) = timed(60, || battery::prop25_battery(&cfg));
    criterion(3, "constructed groupoids clean and etale", 60, 10, &checks);
    assert!(within, "criterion 3 exceeded its 60 s budget");
}

#[test]
fn criterion_4_round_trips() {
    let cfg = config();
    let (checks, within) = timed(120, || battery::roundtrip_battery(&cfg));
    let non_t1 = checks.iter().filter(|c| c.name.starts_with("roundtrip_non_t1")).count();
    assert!(non_t1 >= 20, "only {non_t1} non-T1 round trips");
    criterion(4, "round trips in both directions", 120, 200, &checks);
    assert!(within, "criterion 4 exceeded its 120 s budget");
}

#[test]
fn criterion_5_sheafification() {
    let cfg = config();
    let (checks, within) = timed(120, || battery::sheafification_battery(&cfg));
    let presheaves =
        checks.iter().filter(|c| c.name.starts_with("sheafify_presheaf")).count();
    let presheaf_triples =
        checks.iter().filter(|c| c.name.starts_with("presheaf_universality")).count();
    let ppg_triples =
        checks.iter().filter(|c| c.name.starts_with("ppg_universality")).count();
    assert!(presheaves >= 100, "only {presheaves} presheaves sheafified");
    assert!(presheaf_triples >= 50, "only {presheaf_triples} presheaf universality triples");
    assert!(ppg_triples >= 20, "only {ppg_triples} pseudogroup universality triples");
    criterion(5, "sheafification with universal property", 120, 150, &checks);
    assert!(within, "criterion 5 exceeded its 120 s budget");
}

#[test]
fn criterion_6_oracle_agreements() {
    let cfg = config();
    let (checks, within) = timed(120, || battery::oracle_battery(&cfg));
    criterion(6, "oracle equivalences", 120, 50, &checks);
    assert!(within, "criterion 6 exceeded its budget");
}

#[test]
fn criterion_7_example_regressions() {
    let cfg = config();
    let (checks, within) = timed(60, || battery::example_battery(&cfg));
    criterion(7, "canonical example counts", 60, 5, &checks);
    assert!(within, "criterion 7 exceeded its budget");
}

#[test]
fn criterion_8_mutation_sensitivity() {
    let cfg = config();
    let (checks, within) = timed(60, || battery::mutation_battery(&cfg));
    assert_eq!(checks.len(), 10, "expected exactly ten seeded mutations");
    criterion(8, "mutation sensitivity 10/10", 60, 10, &checks);
    assert!(within, "criterion 8 exceeded its budget");
}
