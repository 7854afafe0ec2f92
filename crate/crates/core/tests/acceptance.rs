//! Runs the full acceptance suite, printing one PASS/FAIL line per criterion.

use nlos_irs::simkit::acceptance::run_acceptance;

#[test]
fn acceptance_suite() {
    let results = run_acceptance();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(results.len(), 10);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
