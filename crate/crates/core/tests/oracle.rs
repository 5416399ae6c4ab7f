//! The engine against a generate-and-test enumerator on random tiny
//! instances drawn from the whole catalog.

mod common;

const INSTANCES: u64 = 3000;

#[test]
fn engine_matches_brute_force() {
    let sat = common::suites::oracle_equivalence(INSTANCES).unwrap();
    // both verdicts must be well represented for the comparison to mean much
    assert!(sat > INSTANCES / 10 && sat < INSTANCES * 9 / 10, "{sat} satisfiable");
}
