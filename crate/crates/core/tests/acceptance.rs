//! The twelve acceptance criteria at full scale, one PASS/FAIL line each.

use koszul_core::verify::{render, verify_all, Profile, CRITERIA, TOLERANCE};

/// Pinned: every comparison is exact, and these are the wall-clock budgets.
const BUDGETS: [u64; 12] = [300, 600, 900, 900, 900, 300, 600, 600, 120, 600, 1200, 1800];

#[test]
fn acceptance() {
    assert_eq!(TOLERANCE, "exact");
    assert_eq!(CRITERIA.map(|(_, _, b)| b), BUDGETS);
    let outcomes = verify_all(Profile::Full);
    println!("{}", render(&outcomes));
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert_eq!(outcomes.len(), 12);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
