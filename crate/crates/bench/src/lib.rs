//! Fixtures shared by the benchmarks.

use hetcdc_core::{validate_assignment, validate_profile, ComputationProfile, FunctionAssignment, Rational};

fn parse(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| s.parse().expect("literal rational")).collect()
}

/// Four nodes with a custom assignment.
pub fn worked_example() -> (ComputationProfile, FunctionAssignment) {
    let m = validate_profile(parse(&["1/5", "1/3", "1/3", "1/2"])).expect("valid");
    let w = validate_assignment(parse(&["1/8", "1/4", "1/6", "11/24"]), 4).expect("valid");
    (m, w)
}

/// `k` distinct loads in arithmetic progression, summing to more than 1.
pub fn spread_profile(k: usize) -> ComputationProfile {
    let k64 = k as i64;
    let m = (0..k64).map(|i| Rational::new(k64 + 2 * i + 1, 2 * k64 * k64 / 3 + k64)).collect();
    validate_profile(m).expect("spread profile is valid")
}

/// Six nodes at 1/6 and six at `high`.
pub fn twelve_nodes(high: &str) -> ComputationProfile {
    let mut m = vec!["1/6"; 6];
    m.extend([high; 6]);
    validate_profile(parse(&m)).expect("valid")
}
