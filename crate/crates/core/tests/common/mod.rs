#![allow(dead_code)]

use hetcdc_core::{validate_profile, ComputationProfile, FunctionAssignment, Rational};
use proptest::prelude::*;

/// Valid profiles with `k` in `k_range` and loads `a/b`, `b <= max_den`.
pub fn profiles(k_range: std::ops::RangeInclusive<usize>, max_den: i64) -> impl Strategy<Value = ComputationProfile> {
    k_range
        .prop_flat_map(move |k| proptest::collection::vec((2..=max_den).prop_flat_map(|b| (1..b, Just(b))), k))
        .prop_filter_map("total load below 1", |pairs| {
            let m: Vec<Rational> = pairs.iter().map(|&(a, b)| Rational::new(a, b)).collect();
            validate_profile(m).ok()
        })
}

/// Arbitrary assignment with strictly positive integer weights, normalized.
pub fn custom_assignment(k: usize, weights: &[u32]) -> FunctionAssignment {
    let ws: Vec<Rational> = weights.iter().take(k).map(|&x| Rational::from(x as usize)).collect();
    let total: Rational = ws.iter().sum();
    FunctionAssignment::new(ws.into_iter().map(|x| x / &total).collect(), k).unwrap()
}

pub fn rs(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| s.parse().unwrap()).collect()
}

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn worked_example() -> (ComputationProfile, FunctionAssignment) {
    let p = validate_profile(rs(&["1/5", "1/3", "1/3", "1/2"])).unwrap();
    let w = FunctionAssignment::new(rs(&["1/8", "1/4", "1/6", "11/24"]), 4).unwrap();
    (p, w)
}

pub fn table1_profile(high: &str) -> ComputationProfile {
    let mut m = vec!["1/6"; 6];
    m.extend(vec![high; 6]);
    validate_profile(rs(&m)).unwrap()
}
