//! Core domain types: computation profiles and function assignments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Per-node computation loads, sorted non-decreasing.
///
/// `labels[k]` is the position (0-based) in the caller's original vector of
/// the node stored at sorted position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationProfile {
    m: Vec<Rational>,
    labels: Vec<usize>,
}

impl ComputationProfile {
    /// Validates raw loads and sorts them (stable, so equal loads keep their
    /// input order).
    pub fn new(m_raw: Vec<Rational>) -> Result<Self> {
        if m_raw.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (index, value) in m_raw.iter().enumerate() {
            if !value.is_positive() || *value >= Rational::one() {
                return Err(Error::LoadOutOfRange {
                    index,
                    value: value.clone(),
                });
            }
        }
        let total: Rational = m_raw.iter().sum();
        if total < Rational::one() {
            return Err(Error::InsufficientTotal { total });
        }
        let mut labels: Vec<usize> = (0..m_raw.len()).collect();
        labels.sort_by(|&a, &b| m_raw[a].cmp(&m_raw[b]));
        let m = labels.iter().map(|&i| m_raw[i].clone()).collect();
        Ok(ComputationProfile { m, labels })
    }

    /// Homogeneous profile with `k` copies of `m`.
    pub fn homogeneous(k: usize, m: Rational) -> Result<Self> {
        Self::new(vec![m; k])
    }

    pub fn k(&self) -> usize {
        self.m.len()
    }

    pub fn loads(&self) -> &[Rational] {
        &self.m
    }

    pub fn load(&self, k: usize) -> &Rational {
        &self.m[k]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn total(&self) -> Rational {
        self.m.iter().sum()
    }

    /// Average load m̄ = Σm/K.
    pub fn mean(&self) -> Rational {
        self.total() / Rational::from(self.k())
    }

    /// True when Σm > 1, i.e. at least one node maps files beyond its
    /// first-step batch.
    pub fn has_redundancy(&self) -> bool {
        self.total() > Rational::one()
    }

    /// Reorders a vector given in the caller's original node order into the
    /// profile's sorted order.
    pub fn to_sorted_order<T: Clone>(&self, original: &[T]) -> Vec<T> {
        self.labels.iter().map(|&i| original[i].clone()).collect()
    }

    /// Inverse of [`to_sorted_order`](Self::to_sorted_order).
    pub fn to_original_order<T: Clone>(&self, sorted: &[T]) -> Vec<T> {
        let mut out: Vec<Option<T>> = vec![None; sorted.len()];
        for (pos, &orig) in self.labels.iter().enumerate() {
            out[orig] = Some(sorted[pos].clone());
        }
        out.into_iter().map(|v| v.expect("labels form a permutation")).collect()
    }
}

/// Per-node fractions of the output functions, in the profile's sorted node
/// order. Sums to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct FunctionAssignment {
    w: Vec<Rational>,
}

impl FunctionAssignment {
    pub fn new(w_raw: Vec<Rational>, k: usize) -> Result<Self> {
        if w_raw.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: w_raw.len(),
            });
        }
        if let Some((index, value)) = w_raw.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::NegativeFraction {
                index,
                value: value.clone(),
            });
        }
        let total: Rational = w_raw.iter().sum();
        if total != Rational::one() {
            return Err(Error::SumNotOne { total });
        }
        Ok(FunctionAssignment { w: w_raw })
    }

    /// Validates `w_raw`, given in the caller's original node order, and
    /// permutes it to match `profile`'s sorted order.
    pub fn for_profile(w_raw: Vec<Rational>, profile: &ComputationProfile) -> Result<Self> {
        let checked = Self::new(w_raw, profile.k())?;
        Ok(FunctionAssignment {
            w: profile.to_sorted_order(&checked.w),
        })
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn fractions(&self) -> &[Rational] {
        &self.w
    }

    pub fn fraction(&self, k: usize) -> &Rational {
        &self.w[k]
    }
}

impl TryFrom<Vec<Rational>> for FunctionAssignment {
    type Error = Error;

    fn try_from(w: Vec<Rational>) -> Result<Self> {
        let k = w.len();
        FunctionAssignment::new(w, k)
    }
}

impl From<FunctionAssignment> for Vec<Rational> {
    fn from(a: FunctionAssignment) -> Self {
        a.w
    }
}

pub fn validate_profile(m_raw: Vec<Rational>) -> Result<ComputationProfile> {
    ComputationProfile::new(m_raw)
}

pub fn validate_assignment(w_raw: Vec<Rational>, k: usize) -> Result<FunctionAssignment> {
    FunctionAssignment::new(w_raw, k)
}

/// Parses a list of `p/q` or decimal strings.
pub fn parse_rationals<S: AsRef<str>>(items: &[S]) -> Result<Vec<Rational>> {
    items.iter().map(|s| s.as_ref().parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(items: &[&str]) -> Vec<Rational> {
        parse_rationals(items).unwrap()
    }

    #[test]
    fn sorts_and_records_labels() {
        let p = validate_profile(rs(&["1/3", "1/5", "1/2", "1/3"])).unwrap();
        assert_eq!(p.loads(), rs(&["1/5", "1/3", "1/3", "1/2"]).as_slice());
        // 1-based: [2, 1, 4, 3]
        assert_eq!(p.labels(), &[1, 0, 3, 2]);
    }

    #[test]
    fn accepts_total_of_exactly_one() {
        let p = validate_profile(rs(&["1/2", "1/2"])).unwrap();
        assert_eq!(p.loads(), rs(&["1/2", "1/2"]).as_slice());
        assert_eq!(p.labels(), &[0, 1]);
        assert!(!p.has_redundancy());
    }

    #[test]
    fn rejects_insufficient_total() {
        let err = validate_profile(rs(&["1/4", "1/4"])).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientTotal {
                total: Rational::new(1, 2)
            }
        );
    }

    #[test]
    fn rejects_loads_out_of_range() {
        for bad in [["0", "1/2", "3/4"], ["1", "1/2", "1/2"], ["-1/3", "2/3", "2/3"], ["1/2", "7/5", "1/2"]] {
            assert!(matches!(
                validate_profile(rs(&bad)),
                Err(Error::LoadOutOfRange { .. })
            ));
        }
        assert_eq!(validate_profile(vec![]), Err(Error::EmptyProfile));
    }

    #[test]
    fn assignment_validation() {
        assert!(validate_assignment(rs(&["1/8", "1/4", "1/6", "11/24"]), 4).is_ok());
        assert!(matches!(
            validate_assignment(rs(&["1/2", "1/2", "1/2"]), 3),
            Err(Error::SumNotOne { .. })
        ));
        assert!(validate_assignment(rs(&["0", "0", "1"]), 3).is_ok());
        assert!(matches!(
            validate_assignment(rs(&["-1/2", "1/2", "1"]), 3),
            Err(Error::NegativeFraction { index: 0, .. })
        ));
        assert!(matches!(
            validate_assignment(rs(&["1/2", "1/2"]), 3),
            Err(Error::LengthMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn custom_assignment_follows_the_sort() {
        let p = validate_profile(rs(&["1/3", "1/5", "1/2", "1/3"])).unwrap();
        let w = FunctionAssignment::for_profile(rs(&["1/4", "1/8", "11/24", "1/6"]), &p).unwrap();
        assert_eq!(w.fractions(), rs(&["1/8", "1/4", "1/6", "11/24"]).as_slice());
        assert_eq!(p.to_original_order(w.fractions()), rs(&["1/4", "1/8", "11/24", "1/6"]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn stored_profile_is_sorted_permutation(
                raw in proptest::collection::vec((1i64..20, 21i64..40), 2..10)
            ) {
                let mut m: Vec<Rational> = raw.iter().map(|&(a, b)| Rational::new(a, b)).collect();
                // pad with large loads so the total reaches 1
                while m.iter().sum::<Rational>() < Rational::one() {
                    m.push(Rational::new(19, 20));
                }
                let p = validate_profile(m.clone()).unwrap();
                prop_assert!(p.loads().windows(2).all(|w| w[0] <= w[1]));
                let mut a = m.clone();
                a.sort();
                prop_assert_eq!(a, p.loads().to_vec());
                prop_assert_eq!(p.to_original_order(p.loads()), m);
            }
        }
    }
}
