//! Function assignment strategies.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::allocation::AllocationPlan;
use crate::error::{Error, Result};
use crate::model::{ComputationProfile, FunctionAssignment};
use crate::rational::{lcm_of_denominators, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Even,
    Computation,
    Shuffle,
    Custom,
}

impl Strategy {
    pub const GENERATED: [Strategy; 3] = [Strategy::Even, Strategy::Computation, Strategy::Shuffle];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Even => "even",
            Strategy::Computation => "computation",
            Strategy::Shuffle => "shuffle",
            Strategy::Custom => "custom",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Strategy::Even),
            "computation" => Ok(Strategy::Computation),
            "shuffle" => Ok(Strategy::Shuffle),
            "custom" => Ok(Strategy::Custom),
            other => Err(Error::Parse(format!("unknown strategy `{other}`"))),
        }
    }
}

/// `w_k = 1/K`.
pub fn even_assignment(k: usize) -> FunctionAssignment {
    let share = Rational::one() / Rational::from(k);
    FunctionAssignment::new(vec![share; k], k).expect("even shares sum to one")
}

/// `w_k = m_k / Σ m`.
pub fn computation_aware(profile: &ComputationProfile) -> FunctionAssignment {
    let total = profile.total();
    let w = profile.loads().iter().map(|m| m / &total).collect();
    FunctionAssignment::new(w, profile.k()).expect("normalized loads sum to one")
}

/// Zero for LowCL nodes; HighCL nodes proportional to the odds
/// `P_k / (1 - P_k)`, which equalizes `w_k (1 - P_k) / P_k` across them.
pub fn shuffle_aware(profile: &ComputationProfile, plan: &AllocationPlan) -> Result<FunctionAssignment> {
    if !profile.has_redundancy() {
        return Err(Error::RequiresRedundancy);
    }
    debug_assert!(plan.r < plan.k());
    let odds: Vec<Rational> = plan
        .p
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if k < plan.r {
                Rational::zero()
            } else {
                p / (Rational::one() - p)
            }
        })
        .collect();
    let total: Rational = odds.iter().sum();
    let w = odds.iter().map(|o| o / &total).collect();
    FunctionAssignment::new(w, profile.k())
}

/// Builds the assignment for `strategy`. `custom` must be supplied, in the
/// profile's sorted order, exactly when `strategy` is [`Strategy::Custom`].
pub fn assign(
    strategy: Strategy,
    profile: &ComputationProfile,
    plan: &AllocationPlan,
    custom: Option<&FunctionAssignment>,
) -> Result<FunctionAssignment> {
    match strategy {
        Strategy::Even => Ok(even_assignment(profile.k())),
        Strategy::Computation => Ok(computation_aware(profile)),
        Strategy::Shuffle => shuffle_aware(profile, plan),
        Strategy::Custom => custom
            .cloned()
            .ok_or_else(|| Error::Parse("strategy `custom` needs an explicit w vector".into())),
    }
}

/// Least `Q` making every `w_k Q` integral.
pub fn minimal_function_count(assignment: &FunctionAssignment) -> BigUint {
    lcm_of_denominators(assignment.fractions())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_rationals, validate_profile};

    fn rs(items: &[&str]) -> Vec<Rational> {
        parse_rationals(items).unwrap()
    }

    fn table1_profile(high: &str) -> ComputationProfile {
        let mut m = vec!["1/6"; 6];
        m.extend(vec![high; 6]);
        validate_profile(rs(&m)).unwrap()
    }

    #[test]
    fn even_shares() {
        assert_eq!(even_assignment(4).fractions(), rs(&["1/4"; 4]).as_slice());
        assert_eq!(even_assignment(12).fractions(), rs(&["1/12"; 12]).as_slice());
        assert_eq!(even_assignment(2).fractions(), rs(&["1/2"; 2]).as_slice());
    }

    #[test]
    fn computation_aware_examples() {
        let p = validate_profile(rs(&["3/5", "2/3", "11/15"])).unwrap();
        assert_eq!(computation_aware(&p).fractions(), rs(&["3/10", "1/3", "11/30"]).as_slice());
        let p = validate_profile(rs(&["1/5", "1/3", "1/3", "1/2"])).unwrap();
        assert_eq!(
            computation_aware(&p).fractions(),
            rs(&["6/41", "10/41", "10/41", "15/41"]).as_slice()
        );
        let p = ComputationProfile::homogeneous(5, "2/5".parse().unwrap()).unwrap();
        assert_eq!(computation_aware(&p), even_assignment(5));
    }

    #[test]
    fn shuffle_aware_examples() {
        let p = validate_profile(rs(&["3/5", "2/3", "11/15"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(
            shuffle_aware(&p, &plan).unwrap().fractions(),
            rs(&["4/19", "6/19", "9/19"]).as_slice()
        );

        let p = validate_profile(rs(&["1/2", "1/2"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(shuffle_aware(&p, &plan), Err(Error::RequiresRedundancy));

        let p = ComputationProfile::homogeneous(6, "1/3".parse().unwrap()).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(shuffle_aware(&p, &plan).unwrap(), even_assignment(6));
    }

    #[test]
    fn shuffle_aware_zeroes_lowcl_nodes() {
        let p = validate_profile(rs(&["1/5", "1/3", "1/3", "1/2"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        let w = shuffle_aware(&p, &plan).unwrap();
        assert!(w.fraction(0).is_zero());
        let ratio = |k: usize| w.fraction(k) * &(Rational::one() - &plan.p[k]) / &plan.p[k];
        assert_eq!(ratio(1), ratio(2));
        assert_eq!(ratio(2), ratio(3));
    }

    #[test]
    fn minimal_function_counts() {
        let p = validate_profile(rs(&["3/5", "2/3", "11/15"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(minimal_function_count(&computation_aware(&p)), BigUint::from(30u32));
        assert_eq!(minimal_function_count(&shuffle_aware(&p, &plan).unwrap()), BigUint::from(19u32));

        let m1 = table1_profile("1/3");
        let m2 = table1_profile("1/2");
        assert_eq!(minimal_function_count(&computation_aware(&m1)), BigUint::from(18u32));
        assert_eq!(minimal_function_count(&computation_aware(&m2)), BigUint::from(24u32));
        let plan1 = AllocationPlan::new(&m1).unwrap();
        let plan2 = AllocationPlan::new(&m2).unwrap();
        assert_eq!(minimal_function_count(&shuffle_aware(&m1, &plan1).unwrap()), BigUint::from(114u32));
        assert_eq!(minimal_function_count(&shuffle_aware(&m2, &plan2).unwrap()), BigUint::from(168u32));

        let custom = FunctionAssignment::new(rs(&["1/8", "1/4", "1/6", "11/24"]), 4).unwrap();
        assert_eq!(minimal_function_count(&custom), BigUint::from(24u32));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [Strategy::Even, Strategy::Computation, Strategy::Shuffle, Strategy::Custom] {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("balanced".parse::<Strategy>().is_err());
    }
}
