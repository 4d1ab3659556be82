//! Closed-form communication loads and bounds, all in exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::allocation::AllocationPlan;
use crate::assignment::{computation_aware, shuffle_aware};
use crate::error::{Error, Result};
use crate::model::{ComputationProfile, FunctionAssignment};
use crate::nodeset::NodeSet;
use crate::rational::Rational;

/// Largest node count for which [`lower_bound`] enumerates subsets.
pub const LOWER_BOUND_NODE_CAP: usize = 24;

/// Average-load threshold switching the gap regime from computation-aware to
/// shuffle-aware assignment.
pub fn regime_threshold() -> Rational {
    Rational::new(11, 20)
}

/// `w_k (1 - P_k) / P_k` for a HighCL node `k`.
fn padding_ratio(plan: &AllocationPlan, w: &FunctionAssignment, k: usize) -> Rational {
    w.fraction(k) * &(Rational::one() - &plan.p[k]) / &plan.p[k]
}

/// HighCL nodes in descending order of `w_k (1 - P_k) / P_k`, ties by
/// ascending index.
pub fn s_ordering(plan: &AllocationPlan, w: &FunctionAssignment) -> Vec<usize> {
    let mut keyed: Vec<(Rational, usize)> = plan
        .highcl()
        .iter()
        .map(|k| (padding_ratio(plan, w, k), k))
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, k)| k).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AchievableLoad {
    pub total: Rational,
    /// Unicast load to the LowCL nodes.
    pub lowcl: Rational,
    /// Coded multicast load to the HighCL nodes.
    pub highcl: Rational,
    pub s_order: Vec<usize>,
}

/// Achievable load of the two-step allocation with zero-padded coded
/// multicasting, for an arbitrary assignment `w`.
pub fn achievable_load(
    profile: &ComputationProfile,
    plan: &AllocationPlan,
    w: &FunctionAssignment,
) -> AchievableLoad {
    let k_total = plan.k();
    let r = plan.r;
    let lowcl: Rational = (0..r)
        .map(|k| w.fraction(k) * &(Rational::one() - profile.load(k)))
        .sum();

    let s_order = s_ordering(plan, w);
    let mut highcl = Rational::zero();
    if r < k_total {
        let hi = k_total - r;
        let share = (Rational::one() - &plan.xi) / Rational::from(hi);
        let mut survive = Rational::one();
        let mut inv_sum = Rational::zero();
        for (idx, &s) in s_order.iter().enumerate() {
            let keep = Rational::one() - &plan.p[s];
            survive *= &keep;
            let bracket = &plan.xi + Rational::from(hi - idx - 1) * &share + &share * &inv_sum;
            highcl += w.fraction(s) * &survive * bracket;
            inv_sum += keep.recip();
        }
    }
    AchievableLoad {
        total: &lowcl + &highcl,
        lowcl,
        highcl,
        s_order,
    }
}

/// Closed form of the achievable load under the computation-aware
/// assignment. HighCL nodes are already in padding-ratio order here, so the
/// sum runs in node order.
pub fn load_computation_aware(profile: &ComputationProfile, plan: &AllocationPlan) -> Rational {
    let k_total = plan.k();
    let r = plan.r;
    let sum_m = profile.total();
    let mut load: Rational = (0..r)
        .map(|k| profile.load(k) / &sum_m * (Rational::one() - profile.load(k)))
        .sum();
    if r < k_total {
        let share = (Rational::one() - &plan.xi) / Rational::from(k_total - r);
        let mut survive = Rational::one();
        let mut inv_sum = Rational::zero();
        for k in r..k_total {
            let keep = Rational::one() - &plan.p[k];
            survive *= &keep;
            let bracket = &plan.xi + Rational::from(k_total - k - 1) * &share + &share * &inv_sum;
            load += profile.load(k) / &sum_m * &survive * bracket;
            inv_sum += keep.recip();
        }
    }
    load
}

/// Closed form of the achievable load under the shuffle-aware assignment.
pub fn load_shuffle_aware(profile: &ComputationProfile, plan: &AllocationPlan) -> Result<Rational> {
    if !profile.has_redundancy() {
        return Err(Error::RequiresRedundancy);
    }
    let high = &plan.p[plan.r..];
    let share = (Rational::one() - &plan.xi) / Rational::from(high.len());
    let odds: Rational = high.iter().map(|p| p / &(Rational::one() - p)).sum();
    let survive: Rational = high.iter().map(|p| Rational::one() - p).product();
    let inv_sum: Rational = high.iter().map(|p| (Rational::one() - p).recip()).sum();
    Ok((Rational::one() - &plan.xi * &survive - share * survive * inv_sum) / odds)
}

/// Achievable load of a homogeneous system (`m_k = m`, even assignment).
pub fn homogeneous_even_load(k: usize, m: &Rational) -> Result<Rational> {
    if k == 0 {
        return Err(Error::OutOfDomain("K must be positive".into()));
    }
    let kr = Rational::from(k);
    let inv_k = kr.recip();
    if *m < inv_k || *m >= Rational::one() {
        return Err(Error::OutOfDomain(format!("m = {m} outside [1/{k}, 1)")));
    }
    if *m == inv_k {
        return Ok((&kr - Rational::one()) / kr);
    }
    let x = (Rational::one() - m) / (Rational::one() - &inv_k);
    let geometric = (Rational::one() - x.pow(k as i32 - 1)) / (Rational::one() - &x);
    Ok(inv_k * x * geometric)
}

/// Optimal load of the homogeneous system with average load `mbar`: the
/// lower convex envelope of `(t/K, (1 - t/K)/t)` for integer `t`.
pub fn homogeneous_optimal(k: usize, mbar: &Rational) -> Result<Rational> {
    if k == 0 {
        return Err(Error::OutOfDomain("K must be positive".into()));
    }
    let kr = Rational::from(k);
    if *mbar < kr.recip() || *mbar > Rational::one() {
        return Err(Error::OutOfDomain(format!("mbar = {mbar} outside [1/{k}, 1]")));
    }
    let point = |t: &BigInt| -> Rational {
        let t = Rational::from_bigints(t.clone(), BigInt::one());
        (&kr - &t) / (&kr * &t)
    };
    let km = &kr * mbar;
    let t = km.floor();
    if km.is_integer() {
        return Ok(point(&t));
    }
    let lo = point(&t);
    let hi = point(&(&t + 1));
    let frac = &km - Rational::from_bigints(t, BigInt::one());
    Ok(&lo + frac * (hi - &lo))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub value: Rational,
    /// Maximizing node set (canonically smallest among ties).
    pub witness: NodeSet,
}

/// Cut-set bound `max_T (1 - Σ_{k∈T} m_k) · Σ_{k∈T} w_k` by exhaustive
/// enumeration in Gray-code order over a common denominator.
pub fn lower_bound(profile: &ComputationProfile, w: &FunctionAssignment) -> Result<LowerBound> {
    let k = profile.k();
    if k > LOWER_BOUND_NODE_CAP {
        return Err(Error::TooManyNodes {
            k,
            cap: LOWER_BOUND_NODE_CAP,
        });
    }
    if w.k() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: w.k(),
        });
    }
    let (m_num, m_den) = common_denominator(profile.loads());
    let (w_num, w_den) = common_denominator(w.fractions());

    let mut sum_m = BigInt::zero();
    let mut sum_w = BigInt::zero();
    let mut set = 0u32;
    let mut best = BigInt::zero();
    let mut witness = NodeSet::EMPTY;
    for step in 1u32..(1u32 << k) {
        let bit = step.trailing_zeros() as usize;
        set ^= 1 << bit;
        if set & (1 << bit) != 0 {
            sum_m += &m_num[bit];
            sum_w += &w_num[bit];
        } else {
            sum_m -= &m_num[bit];
            sum_w -= &w_num[bit];
        }
        let value = (&m_den - &sum_m) * &sum_w;
        let candidate = NodeSet::from_bits(set);
        if value > best || (value == best && !best.is_zero() && candidate < witness) {
            best = value;
            witness = candidate;
        }
    }
    let value = Rational::from_bigints(best, m_den * w_den);
    Ok(LowerBound { value, witness })
}

fn common_denominator(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = BigInt::from(crate::rational::lcm_of_denominators(values));
    let nums = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (nums, den)
}

/// Which assignment the homogeneous gap is measured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ComputationAware,
    ShuffleAware,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneousGap {
    pub ratio: Rational,
    pub regime: Regime,
    pub achievable: Rational,
    pub homogeneous_optimal: Rational,
}

/// Ratio of the achievable load to the optimum of the equivalent homogeneous
/// system: computation-aware below `m̄ = 0.55`, shuffle-aware from there on.
pub fn gap_to_homogeneous(profile: &ComputationProfile) -> Result<HomogeneousGap> {
    let plan = AllocationPlan::new(profile)?;
    let mbar = profile.mean();
    let (regime, achievable) = if mbar < regime_threshold() {
        (Regime::ComputationAware, load_computation_aware(profile, &plan))
    } else {
        (Regime::ShuffleAware, load_shuffle_aware(profile, &plan)?)
    };
    let homogeneous_optimal = homogeneous_optimal(profile.k(), &mbar)?;
    Ok(HomogeneousGap {
        ratio: &achievable / &homogeneous_optimal,
        regime,
        achievable,
        homogeneous_optimal,
    })
}

/// Ratio of the computation-aware achievable load to the cut-set bound under
/// the same assignment.
pub fn computation_aware_gap_to_lower(profile: &ComputationProfile) -> Result<Rational> {
    let plan = AllocationPlan::new(profile)?;
    let w = computation_aware(profile);
    let achievable = load_computation_aware(profile, &plan);
    let bound = lower_bound(profile, &w)?;
    Ok(achievable / bound.value)
}

/// Everything known analytically about one `(m, w)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    pub achievable: Rational,
    pub lowcl_load: Rational,
    pub highcl_load: Rational,
    pub s_order: Vec<usize>,
    pub lower_bound: LowerBound,
    pub homogeneous_optimal: Rational,
    /// `None` when the lower bound is zero.
    pub gap_to_lower: Option<Rational>,
    pub gap_to_homogeneous: Rational,
}

pub fn load_report(
    profile: &ComputationProfile,
    plan: &AllocationPlan,
    w: &FunctionAssignment,
) -> Result<LoadReport> {
    let a = achievable_load(profile, plan, w);
    let lower = lower_bound(profile, w)?;
    let hom = homogeneous_optimal(profile.k(), &profile.mean())?;
    let gap_to_lower = (!lower.value.is_zero()).then(|| &a.total / &lower.value);
    Ok(LoadReport {
        gap_to_homogeneous: &a.total / &hom,
        achievable: a.total,
        lowcl_load: a.lowcl,
        highcl_load: a.highcl,
        s_order: a.s_order,
        lower_bound: lower,
        homogeneous_optimal: hom,
        gap_to_lower,
    })
}

/// Achievable load evaluated through the general formula at the
/// shuffle-aware assignment.
pub fn shuffle_aware_load_via_theorem(profile: &ComputationProfile, plan: &AllocationPlan) -> Result<Rational> {
    let w = shuffle_aware(profile, plan)?;
    Ok(achievable_load(profile, plan, &w).total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::even_assignment;
    use crate::model::{parse_rationals, validate_assignment, validate_profile};

    fn rs(items: &[&str]) -> Vec<Rational> {
        parse_rationals(items).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn example() -> (ComputationProfile, AllocationPlan, FunctionAssignment) {
        let p = validate_profile(rs(&["1/5", "1/3", "1/3", "1/2"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        let w = validate_assignment(rs(&["1/8", "1/4", "1/6", "11/24"]), 4).unwrap();
        (p, plan, w)
    }

    fn table1_profile(high: &str) -> ComputationProfile {
        let mut m = vec!["1/6"; 6];
        m.extend(vec![high; 6]);
        validate_profile(rs(&m)).unwrap()
    }

    #[test]
    fn worked_example_load() {
        let (p, plan, w) = example();
        let a = achievable_load(&p, &plan, &w);
        assert_eq!(a.total, r("4171/7260"));
        assert_eq!(a.lowcl, r("1/10"));
        assert_eq!(a.highcl, r("689/1452"));
    }

    #[test]
    fn worked_example_s_order() {
        let (_, plan, w) = example();
        // ratios 5/2, 5/3, 55/56 for nodes 2, 3, 4
        assert_eq!(padding_ratio(&plan, &w, 1), r("5/2"));
        assert_eq!(padding_ratio(&plan, &w, 2), r("5/3"));
        assert_eq!(padding_ratio(&plan, &w, 3), r("55/56"));
        assert_eq!(s_ordering(&plan, &w), vec![1, 2, 3]);
    }

    #[test]
    fn s_order_ties_are_stable() {
        let p = table1_profile("1/2");
        let plan = AllocationPlan::new(&p).unwrap();
        let w = shuffle_aware(&p, &plan).unwrap();
        assert_eq!(s_ordering(&plan, &w), (0..12).collect::<Vec<_>>());
        let h = ComputationProfile::homogeneous(4, r("1/2")).unwrap();
        let plan = AllocationPlan::new(&h).unwrap();
        assert_eq!(s_ordering(&plan, &even_assignment(4)), vec![0, 1, 2, 3]);
    }

    #[test]
    fn tie_order_does_not_change_the_load() {
        // nodes 1 and 2 tie; evaluating with the tied pair swapped must agree
        let (p, plan, _) = example();
        let w = validate_assignment(rs(&["1/4", "1/4", "1/4", "1/4"]), 4).unwrap();
        let a = achievable_load(&p, &plan, &w);
        assert_eq!(&a.s_order[..2], &[1, 2]);
        let mut swapped = a.s_order.clone();
        swapped.swap(0, 1);
        let hi = 3;
        let share = (Rational::one() - &plan.xi) / Rational::from(hi);
        let mut survive = Rational::one();
        let mut inv = Rational::zero();
        let mut highcl = Rational::zero();
        for (idx, &s) in swapped.iter().enumerate() {
            let keep = Rational::one() - &plan.p[s];
            survive *= &keep;
            highcl += w.fraction(s) * &survive * (&plan.xi + Rational::from(hi - idx - 1) * &share + &share * &inv);
            inv += keep.recip();
        }
        assert_eq!(highcl, a.highcl);
    }

    #[test]
    fn homogeneous_exact_fit_load() {
        for k in 2..=12i64 {
            let p = ComputationProfile::homogeneous(k as usize, Rational::new(1, k)).unwrap();
            let plan = AllocationPlan::new(&p).unwrap();
            let a = achievable_load(&p, &plan, &even_assignment(k as usize));
            assert_eq!(a.total, Rational::new(k - 1, k));
        }
    }

    #[test]
    fn table1_rows() {
        for (high, expect) in [("1/3", ["0.448", "0.371", "0.315"]), ("1/2", ["0.397", "0.255", "0.175"])] {
            let p = table1_profile(high);
            let plan = AllocationPlan::new(&p).unwrap();
            let even = achievable_load(&p, &plan, &even_assignment(12)).total;
            let com = load_computation_aware(&p, &plan);
            let shu = load_shuffle_aware(&p, &plan).unwrap();
            assert_eq!([even.to_decimal(3), com.to_decimal(3), shu.to_decimal(3)], expect.map(String::from));
        }
    }

    #[test]
    fn closed_forms_match_theorem_one() {
        for m in [
            vec!["3/5", "2/3", "11/15"],
            vec!["1/5", "1/3", "1/3", "1/2"],
            vec!["1/10", "1/10", "1/2", "3/4", "9/10"],
        ] {
            let p = validate_profile(rs(&m)).unwrap();
            let plan = AllocationPlan::new(&p).unwrap();
            let via = achievable_load(&p, &plan, &computation_aware(&p)).total;
            assert_eq!(load_computation_aware(&p, &plan), via);
            assert_eq!(
                load_shuffle_aware(&p, &plan).unwrap(),
                shuffle_aware_load_via_theorem(&p, &plan).unwrap()
            );
        }
        let p = validate_profile(rs(&["1/2", "1/2"])).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(load_shuffle_aware(&p, &plan), Err(Error::RequiresRedundancy));
    }

    #[test]
    fn homogeneous_even_load_forms() {
        assert_eq!(homogeneous_even_load(4, &r("1/4")).unwrap(), r("3/4"));
        // K = 2, m = 3/4: each node misses a quarter of the files for half the functions
        assert_eq!(homogeneous_even_load(2, &r("3/4")).unwrap(), r("1/4"));
        let p = ComputationProfile::homogeneous(2, r("3/4")).unwrap();
        let plan = AllocationPlan::new(&p).unwrap();
        assert_eq!(achievable_load(&p, &plan, &even_assignment(2)).total, r("1/4"));
        assert!(homogeneous_even_load(4, &r("1/5")).is_err());
        assert!(homogeneous_even_load(4, &r("1")).is_err());
    }

    #[test]
    fn homogeneous_optimal_envelope() {
        assert_eq!(homogeneous_optimal(12, &r("1/4")).unwrap(), r("1/4"));
        assert_eq!(homogeneous_optimal(7, &r("1")).unwrap(), Rational::zero());
        assert_eq!(homogeneous_optimal(3, &r("1/2")).unwrap(), r("5/12"));
        assert_eq!(homogeneous_optimal(3, &r("1/3")).unwrap(), r("2/3"));
        assert!(homogeneous_optimal(3, &r("1/4")).is_err());
        assert!(homogeneous_optimal(3, &r("11/10")).is_err());
    }

    #[test]
    fn lower_bound_small_cases() {
        let p = validate_profile(rs(&["1/2", "1/2"])).unwrap();
        let w = even_assignment(2);
        let lb = lower_bound(&p, &w).unwrap();
        assert_eq!(lb.value, r("1/4"));
        assert_eq!(lb.witness, NodeSet::singleton(0));

        let (p, plan, w) = example();
        let lb = lower_bound(&p, &w).unwrap();
        assert!(lb.value <= achievable_load(&p, &plan, &w).total);
        assert!(lb.witness.len() < 4);
    }

    #[test]
    fn lower_bound_node_cap() {
        let p = ComputationProfile::homogeneous(25, r("1/2")).unwrap();
        assert!(matches!(
            lower_bound(&p, &even_assignment(25)),
            Err(Error::TooManyNodes { k: 25, cap: 24 })
        ));
    }

    #[test]
    fn gap_examples() {
        for k in 2..=8i64 {
            let p = ComputationProfile::homogeneous(k as usize, Rational::new(1, k)).unwrap();
            let g = gap_to_homogeneous(&p).unwrap();
            assert_eq!(g.ratio, Rational::one());
            assert_eq!(g.regime, Regime::ComputationAware);
        }
        let g = gap_to_homogeneous(&table1_profile("1/3")).unwrap();
        assert_eq!(g.homogeneous_optimal, r("1/4"));
        assert_eq!(g.ratio, &g.achievable * &r("4"));
        assert!(g.ratio > r("1.48") && g.ratio < r("1.49"));

        let p = ComputationProfile::homogeneous(4, r("3/5")).unwrap();
        assert_eq!(gap_to_homogeneous(&p).unwrap().regime, Regime::ShuffleAware);
    }

    #[test]
    fn load_report_is_consistent() {
        let (p, plan, w) = example();
        let rep = load_report(&p, &plan, &w).unwrap();
        assert_eq!(rep.achievable, &rep.lowcl_load + &rep.highcl_load);
        assert!(rep.lower_bound.value <= rep.achievable);
        assert_eq!(rep.gap_to_lower.unwrap(), &rep.achievable / &rep.lower_bound.value);
    }
}
