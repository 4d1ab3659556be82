//! Two-step file allocation.
//!
//! The first step splits the files into disjoint batches, one per node, as
//! evenly as the computation loads allow. Nodes whose load is exhausted by
//! their own batch are LowCL nodes `0..r`; the remaining HighCL nodes map a
//! further fraction `P_k` (the surplus ratio) of every other node's batch.
//! The second step splits each batch `N_k` into sub-batches `N_k^Ψ`, the part
//! of `N_k` that is additionally mapped by exactly the nodes in `Ψ`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ComputationProfile, FunctionAssignment};
use crate::nodeset::{NodeSet, MAX_NODES};
use crate::rational::Rational;

/// Default cap on materializable file counts.
pub const DEFAULT_FILE_COUNT_CAP: u64 = 1 << 62;

/// Default cap on the total number of intermediate values stored across all
/// nodes of a materialized instance.
pub const DEFAULT_IV_BUDGET: u64 = 1 << 25;

/// Result of the first allocation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstStep {
    /// Batch fractions `l_k`.
    pub l: Vec<Rational>,
    /// Number of LowCL nodes.
    pub r: usize,
    /// Total load of the LowCL nodes.
    pub xi: Rational,
}

/// `l_k = min(m_k, a_k)` with `a_k` the even share of what is left after
/// nodes `0..k` took theirs.
pub fn first_step(profile: &ComputationProfile) -> FirstStep {
    let k_total = profile.k();
    let mut l = Vec::with_capacity(k_total);
    let mut taken = Rational::zero();
    let mut r = 0;
    for (k, m_k) in profile.loads().iter().enumerate() {
        let a_k = (Rational::one() - &taken) / Rational::from(k_total - k);
        if *m_k <= a_k {
            r = k + 1;
        }
        let l_k = if *m_k <= a_k { m_k.clone() } else { a_k };
        taken += &l_k;
        l.push(l_k);
    }
    let xi = profile.loads()[..r].iter().sum();
    FirstStep { l, r, xi }
}

/// `P_k = (m_k - l_k) / (1 - l_k)`.
pub fn surplus_ratios(l: &[Rational], m: &[Rational]) -> Vec<Rational> {
    l.iter()
        .zip(m)
        .map(|(l_k, m_k)| (m_k - l_k) / (Rational::one() - l_k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllocationPlan {
    pub l: Vec<Rational>,
    pub r: usize,
    pub xi: Rational,
    #[serde(rename = "P")]
    pub p: Vec<Rational>,
}

impl AllocationPlan {
    pub fn new(profile: &ComputationProfile) -> Result<Self> {
        if profile.k() > MAX_NODES {
            return Err(Error::TooManyNodes {
                k: profile.k(),
                cap: MAX_NODES,
            });
        }
        let FirstStep { l, r, xi } = first_step(profile);
        let p = surplus_ratios(&l, profile.loads());
        Ok(AllocationPlan { l, r, xi, p })
    }

    pub fn k(&self) -> usize {
        self.l.len()
    }

    pub fn lowcl(&self) -> NodeSet {
        NodeSet::range(0, self.r)
    }

    pub fn highcl(&self) -> NodeSet {
        NodeSet::range(self.r, self.k())
    }

    /// `l_k^Ψ = l_k · Π_{i∈Ψ} P_i · Π_{i∉Ψ∪{k}} (1 - P_i)`.
    pub fn subbatch_fraction(&self, owner: usize, subset: NodeSet) -> Rational {
        assert!(!subset.contains(owner), "owner inside its own sub-batch set");
        let mut frac = self.l[owner].clone();
        for i in 0..self.k() {
            if i == owner {
                continue;
            }
            if subset.contains(i) {
                frac *= &self.p[i];
            } else {
                frac *= &(Rational::one() - &self.p[i]);
            }
        }
        frac
    }

    /// Nonzero sub-batches of `owner`'s batch, in canonical subset order.
    ///
    /// `P_i = 0` for LowCL nodes, so only subsets of the HighCL nodes other
    /// than the owner can be nonzero; each of those is strictly positive.
    pub fn owner_subbatches(&self, owner: usize) -> Vec<SubBatch> {
        let members: Vec<usize> = self.highcl().remove(owner).iter().collect();
        let base = members
            .iter()
            .fold(self.l[owner].clone(), |acc, &i| acc * (Rational::one() - &self.p[i]));
        let odds: Vec<Rational> = members
            .iter()
            .map(|&i| &self.p[i] / &(Rational::one() - &self.p[i]))
            .collect();
        // fraction(S) = fraction(S minus its lowest member) · odds(lowest)
        let count = 1usize << members.len();
        let mut fractions = Vec::with_capacity(count);
        fractions.push(base);
        for mask in 1..count {
            let low = mask.trailing_zeros() as usize;
            let next = &fractions[mask & (mask - 1)] * &odds[low];
            fractions.push(next);
        }
        let mut out: Vec<SubBatch> = fractions
            .into_iter()
            .enumerate()
            .map(|(mask, fraction)| SubBatch {
                owner,
                subset: members
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &i)| i)
                    .collect(),
                fraction,
            })
            .collect();
        out.sort_by_key(|s| s.subset);
        out
    }

    pub fn subbatches(&self) -> SubBatchTable {
        subbatch_fractions(self)
    }
}

/// One sub-batch `N_owner^subset` and its fraction of all files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubBatch {
    /// Owning node.
    #[serde(serialize_with = "one_based")]
    pub owner: usize,
    pub subset: NodeSet,
    pub fraction: Rational,
}

fn one_based<S: serde::Serializer>(v: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*v as u64 + 1)
}

/// All nonzero sub-batch fractions, ordered by owner then canonical subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SubBatchTable {
    entries: Vec<SubBatch>,
}

impl SubBatchTable {
    pub fn entries(&self) -> &[SubBatch] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fraction of `N_owner^subset`, zero when not stored.
    pub fn get(&self, owner: usize, subset: NodeSet) -> Rational {
        self.entries
            .binary_search_by(|e| (e.owner, e.subset).cmp(&(owner, subset)))
            .map(|i| self.entries[i].fraction.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn for_owner(&self, owner: usize) -> impl Iterator<Item = &SubBatch> {
        self.entries.iter().filter(move |e| e.owner == owner)
    }
}

pub fn subbatch_fractions(plan: &AllocationPlan) -> SubBatchTable {
    let entries = (0..plan.k())
        .flat_map(|owner| plan.owner_subbatches(owner))
        .collect();
    SubBatchTable { entries }
}

/// Least `N` making every sub-batch integral, with the coarser magnitude
/// estimate `1 / (l_1 Π_{k>r} min{P_k, 1-P_k})` alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalFileCount {
    pub exact: BigUint,
    pub estimate: Rational,
}

impl MinimalFileCount {
    pub fn symbolic(&self) -> String {
        symbolic(&self.exact)
    }

    /// The exact count as `u64`, or [`Error::OverflowGuard`] if it exceeds
    /// `cap`.
    pub fn checked(&self, cap: u64) -> Result<u64> {
        match self.exact.to_u64() {
            Some(v) if v <= cap => Ok(v),
            _ => Err(Error::OverflowGuard {
                symbolic: self.symbolic(),
                cap,
            }),
        }
    }
}

pub fn minimal_file_count(plan: &AllocationPlan) -> MinimalFileCount {
    let exact = (0..plan.k())
        .flat_map(|owner| plan.owner_subbatches(owner))
        .fold(BigUint::one(), |acc, sb| acc.lcm(&sb.fraction.denom_unsigned()));
    MinimalFileCount {
        exact,
        estimate: file_count_estimate(plan),
    }
}

fn file_count_estimate(plan: &AllocationPlan) -> Rational {
    let mins: Vec<Rational> = plan.p[plan.r..]
        .iter()
        .map(|p| {
            let q = Rational::one() - p;
            if *p < q {
                p.clone()
            } else {
                q
            }
        })
        .collect();
    let prod: Rational = mins.iter().product();
    if plan.r > 0 {
        (&plan.l[0] * prod).recip()
    } else {
        let max = mins.iter().max().cloned().unwrap_or_else(Rational::one);
        Rational::from(plan.k()) * max / prod
    }
}

/// Prime factorization by trial division. A cofactor with no factor below
/// 2^20 is returned as a single (possibly composite) entry.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p < (1 << 20) && rest > BigUint::one() {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        out.push((rest, 1));
    }
    out
}

/// Compact rendering `c·p^e` pulling out the highest prime power (largest
/// exponent, then largest prime), e.g. `12·11^11`. Plain decimal when no
/// prime repeats.
pub fn symbolic(n: &BigUint) -> String {
    let factors = factorize(n);
    let Some(idx) = factors
        .iter()
        .enumerate()
        .filter(|(_, (_, e))| *e >= 2)
        .max_by(|(_, a), (_, b)| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .map(|(i, _)| i)
    else {
        return n.to_string();
    };
    let (prime, exp) = &factors[idx];
    let coeff: BigUint = factors
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, (p, e))| p.pow(*e))
        .product();
    if coeff.is_one() {
        format!("{prime}^{exp}")
    } else {
        format!("{coeff}·{prime}^{exp}")
    }
}

/// A contiguous run of file indices forming one sub-batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchLayout {
    #[serde(serialize_with = "one_based")]
    pub owner: usize,
    pub subset: NodeSet,
    pub start: usize,
    pub len: usize,
}

impl BatchLayout {
    pub fn files(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// A concrete instance: file, function and node index sets.
///
/// File and function indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaterializedInstance {
    pub n_files: usize,
    pub n_functions: usize,
    pub t_bits: usize,
    pub seed: u64,
    /// Number of LowCL nodes.
    pub r: usize,
    /// Nonempty sub-batches in file-index order.
    pub batches: Vec<BatchLayout>,
    /// Sorted file indices mapped by each node.
    pub files_of: Vec<Vec<usize>>,
    /// Function indices assigned to each node.
    pub functions_of: Vec<Range<usize>>,
    batch_index: BTreeMap<(usize, NodeSet), usize>,
}

impl MaterializedInstance {
    pub fn k(&self) -> usize {
        self.files_of.len()
    }

    pub fn highcl(&self) -> NodeSet {
        NodeSet::range(self.r, self.k())
    }

    /// Files of sub-batch `N_owner^subset` (empty when the sub-batch is).
    pub fn subbatch_files(&self, owner: usize, subset: NodeSet) -> Range<usize> {
        self.batch_index
            .get(&(owner, subset))
            .map(|&i| self.batches[i].files())
            .unwrap_or(0..0)
    }

    /// Compulsory batch `N_owner`; contiguous because sub-batches are laid
    /// out owner by owner.
    pub fn compulsory_files(&self, owner: usize) -> Range<usize> {
        let mut it = self.batches.iter().filter(|b| b.owner == owner);
        match (it.next(), it.next_back()) {
            (None, _) => 0..0,
            (Some(first), last) => first.start..last.unwrap_or(first).files().end,
        }
    }

    /// Owner and sub-batch set of file `n`.
    pub fn owner_of(&self, n: usize) -> Option<(usize, NodeSet)> {
        let idx = self.batches.partition_point(|b| b.start + b.len <= n);
        self.batches
            .get(idx)
            .filter(|b| b.files().contains(&n))
            .map(|b| (b.owner, b.subset))
    }

    /// Node computing function `q`.
    pub fn reducer_of(&self, q: usize) -> Option<usize> {
        self.functions_of.iter().position(|r| r.contains(&q))
    }

    /// Total number of intermediate values computed in the Map phase.
    pub fn stored_ivs(&self) -> u64 {
        self.files_of.iter().map(|f| f.len() as u64).sum::<u64>() * self.n_functions as u64
    }
}

/// Instance sizes and knobs for [`materialize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n_files: u64,
    pub n_functions: u64,
    pub t_bits: usize,
    pub seed: u64,
    pub iv_budget: u64,
}

impl InstanceSpec {
    pub fn new(n_files: u64, n_functions: u64, t_bits: usize, seed: u64) -> Self {
        InstanceSpec {
            n_files,
            n_functions,
            t_bits,
            seed,
            iv_budget: DEFAULT_IV_BUDGET,
        }
    }
}

/// Lays the plan out on concrete indices: consecutive file ranges per
/// sub-batch (owner ascending, subsets in canonical order) and consecutive
/// function ranges per node.
pub fn materialize(
    profile: &ComputationProfile,
    plan: &AllocationPlan,
    assignment: &FunctionAssignment,
    spec: InstanceSpec,
) -> Result<MaterializedInstance> {
    let k = plan.k();
    if assignment.k() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: assignment.k(),
        });
    }
    if spec.t_bits == 0 {
        return Err(Error::OutOfDomain("T must be positive".into()));
    }
    let min_n = minimal_file_count(plan);
    let min_q = crate::assignment::minimal_function_count(assignment);
    check_multiple("N", spec.n_files, &min_n.exact, &min_n.symbolic())?;
    check_multiple("Q", spec.n_functions, &min_q, &min_q.to_string())?;

    let n_big = Rational::from(spec.n_files as usize);
    let q_big = Rational::from(spec.n_functions as usize);
    let stored: Rational = profile.loads().iter().map(|m| m * &n_big * &q_big).sum();
    if stored > Rational::from(spec.iv_budget as usize) {
        return Err(Error::InstanceTooLarge {
            ivs: stored.to_string(),
            cap: spec.iv_budget,
        });
    }

    let mut batches = Vec::new();
    let mut batch_index = BTreeMap::new();
    let mut files_of: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0usize;
    for sb in (0..k).flat_map(|owner| plan.owner_subbatches(owner)) {
        let len = integral(&(&sb.fraction * &n_big));
        if len == 0 {
            continue;
        }
        let layout = BatchLayout {
            owner: sb.owner,
            subset: sb.subset,
            start: next,
            len,
        };
        for node in sb.subset.insert(sb.owner).iter() {
            files_of[node].extend(layout.files());
        }
        batch_index.insert((sb.owner, sb.subset), batches.len());
        batches.push(layout);
        next += len;
    }
    debug_assert_eq!(next as u64, spec.n_files);
    for files in &mut files_of {
        files.sort_unstable();
    }

    let mut functions_of = Vec::with_capacity(k);
    let mut start = 0usize;
    for w in assignment.fractions() {
        let len = integral(&(w * &q_big));
        functions_of.push(start..start + len);
        start += len;
    }
    debug_assert_eq!(start as u64, spec.n_functions);

    Ok(MaterializedInstance {
        n_files: spec.n_files as usize,
        n_functions: spec.n_functions as usize,
        t_bits: spec.t_bits,
        seed: spec.seed,
        r: plan.r,
        batches,
        files_of,
        functions_of,
        batch_index,
    })
}

fn check_multiple(what: &'static str, given: u64, minimal: &BigUint, shown: &str) -> Result<()> {
    if given == 0 || !(BigUint::from(given) % minimal).is_zero() {
        return Err(Error::IndivisibleInstance {
            what,
            given,
            minimal: shown.to_string(),
        });
    }
    Ok(())
}

fn integral(v: &Rational) -> usize {
    assert!(v.is_integer(), "non-integral size {v}");
    v.numer().to_usize().expect("size fits in usize")
}
