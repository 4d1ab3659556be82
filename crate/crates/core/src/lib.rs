//! Planning, analysis and simulation of coded distributed computing on
//! heterogeneous MapReduce clusters.
//!
//! Nodes differ in how many input files they map (`m_k`) and how many output
//! functions they reduce (`w_k`). The crate computes a two-step file
//! allocation, generates function assignments, evaluates the resulting
//! shuffle load and its cut-set lower bound in exact rational arithmetic, and
//! can execute the full Map/Shuffle/Reduce exchange bit by bit to confirm
//! that every node decodes and that the measured load matches the formula.
//!
//! Node indices in the Rust API are 0-based positions in the sorted profile.
//! Serialized node numbers are 1-based.

pub mod allocation;
pub mod analytics;
pub mod assignment;
pub mod error;
pub mod model;
pub mod nodeset;
pub mod rational;
pub mod simulator;

pub use allocation::{
    first_step, materialize, minimal_file_count, subbatch_fractions, surplus_ratios, AllocationPlan,
    InstanceSpec, MaterializedInstance, MinimalFileCount, SubBatch, SubBatchTable,
};
pub use analytics::{
    achievable_load, gap_to_homogeneous, homogeneous_even_load, homogeneous_optimal, load_computation_aware,
    load_report, load_shuffle_aware, lower_bound, s_ordering, AchievableLoad, HomogeneousGap, LoadReport,
    LowerBound, Regime,
};
pub use assignment::{
    assign, computation_aware, even_assignment, minimal_function_count, shuffle_aware, Strategy,
};
pub use error::{Error, FailureKind, Result};
pub use model::{parse_rationals, validate_assignment, validate_profile, ComputationProfile, FunctionAssignment};
pub use nodeset::NodeSet;
pub use rational::Rational;
pub use simulator::{build_shuffle, run_map, run_reduce, MapOutput, ShuffleMessage, SimulationReport};
