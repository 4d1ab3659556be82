//! The per-profile subcommands: plan, load, simulate, bound, gap.

use std::io::Write;
use std::path::Path;

use hetcdc_core::allocation::DEFAULT_IV_BUDGET;
use hetcdc_core::analytics::{computation_aware_gap_to_lower, LOWER_BOUND_NODE_CAP};
use hetcdc_core::simulator::transcript_lines;
use hetcdc_core::{
    achievable_load, build_shuffle, gap_to_homogeneous, homogeneous_optimal, lower_bound, materialize,
    minimal_file_count, minimal_function_count, run_map, run_reduce, AllocationPlan, FunctionAssignment,
    InstanceSpec, Rational, Strategy,
};
use serde_json::{json, Value};

use crate::config::Problem;
use crate::error::CliError;
use crate::render::{exact_list, nodes, number, object, one_based};

/// Input echo shared by every report: feeding it back reproduces the run.
fn echo(problem: &Problem, w: Option<&FunctionAssignment>) -> Vec<(&'static str, Value)> {
    let w_input = match (problem.strategy, w) {
        (Strategy::Custom, Some(w)) => exact_list(&problem.profile.to_original_order(w.fractions())),
        _ => Value::Null,
    };
    vec![
        ("K", json!(problem.profile.k())),
        ("m", exact_list(&problem.m_input)),
        ("w", w_input),
        ("strategy", json!(problem.strategy)),
        ("input_position", json!(problem.input_positions())),
        ("m_sorted", exact_list(problem.profile.loads())),
    ]
}

pub fn plan(problem: &Problem) -> Result<Value, CliError> {
    let plan = problem.plan()?;
    let w = problem.assignment(&plan).ok();
    let min_n = minimal_file_count(&plan);
    let mut min_q = serde_json::Map::new();
    for s in Strategy::GENERATED {
        let q = hetcdc_core::assign(s, &problem.profile, &plan, None)
            .map(|w| json!(minimal_function_count(&w).to_string()))
            .unwrap_or(Value::Null);
        min_q.insert(s.as_str().into(), q);
    }
    if let Some(custom) = &problem.custom {
        min_q.insert("custom".into(), json!(minimal_function_count(custom).to_string()));
    }
    let mut fields = echo(problem, w.as_ref());
    fields.extend([
        ("l", exact_list(&plan.l)),
        ("r", json!(plan.r)),
        ("xi", json!(plan.xi.to_string())),
        ("P", exact_list(&plan.p)),
        ("lowcl", nodes(plan.lowcl())),
        ("highcl", nodes(plan.highcl())),
        ("subbatches", serde_json::to_value(plan.subbatches()).expect("serializable")),
        (
            "minimal_N",
            json!({
                "exact": min_n.exact.to_string(),
                "symbolic": min_n.symbolic(),
                "estimate": min_n.estimate.to_string(),
            }),
        ),
        ("minimal_Q", Value::Object(min_q)),
    ]);
    Ok(object(fields))
}

pub fn load(problem: &Problem, precision: usize) -> Result<Value, CliError> {
    let plan = problem.plan()?;
    let w = problem.assignment(&plan)?;
    let a = achievable_load(&problem.profile, &plan, &w);
    let hom = homogeneous_optimal(problem.profile.k(), &problem.profile.mean())?;
    let (bound, gap_to_lower) = if problem.profile.k() <= LOWER_BOUND_NODE_CAP {
        let lb = lower_bound(&problem.profile, &w)?;
        let gap = (!lb.value.is_zero()).then(|| number(&(&a.total / &lb.value), precision));
        (
            json!({ "value": number(&lb.value, precision), "witness": nodes(lb.witness) }),
            gap.unwrap_or(Value::Null),
        )
    } else {
        (Value::Null, Value::Null)
    };
    let mut fields = echo(problem, Some(&w));
    fields.extend([
        ("w_sorted", exact_list(w.fractions())),
        ("achievable", number(&a.total, precision)),
        ("lowcl_load", number(&a.lowcl, precision)),
        ("highcl_load", number(&a.highcl, precision)),
        ("s_order", one_based(&a.s_order)),
        ("lower_bound", bound),
        ("homogeneous_optimal", number(&hom, precision)),
        ("gap_to_lower", gap_to_lower),
        ("gap_to_homogeneous", number(&(&a.total / &hom), precision)),
    ]);
    Ok(object(fields))
}

pub fn bound(problem: &Problem, precision: usize) -> Result<Value, CliError> {
    let plan = problem.plan()?;
    let w = problem.assignment(&plan)?;
    let lb = lower_bound(&problem.profile, &w)?;
    let mut fields = echo(problem, Some(&w));
    fields.extend([
        ("w_sorted", exact_list(w.fractions())),
        ("lower_bound", number(&lb.value, precision)),
        ("witness", nodes(lb.witness)),
    ]);
    Ok(object(fields))
}

/// `16 + 70e` with `e` rounded down, so that passing the check is exact.
pub fn corollary_limit() -> Rational {
    Rational::from(16usize) + Rational::from(70usize) * Rational::new(2_718_281_828, 1_000_000_000)
}

pub fn gap(problem: &Problem, precision: usize) -> Result<Value, CliError> {
    let g = gap_to_homogeneous(&problem.profile)?;
    let to_lower = if problem.profile.k() <= LOWER_BOUND_NODE_CAP {
        Some(computation_aware_gap_to_lower(&problem.profile)?)
    } else {
        None
    };
    // the gap fixes its own assignment per regime
    let mut fields = echo(problem, None);
    fields.retain(|(k, _)| !matches!(*k, "w" | "strategy"));
    fields.extend([
        ("mbar", number(&problem.profile.mean(), precision)),
        ("regime", json!(g.regime)),
        ("achievable", number(&g.achievable, precision)),
        ("homogeneous_optimal", number(&g.homogeneous_optimal, precision)),
        ("ratio", number(&g.ratio, precision)),
        ("ratio_below_115", json!(g.ratio < Rational::from(115usize))),
        (
            "computation_aware_gap_to_lower",
            to_lower.as_ref().map_or(Value::Null, |v| number(v, precision)),
        ),
        (
            "computation_aware_gap_within_16_plus_70e",
            to_lower.map_or(Value::Null, |v| json!(v <= corollary_limit())),
        ),
    ]);
    Ok(object(fields))
}

#[derive(Debug, Clone, Default)]
pub struct SimulateArgs {
    pub files: Option<u64>,
    pub functions: Option<u64>,
    pub bits: usize,
    pub seed: u64,
    pub iv_budget: Option<u64>,
}

/// Simulation result; `consistent` is false when decoding failed or the
/// measured load differs from the analytic one.
pub struct Simulation {
    pub report: Value,
    pub consistent: bool,
    pub transcript: Vec<String>,
}

pub fn simulate(problem: &Problem, args: &SimulateArgs, precision: usize) -> Result<Simulation, CliError> {
    let plan: AllocationPlan = problem.plan()?;
    let w = problem.assignment(&plan)?;
    let n = match args.files {
        Some(n) => n,
        None => minimal_file_count(&plan).checked(u64::MAX)?,
    };
    let q = match args.functions {
        Some(q) => q,
        None => u64::try_from(minimal_function_count(&w)).map_err(|_| {
            CliError::Domain(hetcdc_core::Error::OutOfDomain("minimal function count exceeds 64 bits".into()))
        })?,
    };
    let mut spec = InstanceSpec::new(n, q, args.bits, args.seed);
    spec.iv_budget = args.iv_budget.unwrap_or(DEFAULT_IV_BUDGET);
    let instance = materialize(&problem.profile, &plan, &w, spec)?;
    let map = run_map(&instance);
    let messages = build_shuffle(&instance, &map);
    let sim = run_reduce(&instance, &map, &messages);
    let analytic = achievable_load(&problem.profile, &plan, &w).total;
    let consistent = sim.all_decoded() && sim.measured_load == analytic;

    let failures: Vec<Value> = sim
        .failures
        .iter()
        .enumerate()
        .filter_map(|(k, f)| f.map(|f| json!({ "node": k + 1, "q": f.q, "n": f.n, "kind": f.kind })))
        .collect();
    let mut fields = echo(problem, Some(&w));
    fields.extend([
        ("N", json!(n)),
        ("Q", json!(q)),
        ("T", json!(args.bits)),
        ("seed", json!(args.seed)),
        ("measured_load", number(&sim.measured_load, precision)),
        ("analytic_load", number(&analytic, precision)),
        ("consistent", json!(consistent)),
        ("decode_success", json!(sim.decode_success())),
        ("failures", Value::Array(failures)),
        ("total_bits", json!(sim.total_bits)),
        ("per_sender_bits", json!(sim.per_sender_bits)),
        ("message_count", json!(sim.messages.len())),
    ]);
    Ok(Simulation {
        report: object(fields),
        consistent,
        transcript: transcript_lines(&sim).collect(),
    })
}

pub fn write_transcript(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in lines {
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    Ok(())
}
