//! Load curves over a scaled coefficient vector `m = m̄ · c`.

use std::str::FromStr;

use hetcdc_core::{
    achievable_load, computation_aware, even_assignment, homogeneous_optimal, load_shuffle_aware, AllocationPlan,
    ComputationProfile, Error, Rational,
};
use serde_json::{json, Value};

use crate::config::parse_list;
use crate::error::CliError;
use crate::render::{csv_field, number};

/// Grids longer than this are refused.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2K3,
    Fig2K12,
}

impl Preset {
    pub fn coefficients(self) -> Vec<Rational> {
        let text = match self {
            Preset::Fig2K3 => "0.9,1,1.1",
            Preset::Fig2K12 => "0.7,0.8,0.9,0.9,0.9,1,1,1.05,1.1,1.1,1.15,1.15",
        };
        parse_list(text).expect("preset coefficients parse")
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "fig2-k3" => Ok(Preset::Fig2K3),
            "fig2-k12" => Ok(Preset::Fig2K12),
            other => Err(CliError::Parse(format!("unknown sweep preset `{other}`"))),
        }
    }
}

/// `from, from + step, ...` up to and including `to`.
pub fn grid(from: &Rational, to: &Rational, step: &Rational) -> Result<Vec<Rational>, CliError> {
    if !step.is_positive() {
        return Err(CliError::Parse(format!("step must be positive, got {step}")));
    }
    if from > to {
        return Err(CliError::Parse(format!("empty grid: {from} > {to}")));
    }
    let count = ((to - from) / step).floor();
    let count = usize::try_from(count)
        .ok()
        .filter(|c| *c < MAX_GRID_POINTS)
        .ok_or_else(|| CliError::Parse(format!("grid exceeds {MAX_GRID_POINTS} points")))?;
    Ok((0..=count).map(|i| from + step * &Rational::from(i)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub mbar: Rational,
    pub even: Option<Rational>,
    pub computation: Option<Rational>,
    pub shuffle: Option<Rational>,
    /// Optimal homogeneous load at the profile's arithmetic-mean load.
    pub hom_optimal: Option<Rational>,
    pub note: Option<String>,
}

impl SweepRow {
    fn skipped(mbar: Rational, why: &Error) -> Self {
        SweepRow {
            mbar,
            even: None,
            computation: None,
            shuffle: None,
            hom_optimal: None,
            note: Some(format!("skipped: {why}")),
        }
    }
}

pub fn evaluate(coefficients: &[Rational], mbar: &Rational) -> SweepRow {
    let m: Vec<Rational> = coefficients.iter().map(|c| c * mbar).collect();
    let profile = match ComputationProfile::new(m) {
        Ok(p) => p,
        Err(e) => return SweepRow::skipped(mbar.clone(), &e),
    };
    let plan = match AllocationPlan::new(&profile) {
        Ok(p) => p,
        Err(e) => return SweepRow::skipped(mbar.clone(), &e),
    };
    let even = achievable_load(&profile, &plan, &even_assignment(profile.k())).total;
    let computation = achievable_load(&profile, &plan, &computation_aware(&profile)).total;
    let (shuffle, note) = match load_shuffle_aware(&profile, &plan) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(format!("L_shuffle blank: {e}"))),
    };
    SweepRow {
        mbar: mbar.clone(),
        even: Some(even),
        computation: Some(computation),
        shuffle,
        hom_optimal: homogeneous_optimal(profile.k(), &profile.mean()).ok(),
        note,
    }
}

pub fn sweep(coefficients: &[Rational], grid: &[Rational]) -> Vec<SweepRow> {
    grid.iter().map(|mbar| evaluate(coefficients, mbar)).collect()
}

pub const CSV_HEADER: &str = "mbar,L_even,L_computation,L_shuffle,L_hom_optimal,note";

pub fn to_csv(rows: &[SweepRow], precision: usize) -> String {
    let cell = |v: &Option<Rational>| v.as_ref().map(|v| v.to_decimal(precision)).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells = [
            row.mbar.to_decimal(precision),
            cell(&row.even),
            cell(&row.computation),
            cell(&row.shuffle),
            cell(&row.hom_optimal),
            csv_field(row.note.as_deref().unwrap_or("")),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[SweepRow], coefficients: &[Rational], precision: usize) -> Value {
    let cell = |v: &Option<Rational>| v.as_ref().map_or(Value::Null, |v| number(v, precision));
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "mbar": number(&r.mbar, precision),
                "L_even": cell(&r.even),
                "L_computation": cell(&r.computation),
                "L_shuffle": cell(&r.shuffle),
                "L_hom_optimal": cell(&r.hom_optimal),
                "note": r.note,
            })
        })
        .collect();
    json!({
        "coefficients": coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "rows": rows,
    })
}
