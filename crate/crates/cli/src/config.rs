//! Problem description: from a JSON config file, inline flags, or both.

use std::path::Path;

use hetcdc_core::{
    assign, parse_rationals, AllocationPlan, ComputationProfile, FunctionAssignment, Rational, Strategy,
};
use serde::Deserialize;

use crate::error::CliError;

/// `{"K": 4, "m": ["1/5", ...], "w": [...] | null, "strategy": "even" | ... | null}`.
///
/// Unknown keys are ignored so that `plan` output can be fed back in.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct Config {
    #[serde(rename = "K", default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub m: Option<Vec<Rational>>,
    #[serde(default)]
    pub w: Option<Vec<Rational>>,
    #[serde(default)]
    pub strategy: Option<Strategy>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    /// Reads a config file; `-` means standard input.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin())
        } else {
            std::fs::read_to_string(path)
        }
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Inline values take precedence over the file.
    pub fn overlay(mut self, m: Option<&str>, w: Option<&str>, strategy: Option<Strategy>) -> Result<Self, CliError> {
        if let Some(m) = m {
            self.m = Some(parse_list(m)?);
        }
        if let Some(w) = w {
            self.w = Some(parse_list(w)?);
        }
        if strategy.is_some() {
            self.strategy = strategy;
        }
        Ok(self)
    }

    pub fn resolve(self) -> Result<Problem, CliError> {
        let m = self
            .m
            .ok_or_else(|| CliError::Parse("no computation profile: pass --config or --m".into()))?;
        if let Some(k) = self.k {
            if k != m.len() {
                return Err(CliError::Parse(format!("K = {k} but m has {} entries", m.len())));
            }
        }
        let strategy = match (self.strategy, &self.w) {
            (Some(s), None) => s,
            (Some(Strategy::Custom) | None, Some(_)) => Strategy::Custom,
            (Some(s), Some(_)) => {
                return Err(CliError::Parse(format!("w given together with strategy `{s}`")));
            }
            (None, None) => Strategy::Even,
        };
        let profile = ComputationProfile::new(m.clone())?;
        let w = match self.w {
            Some(w) => Some(FunctionAssignment::for_profile(w, &profile)?),
            None => None,
        };
        Ok(Problem {
            m_input: m,
            profile,
            strategy,
            custom: w,
        })
    }
}

/// Comma- or whitespace-separated rationals.
pub fn parse_list(text: &str) -> Result<Vec<Rational>, CliError> {
    let items: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    Ok(parse_rationals(&items)?)
}

/// A validated profile with its chosen assignment strategy.
#[derive(Debug, Clone)]
pub struct Problem {
    /// Loads in the order they were given.
    pub m_input: Vec<Rational>,
    pub profile: ComputationProfile,
    pub strategy: Strategy,
    /// Custom assignment in sorted order.
    pub custom: Option<FunctionAssignment>,
}

impl Problem {
    pub fn plan(&self) -> Result<AllocationPlan, CliError> {
        Ok(AllocationPlan::new(&self.profile)?)
    }

    pub fn assignment(&self, plan: &AllocationPlan) -> Result<FunctionAssignment, CliError> {
        Ok(assign(self.strategy, &self.profile, plan, self.custom.as_ref())?)
    }

    /// Input position (1-based) of each node in sorted order.
    pub fn input_positions(&self) -> Vec<usize> {
        self.profile.labels().iter().map(|i| i + 1).collect()
    }
}
