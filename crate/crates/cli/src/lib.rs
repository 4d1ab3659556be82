//! Command-line front end for the heterogeneous coded MapReduce planner.
//!
//! Node numbers in every report are 1-based positions in the profile sorted
//! by ascending load; `input_position` maps them back to the input order.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;
pub mod sweep;
pub mod tables;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hetcdc_core::{Rational, Strategy};

use crate::commands::SimulateArgs;
use crate::config::{parse_list, Config, Problem};
use crate::error::{CliError, ExitCode};
use crate::render::{flatten_csv, pretty};
use crate::sweep::Preset;
use crate::tables::{Rendering, TablePreset};

#[derive(Debug, Parser)]
#[command(name = "hetcdc", version, about = "Plan, evaluate and simulate heterogeneous coded MapReduce")]
pub struct Cli {
    /// JSON config: {"K", "m", "w", "strategy"}; `-` reads standard input.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Digits after the decimal point (round half to even).
    #[arg(long, global = true, default_value_t = 6)]
    pub precision: usize,
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long, global = true)]
    pub csv: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Inline profile flags; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ProfileArgs {
    /// Computation loads, e.g. "1/5,1/3,1/3,1/2".
    #[arg(long)]
    pub m: Option<String>,
    /// Function assignment; implies strategy `custom`.
    #[arg(long)]
    pub w: Option<String>,
    /// even | computation | shuffle | custom
    #[arg(long)]
    pub strategy: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// File allocation, sub-batch table and minimal N and Q.
    Plan(ProfileArgs),
    /// Achievable load with bounds and gaps.
    Load(ProfileArgs),
    /// Run Map, Shuffle and Reduce on a concrete instance.
    Simulate {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Number of input files N (default: minimal).
        #[arg(long)]
        files: Option<u64>,
        /// Number of output functions Q (default: minimal).
        #[arg(long)]
        functions: Option<u64>,
        /// Bits per intermediate value T.
        #[arg(long, default_value_t = hetcdc_core::simulator::DEFAULT_T_BITS)]
        bits: usize,
        /// Largest number of stored intermediate values to materialize.
        #[arg(long)]
        iv_budget: Option<u64>,
        /// Write one JSON line per shuffle message here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Loads over a grid of scale factors m̄ for m = m̄·c.
    Sweep {
        /// fig2-k3 | fig2-k12
        #[arg(long, conflicts_with = "coefficients")]
        preset: Option<String>,
        /// Coefficient vector c, e.g. "0.9,1,1.1".
        #[arg(long)]
        coefficients: Option<String>,
        #[arg(long, default_value = "0.01")]
        step: String,
        /// First grid point (default: one step).
        #[arg(long)]
        from: Option<String>,
        /// Last grid point (default: 1).
        #[arg(long)]
        to: Option<String>,
    },
    /// Cut-set lower bound for (m, w).
    Bound(ProfileArgs),
    /// Gap to the equivalent homogeneous optimum and to the lower bound.
    Gap(ProfileArgs),
    /// Reproduce a reference table: table1 | table2.
    Table { preset: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// What a successful invocation produced.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub code: ExitCode,
    /// Messages for standard error.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            body,
            code: ExitCode::Ok,
            warnings: Vec::new(),
        }
    }
}

impl Cli {
    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            default
        }
    }

    fn problem(&self, args: &ProfileArgs) -> Result<Problem, CliError> {
        let base = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let strategy = args
            .strategy
            .as_deref()
            .map(|s| s.parse::<Strategy>())
            .transpose()?;
        base.overlay(args.m.as_deref(), args.w.as_deref(), strategy)?.resolve()
    }

    fn document(&self, value: serde_json::Value) -> String {
        match self.format(Format::Json) {
            Format::Csv => flatten_csv(&value),
            _ => pretty(&value),
        }
    }
}

fn rational(text: &str) -> Result<Rational, CliError> {
    Ok(text.trim().parse::<Rational>()?)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let precision = cli.precision;
    match &cli.command {
        Command::Plan(args) => Ok(Outcome::ok(cli.document(commands::plan(&cli.problem(args)?)?))),
        Command::Load(args) => Ok(Outcome::ok(cli.document(commands::load(&cli.problem(args)?, precision)?))),
        Command::Bound(args) => Ok(Outcome::ok(cli.document(commands::bound(&cli.problem(args)?, precision)?))),
        Command::Gap(args) => Ok(Outcome::ok(cli.document(commands::gap(&cli.problem(args)?, precision)?))),
        Command::Simulate {
            profile,
            files,
            functions,
            bits,
            iv_budget,
            transcript,
        } => {
            let problem = cli.problem(profile)?;
            let args = SimulateArgs {
                files: *files,
                functions: *functions,
                bits: *bits,
                seed: cli.seed.unwrap_or(0),
                iv_budget: *iv_budget,
            };
            let sim = commands::simulate(&problem, &args, precision)?;
            if let Some(path) = transcript {
                commands::write_transcript(path, &sim.transcript)?;
            }
            let mut outcome = Outcome::ok(cli.document(sim.report));
            if !sim.consistent {
                outcome.code = ExitCode::Inconsistent;
                outcome
                    .warnings
                    .push("simulation disagrees with the analytic load or failed to decode".into());
            }
            Ok(outcome)
        }
        Command::Sweep {
            preset,
            coefficients,
            step,
            from,
            to,
        } => {
            let coefficients = match (preset, coefficients) {
                (Some(p), None) => p.parse::<Preset>()?.coefficients(),
                (None, Some(c)) => parse_list(c)?,
                _ => return Err(CliError::Parse("sweep needs --preset or --coefficients".into())),
            };
            let step = rational(step)?;
            let from = from.as_deref().map(rational).transpose()?.unwrap_or_else(|| step.clone());
            let to = to.as_deref().map(rational).transpose()?.unwrap_or_else(Rational::one);
            let grid = sweep::grid(&from, &to, &step)?;
            let rows = sweep::sweep(&coefficients, &grid);
            let skipped = rows.iter().filter(|r| r.even.is_none()).count();
            let body = match cli.format(Format::Csv) {
                Format::Json => pretty(&sweep::to_json(&rows, &coefficients, precision)),
                _ => sweep::to_csv(&rows, precision),
            };
            let mut outcome = Outcome::ok(body);
            if skipped > 0 {
                outcome
                    .warnings
                    .push(format!("{skipped} of {} grid points outside the valid domain", rows.len()));
            }
            Ok(outcome)
        }
        Command::Table { preset } => {
            let how = match cli.format(Format::Text) {
                Format::Text => Rendering::Text,
                Format::Json => Rendering::Json,
                Format::Csv => Rendering::Csv,
            };
            let body = match preset.parse::<TablePreset>()? {
                TablePreset::Table1 => tables::render_table1(&tables::table1(), precision, how),
                TablePreset::Table2 => tables::render_table2(&tables::table2(), how),
            };
            Ok(Outcome::ok(body))
        }
    }
}
