use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qudit_lab::povm::MeasurementCase;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "qudit-lab",
    version,
    about = "Qudit estimation from parallel and phase-conjugate pairs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Root RNG seed (decimal or 0x-prefixed hex)
    #[arg(long, global = true, env = "QUDIT_LAB_SEED", default_value = "0x5EED_C0DE", value_parser = parse_seed)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseArg {
    Parallel,
    Conjugate,
}

impl From<CaseArg> for MeasurementCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Parallel => MeasurementCase::Parallel,
            CaseArg::Conjugate => MeasurementCase::Conjugate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorArg {
    /// case_one_opt for parallel inputs, psi_local for conjugate inputs
    Optimal,
    #[value(name = "case_one_opt")]
    CaseOneOpt,
    #[value(name = "psi_local")]
    PsiLocal,
    Identity,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Closed-form fidelities against the printed table
    Table1 {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,11,17")]
        d_list: Vec<usize>,
        /// Monte-Carlo samples per confirmation (d <= 4); 0 disables
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Maximize the mean fidelity over the seed family
    Optimize {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Conjugation fidelity bound for N copies
    Bound {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Random channels checked against the bound
        #[arg(long, default_value_t = 0)]
        fuzz: usize,
    },
    /// Rejection-sample measurement outcomes
    Simulate {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Accepted outcomes to collect
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = OperatorArg::Optimal)]
        operator: OperatorArg,
    },
    /// Identity, projector and expansion residual suites
    Selftest,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let clean = s.replace('_', "");
    let parsed = match clean
        .strip_prefix("0x")
        .or_else(|| clean.strip_prefix("0X"))
    {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => clean.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}
