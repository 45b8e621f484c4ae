use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "qhardy", version, about = "Numerical certification of Hardy-type q-inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sharp constants, classical counterparts and their ordering
    Constants(Flags),
    /// Check every case on the extremal and random corpus
    Verify(Flags),
    /// Ratios along the extremal families toward the critical exponent
    Sweep(Flags),
    /// Discrete Hardy, Copson, matrix and reverse inequalities
    Discrete(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
            Command::Discrete(_) => "discrete",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Constants(f) | Command::Verify(f) | Command::Sweep(f) | Command::Discrete(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Lists are comma separated; anything
/// given here overrides the config file.
#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct Flags {
    /// Case ids, e.g. hardy,rl or their aliases (default: all)
    #[arg(long, value_delimiter = ',')]
    pub case: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Geometric exponents of the discrete forms
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of exponents in a sweep
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with RunConfig keys
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Discrete forms by name or equation label (default: all)
    #[arg(long, value_delimiter = ',')]
    pub form: Vec<String>,
    /// Run the geometric ε-sweep for the geometric discrete forms
    #[arg(long)]
    pub epsilon_sweep: bool,
    /// Window length of the classical discrete forms
    #[arg(long)]
    pub n: Option<usize>,
    /// Random functions or sequences per cell
    #[arg(long)]
    pub corpus: Option<usize>,
    /// Print the wall time to stderr
    #[arg(long)]
    pub timing: bool,
}
