use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lclab", version, about = "Reproducible numerical checks for log-concave measures")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for report.json, rows.csv and manifest.json; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every numeric subcommand.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// Measure: catalog key, built-in key or inline JSON descriptor.
    #[arg(long, default_value = "gaussian")]
    pub measure: String,
    /// Convex body: catalog key, built-in key or inline JSON descriptor.
    #[arg(long)]
    pub body: Option<String>,
    /// Dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Level, truncation radius or threshold, depending on the subcommand.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// `paper`, `intermediate`, `conjecture` or a number.
    #[arg(long, default_value = "paper")]
    pub exponent: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CoareaKind {
    Exact,
    Grid,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum LevelCheck {
    Mass,
    Ball,
    Window,
    Markov,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CalcOp {
    /// Write the measure's potential on a grid (n <= 2).
    Export,
    Legendre,
    InfConv,
    Asplund,
    Dilate,
    SelfIdentity,
    Variation,
    Moreau,
    Epi,
    MainChain,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Functional perimeter, or the boundary measure of --body.
    Perimeter {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Co-area integral; with --body in 2D, the truncated co-area identity.
    Coarea {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "exact")]
        method: CoareaKind,
        #[arg(long, default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = 301)]
        resolution: usize,
    },
    /// Moment measure and surface-measure pair.
    MomentMeasure {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Pushforward points to include in the report.
        #[arg(long, default_value_t = 0)]
        keep: usize,
    },
    /// Mean projection of --body, or mean hyperplane shadow of --measure.
    Projections {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        rotations: usize,
    },
    /// Radial identities and log-concavity of the radial moment function.
    Radial {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        p_max: f64,
        #[arg(long, default_value_t = 80)]
        steps: usize,
    },
    /// Level-set mass, ball containment, gradient window or Markov set.
    Levelset {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "mass")]
        check: LevelCheck,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Grid transforms and calculus identities.
    Calculus {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        op: CalcOp,
        /// Grid header (JSON); values are read from the sibling `.bin` file.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        input2: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        /// Comma-separated query point for `moreau`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
    },
    /// Dimensional Brunn-Minkowski check on a body pair or random triples.
    BmCheck {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Two bodies K and L; random triples are drawn when absent.
        #[arg(long, num_args = 2, value_names = ["K", "L"])]
        bodies: Vec<String>,
        #[arg(long, default_value_t = 20)]
        triples: usize,
        /// Also scan a grid of exponents.
        #[arg(long)]
        scan: bool,
    },
    /// Boundary measures over the default body sweep against the co-area cap.
    MaxPerimeter {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Condensed acceptance battery at dimension --n.
    Suite {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Re-run a manifest and compare its outputs byte for byte.
    Replay { manifest: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Perimeter { .. } => "perimeter",
            Command::Coarea { .. } => "coarea",
            Command::MomentMeasure { .. } => "moment-measure",
            Command::Projections { .. } => "projections",
            Command::Radial { .. } => "radial",
            Command::Levelset { .. } => "levelset",
            Command::Calculus { .. } => "calculus",
            Command::BmCheck { .. } => "bm-check",
            Command::MaxPerimeter { .. } => "max-perimeter",
            Command::Suite { .. } => "suite",
            Command::Replay { .. } => "replay",
        }
    }

    pub fn common(&self) -> Option<&Common> {
        match self {
            Command::Perimeter { common }
            | Command::Coarea { common, .. }
            | Command::MomentMeasure { common, .. }
            | Command::Projections { common, .. }
            | Command::Radial { common, .. }
            | Command::Levelset { common, .. }
            | Command::Calculus { common, .. }
            | Command::BmCheck { common, .. }
            | Command::MaxPerimeter { common }
            | Command::Suite { common } => Some(common),
            Command::Replay { .. } => None,
        }
    }
}
