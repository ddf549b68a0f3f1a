//! Command-line surface and the run manifest echoed into result documents.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use supercohom_core::engine::{EngineConfig, ExactMode, FieldMode};
use supercohom_core::subcomplex::Strategy;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "supercohom",
    version,
    about = "Cohomology of graded Lie superalgebras via minimal subcomplexes and modular prefiltering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute cohomology over a (k, g) cell or grid.
    Compute(ComputeArgs),
    /// Benchmark start strategies and primes on one cell (wall times +
    /// deterministic operation counts).
    Bench(BenchArgs),
    /// Parse and validate an algebra definition file.
    Validate(ValidateArgs),
    /// Write a built-in algebra window to an algebra definition file.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldArg {
    Q,
    Fp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyArg {
    Top,
    Bottom,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactModeArg {
    Rational,
    IntegerSnf,
    Crt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Built-in family ("SLe2", "H(2)", "B2", "Le2") or a path to an algebra
    /// definition file.
    #[arg(long)]
    pub algebra: String,

    /// Single cochain degree.
    #[arg(long, conflicts_with = "k_range")]
    pub k: Option<usize>,
    /// Inclusive degree range: --k-range LO HI.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub k_range: Option<Vec<usize>>,

    /// Single grade.
    #[arg(long, conflicts_with = "g_range", allow_hyphen_values = true)]
    pub g: Option<i64>,
    /// Inclusive grade range: --g-range LO HI.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub g_range: Option<Vec<i64>>,

    /// Coefficient field of the reported cohomology.
    #[arg(long, value_enum, default_value = "q")]
    pub field: FieldArg,

    /// Prefilter prime (or the working prime with --field fp).
    #[arg(long, default_value_t = supercohom_core::engine::DEFAULT_PRIME)]
    pub prime: i64,

    /// Second prime tried when the primary prime hits a denominator.
    #[arg(long, default_value_t = supercohom_core::engine::DEFAULT_FALLBACK_PRIME)]
    pub fallback_prime: i64,

    /// CRT prime list (comma-separated); implies --exact-mode crt.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<i64>>,

    /// Start-monomial strategy for the subcomplex partition.
    #[arg(long, value_enum, default_value = "top")]
    pub strategy: StrategyArg,

    /// Seed for the random strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Exact computation mode after the prefilter.
    #[arg(long, value_enum)]
    pub exact_mode: Option<ExactModeArg>,

    /// Emit representative cocycles.
    #[arg(long)]
    pub representatives: bool,

    /// Dump each subcomplex (bases + matrices, sparse-triplet text) into
    /// this directory.
    #[arg(long, value_name = "DIR")]
    pub dump_subcomplexes: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,

    /// Worker threads for per-subcomplex analysis (results are identical
    /// for every job count).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Built-in family or algebra file path.
    #[arg(long)]
    pub algebra: String,

    /// Cochain degree of the benched cell.
    #[arg(long)]
    pub k: usize,

    /// Grade of the benched cell.
    #[arg(long, allow_hyphen_values = true)]
    pub g: i64,

    /// Field of the benched computation (fp = purely modular at each grid
    /// prime, the shape of the survey timings).
    #[arg(long, value_enum, default_value = "q")]
    pub field: FieldArg,

    /// Repetitions per configuration (medians are reported).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    /// Strategies to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StrategyArg::Bottom, StrategyArg::Top, StrategyArg::Random])]
    pub strategies: Vec<StrategyArg>,

    /// Prefilter primes to compare.
    #[arg(long, value_delimiter = ',', default_values_t = [supercohom_core::engine::DEFAULT_PRIME])]
    pub primes: Vec<i64>,

    /// Seed for the random strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the benchmark report as JSON here (in addition to the table on
    /// stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Algebra definition file.
    pub path: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Built-in family to export.
    #[arg(long)]
    pub algebra: String,

    /// Bottom of the generated grade window (defaults to the family floor).
    #[arg(long, allow_hyphen_values = true)]
    pub grade_lo: Option<i64>,

    /// Top of the generated grade window.
    #[arg(long, allow_hyphen_values = true)]
    pub grade_hi: i64,

    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolved, validated compute configuration: the manifest echoed into the
/// result document, plus everything the driver needs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub algebra: String,
    /// "builtin" or "file:<path>".
    pub algebra_source: String,
    pub k_range: [usize; 2],
    pub g_range: [i64; 2],
    pub field: FieldArg,
    pub prime: i64,
    pub fallback_prime: i64,
    pub strategy: StrategyArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub exact_mode: ExactModeArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<i64>>,
    pub representatives: bool,
    pub format: FormatArg,
    pub jobs: usize,
}

impl RunManifest {
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            field: match self.field {
                FieldArg::Q => FieldMode::Q,
                FieldArg::Fp => FieldMode::Fp,
            },
            prime: self.prime,
            fallback_prime: self.fallback_prime,
            strategy: match self.strategy {
                StrategyArg::Top => Strategy::Top,
                StrategyArg::Bottom => Strategy::Bottom,
                StrategyArg::Random => Strategy::Random {
                    seed: self.seed.unwrap_or(0),
                },
            },
            exact_mode: match self.exact_mode {
                ExactModeArg::Rational => ExactMode::Rational,
                ExactModeArg::IntegerSnf => ExactMode::IntegerSnf,
                ExactModeArg::Crt => ExactMode::Crt(self.primes.clone().unwrap_or_default()),
            },
            emit_representatives: self.representatives,
        }
    }
}

fn range_of<T: Copy + PartialOrd>(
    single: Option<T>,
    range: &Option<Vec<T>>,
    name: &str,
) -> Result<[T; 2], CliError> {
    match (single, range) {
        (Some(v), None) => Ok([v, v]),
        (None, Some(r)) => {
            // clap enforces exactly two values.
            Ok([r[0], r[1]])
        }
        (None, None) => Err(CliError::config(format!(
            "one of --{name} or --{name}-range is required"
        ))),
        (Some(_), Some(_)) => Err(CliError::config(format!(
            "--{name} conflicts with --{name}-range"
        ))),
    }
}

impl ComputeArgs {
    pub fn manifest(&self) -> Result<RunManifest, CliError> {
        let k_range = range_of(self.k, &self.k_range, "k")?;
        let g_range = range_of(self.g, &self.g_range, "g")?;

        let exact_mode = match (self.exact_mode, &self.primes) {
            (Some(ExactModeArg::Crt), Some(_)) => ExactModeArg::Crt,
            (Some(ExactModeArg::Crt), None) => {
                return Err(CliError::config(
                    "--exact-mode crt requires --primes with at least one prime",
                ))
            }
            (Some(mode), Some(_)) => {
                return Err(CliError::config(format!(
                    "--primes only applies to --exact-mode crt (got {:?})",
                    mode
                )))
            }
            (Some(mode), None) => mode,
            (None, Some(_)) => ExactModeArg::Crt,
            (None, None) => ExactModeArg::Rational,
        };

        if self.jobs == 0 {
            return Err(CliError::config("--jobs must be at least 1"));
        }
        if self.field == FieldArg::Fp && exact_mode != ExactModeArg::Rational {
            return Err(CliError::config(
                "--field fp is a purely modular run; --exact-mode/--primes do not apply",
            ));
        }

        let source = if crate::driver::is_builtin(&self.algebra) {
            "builtin".to_string()
        } else {
            format!("file:{}", self.algebra)
        };

        let manifest = RunManifest {
            subcommand: "compute".to_string(),
            algebra: self.algebra.clone(),
            algebra_source: source,
            k_range,
            g_range,
            field: self.field,
            prime: self.prime,
            fallback_prime: self.fallback_prime,
            strategy: self.strategy,
            seed: match self.strategy {
                StrategyArg::Random => Some(self.seed),
                _ => None,
            },
            exact_mode,
            primes: self.primes.clone(),
            representatives: self.representatives,
            format: self.format,
            jobs: self.jobs,
        };
        // Engine-level validation (odd primes, distinct CRT lists, …) runs
        // here so flag errors surface before any work starts.
        manifest.engine_config().validate()?;
        Ok(manifest)
    }
}
