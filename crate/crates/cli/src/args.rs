use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbit_core::apt::Backend;
use pbit_core::benchmark::TimeMode;
use pbit_core::sampler::Mode;
use pbit_core::validate::Suite;

#[derive(Debug, Parser)]
#[command(name = "pbit", version, about = "p-bit Ising machine emulator for 3-regular 3-XORSAT")]
pub struct Cli {
    /// Worker threads; defaults to every available core.
    #[arg(long, global = true, env = "PBIT_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate planted 3R3X instances.
    Generate(GenerateArgs),
    /// Build an APT temperature ladder from one seeded pick of the instances.
    Preprocess(PreprocessArgs),
    /// Run an APT campaign over a directory of instances.
    Solve(SolveArgs),
    /// Run campaigns over one or more sizes and write TTS reports.
    Benchmark(BenchmarkArgs),
    /// Run an invariant suite and print a JSON summary.
    Validate(ValidateArgs),
    /// Measure mean seconds per sweep of the software sampler.
    SweepTime(SweepTimeArgs),
    /// Re-run the command recorded in a manifest into a new directory.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of variables k (problem size n = 2k).
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    pub vars: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, env = "PBIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write into a non-empty output directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    #[value(name = "2")]
    Second,
    #[value(name = "3")]
    Third,
}

impl OrderArg {
    pub fn value(self) -> u8 {
        match self {
            OrderArg::Second => 2,
            OrderArg::Third => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Standalone,
    Mastergraph,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Standalone => Backend::Standalone,
            BackendArg::Mastergraph => Backend::Mastergraph,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float,
    Hardware,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Hardware => Mode::Hardware,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimeModelArg {
    Wallclock,
    Fpga,
    Sweeps,
}

impl From<TimeModelArg> for TimeMode {
    fn from(t: TimeModelArg) -> Self {
        match t {
            TimeModelArg::Wallclock => TimeMode::Wallclock,
            TimeModelArg::Fpga => TimeMode::Fpga,
            TimeModelArg::Sweeps => TimeMode::Sweeps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Boltzmann,
    Coloring,
    Conversion,
    Oracle,
}

impl SuiteArg {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::All => Suite::ALL.to_vec(),
            SuiteArg::Boltzmann => vec![Suite::Boltzmann],
            SuiteArg::Coloring => vec![Suite::Coloring],
            SuiteArg::Conversion => vec![Suite::Conversion],
            SuiteArg::Oracle => vec![Suite::Oracle],
        }
    }
}

/// APT knobs shared by preprocessing and solving. Flags override the
/// params file, which overrides the defaults.
#[derive(Debug, Args)]
pub struct AptArgs {
    /// JSON file with any subset of the APT parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n_chains: Option<usize>,
    #[arg(long)]
    pub sweeps_per_chain: Option<usize>,
    #[arg(long)]
    pub sweeps_per_swap: Option<usize>,
    #[arg(long)]
    pub max_swaps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "2")]
    pub order: OrderArg,
    #[command(flatten)]
    pub apt: AptArgs,
    #[arg(long, env = "PBIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long, value_enum, default_value = "standalone", env = "PBIT_BACKEND")]
    pub backend: BackendArg,
    #[arg(long, value_enum, default_value = "float", env = "PBIT_MODE")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100, env = "PBIT_RUNS")]
    pub runs: usize,
    #[command(flatten)]
    pub apt: AptArgs,
    /// Use this ladder instead of preprocessing one per size.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, env = "PBIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "2")]
    pub order: OrderArg,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Instance directories, one problem size each.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',', default_value = "2")]
    pub order: Vec<OrderArg>,
    #[arg(long, value_enum, default_value = "fpga")]
    pub time_model: TimeModelArg,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, env = "PBIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepTimeArgs {
    #[arg(long, value_enum, default_value = "2")]
    pub order: OrderArg,
    #[arg(long, value_enum, default_value = "standalone")]
    pub backend: BackendArg,
    /// Problem sizes n.
    #[arg(long, value_delimiter = ',', default_value = "16,32,48,64,80,96,112")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub sweeps: usize,
    #[arg(long, env = "PBIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}
