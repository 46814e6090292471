mod commands;
mod graph_io;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bnsl::Error;

#[derive(Parser, Debug)]
#[command(name = "bnsl", version, about = "Learn Bayesian network structures from data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Learn a network structure from a data file.
    Learn(LearnArgs),
    /// Score a network against a data file.
    Score(ScoreArgs),
    /// Test the conditional independence of two variables.
    Citest(CitestArgs),
    /// Compare two network structures.
    Compare(CompareArgs),
    /// Draw synthetic rows from a network.
    Sample(SampleArgs),
    /// Write a network in Graphviz DOT format.
    ExportDot(ExportArgs),
    /// Print the model string of a completely directed network.
    Modelstring(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Modelstring,
    Arcs,
    Dot,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataType {
    Discrete,
    Continuous,
}

impl From<DataType> for bnsl::DataKind {
    fn from(t: DataType) -> Self {
        match t {
            DataType::Discrete => bnsl::DataKind::Discrete,
            DataType::Continuous => bnsl::DataKind::Continuous,
        }
    }
}

#[derive(Args, Debug)]
pub struct DataArgs {
    /// Delimited data file with a header row.
    pub data: PathBuf,
    /// Force the column type instead of detecting it.
    #[arg(long = "data-type", value_enum)]
    pub data_type: Option<DataType>,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// gs, iamb, fast-iamb, inter-iamb, mmpc or hc.
    #[arg(long, default_value = "gs")]
    pub algo: String,
    /// Independence test label (constraint-based algorithms).
    #[arg(long)]
    pub test: Option<String>,
    /// Score label (hc).
    #[arg(long, alias = "type")]
    pub score: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Monte Carlo permutations.
    #[arg(long = "B")]
    pub replicates: Option<usize>,
    /// Imaginary sample size of bde and bge.
    #[arg(long)]
    pub iss: Option<f64>,
    /// Penalty coefficient of aic and bic.
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub whitelist: Option<PathBuf>,
    #[arg(long)]
    pub blacklist: Option<PathBuf>,
    /// Initial network for hc, as a model string or a file.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub restart: Option<usize>,
    #[arg(long)]
    pub perturb: Option<usize>,
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    pub optimized: bool,
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the learning trace to standard error.
    #[arg(long)]
    pub debug: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "summary")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Network as a model string, a model string file or an arc file.
    #[arg(long)]
    pub graph: String,
    #[arg(long, alias = "type")]
    pub score: Option<String>,
    #[arg(long)]
    pub iss: Option<f64>,
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CitestArgs {
    #[command(flatten)]
    pub input: DataArgs,
    pub x: String,
    pub y: String,
    /// Conditioning variables.
    pub given: Vec<String>,
    #[arg(long)]
    pub test: Option<String>,
    #[arg(long = "B", default_value_t = 5000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    pub first: String,
    pub second: String,
    /// Data file supplying the node set of arc-file inputs.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Rows to draw.
    #[arg(long)]
    pub n: usize,
    /// Structure to fit, as a model string or a file; needs --data.
    #[arg(long, conflicts_with = "network", requires = "data")]
    pub graph: Option<String>,
    /// Data the structure is fitted to.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long = "data-type", value_enum)]
    pub data_type: Option<DataType>,
    /// Fitted network in JSON.
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Also write the fitted parameters as JSON.
    #[arg(long = "save-network")]
    pub save_network: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Network as a model string, a model string file or an arc file.
    pub graph: String,
    /// Data file supplying the node set of arc-file inputs.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failures surfaced to the shell.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Library(Error::InvalidArgument(_)) => 2,
            Failure::Library(Error::Cycle | Error::PriorConflict(_)) => 4,
            Failure::Library(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message().replace('\n', " "));
            ExitCode::from(f.exit_code())
        }
    }
}
