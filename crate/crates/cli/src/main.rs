//! `covsel` command-line interface.
//!
//! Exit codes:
//!
//! | code | meaning                                           |
//! |------|---------------------------------------------------|
//! | 0    | success                                           |
//! | 2    | usage error (bad flags or arguments)              |
//! | 3    | input dataset could not be read or is invalid     |
//! | 4    | configuration file could not be read or is invalid|
//! | 5    | numerical failure (singular submatrix or design)  |
//! | 6    | report could not be written                       |
//! | 7    | study aborted: too many failed replications       |

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covsel_core::covariance::{criterion, empirical_covariances, VariableSubset};
use covsel_core::io::{
    emit_probe, emit_records, emit_selection, emit_study, load_run_file, parse_dataset_csv,
    ConfigError, DataError, OutputFormat, ReportError, SelectionMeta,
};
use covsel_core::selection::{
    select_variables, DecreasingShape, IncreasingShape, PenaltyArg, PenaltySchedule, PsiScale,
    SelectionError,
};
use covsel_core::simulation::{convergence_probe, run_records, summarize, SimulationError};
use covsel_core::CovError;

#[derive(Debug, Parser)]
#[command(name = "covsel", version, about = "Covariance-criterion variable selection")]
struct Cli {
    /// Worker threads for parallel replications (defaults to all cores)
    #[arg(long, global = true, env = "COVSEL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select relevant predictors from a dataset
    Select(SelectArgs),
    /// Run a seeded Monte Carlo study and write the per-n summary table
    Simulate(SimulateArgs),
    /// Print the criterion value of a variable subset on a dataset
    Criterion(CriterionArgs),
    /// Tabulate the sampling behaviour of the criterion across sample sizes
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file: p predictor columns followed by q response columns
    #[arg(long)]
    input: PathBuf,
    /// Number of predictor columns
    #[arg(long)]
    p: usize,
    /// Number of response columns
    #[arg(long)]
    q: usize,
    /// Skip the first row of the CSV file
    #[arg(long)]
    has_header: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.25)]
    f_rate: f64,
    #[arg(long, default_value_t = 0.75)]
    g_rate: f64,
    /// inverse | inverse-sqrt | pow:<a>
    #[arg(long, default_value = "inverse")]
    f_shape: DecreasingShape,
    /// linear | sqrt | quadratic | pow:<b>
    #[arg(long, default_value = "linear")]
    g_shape: IncreasingShape,
    /// rank | label
    #[arg(long, default_value = "rank")]
    penalty_arg: PenaltyArg,
    /// squared | norm
    #[arg(long, default_value = "squared")]
    psi_scale: PsiScale,
    /// Recorded in the report header
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// csv | json-lines
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base_seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write one record per replication here
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct CriterionArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated 1-based variable labels
    #[arg(long, value_delimiter = ',', required = true)]
    subset: Vec<usize>,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated 1-based variable labels (overrides the config)
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Overrides the config's base_seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug)]
enum AppError {
    Usage(String),
    Data(DataError),
    Config(ConfigError),
    Numeric(String),
    Report(ReportError),
    Aborted(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) => 3,
            Self::Config(_) => 4,
            Self::Numeric(_) => 5,
            Self::Report(_) => 6,
            Self::Aborted(_) => 7,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Numeric(m) | Self::Aborted(m) => f.write_str(m),
            Self::Data(e) => write!(f, "{e}"),
            Self::Config(e) => write!(f, "{e}"),
            Self::Report(e) => write!(f, "{e}"),
        }
    }
}

impl From<DataError> for AppError {
    fn from(e: DataError) -> Self {
        Self::Data(e)
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<ReportError> for AppError {
    fn from(e: ReportError) -> Self {
        Self::Report(e)
    }
}

impl From<SelectionError> for AppError {
    fn from(e: SelectionError) -> Self {
        match e {
            SelectionError::InvalidPenalty(_) => Self::Usage(e.to_string()),
            other => Self::Numeric(other.to_string()),
        }
    }
}

impl From<CovError> for AppError {
    fn from(e: CovError) -> Self {
        match e {
            CovError::InvalidSubset(_) => Self::Usage(e.to_string()),
            other => Self::Numeric(other.to_string()),
        }
    }
}

impl From<SimulationError> for AppError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::TooManyFailures { .. } => Self::Aborted(e.to_string()),
            SimulationError::InvalidConfig(_) => Self::Usage(e.to_string()),
            other => Self::Numeric(other.to_string()),
        }
    }
}

fn run_select(args: SelectArgs) -> Result<(), AppError> {
    let d = &args.data;
    let data = parse_dataset_csv(&d.input, d.p, d.q, d.has_header)?;
    let pen = PenaltySchedule::new(args.f_rate, args.f_shape, args.g_rate, args.g_shape)?
        .with_penalty_arg(args.penalty_arg)
        .with_psi_scale(args.psi_scale);
    let result = select_variables(&data, &pen)?;
    let meta = SelectionMeta {
        penalties: pen,
        seed: args.seed,
    };
    emit_selection(&result, &meta, args.format, &args.out)?;
    let labels: Vec<String> = result.selected.iter().map(|j| j.to_string()).collect();
    println!("selected: {}", labels.join(","));
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), AppError> {
    let mut cfg = load_run_file(&args.config)?.simulation;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    let records = run_records(&cfg)?;
    if let Some(path) = &args.records {
        emit_records(&records, args.format, path)?;
    }
    let summary = summarize(&records)?;
    emit_study(&summary, args.format, &args.out)?;
    Ok(())
}

fn run_criterion(args: CriterionArgs) -> Result<(), AppError> {
    let d = &args.data;
    let data = parse_dataset_csv(&d.input, d.p, d.q, d.has_header)?;
    let k = VariableSubset::new(args.subset.iter().copied(), data.p())?;
    let suite = empirical_covariances(&data)?;
    println!("{}", criterion(&suite, &k)?);
    Ok(())
}

fn run_probe(args: ProbeArgs) -> Result<(), AppError> {
    let file = load_run_file(&args.config)?;
    let model = &file.simulation.model;
    let subset = args.subset.unwrap_or(file.probe.subset);
    let k = VariableSubset::new(subset, model.p())?;
    let seed = args.seed.unwrap_or(file.simulation.base_seed);
    let table = convergence_probe(
        model,
        &k,
        &file.probe.sample_sizes,
        file.probe.replications,
        seed,
    )?;
    emit_probe(&table, args.format, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match cli.command {
        Command::Select(a) => run_select(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Criterion(a) => run_criterion(a),
        Command::Probe(a) => run_probe(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
