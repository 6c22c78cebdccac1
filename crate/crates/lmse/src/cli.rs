//! Command-line surface: `partition`, `resample` and `benchmark`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lmse_core::sir::{aggregate, BenchmarkConfig, ModelParams};
use lmse_core::{
    lmse_partition, mae, mse, sampling_variance, Method, ParticleSet, RngStream, WeightVector,
};

use crate::error::{exit, CliError, Result};
use crate::io::{
    parse_inline_weights, read_weights_file, write_aggregate, write_partition, write_records,
    write_resample,
};
use crate::runner::run_benchmark_parallel;

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "LMSE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "lmse",
    version,
    about = "Least-mean-square-error partitioning and resampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split N units across weighted bins with the least mean square error.
    Partition(PartitionArgs),
    /// Resample a weighted particle set with one of the five schemes.
    Resample(ResampleArgs),
    /// Run the SIR filter experiment comparing sampling variance.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct WeightsSource {
    /// Comma-separated weights, e.g. 0.46,0.34,0.20
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// CSV file with one weight per row in the first column
    #[arg(long, value_name = "PATH")]
    pub weights_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub source: WeightsSource,
    /// Number of units to distribute
    #[arg(long)]
    pub n: usize,
    /// Output file (standard output when omitted)
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[command(flatten)]
    pub source: WeightsSource,
    /// Number of particles to draw
    #[arg(long)]
    pub n: usize,
    /// multinomial, residual, systematic, rsr or msv
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// Seed for the random stream (ignored by msv)
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 100)]
    pub particles: usize,
    #[arg(long, default_value_t = 60)]
    pub steps: u32,
    /// Monte Carlo runs
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Methods to compare, comma-separated
    #[arg(
        long,
        value_parser = parse_method,
        value_delimiter = ',',
        default_value = "multinomial,residual,systematic,rsr,msv"
    )]
    pub methods: Vec<Method>,
    /// Method that advances the shared particle population
    #[arg(long, value_parser = parse_method, default_value = "systematic")]
    pub reference: Method,
    /// Resample the reference filter only at the first step
    #[arg(long)]
    pub resample_once: bool,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Per-run long-format table (standard output when omitted)
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Per-step mean sampling variance table; defaults to
    /// `<output stem>.aggregate.csv` next to --output
    #[arg(long, value_name = "PATH")]
    pub aggregate: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.04)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phi1: f64,
    #[arg(long, default_value_t = 0.2)]
    pub phi2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phi3: f64,
    /// Last step using the quadratic measurement
    #[arg(long, default_value_t = 30)]
    pub switch_time: u32,
    #[arg(long, default_value_t = 3.0)]
    pub gamma_shape: f64,
    #[arg(long, default_value_t = 2.0)]
    pub gamma_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub obs_noise_std: f64,
}

impl From<&ModelArgs> for ModelParams {
    fn from(a: &ModelArgs) -> Self {
        ModelParams {
            omega: a.omega,
            phi1: a.phi1,
            phi2: a.phi2,
            phi3: a.phi3,
            switch_time: a.switch_time,
            gamma_shape: a.gamma_shape,
            gamma_scale: a.gamma_scale,
            obs_noise_std: a.obs_noise_std,
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn load_weights(source: &WeightsSource) -> Result<WeightVector> {
    let raw = match (&source.weights, &source.weights_file) {
        (Some(list), _) => parse_inline_weights(list)?,
        (None, Some(path)) => read_weights_file(path)?,
        (None, None) => return Err(CliError::Validation("no weights given".into())),
    };
    Ok(WeightVector::new(raw)?)
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(CliError::Validation("--n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Runs `body` against the file at `path`, or standard output.
fn with_output<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let attach = |e: CliError, path: &Path| match e {
        CliError::Io { path: None, source } => CliError::io(path, source),
        other => other,
    };
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut out = BufWriter::new(file);
            body(&mut out)
                .and_then(|()| out.flush().map_err(CliError::from))
                .map_err(|e| attach(e, path))
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            body(&mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn cmd_partition(args: &PartitionArgs) -> Result<()> {
    require_positive(args.n)?;
    let w = load_weights(&args.source)?;
    let a = lmse_partition(&w, args.n)?;
    let (mse, mae) = (mse(&a, &w)?, mae(&a, &w)?);
    with_output(args.output.as_deref(), |out| {
        write_partition(out, &w, &a, mse, mae)
    })
}

pub fn cmd_resample(args: &ResampleArgs) -> Result<()> {
    require_positive(args.n)?;
    let w = load_weights(&args.source)?;
    let p = ParticleSet::new(vec![0.0; w.len()], w)?;
    let counts = args
        .method
        .resample(&p, args.n, &mut RngStream::new(args.seed))?;
    let sv = sampling_variance(&counts, p.weights())?;
    with_output(args.output.as_deref(), |out| {
        write_resample(out, p.weights(), &counts, sv)
    })
}

/// `<dir>/<stem>.aggregate.csv` for an output path `<dir>/<stem>.<ext>`.
pub fn default_aggregate_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "benchmark".into());
    output.with_file_name(format!("{stem}.aggregate.csv"))
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let config = BenchmarkConfig {
        num_particles: args.particles,
        num_steps: args.steps,
        num_mc_runs: args.runs,
        seed: args.seed,
        methods: args.methods.clone(),
        reference: args.reference,
        resample_every_step: !args.resample_once,
    };
    let params = ModelParams::from(&args.model);
    let records = run_benchmark_parallel(&config, &params)?;
    with_output(args.output.as_deref(), |out| write_records(out, &records))?;

    let aggregate_path = args
        .aggregate
        .clone()
        .or_else(|| args.output.as_deref().map(default_aggregate_path));
    if let Some(path) = aggregate_path {
        let rows = aggregate(&records, &config.methods, config.num_steps);
        with_output(Some(&path), |out| {
            write_aggregate(out, &config.methods, &rows)
        })?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Partition(args) => cmd_partition(args),
        Command::Resample(args) => cmd_resample(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    }
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                exit::VALIDATION
            } else {
                exit::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => exit::SUCCESS,
        Err(err) => {
            eprintln!("lmse: {err}");
            err.exit_code()
        }
    }
}
