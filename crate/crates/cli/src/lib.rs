//! Command-line front end: scenario documents, sweeps and CSV output.

pub mod config;
pub mod table;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stbc_ccm::harness::{sweep_with_trials, trial_seeds, Axis, Metric, MetricsSeries, TrialOutcome};
use stbc_ccm::{selftest, Error, Scenario};

pub use config::{parse_scenario, serialize_scenario, ConfigError};
pub use table::{emit_csv, ResultTable};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "STBC_CCM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stbc-ccm", version, about = "Blind STBC DS-CDMA receiver experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smoothed BER against received symbols.
    BerVsSymbols(SweepArgs),
    /// Packet BER against Eb/N0.
    BerVsSnr(GridArgs),
    /// Packet BER against the number of users.
    BerVsUsers(GridArgs),
    /// Smoothed channel estimation error against received symbols.
    ChannelMse(SweepArgs),
    /// Checks the receivers and the signal model against reference computations.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Prints the complete scenario document (defaults merged with --config).
    ShowConfig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Scenario document (TOML); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Smoothing window in symbols.
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    /// Master seed (overrides the document's `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-trial, per-symbol traces CSV.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Scenario { .. } | Error::InvalidInput(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub fn load_scenario(path: Option<&Path>) -> Result<Scenario, CliError> {
    let Some(path) = path else {
        return Ok(Scenario::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Applies the thread-count override once per process.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Invalid(format!("{THREADS_ENV}={v} is not a thread count")))?;
        // A pool may already exist when called more than once in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_traces(path: &Path, axis: Axis, grid: &[f64], groups: &[Vec<TrialOutcome>]) -> Result<(), CliError> {
    let ctx = |e: &dyn std::fmt::Display| CliError::Runtime(format!("{}: {e}", path.display()));
    let file = fs::File::create(path).map_err(|e| ctx(&e))?;
    let mut w = csv::Writer::from_writer(io::BufWriter::new(file));
    w.write_record(["axis_value", "seed", "symbol", "series", "value"])
        .map_err(|e| ctx(&e))?;
    for (g, group) in groups.iter().enumerate() {
        let axis_value = if axis == Axis::Symbols { String::new() } else { table::sig6(grid[g]) };
        for o in group {
            for s in 0..o.symbols() {
                for (a, alg) in o.algorithms.iter().enumerate() {
                    w.write_record([
                        axis_value.clone(),
                        o.seed.to_string(),
                        s.to_string(),
                        alg.id().to_string(),
                        o.bit_errors[a][s].to_string(),
                    ])
                    .map_err(|e| ctx(&e))?;
                }
                w.write_record([
                    axis_value.clone(),
                    o.seed.to_string(),
                    s.to_string(),
                    stbc_ccm::harness::CHANNEL_SERIES.to_string(),
                    table::sig6(o.channel_mse[s]),
                ])
                .map_err(|e| ctx(&e))?;
            }
        }
    }
    w.flush().map_err(|e| ctx(&e))
}

fn summary(series: &MetricsSeries, metric: Metric) -> Vec<String> {
    let mut names: Vec<&str> = series
        .points
        .iter()
        .filter(|p| p.metric == metric)
        .map(|p| p.series.as_str())
        .collect();
    names.sort_unstable();
    names.dedup();
    names
        .into_iter()
        .map(|name| {
            let pts: Vec<_> = series
                .points
                .iter()
                .filter(|p| p.metric == metric && p.series == name)
                .collect();
            match series.axis {
                Axis::Symbols => {
                    let last = pts.last().expect("non-empty series");
                    format!(
                        "{name:<12} {}={} {}={} ±{}",
                        series.axis.id(),
                        last.axis_value,
                        table::metric_id(metric),
                        table::sig6(last.mean),
                        table::sig6(last.half_width)
                    )
                }
                _ => {
                    let cells: Vec<String> = pts
                        .iter()
                        .map(|p| format!("{}:{}", table::sig6(p.axis_value), table::sig6(p.mean)))
                        .collect();
                    format!("{name:<12} {}", cells.join(" "))
                }
            }
        })
        .collect()
}

fn run_sweep(args: &SweepArgs, axis: Axis, grid: Option<Vec<f64>>, metric: Metric) -> Result<(), CliError> {
    let mut scn = load_scenario(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        scn.seed = seed;
    }
    if args.runs == 0 {
        return Err(CliError::Invalid("--runs must be at least 1".into()));
    }
    if args.window == 0 {
        return Err(CliError::Invalid("--window must be at least 1".into()));
    }
    let grid = match (axis, grid) {
        (Axis::Symbols, _) => (0..scn.packet_symbols).map(|s| s as f64).collect(),
        (_, Some(g)) => g,
        (Axis::Snr, None) => vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0],
        (Axis::Users, None) => vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
    };
    let seeds = trial_seeds(scn.seed, args.runs);
    let (series, groups) = sweep_with_trials(&scn, axis, &grid, &seeds, args.window)?;
    for w in &series.warnings {
        eprintln!("warning: {w}");
    }
    let table = ResultTable::from_series(&series, metric);
    match &args.out {
        Some(path) => emit_csv(&table, path).map_err(CliError::Runtime)?,
        None => table::write_csv(&table, io::stdout().lock()).map_err(|e| CliError::Runtime(e.to_string()))?,
    }
    if let Some(path) = &args.traces {
        write_traces(path, axis, &grid, &groups)?;
    }
    let mut err = io::stderr().lock();
    for line in summary(&series, metric) {
        let _ = writeln!(err, "{line}");
    }
    if series.diverged_trials > 0 {
        return Err(CliError::Runtime(format!(
            "{} of {} trials tripped the divergence guard",
            series.diverged_trials,
            groups.iter().map(Vec::len).sum::<usize>()
        )));
    }
    Ok(())
}

fn run_selftest(seed: u64) -> Result<(), CliError> {
    let checks = selftest::run(seed);
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(CliError::Runtime(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::BerVsSymbols(a) => run_sweep(&a, Axis::Symbols, None, Metric::Ber),
        Command::ChannelMse(a) => run_sweep(&a, Axis::Symbols, None, Metric::ChannelMse),
        Command::BerVsSnr(a) => run_sweep(&a.sweep, Axis::Snr, a.grid, Metric::Ber),
        Command::BerVsUsers(a) => run_sweep(&a.sweep, Axis::Users, a.grid, Metric::Ber),
        Command::Selftest { seed } => run_selftest(seed),
        Command::ShowConfig { config } => {
            let scn = load_scenario(config.as_deref())?;
            print!("{}", serialize_scenario(&scn).map_err(|e| CliError::Runtime(e.to_string()))?);
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
