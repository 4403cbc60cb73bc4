//! The `vncert` command line. Every subcommand except plain `verify` prints a
//! JSON run record.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use vncert_core::discrim::{
    analytic_table, both_unknown_diamond_bounds, one_fixed_diamond_bounds, Mode, Scheme,
};
use vncert_core::haar::sample_haar_unitary;
use vncert_core::protocol::{simulate, simulate_with_threads, ScenarioConfig, SimResult};
use vncert_core::qcore::Unitary;
use vncert_core::rng::RngStream;
use vncert_core::verify::{run_verification, Fault, VerifyOptions};

mod record;
mod sweep;

pub use record::{validate_record, RunRecord, SCHEMA_KEYS, VERSION};
pub use sweep::{SweepFormat, SweepRow};

/// Largest dimension for which `analytic` evaluates the diamond bounds numerically.
pub const NUMERIC_DIAMOND_MAX: usize = 6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vncert", version = VERSION, about = "Discrimination and certification of von Neumann measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form success and error probabilities.
    Analytic(AnalyticArgs),
    /// Monte Carlo simulation of the discrimination game.
    Simulate(SimulateArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Tabulate analytic and simulated values across a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyticArgs {
    #[arg(long, default_value = "both-unknown", value_parser = Mode::from_str)]
    pub mode: Mode,
    #[arg(long, default_value = "symmetric", value_parser = Scheme::from_str)]
    pub scheme: Scheme,
    #[arg(long = "dim")]
    pub dim: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value = "both-unknown", value_parser = Mode::from_str)]
    pub mode: Mode,
    #[arg(long, default_value = "symmetric", value_parser = Scheme::from_str)]
    pub scheme: Scheme,
    #[arg(long = "dim")]
    pub dim: usize,
    /// Trials in total (symmetric) or per hypothesis (asymmetric).
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = "VNCERT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reference measurement for one-fixed mode: identity, fourier or haar:<seed>.
    #[arg(long = "fixed-u", value_parser = FixedU::from_str)]
    pub fixed_u: Option<FixedU>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    pub dmax: usize,
    /// Emit a JSON run record instead of check lines.
    #[arg(long)]
    pub json: bool,
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "both-unknown,one-fixed", value_parser = Mode::from_str)]
    pub modes: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_value = "symmetric", value_parser = Scheme::from_str)]
    pub schemes: Vec<Scheme>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = "VNCERT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultArg {
    TSign,
}

/// Reference unitary choice for one-fixed simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedU {
    Identity,
    Fourier,
    Haar(u64),
}

impl FixedU {
    pub fn build(self, d: usize) -> Unitary {
        match self {
            FixedU::Identity => Unitary::identity(d),
            FixedU::Fourier => Unitary::fourier(d),
            FixedU::Haar(seed) => sample_haar_unitary(d, &mut RngStream::new(seed, 0)),
        }
    }
}

impl FromStr for FixedU {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(FixedU::Identity),
            "fourier" => Ok(FixedU::Fourier),
            _ => match s.strip_prefix("haar:") {
                Some(seed) => seed
                    .parse()
                    .map(FixedU::Haar)
                    .map_err(|_| format!("bad seed in {s:?}")),
                None => Err(format!(
                    "expected identity, fourier or haar:<seed>, got {s:?}"
                )),
            },
        }
    }
}

impl fmt::Display for FixedU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedU::Identity => f.write_str("identity"),
            FixedU::Fourier => f.write_str("fourier"),
            FixedU::Haar(seed) => write!(f, "haar:{seed}"),
        }
    }
}

impl Serialize for FixedU {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<vncert_core::Error> for CliError {
    fn from(e: vncert_core::Error) -> Self {
        use vncert_core::Error;
        match e {
            Error::InvalidConfig { .. } | Error::DimensionTooSmall { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

fn check_dim(d: usize) -> Result<(), CliError> {
    if d < 2 {
        return Err(CliError::Usage(format!("dimension must be ≥ 2, got {d}")));
    }
    Ok(())
}

fn check_threads(threads: Option<usize>) -> Result<(), CliError> {
    if threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Analytic payload: closed forms plus numeric diamond bounds for small `d`.
pub fn analytic_result(mode: Mode, scheme: Scheme, d: usize) -> Result<Value, CliError> {
    check_dim(d)?;
    let row = analytic_table(mode, d)?;
    let bounds = if d <= NUMERIC_DIAMOND_MAX {
        Some(match mode {
            Mode::BothUnknown => both_unknown_diamond_bounds(d)?,
            Mode::OneFixed => one_fixed_diamond_bounds(&Unitary::identity(d))?,
        })
    } else {
        None
    };
    Ok(json!({
        "mode": mode,
        "scheme": scheme,
        "d": d,
        "p_succ": row.p_succ,
        "p_err": row.p_err,
        "p1": row.p1,
        "p2": row.p2,
        "ancilla_needed": row.ancilla_needed,
        "diamond": row.diamond(),
        "diamond_lower": bounds.map(|b| b.lower),
        "diamond_upper": bounds.map(|b| b.upper),
    }))
}

pub fn scenario(
    mode: Mode,
    scheme: Scheme,
    d: usize,
    trials: u64,
    seed: u64,
    fixed_u: Option<FixedU>,
) -> Result<ScenarioConfig, CliError> {
    check_dim(d)?;
    let mut config = ScenarioConfig::new(mode, scheme, d, trials, seed);
    if let Some(f) = fixed_u {
        config = config.with_fixed_u(f.build(d));
    }
    config.validate()?;
    Ok(config)
}

pub fn run_simulation(
    config: &ScenarioConfig,
    threads: Option<usize>,
) -> Result<SimResult, CliError> {
    check_threads(threads)?;
    Ok(match threads {
        Some(t) => simulate_with_threads(config, t)?,
        None => simulate(config)?,
    })
}

fn cmd_analytic(args: &AnalyticArgs) -> Result<(Value, Value), CliError> {
    Ok((
        to_value(args),
        analytic_result(args.mode, args.scheme, args.dim)?,
    ))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(Value, Value), CliError> {
    let config = scenario(
        args.mode,
        args.scheme,
        args.dim,
        args.trials,
        args.seed,
        args.fixed_u,
    )?;
    let result = run_simulation(&config, args.threads)?;
    Ok((to_value(args), to_value(&result)))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.dmax < 2 {
        return Err(CliError::Usage(format!(
            "--dmax must be ≥ 2, got {}",
            args.dmax
        )));
    }
    let start = Instant::now();
    let mut opts = VerifyOptions::new(args.dmax);
    opts.fault = args.inject_fault.map(|FaultArg::TSign| Fault::TSign);
    let results = run_verification(&opts);
    let passed = results.iter().filter(|r| r.passed).count();
    let all = passed == results.len();
    let io = |e: std::io::Error| CliError::Failure(e.to_string());
    if args.json {
        let rec = RunRecord::new(
            "verify",
            to_value(args),
            start.elapsed().as_secs_f64(),
            json!({ "passed": all, "checks": results }),
        );
        writeln!(out, "{}", rec.to_json()).map_err(io)?;
    } else {
        for r in &results {
            writeln!(out, "{r}").map_err(io)?;
        }
        writeln!(out, "{passed}/{} checks passed", results.len()).map_err(io)?;
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILURE })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let start = Instant::now();
    let (name, config, result) = match &cli.command {
        Command::Analytic(a) => {
            let (c, r) = cmd_analytic(a)?;
            ("analytic", c, r)
        }
        Command::Simulate(a) => {
            let (c, r) = cmd_simulate(a)?;
            ("simulate", c, r)
        }
        Command::Sweep(a) => {
            let (c, r) = sweep::cmd_sweep(a)?;
            ("sweep", c, r)
        }
        Command::Verify(a) => return cmd_verify(a, out),
    };
    let rec = RunRecord::new(name, config, start.elapsed().as_secs_f64(), result);
    writeln!(out, "{}", rec.to_json()).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Usage(_) = e {
                let _ = writeln!(err, "\nFor more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}
