//! `cyclewalk` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure (unreadable input, unwritable output) |
//! | 2 | malformed input or invalid arguments |
//! | 3 | numerical invariant violated |
//! | 4 | even (or too small) cycle length where odd `n ≥ 3` is required |
//! | 5 | `algebra` request above the resource cap |
//! | 6 | synthesis did not converge (result still written) |

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::liealg::{self, CLOSURE_TOL};
use crate::output::{fmt_f64, parse_json, to_json};
use crate::synth::{self, ProblemDocument, ResultDocument, SynthConfig, SynthesisProblem};
use crate::transfer::{self, ANALYTIC_TOL, EVOLVED_TOL};
use crate::walk::{self, CesaroAccumulator, ScheduleDocument, WalkState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_EVEN_N: i32 = 4;
pub const EXIT_CAP: i32 = 5;
pub const EXIT_NOT_CONVERGED: i32 = 6;

/// Default largest `n` accepted by `algebra`.
pub const DEFAULT_ALGEBRA_CAP: usize = 9;

#[derive(Debug, Parser)]
#[command(name = "cyclewalk", version, about = "Non-stationary quantum walks on the odd cycle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a coin schedule and write per-step position distributions.
    Simulate(SimulateArgs),
    /// Build the uniform-distribution transfer and check it stays uniform.
    Transfer(TransferArgs),
    /// Lie-closure dimension and structural checks of the walk algebra.
    Algebra(AlgebraArgs),
    /// Search for a coin schedule realizing a state transfer.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Schedule JSON: {"n": int, "coins": [{"theta", "phi", "lambda"}, ...]}.
    #[arg(long)]
    pub schedule: PathBuf,
    /// Cycle length; must agree with the schedule file when given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Starting position of the walker (coin |+1>).
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Add the running Cesàro average over times [0, t].
    #[arg(long)]
    pub cesaro: bool,
    /// Allowed drift of the squared norm from 1.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub n: usize,
    /// Identity-coin steps applied after the transfer.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Allowed deviation from uniform right after the transfer.
    #[arg(long, default_value_t = ANALYTIC_TOL)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_ALGEBRA_CAP)]
    pub cap: usize,
    /// Rank threshold of the closure computation.
    #[arg(long, default_value_t = CLOSURE_TOL)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Problem JSON. Without it the built-in |e_1> -> uniform problem is used.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Cycle length for the built-in problem.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Horizon for the built-in problem (default 4n).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Overrides the problem's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = SynthConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = SynthConfig::default().max_iters)]
    pub max_iters: usize,
    /// Converged iff fidelity >= 1 - tolerance.
    #[arg(long, default_value_t = SynthConfig::default().tol)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Invariant(String),
    EvenN(usize),
    Cap { n: usize, cap: usize },
    NotConverged(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::EvenN(_) => EXIT_EVEN_N,
            CliError::Cap { .. } => EXIT_CAP,
            CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Parse(msg) => write!(f, "invalid input: {msg}"),
            CliError::Invariant(msg) => write!(f, "invariant violated: {msg}"),
            CliError::EvenN(n) => write!(
                f,
                "n = {n} is not supported: the construction assumes an odd cycle length N >= 3"
            ),
            CliError::Cap { n, cap } => {
                write!(f, "n = {n} exceeds the algebra cap {cap}; raise --cap to force it")
            }
            CliError::NotConverged(fid) => write!(f, "synthesis did not converge (fidelity {fid})"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::UnsupportedDimension(n) => CliError::EvenN(n),
            Error::Verification(msg) => CliError::Invariant(msg),
            other => CliError::Parse(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("cyclewalk: {err}");
            err.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Transfer(args) => cmd_transfer(args),
        Command::Algebra(args) => cmd_algebra(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = to_json(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = open_output(path)?;
    writeln!(out, "{text}").map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn require_odd_cli(n: usize) -> Result<(), CliError> {
    if n < 3 || n.is_multiple_of(2) {
        Err(CliError::EvenN(n))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct JsonFrame<'a> {
    t: usize,
    amplitudes: Vec<[f64; 2]>,
    probs: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    cesaro: Option<Vec<f64>>,
}

/// Streams the trajectory: CSV rows `t,j,p[,cesaro]` or one JSON object
/// per line with the full amplitudes.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let doc: ScheduleDocument = parse_json(&read_input(&args.schedule)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.schedule.display())))?;
    if let Some(n) = args.n {
        if n != doc.n {
            return Err(CliError::Parse(format!("--n {n} disagrees with schedule n = {}", doc.n)));
        }
    }
    if doc.n < 2 {
        return Err(CliError::Parse(format!("n: simulation needs n >= 2, got {}", doc.n)));
    }
    let n = doc.n;
    let initial = walk::initial_state(
        n,
        [num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)],
        args.start,
    )?;
    let schedule = doc.schedule();
    log::info!("simulating n={n} for {} steps", schedule.len());

    let mut out = open_output(args.out.as_deref())?;
    if args.format == Format::Csv {
        let header = if args.cesaro { "t,j,p,cesaro" } else { "t,j,p" };
        writeln!(out, "{header}").map_err(io_err)?;
    }
    let mut acc = CesaroAccumulator::new(n);
    let mut failure: Option<CliError> = None;
    walk::evolve(&initial, &schedule, |t, state| {
        if failure.is_some() {
            return;
        }
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > args.tolerance {
            failure = Some(CliError::Invariant(format!("norm drift {drift:e} at t = {t}")));
            return;
        }
        let d = state.distribution();
        acc.push(&d).expect("distribution length matches n");
        let cesaro = args.cesaro.then(|| acc.mean().expect("nonempty").probs);
        if let Err(e) = write_frame(&mut out, args.format, t, state, &d.probs, cesaro) {
            failure = Some(e);
        }
    });
    out.flush().map_err(io_err)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn write_frame(
    out: &mut dyn Write,
    format: Format,
    t: usize,
    state: &WalkState,
    probs: &[f64],
    cesaro: Option<Vec<f64>>,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            for (j, p) in probs.iter().enumerate() {
                match &cesaro {
                    Some(c) => writeln!(out, "{t},{j},{},{}", fmt_f64(*p), fmt_f64(c[j])),
                    None => writeln!(out, "{t},{j},{}", fmt_f64(*p)),
                }
                .map_err(io_err)?;
            }
        }
        Format::Json => {
            let frame = JsonFrame {
                t,
                amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                probs,
                cesaro,
            };
            let text = to_json(&frame).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out, "{text}").map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn cmd_transfer(args: &TransferArgs) -> Result<(), CliError> {
    require_odd_cli(args.n)?;
    let report = transfer::transfer_report(args.n, args.steps)?;
    write_json(args.out.as_deref(), &report)?;
    if report.max_uniform_deviation > args.tolerance {
        return Err(CliError::Invariant(format!(
            "max uniform deviation {:e} above {:e}",
            report.max_uniform_deviation, args.tolerance
        )));
    }
    if report.freeze_max_deviation > EVOLVED_TOL {
        return Err(CliError::Invariant(format!(
            "distribution drifted by {:e} during the identity-coin steps",
            report.freeze_max_deviation
        )));
    }
    Ok(())
}

pub fn cmd_algebra(args: &AlgebraArgs) -> Result<(), CliError> {
    require_odd_cli(args.n)?;
    if args.n > args.cap {
        return Err(CliError::Cap {
            n: args.n,
            cap: args.cap,
        });
    }
    let report = liealg::algebra_report(args.n, args.tolerance)?;
    write_json(args.out.as_deref(), &report)?;
    if !report.passed() {
        return Err(CliError::Invariant(format!(
            "closure dimension {} (expected {}), S-product check {}",
            report.closure_dimension, report.expected_dimension, report.s_product
        )));
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut problem = match &args.problem {
        Some(path) => {
            let doc: ProblemDocument = parse_json(&read_input(path)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            require_odd_cli(doc.n)?;
            doc.into_problem()?
        }
        None => {
            require_odd_cli(args.n)?;
            let steps = args.steps.unwrap_or_else(|| SynthesisProblem::default_steps(args.n));
            SynthesisProblem::uniform_target(args.n, steps, args.seed.unwrap_or(0))?
        }
    };
    if let Some(seed) = args.seed {
        problem.seed = seed;
    }
    let config = SynthConfig {
        tol: args.tolerance,
        restarts: args.restarts,
        max_iters: args.max_iters,
        ..SynthConfig::default()
    };
    let result = synth::synthesize(&problem, &config)?;
    let verification = synth::verify_schedule(&result, &problem)?;
    let mismatch = verification.fidelity_mismatch;
    write_json(args.out.as_deref(), &ResultDocument::new(&problem, &result, verification))?;
    if mismatch > 1e-10 {
        return Err(CliError::Invariant(format!(
            "re-simulated fidelity differs from optimizer value by {mismatch:e}"
        )));
    }
    if !result.converged {
        return Err(CliError::NotConverged(result.fidelity));
    }
    Ok(())
}
