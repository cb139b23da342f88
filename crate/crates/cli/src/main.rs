//! `geoment`: experiment harness for the geometric measure of entanglement
//! of symmetric qubit states.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 solver failure,
//! 4 oracle gap above threshold.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::commands::{CliError, Report};
use crate::output::Meta;

#[derive(Debug, Parser)]
#[command(
    name = "geoment",
    version,
    about = "Geometric entanglement of symmetric qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one f-vector and report every extremum found.
    Solve(SolveArgs),
    /// Entanglement of each Dicke state |D_p>, p = 0..q.
    DickeSweep(DickeArgs),
    /// Entanglement against f-vector variance for random and structured states.
    VarianceStudy(VarianceArgs),
    /// Closed-form distances along the even/odd two-amplitude family.
    EvenoddSweep(EvenOddArgs),
    /// Tally of winning solution types over a random ensemble.
    Census(CensusArgs),
    /// Compare the symmetric solver with the unrestricted product-state oracle.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    UniformSphere,
    NonNegativeSphere,
    SmallInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    /// Samples are the Dicke amplitudes f_p.
    Bare,
    /// Samples are sqrt(C(q,p)) f_p.
    Weighted,
}

/// Flags shared by every subcommand. Not part of the recorded config, so
/// the same run written to two places produces the same bytes.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    /// Number of qubits; inferred from --f when omitted.
    #[arg(long)]
    pub q: Option<usize>,
    /// Comma-separated coefficients f_0..f_q (normalized automatically).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub f: Vec<f64>,
    /// Read --f as sqrt(C(q,p)) f_p instead of f_p.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n_starts: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Gradient-ascent steps before Newton on every other start.
    #[arg(long, default_value_t = 200)]
    pub ascent_steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub residual_tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DickeArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VarianceArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    /// Number of random non-negative f-vectors.
    #[arg(long, default_value_t = 2000)]
    pub n_states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n_starts: Option<usize>,
    /// Variance bins for the wedge comparison reported in JSON and on stderr.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvenOddArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    #[arg(long, default_value_t = 21)]
    pub n_points: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::UniformSphere)]
    pub sampler: SamplerArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Weighted)]
    pub convention: ConventionArg,
    #[arg(long)]
    pub n_starts: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    /// Number of sampled f-vectors; ignored with --dicke.
    #[arg(long, default_value_t = 50)]
    pub n_states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::UniformSphere)]
    pub sampler: SamplerArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Weighted)]
    pub convention: ConventionArg,
    /// Starts for both the solver and the oracle.
    #[arg(long)]
    pub n_starts: Option<usize>,
    /// Check the Dicke states |D_0>..|D_q> instead of random f-vectors.
    #[arg(long)]
    pub dicke: bool,
    /// Largest acceptable gap; anything above exits with code 4.
    #[arg(long, default_value_t = 1e-5)]
    pub max_gap: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

fn config<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let (name, seed, cfg, output, report): (_, _, _, OutputArgs, Report) = match cli.command {
        Command::Solve(a) => (
            "solve",
            Some(a.seed),
            config(&a),
            a.output.clone(),
            commands::solve(&a)?,
        ),
        Command::DickeSweep(a) => (
            "dicke-sweep",
            Some(0),
            config(&a),
            a.output.clone(),
            commands::dicke_sweep(&a)?,
        ),
        Command::VarianceStudy(a) => (
            "variance-study",
            Some(a.seed),
            config(&a),
            a.output.clone(),
            commands::variance_study(&a)?,
        ),
        Command::EvenoddSweep(a) => (
            "evenodd-sweep",
            None,
            config(&a),
            a.output.clone(),
            commands::evenodd_sweep(&a)?,
        ),
        Command::Census(a) => (
            "census",
            Some(a.seed),
            config(&a),
            a.output.clone(),
            commands::census(&a)?,
        ),
        Command::OracleCheck(a) => (
            "oracle-check",
            Some(a.seed),
            config(&a),
            a.output.clone(),
            commands::oracle_check(&a)?,
        ),
    };
    let wall = start.elapsed().as_secs_f64();
    let meta = Meta::new(name, seed, cfg);

    let text = match output.format.unwrap_or(report.default_format) {
        Format::Json => output::to_json(&meta, wall, &report.json),
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("{name} has no CSV output")))?;
            output::to_csv(&meta, table).map_err(|e| CliError::Io(e.to_string()))?
        }
        Format::Svg => match (&report.table, report.plot) {
            (Some(table), Some(plot)) => output::to_svg(&meta, table, plot),
            _ => return Err(CliError::Usage(format!("{name} has no SVG output"))),
        },
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    for line in &report.notes {
        eprintln!("{line}");
    }
    eprintln!("geoment {name}: wall time {wall:.3} s");
    Ok(report.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("geoment: {e}");
            e.exit_code()
        }
    }
}
