use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grover_cli::commands::{cmd_run, cmd_sweep, cmd_validate};
use grover_cli::config::{
    parse_list, parse_seed_range, read_json, Iterations, OutputFormat, RunConfig, SweepAxis,
    SweepConfig,
};
use grover_cli::output::emit;
use grover_cli::{CliError, EXIT_FAILURE, EXIT_OK};
use grover_core::generators::{StateSpec, TargetSpec, UnitarySpec};
use grover_core::validation::{Scope, FAMILY_SIZE};
use grover_core::GroverError;

#[derive(Parser)]
#[command(name = "grover", version, about = "Multiobject search with a general unitary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate one search problem and write its trace.
    Run(RunArgs),
    /// Evaluate a family of problems along one axis.
    Sweep(SweepArgs),
    /// Run the residual checks and print a pass/fail report.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// JSON config file; replaces the problem flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimension N.
    #[arg(long)]
    n: Option<usize>,
    /// idx:A,B,... or count:K@SEED
    #[arg(long)]
    targets: Option<TargetSpec>,
    /// identity | walsh-hadamard | haar:SEED | file:PATH
    #[arg(long, default_value = "identity")]
    unitary: UnitarySpec,
    /// uniform | basis:K | random:SEED | file:PATH
    #[arg(long, default_value = "uniform")]
    gamma: StateSpec,
    /// A count, auto-paper or auto-exact.
    #[arg(long, default_value = "auto-exact")]
    iterations: Iterations,
    /// Also iterate the full state vector and record its success probability.
    #[arg(long)]
    record_full: bool,
    /// Sample a measurement of the final state with this seed.
    #[arg(long)]
    measure_seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl ProblemArgs {
    fn into_run_config(self) -> Result<RunConfig, CliError> {
        let (n, targets) = match (self.n, self.targets) {
            (Some(n), Some(t)) => (n, t),
            _ => return Err(CliError::Config("--n and --targets are required without --config".into())),
        };
        Ok(RunConfig {
            n,
            targets,
            unitary: self.unitary,
            gamma: self.gamma,
            iterations: self.iterations,
            record_full: self.record_full,
            measure_seed: self.measure_seed,
            out: self.out,
            format: self.format.unwrap_or_default(),
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated dimensions.
    #[arg(long, group = "axis")]
    sweep_n: Option<String>,
    /// Comma-separated target counts.
    #[arg(long, group = "axis")]
    sweep_targets: Option<String>,
    /// Inclusive Haar seed range, e.g. 0..9.
    #[arg(long, group = "axis")]
    sweep_seeds: Option<String>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// all | lemma21 | lemma22 | thm23 | degenerate
    #[arg(long, default_value = "all")]
    scope: Scope,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size of the random problem family.
    #[arg(long, default_value_t = FAMILY_SIZE)]
    problems: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<u8, CliError> {
    let (out, format) = (args.problem.out.clone(), args.problem.format);
    let mut config = match &args.problem.config {
        Some(path) => read_json::<RunConfig>(path)?,
        None => args.problem.into_run_config()?,
    };
    if out.is_some() {
        config.out = out;
    }
    if let Some(f) = format {
        config.format = f;
    }
    let outcome = cmd_run(&config)?;
    emit(&outcome.artifact, config.out.as_deref())?;
    eprintln!("{}", outcome.summary);
    Ok(EXIT_OK)
}

fn sweep(args: SweepArgs) -> Result<u8, CliError> {
    let (out, format) = (args.problem.out.clone(), args.problem.format);
    let mut config = match &args.problem.config {
        Some(path) => read_json::<SweepConfig>(path)?,
        None => {
            let axis = if let Some(s) = &args.sweep_n {
                SweepAxis::N(parse_list(s)?)
            } else if let Some(s) = &args.sweep_targets {
                SweepAxis::TargetCount(parse_list(s)?)
            } else if let Some(s) = &args.sweep_seeds {
                parse_seed_range(s)?
            } else {
                return Err(CliError::Config(
                    "one of --sweep-n, --sweep-targets, --sweep-seeds is required".into(),
                ));
            };
            // The swept field is overwritten per point, so it may be omitted.
            let mut problem = args.problem;
            match &axis {
                SweepAxis::N(ns) if problem.n.is_none() => problem.n = ns.first().copied(),
                SweepAxis::TargetCount(counts) if problem.targets.is_none() => {
                    problem.targets =
                        counts.first().map(|&count| TargetSpec::Sampled { count, seed: 0 })
                }
                _ => {}
            }
            SweepConfig { base: problem.into_run_config()?, axis, workers: 1 }
        }
    };
    if let Some(w) = args.workers {
        config.workers = w;
    }
    if out.is_some() {
        config.base.out = out;
    }
    if let Some(f) = format {
        config.base.format = f;
    }
    let outcome = cmd_sweep(&config)?;
    emit(&outcome.artifact, config.base.out.as_deref())?;
    Ok(EXIT_OK)
}

fn validate(args: ValidateArgs) -> Result<u8, CliError> {
    let report = cmd_validate(args.scope, args.seed, args.problems)?;
    emit(&report.to_string(), args.out.as_deref())?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match &err {
                CliError::Core(GroverError::Precheck(verdict)) => eprintln!("precheck: {verdict}"),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
