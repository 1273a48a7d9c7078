//! Command-line front end: argument parsing, configuration, file IO, DOT
//! dumps and reporting.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::buchi::{BuchiAutomaton, Label, DEFAULT_COMPLEMENT_BUDGET};
use crate::checker::{check, CheckError, CheckOptions, Stage, Verdict};
use crate::feasibility::{BuiltinSolver, SmtLibSolver, Solver};
use crate::logic::{parse_formula, FormulaError};
use crate::program::{parse_program_automaton, ProgramError};

/// Environment variable that overrides `--solver-cmd`.
pub const SOLVER_ENV: &str = "HYTSL_SOLVER_CMD";

/// Exit status for usage, IO, parse and resource errors.
pub const ERROR_EXIT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "hytsl", version, about = "Model checking TSL(T) and HyperTSL(T) on program automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a formula against a program automaton.
    Check(CheckArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct CheckArgs {
    /// Program automaton file.
    #[arg(long)]
    pub system: PathBuf,
    /// Formula file, or the formula itself when no such file exists.
    #[arg(long)]
    pub formula: String,
    /// Window length for k-infeasibility pruning.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Rounds of infeasible-cycle removal.
    #[arg(long, default_value_t = 1)]
    pub cycle_iters: usize,
    /// Longest stem searched for a feasible lasso.
    #[arg(long, default_value_t = 8)]
    pub stem_bound: usize,
    /// External SMT-LIB solver, e.g. `z3 -in`.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Value bound of the built-in solver's search.
    #[arg(long, default_value_t = 32)]
    pub value_bound: u64,
    /// Largest number of states the complement construction may create.
    #[arg(long, default_value_t = DEFAULT_COMPLEMENT_BUDGET)]
    pub complement_budget: usize,
    /// Timeout per solver query, in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    pub timeout: u64,
    /// Write the automaton of a stage to `<dump-dir>/<stage>.dot`.
    #[arg(long = "dump", value_name = "STAGE", value_parser = parse_stage)]
    pub dump: Vec<Stage>,
    /// Directory for `--dump` files.
    #[arg(long, default_value = ".")]
    pub dump_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    Stage::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Stage::ALL.iter().map(|s| s.name()).collect();
        format!("unknown stage `{s}`; expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverChoice {
    Builtin { value_bound: u64 },
    External { command: String },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: PathBuf,
    pub formula: String,
    pub k: usize,
    pub cycle_iters: usize,
    pub stem_bound: usize,
    pub solver: SolverChoice,
    pub complement_budget: usize,
    pub timeout: Duration,
    pub dump: BTreeSet<Stage>,
    pub dump_dir: PathBuf,
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    System { path: String, source: ProgramError },
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl RunConfig {
    /// Builds the configuration; `env_solver` is the value of
    /// [`SOLVER_ENV`], which wins over `--solver-cmd`.
    pub fn from_args(args: &CheckArgs, env_solver: Option<String>) -> Result<RunConfig, CliError> {
        let command = env_solver
            .filter(|s| !s.trim().is_empty())
            .or_else(|| args.solver_cmd.clone());
        let solver = match command {
            Some(command) => SolverChoice::External { command },
            None => SolverChoice::Builtin {
                value_bound: args.value_bound,
            },
        };
        let config = RunConfig {
            system: args.system.clone(),
            formula: args.formula.clone(),
            k: args.k,
            cycle_iters: args.cycle_iters,
            stem_bound: args.stem_bound,
            solver,
            complement_budget: args.complement_budget,
            timeout: Duration::from_millis(args.timeout),
            dump: args.dump.iter().copied().collect(),
            dump_dir: args.dump_dir.clone(),
            format: args.format,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if self.k == 0 {
            return bad("--k must be at least 1");
        }
        if self.stem_bound == 0 {
            return bad("--stem-bound must be positive");
        }
        if self.complement_budget == 0 {
            return bad("--complement-budget must be positive");
        }
        if self.timeout.is_zero() {
            return bad("--timeout must be positive");
        }
        match &self.solver {
            SolverChoice::Builtin { value_bound: 0 } => bad("--value-bound must be positive"),
            SolverChoice::External { command } if command.trim().is_empty() => bad("solver command is empty"),
            _ => Ok(()),
        }
    }

    pub fn options(&self) -> CheckOptions {
        let mut dump = self.dump.clone();
        if self.format == Format::Dot && dump.is_empty() {
            dump.extend(Stage::ALL);
        }
        CheckOptions {
            k: self.k,
            cycle_iters: self.cycle_iters,
            stem_bound: self.stem_bound,
            complement_budget: self.complement_budget,
            dump,
            ..CheckOptions::default()
        }
    }

    pub fn solver(&self) -> Box<dyn Solver> {
        match &self.solver {
            SolverChoice::Builtin { value_bound } => Box::new(BuiltinSolver::with_bound(*value_bound)),
            SolverChoice::External { command } => Box::new(SmtLibSolver::new(command, self.timeout)),
        }
    }
}

/// The result of a run: what to print and the process exit status.
#[derive(Debug, Clone)]
pub struct Report {
    pub verdict: Verdict,
    pub output: String,
    pub written: Vec<PathBuf>,
    pub exit_code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads the formula from a file when `spec` names one, else parses it as
/// formula text.
pub fn formula_text(spec: &str) -> Result<String, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        read(path)
    } else {
        Ok(spec.to_string())
    }
}

/// Writes the DOT rendering of `a` to `<dir>/<stage>.dot`.
pub fn emit_dot<L: Label, T: Clone>(a: &BuchiAutomaton<L, T>, stage: Stage, dir: &Path) -> Result<PathBuf, CliError> {
    write_dot(&a.to_dot(stage.name()), stage, dir)
}

fn write_dot(dot: &str, stage: Stage, dir: &Path) -> Result<PathBuf, CliError> {
    let io = |source| CliError::Io {
        path: dir.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(format!("{}.dot", stage.name()));
    fs::write(&path, dot).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let system = read(&config.system)?;
    let p = parse_program_automaton(&system).map_err(|source| CliError::System {
        path: config.system.display().to_string(),
        source,
    })?;
    let f = parse_formula(&formula_text(&config.formula)?)?;
    let solver = config.solver();
    let verdict = check(&p, &f, &config.options(), solver.as_ref())?;

    let mut written = Vec::new();
    for (stage, dot) in &verdict.dumps {
        if config.dump.contains(stage) {
            written.push(write_dot(dot, *stage, &config.dump_dir)?);
        }
    }
    let output = match config.format {
        Format::Text => verdict.to_text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&verdict.to_json()).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Dot => verdict.dumps.iter().map(|(_, d)| d.as_str()).collect(),
    };
    Ok(Report {
        exit_code: verdict.outcome.exit_code(),
        verdict,
        output,
        written,
    })
}

/// Runs the command line `args` (including the program name), printing to
/// stdout and stderr; returns the exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ERROR_EXIT } else { 0 };
        }
    };
    let Command::Check(args) = cli.command;
    let result = RunConfig::from_args(&args, std::env::var(SOLVER_ENV).ok()).and_then(|c| run(&c));
    match result {
        Ok(report) => {
            print!("{}", report.output);
            for path in &report.written {
                eprintln!("wrote {}", path.display());
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            ERROR_EXIT
        }
    }
}
