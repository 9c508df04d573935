//! Batch front end for the module factorization laboratory. Reads a JSON
//! problem file, runs one task against it, and emits the result as JSON
//! (always machine-readable) or markdown.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 bad input, 3 an enumeration hit
//! an infinite hom set, 4 a staged run exhausted its budget.

mod commands;
mod problem;

use clap::{Args, Parser, Subcommand, ValueEnum};
use problem::ProblemFile;
use soalab_core::soa::{StopRule, Variant};
use soalab_core::CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "soalab",
    version,
    about = "Factorization, reflection and lifting-class experiments over finitely presented modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the staged factorization engine on a named morphism
    Factorize(RunArgs),
    /// Reflect a named object into the class cut out by the generators
    Reflect(RunArgs),
    /// Evaluate a class operator over a finite universe of modules
    Classify(RunArgs),
    /// Check lifting-pair axioms or an exactness property; exit status 1 on failure
    Check(RunArgs),
    /// Compare the solvers against brute-force enumeration
    Oracle(RunArgs),
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Command::Factorize(_) => "factorize",
            Command::Reflect(_) => "reflect",
            Command::Classify(_) => "classify",
            Command::Check(_) => "check",
            Command::Oracle(_) => "oracle",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Factorize(a)
            | Command::Reflect(a)
            | Command::Classify(a)
            | Command::Check(a)
            | Command::Oracle(a) => a,
        }
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Problem file (JSON)
    pub file: PathBuf,
    /// Engine variant, overriding the problem file
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Stage budget, overriding the problem file
    #[arg(long)]
    pub max_stages: Option<u64>,
    /// Stop rule, overriding the problem file
    #[arg(long, value_enum)]
    pub stop: Option<StopArg>,
    /// Seed for randomized batches; echoed in the output
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest module order in generated universes
    #[arg(long, default_value_t = 8)]
    pub universe_max_order: u64,
    /// Attachment classes enumerated per stage, overriding the problem file
    #[arg(long)]
    pub square_bound: Option<u64>,
    /// What to print on stdout
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Also write the JSON result to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replay all certificates before reporting success
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Strict,
    Loose,
    Discard,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Strict => Variant::Strict,
            VariantArg::Loose => Variant::Loose,
            VariantArg::Discard => Variant::Discard,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StopArg {
    /// Stop once a stage attaches nothing new
    Iso,
    /// Stop once every generator lifts against the residual
    Box,
    /// Run the whole budget and flag the result as truncated
    Max,
}

impl From<StopArg> for StopRule {
    fn from(s: StopArg) -> StopRule {
        match s {
            StopArg::Iso => StopRule::Iso,
            StopArg::Box => StopRule::BoxCertified,
            StopArg::Max => StopRule::MaxStage,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum FormatArg {
    Json,
    Md,
}

/// Everything that ends a run without a result, keyed to its exit code.
pub enum Failure {
    /// Unreadable or inconsistent input: exit 2.
    Input(String),
    /// An enumeration over an infinite hom set: exit 3.
    Infinite(String),
    /// A staged run exhausted its budget: exit 4.
    Truncated(String),
}

impl Failure {
    pub fn from_core(e: CoreError) -> Failure {
        match e {
            CoreError::InfiniteHomSet(m) => Failure::Infinite(m),
            CoreError::Truncated(m) => Failure::Truncated(m),
            other => Failure::Input(other.to_string()),
        }
    }

    pub fn emit(e: serde_json::Error) -> Failure {
        Failure::Input(format!("cannot serialize the result: {e}"))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Infinite(_) => 3,
            Failure::Truncated(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Infinite(m) | Failure::Truncated(m) => m,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let args = cli.command.args();
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.file.display())))?;
    let file = ProblemFile::parse(&text)?;
    if file.task.kind() != cli.command.kind() {
        return Err(Failure::Input(format!(
            "task kind '{}' does not match subcommand '{}'",
            file.task.kind(),
            cli.command.kind()
        )));
    }
    let outcome = match &cli.command {
        Command::Factorize(a) => commands::cmd_factorize(&file, a)?,
        Command::Reflect(a) => commands::cmd_reflect(&file, a)?,
        Command::Classify(a) => commands::cmd_classify(&file, a)?,
        Command::Check(a) => commands::cmd_check(&file, a)?,
        Command::Oracle(a) => commands::cmd_oracle(&file, a)?,
    };

    let mut json_text = serde_json::to_string_pretty(&outcome.json).map_err(Failure::emit)?;
    json_text.push('\n');
    if let Some(path) = &args.out {
        std::fs::write(path, &json_text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    match args.format {
        FormatArg::Json => print!("{json_text}"),
        FormatArg::Md => print!("{}", outcome.markdown),
    }
    Ok(ExitCode::from(outcome.exit))
}
