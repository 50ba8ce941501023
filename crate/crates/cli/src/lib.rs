//! Command-line workflows for automated Prolog assessment: checking a
//! submission against an assignment, maintaining leaderboards, and
//! analyzing submission corpora.

pub mod color;
pub mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Process exit codes: the submission fully passed, the submission has
/// failures or warnings, the inputs were unusable, or the tool itself
/// failed.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ISSUES: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const INTERNAL: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(
    name = "prologian",
    about = "Automated assessment for Prolog assignments",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a submission against an assignment spec and test suite.
    Check(CheckArgs),
    /// Show or update a per-assignment leaderboard.
    Rank(RankArgs),
    /// Classify a student's submission history for an assignment.
    History(HistoryArgs),
    /// Diff two program versions and label the bug types fixed.
    ClassifyBug(ClassifyBugArgs),
    /// Corpus-wide statistics over a submission directory tree.
    Stats(StatsArgs),
}

#[derive(Debug, Parser)]
pub struct CheckArgs {
    /// Student submission (.pl).
    pub program: PathBuf,
    /// Assignment spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// plunit-style test file (.plt or .pl).
    #[arg(long)]
    pub tests: PathBuf,
    /// Emit the structured report on stdout instead of the summary.
    #[arg(long)]
    pub json: bool,
    /// Directory to write report.md and report.json into.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Stream resolution events (call/exit/fail/redo) to stderr.
    #[arg(long)]
    pub trace: bool,
    /// Override the spec's resolution step limit.
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Wall-clock budget for running the tests, in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, value_enum)]
    pub color: Option<color::ColorChoice>,
    /// Timestamp recorded on the scorecard (defaults to
    /// $SOURCE_DATE_EPOCH, then 0, keeping reports reproducible).
    #[arg(long)]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Parser)]
pub struct RankArgs {
    /// Leaderboard JSON file.
    #[arg(long)]
    pub board: PathBuf,
    /// Scorecard JSON (from `check --report`) to merge into the board.
    #[arg(long, requires = "student")]
    pub add: Option<PathBuf>,
    /// Pseudonymous student id for --add.
    #[arg(long)]
    pub student: Option<String>,
    /// Print the ranked table.
    #[arg(long)]
    pub show: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Parser)]
pub struct HistoryArgs {
    /// Corpus directory: <assignment>/<student>/<unix-timestamp>.pl.
    pub corpus: PathBuf,
    /// Assignment id (directory name) to analyze.
    #[arg(long)]
    pub assignment: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Parser)]
pub struct ClassifyBugArgs {
    /// The buggy version.
    pub old: PathBuf,
    /// The fixed version.
    pub new: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Parser)]
pub struct StatsArgs {
    /// Corpus directory: <assignment>/<student>/<unix-timestamp>.pl.
    pub corpus: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// What a command produced: final text for stdout/stderr plus the exit
/// code. Commands stay pure over this so tests can call them in-process.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    pub fn input_error(message: impl Into<String>) -> CommandOutput {
        CommandOutput { exit: exit::INPUT, stdout: String::new(), stderr: format!("error: {}\n", message.into()) }
    }
}

/// Dispatch a parsed command line; never panics outward.
pub fn run(cli: Cli) -> CommandOutput {
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| match cli.command {
        Command::Check(args) => commands::check::run(&args),
        Command::Rank(args) => commands::rank::run(&args),
        Command::History(args) => commands::corpus::history(&args),
        Command::ClassifyBug(args) => commands::corpus::classify_bug_cmd(&args),
        Command::Stats(args) => commands::corpus::stats(&args),
    }));
    match result {
        Ok(output) => output,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown internal error".to_string());
            CommandOutput {
                exit: exit::INTERNAL,
                stdout: String::new(),
                stderr: format!("internal error: {message}\n"),
            }
        }
    }
}
