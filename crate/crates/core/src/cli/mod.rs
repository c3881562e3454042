//! Batch front end: JSON configs in, CSV and JSON artifacts out.
//!
//! Exit codes: 0 success, 1 configuration or i/o error, 2 blow-up during a
//! run, 3 a failed audit.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    audit, cmd_audit, cmd_bifluid_table, cmd_run, cmd_study, exit_code, AuditOutput, Global, RunSummary,
    EXIT_AUDIT_FAIL, EXIT_BLOW_UP, EXIT_CONFIG, EXIT_OK,
};
pub use config::{
    load_json, AuditConfig, AxisSpec, InitialData, ModeTerm, PartialInit, Profile, RunConfig, StudyConfig,
    TableConfig,
};

use crate::constitutive::Verdict;
use crate::error::{Error, Result};
use commands::{load_or, report_error};

#[derive(Debug, Parser)]
#[command(name = "bifluid-lab", version, about = "Spectral laboratory for compressible two-density flows")]
pub struct Cli {
    /// JSON configuration file (`run` falls back to the built-in reference problem).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Parallel runs in `study`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Time-step one configuration.
    Run,
    /// Check a pressure law against the structural hypotheses.
    Audit,
    /// Tabulate the two-phase transform.
    BifluidTable,
    /// Run a refinement ladder.
    Study,
}

fn need_config<T>(cmd: &str) -> Result<T> {
    Err(Error::Config(format!("{cmd} requires --config")))
}

impl Cli {
    pub fn execute(&self) -> i32 {
        let g = Global {
            out: Some(self.out.clone()),
            jobs: self.jobs,
            quiet: self.quiet,
        };
        let cfg = self.config.as_deref();
        let result = match self.command {
            Command::Run => load_or(cfg, || Ok(RunConfig::default_problem()))
                .and_then(|c| cmd_run(&c, &self.out, &g))
                .map(|_| EXIT_OK),
            Command::Audit => load_or::<AuditConfig>(cfg, || need_config("audit"))
                .and_then(|c| cmd_audit(&c, &self.out, &g))
                .map(|o| if o.verdict == Verdict::Fail { EXIT_AUDIT_FAIL } else { EXIT_OK }),
            Command::BifluidTable => {
                load_or::<TableConfig>(cfg, || need_config("bifluid-table"))
                    .and_then(|c| cmd_bifluid_table(&c, &self.out, &g))
                    .map(|_| EXIT_OK)
            }
            Command::Study => load_or::<StudyConfig>(cfg, || need_config("study"))
                .and_then(|c| cmd_study(&c, &self.out, &g))
                .map(|_| EXIT_OK),
        };
        result.unwrap_or_else(|e| {
            report_error(&e);
            exit_code(&e)
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => cli.execute(),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}
