//! `unipulse` command line: reads a JSON config, runs one experiment, and
//! writes CSV grids plus a `manifest.json` listing every output with its
//! SHA-256.
//!
//! Exit codes: 0 on success (a calibration that did not converge is still a
//! success), 2 for configuration errors, 3 for numeric failures.

mod commands;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::Ctx;
use error::CliError;
use output::{sha256_hex, OutputDir, RunManifest};
use std::path::{Path, PathBuf};
use std::time::Instant;
use unipulse::units::FrequencyConvention;

pub use error::{EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK};

pub const THREADS_ENV: &str = "UNIPULSE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    CyclicGhz,
    Angular,
}

impl From<Convention> for FrequencyConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::CyclicGhz => FrequencyConvention::CyclicGhz,
            Convention::Angular => FrequencyConvention::Angular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Two-axis parameter sweep (single, pair, coupler, three-stage, register-pair).
    Sweep,
    /// Ramsey delay scan with the closed form alongside.
    Ramsey,
    /// Ramsey delay scan under relaxation and dephasing.
    Lindblad,
    /// Pulse calibration against a basis-state target.
    Calibrate,
    /// Fluxon-shaped control pulse and optional bias/ic1 scans.
    Shape,
    /// Shaped-pulse calibration on a two-qubit register.
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Ramsey => "ramsey",
            Command::Lindblad => "lindblad",
            Command::Calibrate => "calibrate",
            Command::Shape => "shape",
            Command::Demo => "demo",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "unipulse", version, about = "Unipolar-pulse qubit control simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 or unset uses every core.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "cyclic-ghz")]
    pub convention: Convention,
}

/// Runs one command on config text and writes its outputs under `out`.
pub fn execute(
    command: Command,
    config: &str,
    out: &Path,
    convention: FrequencyConvention,
    threads: usize,
) -> Result<RunManifest, CliError> {
    let echo: serde_json::Value = commands::parse(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut dir = OutputDir::create(out)?;
    let preamble = vec![
        format!("unipulse {} {}", env!("CARGO_PKG_VERSION"), command.name()),
        format!("convention: {}", convention.name()),
        format!("config sha256: {}", sha256_hex(config.as_bytes())),
    ];
    let mut ctx = Ctx { convention, out: &mut dir, preamble };
    pool.install(|| match command {
        Command::Sweep => commands::sweep(config, &mut ctx),
        Command::Ramsey => commands::ramsey(config, &mut ctx, false),
        Command::Lindblad => commands::ramsey(config, &mut ctx, true),
        Command::Calibrate => commands::calibrate(config, &mut ctx),
        Command::Shape => commands::shape(config, &mut ctx),
        Command::Demo => commands::demo(config, &mut ctx),
    })?;
    dir.finish(RunManifest {
        command: command.name().to_string(),
        config: echo,
        convention: convention.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        files: Vec::new(),
    })
}

fn run_cli(cli: &Cli) -> Result<RunManifest, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::config("--config <path> is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    execute(cli.command, &text, &cli.out, cli.convention.into(), cli.threads.unwrap_or(0))
}

/// Parses arguments, runs, reports, and returns the process exit code.
/// Panics inside a command are caught and reported as numeric failures.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run_cli(&cli)));
    match outcome {
        Ok(Ok(m)) => {
            for f in &m.files {
                println!("{}  {}", f.sha256, cli.out.join(&f.name).display());
            }
            EXIT_OK
        }
        Ok(Err(e)) => {
            eprintln!("unipulse {}: {e}", cli.command.name());
            e.exit_code()
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            eprintln!("unipulse {}: internal error: {msg}", cli.command.name());
            EXIT_NUMERIC
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(["unipulse", "sweep", "--config", "a.json", "--threads", "2", "--convention", "angular"]).unwrap();
        assert_eq!(cli.command, Command::Sweep);
        assert_eq!(cli.threads, Some(2));
        assert_eq!(cli.convention, Convention::Angular);
    }

    #[test]
    fn bad_convention_is_a_config_error() {
        assert_eq!(main_with(["unipulse", "sweep", "--convention", "hz"]), EXIT_CONFIG);
    }

    #[test]
    fn missing_config_flag() {
        assert_eq!(main_with(["unipulse", "ramsey", "--out", "/nonexistent-unipulse"]), EXIT_CONFIG);
    }

    #[test]
    fn malformed_json_names_the_line() {
        let dir = std::env::temp_dir().join("unipulse-lib-test");
        match execute(Command::Ramsey, "{\n \"delta\": 1,\n \"tau\": }", &dir, FrequencyConvention::Angular, 1) {
            Err(CliError::Config(m)) => assert!(m.contains("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
