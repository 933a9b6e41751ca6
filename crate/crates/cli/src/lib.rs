//! Command-line front end: config loading, subcommand dispatch, reports and exit codes.
//!
//! Exit codes: 0 every check passed (inconclusive allowed), 1 a check failed,
//! 2 configuration error or precondition violation, 3 numerical degeneracy.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser};

use cfinsler_core::{Error, Result};

use crate::config::{load_config, Command, Format, RunConfig};
use crate::report::{RunReport, TOOL};

#[derive(Debug, Parser)]
#[command(name = "cfinsler", version, about = "Numerical checks for complex Finsler, Bergman and invariant metrics")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Run config (TOML, or JSON by extension). Relative paths also try $CFINSLER_CONFIG_DIR.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Comma-separated check names or theorem tags (verify only).
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Record wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

impl Flags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = Some(t);
        }
        if let Some(p) = &self.output {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(c) = &self.checks {
            cfg.checks = Some(c.clone());
        }
        cfg.timing |= self.timing;
    }
}

/// Runs one subcommand on an already loaded config.
pub fn execute(command: Command, config: &RunConfig, base: &std::path::Path) -> Result<RunReport> {
    let start = Instant::now();
    let ctx = commands::Context::new(config, base, command)?;
    let (checks, tables) = match command {
        Command::Curvature => commands::curvature(&ctx)?,
        Command::Verify => commands::verify(&ctx)?,
        Command::Squeeze => commands::squeeze(&ctx)?,
        Command::Kobayashi => commands::kobayashi(&ctx)?,
    };
    Ok(RunReport {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema: config::SCHEMA_VERSION,
        command: command.name().into(),
        wall_time_s: ctx.config.timing.then(|| start.elapsed().as_secs_f64()),
        config: ctx.config,
        checks,
        tables,
    })
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) => 3,
        _ => 2,
    }
}

/// Loads, runs and writes the report; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = (|| -> Result<RunReport> {
        let (mut cfg, base) = load_config(&cli.flags.config)?;
        cli.flags.apply(&mut cfg);
        let report = execute(cli.command, &cfg, &base)?;
        let text = report.render(report.config.output.format)?;
        match &report.config.output.path {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => print!("{text}"),
        }
        Ok(report)
    })();
    match result {
        Ok(report) => {
            for c in &report.checks {
                let v = serde_json::to_value(c.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                eprintln!("{} {} {v}: {}", c.tag, c.name, c.message);
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
