//! Command-line driver: parses a subcommand, runs the scan on a worker pool and
//! writes one CSV table.
//!
//! Every CSV starts with a `#` header block holding the tool version, the
//! subcommand and every parameter (defaults included) as `key = value`, then a
//! column row and the data rows. Numbers carry 17 significant digits. Passing
//! the CSV back through `--config` repeats the run.
//!
//! Exit codes: 0 on success, 2 for argument errors, 3 for numerical failures.
//! `SPINCHAIN_WORKERS` sets the number of worker threads.

use std::ffi::OsString;
use std::io::Write;

use clap::{CommandFactory, FromArgMatches};

pub mod args;
mod commands;
pub mod config;
pub mod table;

use args::Cli;
use table::Table;

pub const WORKERS_ENV: &str = "SPINCHAIN_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text, printed to standard output.
    #[error("{0}")]
    Help(String),
    /// Parser message that already carries the usage line.
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<spinchain::Error> for CliError {
    fn from(e: spinchain::Error) -> Self {
        use spinchain::Error as E;
        match e {
            E::InvalidParameter(_) | E::Unsupported(_) | E::DegenerateGap => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parameter echo of the parsed subcommand in definition order.
fn echo(name: &str, matches: &clap::ArgMatches) -> Vec<(String, String)> {
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(name) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for arg in sub.get_arguments() {
        let id = arg.get_id().as_str();
        if matches!(id, "out" | "config" | "help" | "version") {
            continue;
        }
        let Some(long) = arg.get_long() else { continue };
        let Some(raw) = matches.get_raw(id) else { continue };
        let vals: Vec<String> = raw
            .map(|v| {
                let s = v.to_string_lossy();
                match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => x.to_string(),
                    _ => s.into_owned(),
                }
            })
            .collect();
        out.push((long.to_string(), vals.join(" ")));
    }
    out
}

fn workers() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn execute(argv: Vec<OsString>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let argv = config::merge(argv)?;
    let matches = Cli::command().try_get_matches_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Help(e.render().to_string())
        }
        _ => CliError::Parse(e.render().to_string()),
    })?;
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Parse(e.render().to_string()))?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers()?)
        .build()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let table: Table = pool.install(|| commands::dispatch(&cli.command))?;
    let mut header = vec![
        ("tool".to_string(), format!("spinchain {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), name.to_string()),
    ];
    header.extend(echo(name, sub));
    let text = table.render(&header);
    match &cli.command.common().out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Run the tool on `argv` (program name first) and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let sub = argv.get(1).map(|s| s.to_string_lossy().into_owned());
    let Err(e) = execute(argv, stdout) else { return 0 };
    let usage = || {
        let mut cmd = Cli::command();
        cmd.build();
        match sub.as_deref().and_then(|s| cmd.find_subcommand_mut(s)) {
            Some(c) => c.render_usage(),
            None => Cli::command().render_usage(),
        }
    };
    let _ = match &e {
        CliError::Help(text) => write!(stdout, "{text}"),
        CliError::Parse(text) => write!(stderr, "{text}"),
        CliError::Usage(msg) => writeln!(stderr, "error: {msg}\n\n{}", usage()),
        other => writeln!(stderr, "error: {other}"),
    };
    e.exit_code()
}
