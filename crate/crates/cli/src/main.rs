mod commands;
mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use config::{Cli, Command, FileConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or files: exit code 1.
    Config(String),
    Io(String),
    /// A mathematical precondition failed: exit code 2.
    Math(entx_core::Error),
    /// Some verification groups failed.
    Verify(Vec<String>),
}

impl From<entx_core::Error> for CliError {
    fn from(e: entx_core::Error) -> Self {
        use entx_core::Error as E;
        match e {
            E::Range { name, value, range } => CliError::Config(format!(
                "invalid --{}: {value} is outside {range}",
                name.replace('_', "-")
            )),
            E::BudgetTooSmall(msg) => CliError::Config(format!("budget too small: {msg}")),
            other => CliError::Math(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn error_kind(e: &entx_core::Error) -> &'static str {
    use entx_core::Error as E;
    match e {
        E::NonInvertible { .. } => "NonInvertible",
        E::NotCp { .. } => "NotCp",
        E::Singular { .. } => "Singular",
        E::NoConvergence { .. } => "NoConvergence",
        E::BadTimes { .. } => "BadTimes",
        _ => "MathError",
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Trajectory(args) => commands::trajectory(&args, &file),
        Command::Procedure1(args) => commands::procedure1(&args, &file),
        Command::Procedure2(args) => commands::procedure2(&args, &file),
        Command::Scan(args) => commands::scan(&args, &file),
        Command::Verify(args) => verify::run(&args, &file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verify(groups)) => {
            eprintln!("verification failed: {}", groups.join(", "));
            ExitCode::from(1)
        }
        Err(CliError::Math(e)) => {
            let detail = serde_json::to_value(StructuredError(&e)).unwrap_or(serde_json::Value::Null);
            let body = json!({ "error": { "kind": error_kind(&e), "message": e.to_string(), "detail": detail } });
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("json value"));
            ExitCode::from(2)
        }
    }
}

/// Numeric fields of the math errors that carry them.
struct StructuredError<'a>(&'a entx_core::Error);

impl serde::Serialize for StructuredError<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use entx_core::Error as E;
        let v = match self.0 {
            E::NonInvertible { condition } | E::Singular { condition } => json!({ "condition": condition }),
            E::NotCp { min_choi_eigenvalue } => json!({ "min_choi_eigenvalue": min_choi_eigenvalue }),
            E::BadTimes { t_i, t_f } => json!({ "t_i": t_i, "t_f": t_f }),
            E::NoConvergence { sweeps } => json!({ "sweeps": sweeps }),
            _ => serde_json::Value::Null,
        };
        v.serialize(s)
    }
}
