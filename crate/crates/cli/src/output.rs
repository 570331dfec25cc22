use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Rounded to 12 significant digits, then printed in shortest form, so
/// `0.9999999999999994` becomes `1.0`. JSON output keeps full precision.
pub fn csv_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // avoid "-0.0"
    format!("{:?}", if rounded == 0.0 { 0.0 } else { rounded })
}

pub fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_f64).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Serialize)]
pub struct Metadata<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
}

impl<'a, C: Serialize> Metadata<'a, C> {
    pub fn new(command: &'a str, config: &'a C) -> Self {
        Self {
            tool: "entx",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
        }
    }
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Sidecar next to a CSV file: `x.csv` → `x.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let candidate = path.with_extension("json");
    if candidate == path {
        path.with_extension("meta.json")
    } else {
        candidate
    }
}

/// Writes `primary` to `out` (or stdout). A sidecar is only written next to a file.
pub fn emit(out: Option<&Path>, primary: &str, sidecar: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, primary)?;
            if let Some(meta) = sidecar {
                write_file(&sidecar_path(path), meta)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(primary.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
