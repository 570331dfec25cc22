//! Flag parsing, the optional TOML config file and resolution of defaults.
//!
//! Precedence is flag, then config file, then built-in default. Every
//! resolved config is serialized into the metadata of the files it produces.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "entx", version, about = "Non-positive local maps and hidden entanglement on qubit pairs")]
pub struct Cli {
    /// TOML file supplying values for any flag not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence and negativity of φ⁺ under two cavity channels, with exceeding pairs.
    Trajectory(TrajectoryArgs),
    /// Exceeding pairs of the cavity trajectory with their revival maps.
    Procedure1(TrajectoryArgs),
    /// Inverse-GAD pipeline at channel level and as four-qubit unitary dynamics.
    Procedure2(Procedure2Args),
    /// Classify the (gamma, n) square into NONINVERTIBLE / EB / EA_NOT_EB / NOT_EA.
    Scan(ScanArgs),
    /// Run the invariant suites and report pass/fail per group.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; CSV output also writes a JSON sidecar next to it. Defaults to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
    /// Concurrence required at t_f.
    #[arg(long)]
    pub exceed_threshold: Option<f64>,
    /// Pure inputs sampled when looking for a negative output of the revival map.
    #[arg(long)]
    pub witness_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputState {
    PhiPlus,
    Werner,
}

#[derive(Debug, Args)]
pub struct Procedure2Args {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, value_enum)]
    pub state: Option<InputState>,
    /// Singlet weight of the Werner input.
    #[arg(long)]
    pub werner_p: Option<f64>,
    #[arg(long)]
    pub ea_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Points per axis: `N` or `NxM` (gamma by n).
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub ea_samples: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub refine_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Smallest eigenvalue accepted for a density matrix is minus this.
    #[arg(long)]
    pub psd_slack: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub gamma_steps: usize,
    pub n_steps: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("grid must be N or NxM with integers, got {s:?}"))
        };
        let (g, n) = match s.split_once(['x', 'X']) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        Ok(Self {
            gamma_steps: g,
            n_steps: n,
        })
    }
}

/// Every key accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub gamma0: Option<f64>,
    pub lambda: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub exceed_threshold: Option<f64>,
    pub witness_samples: Option<usize>,
    pub gamma: Option<f64>,
    pub n: Option<f64>,
    pub state: Option<InputState>,
    pub werner_p: Option<f64>,
    pub grid: Option<String>,
    pub ea_samples: Option<usize>,
    pub restarts: Option<usize>,
    pub refine_iterations: Option<usize>,
    pub psd_slack: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryConfig {
    pub gamma0: f64,
    pub lambda: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub exceed_threshold: f64,
    pub death_threshold: f64,
    pub max_condition: f64,
    pub witness_samples: usize,
    pub initial_state: &'static str,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct Procedure2Config {
    pub gamma: f64,
    pub n: f64,
    pub state: InputState,
    pub werner_p: Option<f64>,
    pub ea_samples: usize,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRunConfig {
    pub gamma_steps: usize,
    pub n_steps: usize,
    pub ea_samples: usize,
    pub restarts: usize,
    pub refine_iterations: usize,
    pub ea_threshold: f64,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub psd_slack: f64,
    pub seed: u64,
}

fn require(cond: bool, flag: &str, msg: String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(format!("invalid --{flag}: {msg}")))
    }
}

fn require_finite(value: f64, flag: &str) -> Result<(), CliError> {
    require(value.is_finite(), flag, format!("{value} is not a finite number"))
}

pub fn resolve_trajectory(args: &TrajectoryArgs, file: &FileConfig) -> Result<TrajectoryConfig, CliError> {
    let defaults = entx_core::procedures::Procedure1Config::default();
    let cfg = TrajectoryConfig {
        gamma0: args.gamma0.or(file.gamma0).unwrap_or(1.0),
        lambda: args.lambda.or(file.lambda).unwrap_or(0.1),
        t_max: args.t_max.or(file.t_max).unwrap_or(60.0),
        t_steps: args.t_steps.or(file.t_steps).unwrap_or(400),
        exceed_threshold: args
            .exceed_threshold
            .or(file.exceed_threshold)
            .unwrap_or(defaults.exceed_threshold),
        death_threshold: defaults.death_threshold,
        max_condition: defaults.max_condition,
        witness_samples: args
            .witness_samples
            .or(file.witness_samples)
            .unwrap_or(defaults.witness_samples),
        initial_state: "phi-plus",
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        format: args.common.format.or(file.format).unwrap_or(Format::Csv),
    };
    for (v, flag) in [(cfg.gamma0, "gamma0"), (cfg.lambda, "lambda"), (cfg.t_max, "t-max")] {
        require_finite(v, flag)?;
        require(v > 0.0, flag, format!("{v} must be positive"))?;
    }
    require(
        2.0 * cfg.gamma0 > cfg.lambda,
        "lambda",
        format!(
            "{} must be below 2 * gamma0 = {} (strong coupling)",
            cfg.lambda,
            2.0 * cfg.gamma0
        ),
    )?;
    require(cfg.t_steps >= 2, "t-steps", format!("{} must be at least 2", cfg.t_steps))?;
    require_finite(cfg.exceed_threshold, "exceed-threshold")?;
    require(
        cfg.exceed_threshold > cfg.death_threshold && cfg.exceed_threshold <= 1.0,
        "exceed-threshold",
        format!("{} must lie in ({}, 1]", cfg.exceed_threshold, cfg.death_threshold),
    )?;
    require(cfg.witness_samples >= 1, "witness-samples", "must be at least 1".into())?;
    Ok(cfg)
}

fn unit(value: f64, flag: &str) -> Result<(), CliError> {
    require(
        (0.0..=1.0).contains(&value),
        flag,
        format!("{value} is outside [0, 1]"),
    )
}

pub fn resolve_procedure2(args: &Procedure2Args, file: &FileConfig) -> Result<Procedure2Config, CliError> {
    let state = args.state.or(file.state).unwrap_or(InputState::PhiPlus);
    let cfg = Procedure2Config {
        gamma: args.gamma.or(file.gamma).unwrap_or(0.75),
        n: args.n.or(file.n).unwrap_or(0.5),
        state,
        werner_p: match state {
            InputState::PhiPlus => None,
            InputState::Werner => Some(args.werner_p.or(file.werner_p).unwrap_or(1.0)),
        },
        ea_samples: args.ea_samples.or(file.ea_samples).unwrap_or(500),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        format: args.common.format.or(file.format).unwrap_or(Format::Json),
    };
    unit(cfg.gamma, "gamma")?;
    unit(cfg.n, "n")?;
    if let Some(p) = cfg.werner_p {
        unit(p, "werner-p")?;
    }
    require(cfg.ea_samples >= 16, "ea-samples", format!("{} must be at least 16", cfg.ea_samples))?;
    Ok(cfg)
}

pub fn resolve_scan(args: &ScanArgs, file: &FileConfig) -> Result<ScanRunConfig, CliError> {
    let grid = match (args.grid, &file.grid) {
        (Some(g), _) => g,
        (None, Some(s)) => s.parse().map_err(|e| CliError::Config(format!("invalid --grid: {e}")))?,
        (None, None) => GridSpec {
            gamma_steps: 40,
            n_steps: 40,
        },
    };
    let ea_defaults = entx_core::EaConfig::default();
    let cfg = ScanRunConfig {
        gamma_steps: grid.gamma_steps,
        n_steps: grid.n_steps,
        ea_samples: args.ea_samples.or(file.ea_samples).unwrap_or(500),
        restarts: args.restarts.or(file.restarts).unwrap_or(ea_defaults.restarts),
        refine_iterations: args
            .refine_iterations
            .or(file.refine_iterations)
            .unwrap_or(ea_defaults.refine_iterations),
        ea_threshold: ea_defaults.threshold,
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        format: args.common.format.or(file.format).unwrap_or(Format::Csv),
    };
    require(
        cfg.gamma_steps >= 2 && cfg.n_steps >= 2,
        "grid",
        format!("{}x{} needs at least 2 points per axis", cfg.gamma_steps, cfg.n_steps),
    )?;
    require(cfg.ea_samples >= 16, "ea-samples", format!("{} must be at least 16", cfg.ea_samples))?;
    require(
        cfg.restarts >= 1 && cfg.restarts <= cfg.ea_samples,
        "restarts",
        format!("{} must lie between 1 and --ea-samples", cfg.restarts),
    )?;
    Ok(cfg)
}

pub fn resolve_verify(args: &VerifyArgs, file: &FileConfig) -> Result<VerifyConfig, CliError> {
    let cfg = VerifyConfig {
        psd_slack: args.psd_slack.or(file.psd_slack).unwrap_or(1e-10),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
    };
    require(
        cfg.psd_slack.is_finite() && cfg.psd_slack >= 0.0,
        "psd-slack",
        format!("{} must be a nonnegative number", cfg.psd_slack),
    )?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_forms() {
        assert_eq!(
            "40".parse::<GridSpec>().unwrap(),
            GridSpec {
                gamma_steps: 40,
                n_steps: 40
            }
        );
        assert_eq!("12x7".parse::<GridSpec>().unwrap().n_steps, 7);
        assert!("ax3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn file_keys_are_checked() {
        assert!(toml::from_str::<FileConfig>("seed = 4\ngamma = 0.5").is_ok());
        assert!(toml::from_str::<FileConfig>("gama = 0.5").is_err());
    }
}
