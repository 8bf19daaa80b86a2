//! Command-line flags, the optional TOML config file, and their merge.
//!
//! Precedence: flag, then config file, then built-in default. Config keys
//! are the flag names without dashes, with `-` replaced by `_`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "bh", version, about = "Phase portraits and traveling waves of the Burgers-Huxley ODE")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Equilibria, sectors at infinity, blow-up circles and the Bendixson region.
    Analyze,
    /// Portrait class, traced separatrices and an SVG rendering.
    Portrait,
    /// Traveling wave profile and its verification report.
    Wave,
    /// Runs the wave through the PDE solver and measures its speed.
    PdeCheck,
    /// Portrait class table over a list of parameter cells.
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Portrait => "portrait",
            Command::Wave => "wave",
            Command::PdeCheck => "pde-check",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Reaction exponent; only 1 is supported.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Output directory; without it the main document goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed_eps: Option<f64>,
    /// PDE grid points.
    #[arg(long = "N", global = true)]
    pub grid_points: Option<usize>,
    /// PDE final time.
    #[arg(long = "T", global = true)]
    pub final_time: Option<f64>,
    /// PDE half-width.
    #[arg(long = "L", global = true)]
    pub half_width: Option<f64>,
    /// Keep every STRIDE-th PDE state in a snapshot file (needs --out).
    #[arg(long, global = true)]
    pub snapshot_stride: Option<usize>,
    /// Window of the written wave profile, tails filled by linearisation.
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub xi_range: Option<Vec<f64>>,
    /// Sweep cells as `n,k,c;n,k,c;...`; an empty string means no cells.
    #[arg(long, global = true)]
    pub cells: Option<String>,
    /// TOML file with defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
}

/// Keys accepted in the config file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<u32>,
    k: Option<u32>,
    c: Option<f64>,
    m: Option<u32>,
    out: Option<PathBuf>,
    format: Option<Format>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    seed_eps: Option<f64>,
    #[serde(rename = "N")]
    grid_points: Option<usize>,
    #[serde(rename = "T")]
    final_time: Option<f64>,
    #[serde(rename = "L")]
    half_width: Option<f64>,
    snapshot_stride: Option<usize>,
    xi_range: Option<[f64; 2]>,
    cells: Option<String>,
}

/// Effective settings after merging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub n: u32,
    pub k: u32,
    pub c: f64,
    pub m: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub seed_eps: f64,
    #[serde(rename = "N")]
    pub grid_points: usize,
    #[serde(rename = "T")]
    pub final_time: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<String>,
}

impl Default for Settings {
    fn default() -> Self {
        let ctl = bh_core::flow::IntegratorControls::default();
        let pde = bh_core::pde::PdeConfig::default();
        Self {
            n: 1,
            k: 1,
            c: 2.0,
            m: 1,
            rel_tol: ctl.rel_tol,
            abs_tol: ctl.abs_tol,
            seed_eps: bh_core::portrait::DEFAULT_SEED_EPS,
            grid_points: pde.points,
            final_time: pde.final_time,
            half_width: pde.half_width,
            out: None,
            format: None,
            snapshot_stride: None,
            xi_range: None,
            cells: None,
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        let msg = e.to_string().replace('\n', " ");
        CliError::Validation(format!("bad config {}: {}", path.display(), msg.trim()))
    })
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let d = Settings::default();
        let xi_range = match &flags.xi_range {
            Some(v) => Some([v[0], v[1]]),
            None => file.xi_range,
        };
        let s = Settings {
            n: flags.n.or(file.n).unwrap_or(d.n),
            k: flags.k.or(file.k).unwrap_or(d.k),
            c: flags.c.or(file.c).unwrap_or(d.c),
            m: flags.m.or(file.m).unwrap_or(d.m),
            rel_tol: flags.rel_tol.or(file.rel_tol).unwrap_or(d.rel_tol),
            abs_tol: flags.abs_tol.or(file.abs_tol).unwrap_or(d.abs_tol),
            seed_eps: flags.seed_eps.or(file.seed_eps).unwrap_or(d.seed_eps),
            grid_points: flags.grid_points.or(file.grid_points).unwrap_or(d.grid_points),
            final_time: flags.final_time.or(file.final_time).unwrap_or(d.final_time),
            half_width: flags.half_width.or(file.half_width).unwrap_or(d.half_width),
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format),
            snapshot_stride: flags.snapshot_stride.or(file.snapshot_stride),
            xi_range,
            cells: flags.cells.clone().or(file.cells),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rel-tol", self.rel_tol)?;
        positive("abs-tol", self.abs_tol)?;
        positive("seed-eps", self.seed_eps)?;
        if let Some([lo, hi]) = self.xi_range {
            if !(lo < hi) {
                return Err(CliError::Validation(format!("xi-range needs LO < HI, got {lo} {hi}")));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("settings serialise")
    }
}

/// Parses `n,k,c;n,k,c;...`. Blank input gives no cells.
pub fn parse_cells(text: &str) -> Result<Vec<(u32, u32, f64)>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|cell| {
            let bad = || CliError::Validation(format!("bad cell '{cell}', expected n,k,c"));
            let parts: Vec<&str> = cell.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok((
                parts[0].parse().map_err(|_| bad())?,
                parts[1].parse().map_err(|_| bad())?,
                parts[2].parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}
