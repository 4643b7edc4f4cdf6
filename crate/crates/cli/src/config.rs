use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use trefoil_core::curve::{preset, CurveSpec, KnotCurve};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "trefoil", version, about = "Find and certify trefoil hexagons inscribed in analytic knots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrent-chord configurations for each basepoint.
    Search(CurveArgs),
    /// Signed count of configurations next to the quadratic Conway coefficient.
    Invariant(CurveArgs),
    /// Thickness and the separation check on the found configurations.
    Thickness(CurveArgs),
    /// Inscribed trefoil hexagons near the found configurations.
    Certify(CurveArgs),
    /// Quadrisecant lines and their distance to certified trefoils.
    Quadrisecants(CurveArgs),
    /// Knot type of a closed hexagon read from a points file.
    ClassifyHex(HexArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Preset name, e.g. paper-trefoil-s3 or torus(2,5)-r3.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub curve: Option<String>,
    /// Curve spec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Seed grid: simplex resolution for the configuration search, samples
    /// per loop for quadrisecants.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Basepoints `t₁`, comma separated or repeated.
    #[arg(long = "basepoint", value_delimiter = ',', allow_negative_numbers = true)]
    pub basepoints: Vec<f64>,
    /// Residual norm accepted for a configuration.
    #[arg(long, default_value_t = trefoil_core::solve::ACCEPT_TOL)]
    pub tol: f64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HexArgs {
    /// Six vertices, one `x y z` per line.
    pub points: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Clone, Default)]
pub struct OutputArgs {
    /// Write the result document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Export CSV polylines into this directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    /// Record wall-clock timings (makes output differ between runs).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Search,
    Invariant,
    Thickness,
    Certify,
    Quadrisecants,
    ClassifyHex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Preset(String),
    SpecFile(String),
}

/// Validated settings of one curve command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandName,
    pub source: CurveSource,
    pub curve: KnotCurve,
    pub grid: usize,
    pub tol: f64,
    pub basepoints: Vec<f64>,
    pub seed: u64,
    pub output: OutputArgs,
}

pub const DEFAULT_SEARCH_GRID: usize = 12;
pub const DEFAULT_QUAD_GRID: usize = 96;
pub const MIN_GRID: usize = 4;

impl RunConfig {
    pub fn from_args(command: CommandName, args: &CurveArgs) -> Result<Self, CliError> {
        let (source, curve) = match (&args.curve, &args.spec) {
            (Some(name), None) => (CurveSource::Preset(name.clone()), preset(name)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
                (CurveSource::SpecFile(path.display().to_string()), KnotCurve::from_spec_json(&text)?)
            }
            _ => return Err(CliError::Input("give exactly one of --curve and --spec".into())),
        };
        let default_grid = if command == CommandName::Quadrisecants { DEFAULT_QUAD_GRID } else { DEFAULT_SEARCH_GRID };
        let grid = args.grid.unwrap_or(default_grid);
        if grid < MIN_GRID {
            return Err(CliError::Input(format!("grid {grid} is below {MIN_GRID}")));
        }
        if !(args.tol > 0.0 && args.tol.is_finite()) {
            return Err(CliError::Input(format!("tolerance {} must be positive", args.tol)));
        }
        if let Some(b) = args.basepoints.iter().find(|b| !b.is_finite()) {
            return Err(CliError::Input(format!("basepoint {b} is not finite")));
        }
        let basepoints = if args.basepoints.is_empty() { vec![0.0] } else { args.basepoints.clone() };
        Ok(RunConfig { command, source, curve, grid, tol: args.tol, basepoints, seed: args.seed, output: args.output.clone() })
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command,
            curve: Some(CurveEcho { source: self.source.clone(), spec: CurveSpec::from(&self.curve) }),
            points_file: None,
            grid: Some(self.grid),
            tol: Some(self.tol),
            basepoints: self.basepoints.clone(),
            seed: Some(self.seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveEcho {
    pub source: CurveSource,
    pub spec: CurveSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basepoints: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}
