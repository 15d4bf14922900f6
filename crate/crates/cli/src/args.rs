//! Command-line flags and the matching TOML config sections.
//!
//! Every section field mirrors a flag. Flags win over file values, and file
//! values win over built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "dihedral", version, about = "Infer the dihedral symmetry of 2-D point clouds")]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic point cloud and a `.meta.json` sidecar.
    #[command(subcommand)]
    Generate(Generate),
    /// Phase-embed a periodic time series onto the unit circle.
    Embed(EmbedArgs),
    /// Posterior over D_n for a point cloud.
    Infer(InferArgs),
    /// Threshold classification and robust windows.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Subcommand)]
pub enum Generate {
    /// Orbit of the equivariant map with D_n symmetry.
    Cg(CgArgs),
    /// 8-point motif replicated under D_12 (192 points).
    D12(MotifArgs),
    /// Motif replicated under an arbitrary D_n.
    Motif(MotifArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Observational,
    Dynamical,
}

/// Comma-separated thresholds; an empty string gives an empty grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Grid)
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CgArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Order of the map's symmetry.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub transient: Option<usize>,
    /// Record every stride-th iterate.
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_map: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z0_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z0_im: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotifArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Symmetry order (fixed at 12 for `d12`).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub motif_size: Option<usize>,
    #[arg(long)]
    pub radius_min: Option<f64>,
    #[arg(long)]
    pub radius_max: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbedArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Series CSV; each column is one cycle, and all are averaged.
    #[arg(long, conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    /// Use only this column.
    #[arg(long)]
    pub column: Option<String>,
    /// Manifest CSV with `subject,condition,joint,leg,file`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub condition: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub subjects: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub joints: Option<Vec<String>>,
    #[arg(long)]
    pub leg: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportArgs {
    /// Wasserstein order.
    #[arg(long = "wasserstein-p")]
    pub p: Option<f64>,
    /// Tolerance for cost comparisons.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InferArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Result document (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Point cloud CSV with `x,y` columns.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Trace CSV; defaults to the result path with a `.trace.csv` extension.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Probability of a n ± 1 proposal.
    #[arg(long)]
    pub local_prob: Option<f64>,
    /// More than one chain switches to parallel tempering.
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub ladder_ratio: Option<f64>,
    #[arg(long)]
    pub swap_interval: Option<usize>,
    /// Keep every thin-th trace entry in the trace file.
    #[arg(long)]
    pub thin: Option<usize>,
    /// Enumerate the posterior instead of sampling.
    #[arg(long)]
    #[serde(default)]
    pub exact: bool,
    #[command(flatten)]
    #[serde(default)]
    pub transport: TransportArgs,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkArgs {
    /// Output directory for `distances.csv`, `sweep.csv` and `summary.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Explicit ascending thresholds, comma separated.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Size of the default log-spaced grid.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Report the window for this n.
    #[arg(long)]
    pub truth: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub transport: TransportArgs,
}

/// Sections of a config file, one per command.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    /// Fallback seed for every command.
    pub seed: Option<u64>,
    pub cg: CgArgs,
    pub d12: MotifArgs,
    pub motif: MotifArgs,
    pub embed: EmbedArgs,
    pub infer: InferArgs,
    pub benchmark: BenchmarkArgs,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

macro_rules! overlay {
    ($t:ident { $($f:ident),* $(,)? } $(, $extra:ident => $how:expr)*) => {
        impl $t {
            /// Fills every unset flag from `file`.
            pub fn overlay(self, file: $t) -> $t {
                $t {
                    $($f: self.$f.or(file.$f),)*
                    $($extra: $how(self.$extra, file.$extra),)*
                }
            }
        }
    };
}

overlay!(CgArgs { seed, out, n, count, sigma, transient, stride, mode, alpha, beta, gamma, lambda_map, z0_re, z0_im });
overlay!(MotifArgs { seed, out, n, motif_size, radius_min, radius_max, sigma });
overlay!(EmbedArgs { out, input, column, manifest, condition, subjects, joints, leg });
overlay!(TransportArgs { p, tolerance });
overlay!(
    InferArgs { seed, out, input, trace, lambda, iters, burn_in, n_min, n_max, local_prob, chains, ladder_ratio, swap_interval, thin },
    exact => |a: bool, b: bool| a || b,
    transport => TransportArgs::overlay
);
overlay!(
    BenchmarkArgs { out, input, n_min, n_max, grid, grid_points, truth },
    transport => TransportArgs::overlay
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1, 0.2,0.3").unwrap(), Grid(vec![0.1, 0.2, 0.3]));
        assert_eq!(parse_grid("").unwrap(), Grid(vec![]));
        assert!(parse_grid("0.1,x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("[infer]\nlambda = 100.0\niters = 50\n[infer.transport]\np = 1.0\n").unwrap();
        let flags = InferArgs { lambda: Some(250.0), ..Default::default() };
        let merged = flags.overlay(file.infer);
        assert_eq!(merged.lambda, Some(250.0));
        assert_eq!(merged.iters, Some(50));
        assert_eq!(merged.transport.p, Some(1.0));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[infer]\nlamda = 1.0\n").is_err());
        assert!(toml::from_str::<FileConfig>("colour = 1\n").is_err());
    }
}
