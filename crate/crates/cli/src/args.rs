use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use netentropy::channel::DEFAULT_SYMBOL_RATE;
use netentropy::Domain;

use crate::config::ConfigFile;

#[derive(Debug, Parser)]
#[command(
    name = "netentropy",
    version,
    about = "Entropy rate bounds for time-varying wireless networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-edge and network entropy rate bounds over an r0 or nu grid
    BoundsSweep(SweepArgs),
    /// Monte Carlo network trajectories plus a summary against the oracle
    Simulate(SimulateArgs),
    /// Run the built-in invariant checks
    Validate(ValidateArgs),
    /// Exact block entropies and bounds for one parameter point
    Oracle(OracleArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// square, disk, triangle, a comma list, or all
    #[arg(long)]
    pub domain: Option<String>,
    /// Path loss exponent(s), comma separated
    #[arg(long)]
    pub eta: Option<String>,
    /// Typical connection range
    #[arg(long)]
    pub r0: Option<f64>,
    /// Maximum Doppler frequency in Hz
    #[arg(long)]
    pub nu: Option<f64>,
    /// Symbol rate in Bd
    #[arg(long = "symbol-rate")]
    pub symbol_rate: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (directory for simulate); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value parameter file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Swept parameter: r0 or nu
    #[arg(long)]
    pub variable: Option<String>,
    /// Number of log-spaced grid points
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    /// Explicit comma-separated grid, overriding points/min/max
    #[arg(long)]
    pub values: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Snapshots per trial
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// stationary or all-off
    #[arg(long)]
    pub init: Option<String>,
    /// Longest block length in the summary
    #[arg(long = "block-steps")]
    pub block_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// fast or full
    #[arg(long)]
    pub level: Option<String>,
    /// Deliberately break one check, to confirm it can fail
    #[arg(long = "inject-fault")]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest block length
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Common flags merged with the config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub domains: Vec<Domain>,
    pub etas: Vec<f64>,
    pub r0: f64,
    pub nu: f64,
    pub symbol_rate: f64,
    pub nodes: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Resolved {
    pub fn single_domain(&self) -> Result<Domain> {
        match self.domains.as_slice() {
            [d] => Ok(*d),
            _ => bail!("this command takes exactly one domain"),
        }
    }

    pub fn single_eta(&self) -> Result<f64> {
        match self.etas.as_slice() {
            [e] => Ok(*e),
            _ => bail!("this command takes exactly one eta"),
        }
    }
}

pub fn load_config(common: &CommonArgs) -> Result<ConfigFile> {
    match &common.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

pub fn parse_domains(s: &str) -> Result<Vec<Domain>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Domain::all().to_vec());
    }
    let domains = s
        .split(',')
        .map(|d| {
            d.trim()
                .parse()
                .map(Domain::new)
                .with_context(|| format!("bad domain {d:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    if domains.is_empty() {
        bail!("empty domain list");
    }
    Ok(domains)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {v:?}"))
        })
        .collect()
}

pub fn resolve(
    common: &CommonArgs,
    file: &ConfigFile,
    default_domains: &str,
    default_etas: &str,
) -> Result<Resolved> {
    let domain = common
        .domain
        .clone()
        .or_else(|| file.raw("domain").map(str::to_string));
    let eta = common
        .eta
        .clone()
        .or_else(|| file.raw("eta").map(str::to_string));
    let out = common
        .out
        .clone()
        .or_else(|| file.raw("out").map(PathBuf::from));
    Ok(Resolved {
        domains: parse_domains(domain.as_deref().unwrap_or(default_domains))?,
        etas: parse_list(eta.as_deref().unwrap_or(default_etas))?,
        r0: file.pick_or(common.r0, "r0", 0.7)?,
        nu: file.pick_or(common.nu, "nu", 500.0)?,
        symbol_rate: file.pick_or(common.symbol_rate, "symbol-rate", DEFAULT_SYMBOL_RATE)?,
        nodes: file.pick_or(common.nodes, "nodes", 50)?,
        seed: file.pick_or(common.seed, "seed", 1)?,
        out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use netentropy::Shape;

    #[test]
    fn domain_lists() {
        assert_eq!(parse_domains("all").unwrap().len(), 3);
        let d = parse_domains("disk, triangle").unwrap();
        assert_eq!(d[0].shape, Shape::Disk);
        assert_eq!(d[1].shape, Shape::Triangle);
        assert!(parse_domains("hexagon").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigFile::parse("r0 = 0.3\nnu = 10\neta = 3,4\ndomain = disk").unwrap();
        let common = CommonArgs {
            r0: Some(0.9),
            ..Default::default()
        };
        let r = resolve(&common, &file, "all", "2").unwrap();
        assert_eq!(r.r0, 0.9);
        assert_eq!(r.nu, 10.0);
        assert_eq!(r.etas, vec![3.0, 4.0]);
        assert_eq!(r.domains, vec![Domain::disk()]);
        assert_eq!(r.nodes, 50);
    }
}
