//! Command-line front end for `netentropy`: bound sweeps, simulation export,
//! the exact oracle and built-in validation.

pub mod args;
pub mod config;
pub mod format;
pub mod oracle;
pub mod simulate;
pub mod sweep;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use netentropy::{ChannelParams, SimConfig};

use args::{load_config, resolve, Cli, Command, OracleArgs, SimulateArgs, SweepArgs, ValidateArgs};
use simulate::InitArg;
use sweep::{Grid, SweepSpec, SweepVariable, DEFAULT_POINTS};
use validate::{Fault, Level, Options};

const DEFAULT_SIM_STEPS: usize = 100;
const DEFAULT_SIM_TRIALS: usize = 10;
const DEFAULT_BLOCK_STEPS: usize = 8;
const DEFAULT_ORACLE_STEPS: usize = 12;

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::BoundsSweep(a) => bounds_sweep(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
    }
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write(&mut BufWriter::new(file)).with_context(|| format!("writing {}", p.display()))
        }
        None => write(&mut io::stdout().lock()).context("writing to stdout"),
    }
}

fn bounds_sweep(a: SweepArgs) -> Result<ExitCode> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.common, &file, "all", "2,3,4")?;
    let variable: SweepVariable = file.pick_or(
        a.variable.as_deref().map(str::parse).transpose()?,
        "variable",
        SweepVariable::R0,
    )?;
    let values = a
        .values
        .clone()
        .or_else(|| file.raw("values").map(str::to_string));
    let grid = match values {
        Some(v) => Grid::Explicit(args::parse_list(&v)?),
        None => Grid::LogSpaced {
            points: file.pick_or(a.points, "points", DEFAULT_POINTS)?,
            min: file.pick(a.min, "min")?,
            max: file.pick(a.max, "max")?,
        },
    };
    let spec = SweepSpec {
        variable,
        grid,
        base: ChannelParams {
            r0: r.r0,
            eta: r.etas[0],
            nu: r.nu,
            symbol_rate: r.symbol_rate,
        },
        domains: r.domains.clone(),
        etas: r.etas.clone(),
        n: r.nodes,
    };
    let rows = sweep::run_sweep(&spec)?;
    with_output(r.out.as_deref(), |w| sweep::write_csv(&rows, w))?;
    let failed = rows.iter().filter(|row| !row.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} sweep points failed", rows.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(a: SimulateArgs) -> Result<ExitCode> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.common, &file, "square", "2")?;
    let params = ChannelParams::new(r.r0, r.single_eta()?, r.nu, r.symbol_rate)?;
    let steps = file.pick_or(a.steps, "steps", DEFAULT_SIM_STEPS)?;
    let trials = file.pick_or(a.trials, "trials", DEFAULT_SIM_TRIALS)?;
    let init: InitArg = file.pick_or(
        a.init.as_deref().map(str::parse).transpose()?,
        "init",
        InitArg(Default::default()),
    )?;
    let block_steps = file.pick_or(a.block_steps, "block-steps", DEFAULT_BLOCK_STEPS)?;
    let config = SimConfig::new(r.nodes, steps, trials, r.seed, r.single_domain()?, params)?
        .with_init(init.0);
    let dir = r.out.clone().unwrap_or_else(|| "netentropy-sim".into());
    let out = simulate::run_simulate(&config, block_steps, &dir)?;
    eprintln!(
        "wrote {} and {}",
        out.snapshots.display(),
        out.summary.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(a: ValidateArgs) -> Result<ExitCode> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.common, &file, "square", "2")?;
    let level: Level = file.pick_or(
        a.level.as_deref().map(str::parse).transpose()?,
        "level",
        Level::Fast,
    )?;
    let fault: Option<Fault> = a.inject_fault.as_deref().map(str::parse).transpose()?;
    let opts = Options {
        level,
        fault,
        seed: r.seed,
    };
    let mut log = String::new();
    let outcomes = validate::run_checks(&opts, |o| {
        println!("{}", o.line());
        log.push_str(&o.line());
        log.push('\n');
    });
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let total_line = format!(
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    println!("{total_line}");
    if let Some(p) = &r.out {
        std::fs::write(p, format!("{log}{total_line}\n"))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn oracle_cmd(a: OracleArgs) -> Result<ExitCode> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.common, &file, "square", "2")?;
    let params = ChannelParams::new(r.r0, r.single_eta()?, r.nu, r.symbol_rate)?;
    let steps = file.pick_or(a.steps, "steps", DEFAULT_ORACLE_STEPS)?;
    let report = oracle::run_oracle(r.single_domain()?, params, r.nodes, steps)?;
    with_output(r.out.as_deref(), |w| report.write_csv(w))?;
    Ok(ExitCode::SUCCESS)
}
