use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dyadic_core::haar::analyze;
use dyadic_core::io::{
    read_expansion, read_step_function, read_symbol, read_weight, read_weight_vector,
    step_function_to_csv, write_step_function,
};
use dyadic_core::weights::{
    a1_characteristic, ainf_estimate, ap_characteristic, default_ainf_grid,
    multilinear_ap_characteristic,
};
use dyadic_core::{bmo, operators, Extremum, MultiIndex, StepFunction, SymbolSequence};
use dyadic_harness::run::write_witness;
use dyadic_harness::{estimate_ratio_supremum, run_experiment, Check, ExperimentConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dyadic", version, about = "Dyadic paraproducts, maximal operators and weights on finite windows")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Haar analysis and synthesis of CSV step functions.
    #[command(subcommand)]
    Haar(HaarCommand),
    /// Apply an operator to CSV inputs; writes the result as CSV.
    Apply(ApplyArgs),
    /// Weight characteristics and BMO norms.
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Run an experiment config; exit 1 if a hard check fails.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use a deliberately broken operator (negative control).
        #[arg(long)]
        corrupt: bool,
    },
    /// Search for large ratios of one envelope check; writes the best inputs.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_check)]
        check: Check,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HaarCommand {
    /// All in-window Haar coefficients and the two half-window averages.
    Coeffs { input: PathBuf },
    /// Rebuild a function from a coefficient JSON file written by `coeffs --json`.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    #[value(name = "P")]
    Paraproduct,
    #[value(name = "pi")]
    Pi,
    #[value(name = "T")]
    Multiplier,
    #[value(name = "comm")]
    Commutator,
}

#[derive(clap::Args)]
struct ApplyArgs {
    #[arg(long, value_enum)]
    op: Op,
    /// 0/1 string such as 01.
    #[arg(long)]
    alpha: String,
    /// Comma-separated CSV files, one per slot.
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    /// Symbol JSON; defaults to all ones.
    #[arg(long)]
    eps: Option<PathBuf>,
    /// Commutator slot, 1-based.
    #[arg(long, default_value_t = 1)]
    slot: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WeightsCommand {
    Ap {
        #[arg(long)]
        p: f64,
        input: PathBuf,
    },
    A1 { input: PathBuf },
    /// Upper bound for the A_infinity characteristic from a grid of p.
    Ainf {
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        input: PathBuf,
    },
    /// Multilinear characteristic of a weight-vector JSON file.
    MultiAp { input: PathBuf },
    /// Mean-oscillation BMO norm, or BMO_r with --r.
    Bmo {
        #[arg(long)]
        r: Option<f64>,
        input: PathBuf,
    },
    /// BMO_2 norm from Haar coefficients.
    Bmo2 { input: PathBuf },
}

fn parse_check(s: &str) -> std::result::Result<Check, String> {
    Check::ALL
        .iter()
        .copied()
        .find(|c| c.name() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
            format!("unknown check {s:?}; one of {}", names.join(", "))
        })
}

fn read_function(path: &Path) -> Result<StepFunction> {
    read_step_function(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(json: bool, value: serde_json::Value, human: String) -> Result<()> {
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        write!(out, "{human}")?;
    }
    Ok(())
}

fn extremum_json(e: &Extremum) -> serde_json::Value {
    json!({
        "value": e.value,
        "interval": {"k": e.interval.scale, "m": e.interval.offset},
        "left": e.interval.left(),
        "right": e.interval.right(),
    })
}

fn emit_extremum(json: bool, e: &Extremum) -> Result<()> {
    emit(json, extremum_json(e), format!("{}\t{}\n", e.value, e.interval))
}

fn haar(json: bool, cmd: HaarCommand) -> Result<()> {
    match cmd {
        HaarCommand::Coeffs { input } => {
            let expansion = analyze(&read_function(&input)?);
            let mut human = format!(
                "average [-2^K, 0) {}\naverage [0, 2^K) {}\nk,m,value\n",
                expansion.averages.0, expansion.averages.1
            );
            for (i, c) in &expansion.coefficients {
                human.push_str(&format!("{},{},{}\n", i.scale, i.offset, c));
            }
            emit(json, serde_json::to_value(&expansion)?, human)
        }
        HaarCommand::Reconstruct { input, out } => {
            let expansion =
                read_expansion(&input).with_context(|| format!("reading {}", input.display()))?;
            let f = expansion.reconstruct()?;
            write_function(json, &f, out.as_deref())
        }
    }
}

fn write_function(json: bool, f: &StepFunction, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(write_step_function(f, path)?),
        None => emit(
            json,
            json!({"window": f.window(), "cells": f.cells()}),
            step_function_to_csv(f),
        ),
    }
}

fn apply(json: bool, args: ApplyArgs) -> Result<()> {
    let alpha: MultiIndex = args.alpha.parse()?;
    if alpha.arity() != args.inputs.len() {
        bail!(
            "alpha has {} entries but {} inputs were given",
            alpha.arity(),
            args.inputs.len()
        );
    }
    if matches!(args.op, Op::Paraproduct | Op::Multiplier | Op::Commutator) && !alpha.in_u_m() {
        bail!("alpha = {alpha} is all ones; this operator needs alpha in U_m");
    }
    let b = match (&args.b, args.op) {
        (Some(path), _) => Some(read_function(path)?),
        (None, Op::Pi | Op::Commutator) => bail!("--op {} needs --b", op_name(args.op)),
        (None, _) => None,
    };
    let fs = args
        .inputs
        .iter()
        .map(|p| read_function(p))
        .collect::<Result<Vec<_>>>()?;
    let symbol = match &args.eps {
        Some(path) => read_symbol(path).with_context(|| format!("reading {}", path.display()))?,
        None => SymbolSequence::constant(1.0),
    };
    let out = match args.op {
        Op::Paraproduct => operators::paraproduct(&alpha, &fs)?,
        Op::Pi => operators::pi_b(b.as_ref().expect("checked"), &alpha, &fs)?,
        Op::Multiplier => operators::haar_multiplier(&symbol, &alpha, &fs)?,
        Op::Commutator => {
            operators::commutator(b.as_ref().expect("checked"), &symbol, &alpha, args.slot, &fs)?
        }
    };
    write_function(json, &out, args.out.as_deref())
}

fn op_name(op: Op) -> &'static str {
    match op {
        Op::Paraproduct => "P",
        Op::Pi => "pi",
        Op::Multiplier => "T",
        Op::Commutator => "comm",
    }
}

fn weights(json: bool, cmd: WeightsCommand) -> Result<()> {
    let weight = |p: &Path| read_weight(p).with_context(|| format!("reading {}", p.display()));
    match cmd {
        WeightsCommand::Ap { p, input } => emit_extremum(json, &ap_characteristic(&weight(&input)?, p)?),
        WeightsCommand::A1 { input } => emit_extremum(json, &a1_characteristic(&weight(&input)?)),
        WeightsCommand::Ainf { grid, input } => {
            let grid = grid.unwrap_or_else(default_ainf_grid);
            let e = ainf_estimate(&weight(&input)?, &grid)?;
            let mut value = extremum_json(&e.extremum);
            value["p"] = json!(e.p);
            emit(json, value, format!("{}\t{}\tp={}\n", e.value, e.extremum.interval, e.p))
        }
        WeightsCommand::MultiAp { input } => {
            let wv = read_weight_vector(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            emit_extremum(json, &multilinear_ap_characteristic(&wv)?)
        }
        WeightsCommand::Bmo { r, input } => {
            let b = read_function(&input)?;
            let e = match r {
                Some(r) => bmo::bmo_r_norm(&b, r)?,
                None => bmo::bmo_norm(&b),
            };
            emit_extremum(json, &e)
        }
        WeightsCommand::Bmo2 { input } => emit_extremum(json, &bmo::bmo2_haar(&read_function(&input)?)),
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("config {}", path.display()))
}

/// Returns whether every hard check passed.
fn verify(json: bool, config: &Path, out: Option<&Path>, corrupt: bool) -> Result<bool> {
    let cfg = load_config(config)?;
    let report = run_experiment(&cfg, out, corrupt)?;
    let mut human = String::new();
    for c in &report.checks {
        let kind = if c.hard { "hard" } else { "envelope" };
        human.push_str(&format!(
            "{} {:<18} {:<8} trials={} max_ratio={} failures={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.check.name(),
            kind,
            c.trials,
            c.max_ratio,
            c.failures
        ));
        if let Some(change) = c.max_relative_change {
            human.push_str(&format!(" resolution_change={change}"));
        }
        human.push('\n');
    }
    human.push_str(if report.pass { "all hard checks passed\n" } else { "hard check failure\n" });
    emit(json, serde_json::to_value(&report)?, human)?;
    Ok(report.pass)
}

fn search(json: bool, config: &Path, check: Check, out: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let result = estimate_ratio_supremum(&cfg, check)?;
    let paths = match out {
        Some(dir) => write_witness(dir, &cfg, check, result.trial, &result.witness, result.ratio, false)?,
        None => Vec::new(),
    };
    emit(
        json,
        json!({
            "check": check,
            "ratio": result.ratio,
            "start_trial": result.trial,
            "steps": result.history.len(),
            "witness_paths": paths,
        }),
        format!("{}\tstart trial {}\t{} steps\n", result.ratio, result.trial, result.history.len()),
    )
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool")?;
    }
    let json = cli.json;
    match cli.command {
        Command::Haar(cmd) => haar(json, cmd)?,
        Command::Apply(args) => apply(json, args)?,
        Command::Weights(cmd) => weights(json, cmd)?,
        Command::Verify {
            config,
            out,
            corrupt,
        } => return verify(json, &config, out.as_deref(), corrupt),
        Command::Search { config, check, out } => search(json, &config, check, out.as_deref())?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

