use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ftbeam::baselines::{scheme_registry, Scheme};
use ftbeam::conic::write_cbf;
use ftbeam::experiment::{
    child_seed, run_experiment, summarize, write_records, write_summary_csv, ExperimentConfig, OutputFormat,
};
use ftbeam::rates::RateMode;
use ftbeam::sca::{first_subproblem, Solution};
use ftbeam::{sample_scenario, SystemConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ftbeam", version, about = "Fractional-time beamforming for two-zone MISO downlinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment described by a config file.
    Run(RunArgs),
    /// Solve one channel realization and print the solution as JSON.
    Solve(SolveArgs),
    /// Max-min fractional-time design for one realization.
    Maxmin(SingleArgs),
    /// Solve one realization with a baseline scheme (default: conventional-dl).
    Baseline(SolveArgs),
    /// Write the first sum-throughput subproblem for an external solver.
    DumpSubproblem(DumpArgs),
    /// List every scheme and whether it is implemented.
    Schemes,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (flat TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Record file; standard output when absent and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Replaces the config's scheme list; repeat for several.
    #[arg(long)]
    scheme: Vec<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the per-point summary as CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SingleArgs {
    /// Config file; only the system and solver keys are used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario seed, as printed in the `seed` column of `run` output.
    /// Defaults to the seed of draw 0 under `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pmax_dbm: Option<f64>,
    #[arg(long)]
    rbar_bits: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: SingleArgs,
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    common: SingleArgs,
    /// `ft` or `conventional-dl`.
    #[arg(long, default_value = "ft")]
    scheme: String,
    #[arg(long, value_enum, default_value_t = DumpFormat::Cbf)]
    format: DumpFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    /// Conic Benchmark Format, version 3.
    Cbf,
    Json,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(ExperimentConfig::from_path(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn implemented(name: &str) -> Result<Scheme> {
    let scheme = Scheme::parse(name)?;
    scheme.ensure_implemented()?;
    Ok(scheme)
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load(Some(&args.config))?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    if let Some(f) = args.format {
        cfg.output_format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::Jsonl,
        };
    }
    if !args.scheme.is_empty() {
        cfg.schemes = args.scheme;
    }
    for name in &cfg.schemes {
        implemented(name)?;
    }
    cfg.validate()?;

    let result = run_experiment(&cfg)?;
    let out_path = args.out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
    let mut out = output(out_path.as_deref())?;
    write_records(&result.records, cfg.output_format, &mut out)?;
    out.flush()?;

    if let Some(path) = args.summary {
        write_summary_csv(&result.summary, output(Some(&path))?)?;
    }
    let summary = summarize(&result.records)?;
    let mut err = io::stderr().lock();
    for row in &summary {
        writeln!(
            err,
            "{:<16} pmax {:>5.1} dBm  rbar {:>4.2}  feasible {:>3}/{:<3}  mean ST {}",
            row.scheme,
            row.pmax_dbm,
            row.rbar_bits,
            row.converged,
            row.runs,
            row.mean_sum_throughput_bits
                .map_or_else(|| "-".to_string(), |v| format!("{v:.3} bits/s/Hz")),
        )?;
    }
    Ok(())
}

/// System config for a single solve plus the scenario seed.
fn single_setup(args: &SingleArgs) -> Result<(SystemConfig, u64)> {
    let cfg = load(args.config.as_deref())?;
    let mut system = cfg.system();
    if let Some(p) = args.pmax_dbm {
        system.pmax_dbm = p;
    }
    if let Some(r) = args.rbar_bits {
        system.rbar_bits = r;
    }
    system.validate()?;
    let seed = args.seed.unwrap_or_else(|| child_seed(cfg.base_seed, 0));
    Ok((system, seed))
}

fn report(scheme: Scheme, seed: u64, sol: &Solution) -> serde_json::Value {
    json!({
        "scheme": scheme.name(),
        "seed": seed,
        "status": sol.status.as_str(),
        "sum_throughput_bits": sol.sum_throughput_bits(),
        "min_throughput_bits": sol.min_throughput_bits(),
        "tau": sol.time_split.map(|t| [t.tau1, t.tau2]),
        "iterations": sol.iterations,
        "init_iterations": sol.init_records.len(),
        "rates_bits": sol.rates_bits,
        "solution": sol,
    })
}

fn solve_one(args: &SingleArgs, scheme: Scheme) -> Result<()> {
    let (system, seed) = single_setup(args)?;
    let channel = sample_scenario(seed, &system)?;
    let sol = scheme.solve(&channel, &system)?;
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report(scheme, seed, &sol))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn baseline(args: SolveArgs) -> Result<()> {
    let name = args.scheme.as_deref().unwrap_or("conventional-dl");
    let scheme = Scheme::parse(name)?;
    if matches!(scheme, Scheme::FractionalTime | Scheme::MaxMinFractionalTime) {
        bail!("`{name}` is the proposed scheme, not a baseline; use `solve` or `maxmin`");
    }
    scheme.ensure_implemented()?;
    solve_one(&args.common, scheme)
}

fn dump(args: DumpArgs) -> Result<()> {
    let mode = match implemented(&args.scheme)? {
        Scheme::FractionalTime => RateMode::FractionalTime,
        Scheme::ConventionalDl => RateMode::Conventional,
        other => bail!("no sum-throughput subproblem for `{}`", other.name()),
    };
    let (system, seed) = single_setup(&args.common)?;
    let channel = sample_scenario(seed, &system)?;
    let sub = first_subproblem(&channel, &system, mode)?;
    let mut out = output(args.common.out.as_deref())?;
    match args.format {
        DumpFormat::Cbf => write_cbf(&sub.problem, &mut out)?,
        DumpFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &sub)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn list_schemes() -> Result<()> {
    let mut out = io::stdout().lock();
    for d in scheme_registry() {
        let state = if d.implemented { "implemented" } else { "unsupported" };
        writeln!(out, "{:<16} {:<12} {}", d.name, state, d.description)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::Solve(a) => {
            let scheme = implemented(a.scheme.as_deref().unwrap_or("ft"))?;
            solve_one(&a.common, scheme)
        }
        Command::Maxmin(a) => solve_one(&a, Scheme::MaxMinFractionalTime),
        Command::Baseline(a) => baseline(a),
        Command::DumpSubproblem(a) => dump(a),
        Command::Schemes => list_schemes(),
    }
}
