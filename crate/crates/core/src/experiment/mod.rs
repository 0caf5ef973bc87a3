//! Reproducible Monte Carlo experiments over the implemented schemes.

mod config;
mod summary;

pub use config::{ExperimentConfig, OutputFormat, SweepAxis};
pub use summary::{summarize, write_summary_csv, SummaryRow};

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::Scheme;
use crate::channel::sample_scenario;
use crate::error::{Error, Result};
use crate::sca::Status;

/// Outcome of one run as written to disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    MaxIters,
    InfeasibleInit,
    SubproblemFailure,
    UnsupportedScheme,
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => RunStatus::Converged,
            Status::MaxIters => RunStatus::MaxIters,
            Status::InfeasibleInit => RunStatus::InfeasibleInit,
            Status::SubproblemFailure => RunStatus::SubproblemFailure,
        }
    }
}

/// One row of experiment output. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub seed: u64,
    pub scheme: String,
    pub pmax_dbm: f64,
    pub rbar_bits: f64,
    /// Empty when the run has no feasible point.
    pub sum_throughput_bits: Option<f64>,
    pub min_throughput_bits: Option<f64>,
    /// Empty for schemes without time sharing.
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub iterations: usize,
    pub status: RunStatus,
    /// Zero unless wall-time recording is enabled.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    /// Largest violation of the original constraints by any subproblem
    /// solution of any run, accepted or not.
    pub worst_safety_violation: f64,
}

/// Seed of Monte Carlo draw `index` (SplitMix64 over the pair).
///
/// Every scheme and sweep point uses the same draw for a given index, so
/// comparisons between them are paired.
pub fn child_seed(base_seed: u64, index: u64) -> u64 {
    let mut z = base_seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Job {
    run_id: u64,
    mc_index: u64,
    scheme: Scheme,
    pmax_dbm: f64,
    rbar_bits: f64,
}

fn run_job(cfg: &ExperimentConfig, job: &Job) -> Result<(RunRecord, f64)> {
    let seed = child_seed(cfg.base_seed, job.mc_index);
    let mut record = RunRecord {
        run_id: job.run_id,
        seed,
        scheme: job.scheme.name().to_string(),
        pmax_dbm: job.pmax_dbm,
        rbar_bits: job.rbar_bits,
        sum_throughput_bits: None,
        min_throughput_bits: None,
        tau1: None,
        tau2: None,
        iterations: 0,
        status: RunStatus::UnsupportedScheme,
        wall_time_ms: 0.0,
    };
    if job.scheme.ensure_implemented().is_err() {
        return Ok((record, 0.0));
    }
    let mut system = cfg.system();
    system.pmax_dbm = job.pmax_dbm;
    system.rbar_bits = job.rbar_bits;

    let start = Instant::now();
    let channel = sample_scenario(seed, &system)?;
    let solution = job.scheme.solve(&channel, &system)?;
    if cfg.record_wall_time {
        record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    record.status = solution.status.into();
    record.iterations = solution.iterations;
    if solution.status != Status::InfeasibleInit {
        record.sum_throughput_bits = Some(solution.sum_throughput_bits());
        record.min_throughput_bits = Some(solution.min_throughput_bits());
        if let Some(t) = solution.time_split {
            record.tau1 = Some(t.tau1);
            record.tau2 = Some(t.tau2);
        }
    }
    let safety = solution
        .all_records()
        .map(|r| r.safety_violation)
        .fold(0.0, f64::max);
    Ok((record, safety))
}

/// Runs every (sweep point, scheme, draw) combination and summarizes.
///
/// Records come back sorted by `run_id`; the output does not depend on the
/// number of threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let schemes = cfg
        .schemes
        .iter()
        .map(|s| Scheme::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for (pmax_dbm, rbar_bits) in cfg.sweep_points() {
        for &scheme in &schemes {
            for mc in 0..cfg.mc_runs as u64 {
                jobs.push(Job {
                    run_id: jobs.len() as u64,
                    mc_index: mc,
                    scheme,
                    pmax_dbm,
                    rbar_bits,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results = pool.install(|| {
        jobs.par_iter()
            .map(|job| run_job(cfg, job))
            .collect::<Result<Vec<_>>>()
    })?;
    let worst_safety_violation = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut records: Vec<RunRecord> = results.into_iter().map(|r| r.0).collect();
    records.sort_by_key(|r| r.run_id);
    let summary = summarize(&records)?;
    Ok(ExperimentOutput {
        records,
        summary,
        worst_safety_violation,
    })
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_jsonl<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_records<W: Write>(records: &[RunRecord], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_records_csv(records, out),
        OutputFormat::Jsonl => write_records_jsonl(records, out),
    }
}
