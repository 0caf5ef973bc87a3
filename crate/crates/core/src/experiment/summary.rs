use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{RunRecord, RunStatus};
use crate::error::{Error, Result};

/// Aggregates of one `(scheme, pmax_dbm, rbar_bits)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scheme: String,
    pub pmax_dbm: f64,
    pub rbar_bits: f64,
    pub runs: usize,
    pub converged: usize,
    /// `converged / runs`.
    pub feasibility_rate: f64,
    /// Means over runs that produced a feasible point.
    pub mean_sum_throughput_bits: Option<f64>,
    pub mean_min_throughput_bits: Option<f64>,
    pub median_iterations: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Groups records by scheme and sweep point, ordered by scheme name then
/// power then QoS target.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    // f64 keys are ordered through their total-order bit pattern
    let key = |r: &RunRecord| {
        (
            r.scheme.clone(),
            ordered(r.pmax_dbm),
            ordered(r.rbar_bits),
        )
    };
    let mut groups: BTreeMap<_, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    Ok(groups
        .into_values()
        .map(|group| {
            let first = group[0];
            let converged = group.iter().filter(|r| r.status == RunStatus::Converged).count();
            let sums: Vec<f64> = group.iter().filter_map(|r| r.sum_throughput_bits).collect();
            let mins: Vec<f64> = group.iter().filter_map(|r| r.min_throughput_bits).collect();
            let mut iters: Vec<f64> = group
                .iter()
                .filter(|r| r.sum_throughput_bits.is_some())
                .map(|r| r.iterations as f64)
                .collect();
            SummaryRow {
                scheme: first.scheme.clone(),
                pmax_dbm: first.pmax_dbm,
                rbar_bits: first.rbar_bits,
                runs: group.len(),
                converged,
                feasibility_rate: converged as f64 / group.len() as f64,
                mean_sum_throughput_bits: mean(&sums),
                mean_min_throughput_bits: mean(&mins),
                median_iterations: median(&mut iters),
            }
        })
        .collect())
}

fn ordered(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    bits ^ (((bits >> 63) as u64) >> 1) as i64
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
