//! Path-following (successive convex approximation) solvers.

mod alpha;
mod engine;
mod subproblem;
mod surrogate;

pub use alpha::{from_alpha, to_alpha, AlphaSplit};
pub use engine::{find_initial_point, first_subproblem, maxmin_solve, sca_solve, InitialPoint};
pub(crate) use engine::Engine;
pub use subproblem::{build_subproblem, embed_point, Layout, ObjectiveMode, Subproblem, CORE_LABELS};
pub use surrogate::{
    conventional_coeffs, eval_surrogate, surrogate_coeffs, SurrogateCoeffs, UserCoeffs, MIN_SINR,
};

use serde::{Deserialize, Serialize};

use crate::channel::NUM_ZONES;
use crate::conic::ConicStatus;
use crate::rates::{BeamformerSet, TimeSplit};

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIters,
    InfeasibleInit,
    SubproblemFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
            Status::InfeasibleInit => "infeasible-init",
            Status::SubproblemFailure => "subproblem-failure",
        }
    }

    /// The returned point satisfies every constraint of the problem.
    pub fn is_feasible(&self) -> bool {
        matches!(self, Status::Converged | Status::MaxIters)
    }
}

/// Diagnostics of one convex subproblem solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// True objective at the expansion point.
    pub objective_at_expansion: f64,
    /// Minorant objective at the expansion point; equals the above when tight.
    pub surrogate_at_expansion: f64,
    /// Minorant objective at the subproblem optimum.
    pub surrogate_at_candidate: f64,
    /// True objective at the subproblem optimum.
    pub objective_at_candidate: f64,
    /// Worst violation of the exact sign, time and power constraints at the optimum.
    pub safety_violation: f64,
    pub accepted: bool,
    pub conic_status: ConicStatus,
    pub conic_iterations: u32,
}

/// Result of an optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub beamformers: BeamformerSet,
    /// Absent for conventional (concurrent) service.
    pub time_split: Option<TimeSplit>,
    pub alpha: Option<AlphaSplit>,
    pub rates_nats: [Vec<f64>; NUM_ZONES],
    pub rates_bits: [Vec<f64>; NUM_ZONES],
    pub sum_throughput: f64,
    pub min_throughput: f64,
    /// Value of the maximized objective, nats/s/Hz.
    pub objective: f64,
    /// Objective at the initial point followed by every accepted iterate.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub records: Vec<IterationRecord>,
    /// Min-ratio value at each point visited by the feasibility phase.
    pub init_trace: Vec<f64>,
    pub init_records: Vec<IterationRecord>,
    pub status: Status,
}

impl Solution {
    pub fn sum_throughput_bits(&self) -> f64 {
        self.sum_throughput / std::f64::consts::LN_2
    }

    pub fn min_throughput_bits(&self) -> f64 {
        self.min_throughput / std::f64::consts::LN_2
    }

    /// Every subproblem record of the run, feasibility phase first.
    pub fn all_records(&self) -> impl Iterator<Item = &IterationRecord> {
        self.init_records.iter().chain(&self.records)
    }
}
