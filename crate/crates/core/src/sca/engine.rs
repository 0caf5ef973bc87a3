use crate::channel::{ChannelRealization, NUM_ZONES};
use crate::conic::{self, ConicStatus};
use crate::error::{Error, Result};
use crate::params::SystemConfig;
use crate::rates::{self, inner, BeamformerSet, RateMode};

use super::subproblem::{build_subproblem, ObjectiveMode, Subproblem};
use super::surrogate::{build_coeffs, SurrogateCoeffs};
use super::{from_alpha, AlphaSplit, IterationRecord, Solution, Status};

/// Fraction of the power budget used by the starting beams.
const START_POWER_FRACTION: f64 = 0.5;

/// Starting reciprocal time fractions: an even split.
const START_ALPHA: f64 = 2.0;

/// A candidate design: beams and, for fractional time, reciprocal time fractions.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Point {
    pub beams: BeamformerSet,
    pub alpha: Option<AlphaSplit>,
}

/// A point feasible for the QoS-constrained problem.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialPoint {
    pub beams: BeamformerSet,
    pub alpha: AlphaSplit,
    /// Subproblems solved to reach the point.
    pub iterations: usize,
    /// True min-ratio at every visited point.
    pub ratio_trace: Vec<f64>,
    pub records: Vec<IterationRecord>,
}

struct InitRun {
    point: Point,
    trace: Vec<f64>,
    records: Vec<IterationRecord>,
    feasible: bool,
}

struct Step {
    record: IterationRecord,
    candidate: Option<Point>,
}

/// Shared path-following driver for the fractional-time and conventional schemes.
pub(crate) struct Engine<'a> {
    channel: &'a ChannelRealization,
    config: &'a SystemConfig,
    mode: RateMode,
}

impl<'a> Engine<'a> {
    pub fn new(channel: &'a ChannelRealization, config: &'a SystemConfig, mode: RateMode) -> Result<Self> {
        config.validate()?;
        if channel.num_users() == 0 {
            return Err(Error::InvalidInput("no users to serve".into()));
        }
        Ok(Self { channel, config, mode })
    }

    fn t_values(&self, point: &Point) -> [f64; NUM_ZONES] {
        match point.alpha {
            Some(a) => [a.alpha1, a.alpha2],
            None => [1.0, 1.0],
        }
    }

    pub fn true_rates(&self, point: &Point) -> [Vec<f64>; NUM_ZONES] {
        match (self.mode, point.alpha) {
            (RateMode::FractionalTime, Some(a)) => rates::ft_rates(self.channel, &point.beams, from_alpha(a)),
            _ => rates::conventional_rates(self.channel, &point.beams),
        }
    }

    fn coeffs(&self, point: &Point) -> Result<SurrogateCoeffs> {
        build_coeffs(self.channel, &point.beams, self.t_values(point), self.mode)
    }

    /// Minorant values; `-inf` for users outside the trust region.
    fn surrogate_rates(&self, coeffs: &SurrogateCoeffs, point: &Point) -> [Vec<f64>; NUM_ZONES] {
        let t = self.t_values(point);
        let mut out: [Vec<f64>; NUM_ZONES] = Default::default();
        for (i, k) in self.channel.users() {
            let x = inner(self.channel.h(i, k), point.beams.beam(i, k)).re;
            let y = rates::interference_plus_noise(self.channel, &point.beams, i, k, self.mode);
            out[i].push(coeffs.user(i, k).trust_bound(x, y, t[i]).unwrap_or(f64::NEG_INFINITY));
        }
        out
    }

    fn objective_value(objective: &ObjectiveMode, rates: &[Vec<f64>; NUM_ZONES]) -> f64 {
        match objective {
            ObjectiveMode::SumRate => rates.iter().flatten().sum(),
            ObjectiveMode::MinRatio { targets } => rates
                .iter()
                .flatten()
                .zip(targets.iter().flatten())
                .filter(|(_, &t)| t > 0.0)
                .map(|(r, t)| r / t)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Worst violation of the sign condition, the time budget and the power budget
    /// (`(1 - 1/alpha2) ||w1||^2 + ||w2||^2 / alpha2` for fractional time).
    pub fn safety(&self, point: &Point) -> f64 {
        let sigma = self.channel.sigma2().sqrt();
        let mut worst: f64 = 0.0;
        for (i, k) in self.channel.users() {
            let re = inner(self.channel.h(i, k), point.beams.beam(i, k)).re / sigma;
            worst = worst.max(-re);
        }
        let pmax = self.config.pmax_watts();
        let (e1, e2) = (point.beams.zone_energy(0), point.beams.zone_energy(1));
        let used = match point.alpha {
            Some(a) => {
                if !(a.alpha1 > 0.0 && a.alpha2 > 0.0) {
                    return f64::INFINITY;
                }
                worst = worst.max(-a.time_slack());
                (1.0 - 1.0 / a.alpha2) * e1 + e2 / a.alpha2
            }
            None => e1 + e2,
        };
        worst.max((used - pmax) / pmax)
    }

    fn qos_violation(&self, rates: &[Vec<f64>; NUM_ZONES]) -> f64 {
        let qos = self.config.qos_nats();
        rates.iter().flatten().map(|r| (qos - r).max(0.0)).fold(0.0, f64::max)
    }

    /// Matched-filter beams using half the budget; even time split for fractional time.
    pub fn start_point(&self) -> Point {
        let unit = BeamformerSet::matched_filter(self.channel, 1.0);
        let (e1, e2) = (unit.zone_energy(0), unit.zone_energy(1));
        let alpha = match self.mode {
            RateMode::FractionalTime => Some(AlphaSplit {
                alpha1: START_ALPHA,
                alpha2: START_ALPHA,
            }),
            RateMode::Conventional => None,
        };
        let used = match alpha {
            Some(a) => (1.0 - 1.0 / a.alpha2) * e1 + e2 / a.alpha2,
            None => e1 + e2,
        };
        let theta = if used > 0.0 {
            (START_POWER_FRACTION * self.config.pmax_watts() / used).sqrt()
        } else {
            0.0
        };
        Point {
            beams: BeamformerSet::matched_filter(self.channel, theta),
            alpha,
        }
    }

    fn step(&self, point: &Point, objective: &ObjectiveMode) -> Step {
        let objective_at_expansion = Self::objective_value(objective, &self.true_rates(point));
        let failed = |surrogate_at_expansion: f64, status: ConicStatus, iterations: u32| Step {
            record: IterationRecord {
                objective_at_expansion,
                surrogate_at_expansion,
                surrogate_at_candidate: f64::NAN,
                objective_at_candidate: f64::NAN,
                safety_violation: f64::NAN,
                accepted: false,
                conic_status: status,
                conic_iterations: iterations,
            },
            candidate: None,
        };

        let coeffs = match self.coeffs(point) {
            Ok(c) => c,
            Err(_) => return failed(f64::NAN, ConicStatus::NumericalFailure, 0),
        };
        let surrogate_at_expansion =
            Self::objective_value(objective, &self.surrogate_rates(&coeffs, point));
        let sub = match build_subproblem(
            &coeffs,
            self.channel,
            &point.beams,
            point.alpha,
            self.config,
            objective,
        ) {
            Ok(s) => s,
            Err(_) => return failed(surrogate_at_expansion, ConicStatus::NumericalFailure, 0),
        };
        let sol = match conic::solve(&sub.problem, self.config.solver.conic_tol) {
            Ok(s) => s,
            Err(_) => return failed(surrogate_at_expansion, ConicStatus::NumericalFailure, 0),
        };
        if !matches!(sol.status, ConicStatus::Optimal | ConicStatus::AlmostOptimal) {
            return failed(surrogate_at_expansion, sol.status, sol.stats.iterations);
        }

        let (beams, alpha) = sub.extract(&sol.x);
        let candidate = Point { beams, alpha };
        let cand_rates = self.true_rates(&candidate);
        Step {
            record: IterationRecord {
                objective_at_expansion,
                surrogate_at_expansion,
                surrogate_at_candidate: Self::objective_value(
                    objective,
                    &self.surrogate_rates(&coeffs, &candidate),
                ),
                objective_at_candidate: Self::objective_value(objective, &cand_rates),
                safety_violation: self.safety(&candidate),
                accepted: false,
                conic_status: sol.status,
                conic_iterations: sol.stats.iterations,
            },
            candidate: Some(candidate),
        }
    }

    /// Whether a candidate keeps the exact constraints and does not lose ground.
    fn acceptable(&self, step: &Step, objective: &ObjectiveMode, candidate: &Point) -> bool {
        let s = &self.config.solver;
        let rec = &step.record;
        if !(rec.safety_violation <= s.feas_tol) {
            return false;
        }
        if !(rec.objective_at_candidate >= rec.objective_at_expansion - s.ascent_tol) {
            return false;
        }
        match objective {
            ObjectiveMode::SumRate => self.qos_violation(&self.true_rates(candidate)) <= s.feas_tol,
            ObjectiveMode::MinRatio { .. } => true,
        }
    }

    /// Iterates min-ratio subproblems until every QoS target is met.
    fn initialize(&self) -> InitRun {
        let s = &self.config.solver;
        let mut point = self.start_point();
        let qos = self.config.qos_nats();
        if qos <= 0.0 {
            return InitRun {
                point,
                trace: Vec::new(),
                records: Vec::new(),
                feasible: true,
            };
        }
        let objective = ObjectiveMode::min_ratio_uniform(self.channel, qos);
        let mut trace = Vec::new();
        let mut records = Vec::new();
        for it in 0..=s.init_max_iters {
            let ratio = Self::objective_value(&objective, &self.true_rates(&point));
            trace.push(ratio);
            if ratio >= 1.0 && self.safety(&point) <= s.feas_tol {
                return InitRun {
                    point,
                    trace,
                    records,
                    feasible: true,
                };
            }
            let stalled = trace.len() > s.init_stall_window && {
                let old = trace[trace.len() - 1 - s.init_stall_window];
                ratio - old <= s.init_stall_tol * old.abs().max(1e-12)
            };
            if it == s.init_max_iters || stalled {
                break;
            }
            let mut step = self.step(&point, &objective);
            let ok = match &step.candidate {
                Some(c) => self.acceptable(&step, &objective, c),
                None => false,
            };
            step.record.accepted = ok;
            records.push(step.record);
            match (ok, step.candidate) {
                (true, Some(c)) => point = c,
                _ => break,
            }
        }
        InitRun {
            point,
            trace,
            records,
            feasible: false,
        }
    }

    /// Runs subproblems from `start` until the objective stalls.
    fn path_follow(&self, start: Point, objective: &ObjectiveMode, init: InitRun) -> Solution {
        let s = &self.config.solver;
        let mut point = start;
        let mut phi = Self::objective_value(objective, &self.true_rates(&point));
        let mut trace = vec![phi];
        let mut records = Vec::new();
        let mut status = Status::MaxIters;
        for _ in 0..s.max_iters {
            let mut step = self.step(&point, objective);
            let ok = match &step.candidate {
                Some(c) => self.acceptable(&step, objective, c),
                None => false,
            };
            step.record.accepted = ok;
            let phi_new = step.record.objective_at_candidate;
            records.push(step.record);
            let candidate = match (ok, step.candidate) {
                (true, Some(c)) => c,
                _ => {
                    status = Status::SubproblemFailure;
                    break;
                }
            };
            point = candidate;
            trace.push(phi_new);
            let done = (phi_new - phi).abs() <= s.conv_tol * phi.abs().max(1.0);
            phi = phi_new;
            if done {
                status = Status::Converged;
                break;
            }
        }
        self.finish(point, objective, trace, records, init, status)
    }

    fn finish(
        &self,
        point: Point,
        objective: &ObjectiveMode,
        trace: Vec<f64>,
        records: Vec<IterationRecord>,
        init: InitRun,
        status: Status,
    ) -> Solution {
        let rates_nats = self.true_rates(&point);
        let to_bits = |z: &Vec<f64>| z.iter().map(|r| r / std::f64::consts::LN_2).collect();
        let rates_bits = [to_bits(&rates_nats[0]), to_bits(&rates_nats[1])];
        let sum_throughput = rates_nats.iter().flatten().sum();
        let min_throughput = rates_nats.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let objective = Self::objective_value(objective, &rates_nats);
        Solution {
            time_split: point.alpha.map(from_alpha),
            alpha: point.alpha,
            beamformers: point.beams,
            rates_nats,
            rates_bits,
            sum_throughput,
            min_throughput,
            objective,
            iterations: records.len(),
            trace,
            records,
            init_trace: init.trace,
            init_records: init.records,
            status,
        }
    }

    /// Feasibility phase followed by sum-throughput maximization.
    pub fn solve_sum_rate(&self) -> Solution {
        let init = self.initialize();
        if !init.feasible {
            let point = init.point.clone();
            return self.finish(point, &ObjectiveMode::SumRate, Vec::new(), Vec::new(), init, Status::InfeasibleInit);
        }
        let start = init.point.clone();
        self.path_follow(start, &ObjectiveMode::SumRate, init)
    }

    /// Worst-user throughput maximization without QoS constraints.
    pub fn solve_max_min(&self) -> Solution {
        let objective = ObjectiveMode::min_ratio_uniform(self.channel, 1.0);
        let start = self.start_point();
        let init = InitRun {
            point: start.clone(),
            trace: Vec::new(),
            records: Vec::new(),
            feasible: true,
        };
        self.path_follow(start, &objective, init)
    }
}

/// Maximizes the fractional-time sum throughput subject to the QoS targets.
pub fn sca_solve(channel: &ChannelRealization, config: &SystemConfig) -> Result<Solution> {
    Ok(Engine::new(channel, config, RateMode::FractionalTime)?.solve_sum_rate())
}

/// Maximizes the smallest fractional-time throughput; the QoS target is ignored.
pub fn maxmin_solve(channel: &ChannelRealization, config: &SystemConfig) -> Result<Solution> {
    Ok(Engine::new(channel, config, RateMode::FractionalTime)?.solve_max_min())
}

/// Finds beams and time fractions meeting every QoS target.
pub fn find_initial_point(channel: &ChannelRealization, config: &SystemConfig) -> Result<InitialPoint> {
    let engine = Engine::new(channel, config, RateMode::FractionalTime)?;
    let run = engine.initialize();
    let iterations = run.records.len();
    if !run.feasible {
        let best = run.trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::InfeasibleInit {
            iterations,
            best_ratio: best,
        });
    }
    Ok(InitialPoint {
        beams: run.point.beams,
        alpha: run.point.alpha.expect("fractional-time point"),
        iterations,
        ratio_trace: run.trace,
        records: run.records,
    })
}

/// The first sum-throughput subproblem, expanded at the feasibility phase's output.
///
/// Useful for handing one iteration to an external conic solver.
pub fn first_subproblem(channel: &ChannelRealization, config: &SystemConfig, mode: RateMode) -> Result<Subproblem> {
    let engine = Engine::new(channel, config, mode)?;
    let run = engine.initialize();
    if !run.feasible {
        return Err(Error::InfeasibleInit {
            iterations: run.records.len(),
            best_ratio: run.trace.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let coeffs = engine.coeffs(&run.point)?;
    build_subproblem(&coeffs, channel, &run.point.beams, run.point.alpha, config, &ObjectiveMode::SumRate)
}
