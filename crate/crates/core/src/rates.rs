//! Exact throughput, SINR and constraint evaluation for a candidate design.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, NUM_ZONES};
use crate::error::{Error, Result};
use crate::params::SystemConfig;

/// Transmit beamformers, grouped by zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerSet {
    pub zones: [Vec<Vec<Complex64>>; NUM_ZONES],
}

impl BeamformerSet {
    pub fn zeros(channel: &ChannelRealization) -> Self {
        let nt = channel.num_antennas();
        let [k0, k1] = channel.zone_sizes();
        Self {
            zones: [
                vec![vec![Complex64::new(0.0, 0.0); nt]; k0],
                vec![vec![Complex64::new(0.0, 0.0); nt]; k1],
            ],
        }
    }

    /// Matched-filter beams `scale * h / ||h||`, so every `h^H w` is real and positive.
    pub fn matched_filter(channel: &ChannelRealization, scale: f64) -> Self {
        let mut w = Self::zeros(channel);
        for (i, k) in channel.users() {
            let h = channel.h(i, k);
            let norm = norm_sqr(h).sqrt();
            if norm > 0.0 {
                w.zones[i][k] = h.iter().map(|c| c * (scale / norm)).collect();
            }
        }
        w
    }

    pub fn beam(&self, zone: usize, user: usize) -> &[Complex64] {
        &self.zones[zone][user]
    }

    /// `||w_i||^2` summed over the beams of one zone.
    pub fn zone_energy(&self, zone: usize) -> f64 {
        self.zones[zone].iter().map(|w| norm_sqr(w)).sum()
    }

    pub fn check_shape(&self, channel: &ChannelRealization) -> Result<()> {
        for zone in 0..NUM_ZONES {
            if self.zones[zone].len() != channel.zone(zone).len() {
                return Err(Error::Dimension(format!(
                    "zone {zone} has {} beams for {} users",
                    self.zones[zone].len(),
                    channel.zone(zone).len()
                )));
            }
            for w in &self.zones[zone] {
                if w.len() != channel.num_antennas() {
                    return Err(Error::Dimension(format!(
                        "beam length {} but {} antennas",
                        w.len(),
                        channel.num_antennas()
                    )));
                }
                if w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::InvalidInput("beam has non-finite entries".into()));
                }
            }
        }
        Ok(())
    }
}

/// Fractions of the time unit given to the near and far zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSplit {
    pub tau1: f64,
    pub tau2: f64,
}

impl TimeSplit {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if !(tau1 >= 0.0 && tau2 >= 0.0 && tau1 + tau2 <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "time split ({tau1}, {tau2}) must be non-negative and sum to at most 1"
            )));
        }
        Ok(Self { tau1, tau2 })
    }

    pub fn get(&self, zone: usize) -> f64 {
        match zone {
            0 => self.tau1,
            _ => self.tau2,
        }
    }
}

/// Which users interfere with a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMode {
    /// Zones are served in separate time fractions; only same-zone beams interfere.
    FractionalTime,
    /// All users are served concurrently; every other beam interferes.
    Conventional,
}

/// `h^H w`.
pub fn inner(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(h, w)| h.conj() * w).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Interference-plus-noise power seen by user `(zone, user)`.
pub fn interference_plus_noise(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    zone: usize,
    user: usize,
    mode: RateMode,
) -> f64 {
    let h = channel.h(zone, user);
    let mut total = channel.sigma2();
    for (j, zone_beams) in beams.zones.iter().enumerate() {
        if mode == RateMode::FractionalTime && j != zone {
            continue;
        }
        for (l, w) in zone_beams.iter().enumerate() {
            if j == zone && l == user {
                continue;
            }
            total += inner(h, w).norm_sqr();
        }
    }
    total
}

/// SINR with the real-part numerator `(Re{h^H w})^2`.
pub fn sinr(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    zone: usize,
    user: usize,
    mode: RateMode,
) -> f64 {
    let gain = inner(channel.h(zone, user), beams.beam(zone, user)).re;
    gain * gain / interference_plus_noise(channel, beams, zone, user, mode)
}

/// Throughput of a user served during a fraction `tau` of the time unit, in nats/s/Hz.
pub fn ft_rate(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    tau: f64,
    zone: usize,
    user: usize,
) -> f64 {
    if tau == 0.0 {
        return 0.0;
    }
    tau * sinr(channel, beams, zone, user, RateMode::FractionalTime).ln_1p()
}

/// Throughput of a user when all users share the full time unit.
pub fn conventional_rate(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    zone: usize,
    user: usize,
) -> f64 {
    sinr(channel, beams, zone, user, RateMode::Conventional).ln_1p()
}

/// Per-user fractional-time throughputs, zone-major.
pub fn ft_rates(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    tau: TimeSplit,
) -> [Vec<f64>; NUM_ZONES] {
    let per_zone = |i: usize| {
        (0..channel.zone(i).len())
            .map(|k| ft_rate(channel, beams, tau.get(i), i, k))
            .collect()
    };
    [per_zone(0), per_zone(1)]
}

pub fn conventional_rates(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
) -> [Vec<f64>; NUM_ZONES] {
    let per_zone = |i: usize| {
        (0..channel.zone(i).len())
            .map(|k| conventional_rate(channel, beams, i, k))
            .collect()
    };
    [per_zone(0), per_zone(1)]
}

/// System sum throughput under fractional time, in nats/s/Hz.
pub fn sum_throughput(channel: &ChannelRealization, beams: &BeamformerSet, tau: TimeSplit) -> f64 {
    channel
        .users()
        .map(|(i, k)| ft_rate(channel, beams, tau.get(i), i, k))
        .sum()
}

pub fn conventional_sum_throughput(channel: &ChannelRealization, beams: &BeamformerSet) -> f64 {
    channel
        .users()
        .map(|(i, k)| conventional_rate(channel, beams, i, k))
        .sum()
}

/// Signed constraint residuals; every entry must be non-negative for a feasible point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `Re{h^H w} / sigma` per user, zone-major.
    pub sign: Vec<f64>,
    /// Throughput minus QoS target per user, nats/s/Hz.
    pub rate: Vec<f64>,
    /// `(P_max - used) / P_max`.
    pub power: f64,
    /// `tau1`, `tau2` and `1 - tau1 - tau2`; empty when time sharing is not used.
    pub time: Vec<f64>,
    pub tol: f64,
    pub feasible: bool,
}

impl FeasibilityReport {
    fn finish(sign: Vec<f64>, rate: Vec<f64>, power: f64, time: Vec<f64>, tol: f64) -> Self {
        let mut report = Self {
            sign,
            rate,
            power,
            time,
            tol,
            feasible: false,
        };
        report.feasible = report.worst_violation() <= tol;
        report
    }

    /// Largest amount by which any residual falls below zero.
    pub fn worst_violation(&self) -> f64 {
        self.sign
            .iter()
            .chain(&self.rate)
            .chain(std::iter::once(&self.power))
            .chain(&self.time)
            .map(|r| if r.is_nan() { f64::INFINITY } else { (-r).max(0.0) })
            .fold(0.0, f64::max)
    }
}

fn sign_residuals(channel: &ChannelRealization, beams: &BeamformerSet) -> Vec<f64> {
    let sigma = channel.sigma2().sqrt();
    channel
        .users()
        .map(|(i, k)| inner(channel.h(i, k), beams.beam(i, k)).re / sigma)
        .collect()
}

/// Checks the real-part sign condition, QoS, time-weighted power and time-split constraints.
pub fn check_feasibility(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    tau: TimeSplit,
    config: &SystemConfig,
) -> FeasibilityReport {
    let qos = config.qos_nats();
    let rate = channel
        .users()
        .map(|(i, k)| ft_rate(channel, beams, tau.get(i), i, k) - qos)
        .collect();
    let pmax = config.pmax_watts();
    let used = tau.tau1 * beams.zone_energy(0) + tau.tau2 * beams.zone_energy(1);
    FeasibilityReport::finish(
        sign_residuals(channel, beams),
        rate,
        (pmax - used) / pmax,
        vec![tau.tau1, tau.tau2, 1.0 - tau.tau1 - tau.tau2],
        config.solver.feas_tol,
    )
}

/// Feasibility for concurrent service: full-interference QoS and total power.
pub fn check_conventional_feasibility(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    config: &SystemConfig,
) -> FeasibilityReport {
    let qos = config.qos_nats();
    let rate = channel
        .users()
        .map(|(i, k)| conventional_rate(channel, beams, i, k) - qos)
        .collect();
    let pmax = config.pmax_watts();
    let used = beams.zone_energy(0) + beams.zone_energy(1);
    FeasibilityReport::finish(
        sign_residuals(channel, beams),
        rate,
        (pmax - used) / pmax,
        Vec::new(),
        config.solver.feas_tol,
    )
}
