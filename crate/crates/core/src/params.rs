//! Scenario constants, path loss and noise power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and iteration caps shared by every optimization routine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative objective change that ends the main loop.
    pub conv_tol: f64,
    pub max_iters: usize,
    /// Iteration cap for the feasibility (initial point) phase.
    pub init_max_iters: usize,
    /// Stall detection window for the feasibility phase.
    pub init_stall_window: usize,
    /// Minimum relative progress of the min-ratio over the stall window.
    pub init_stall_tol: f64,
    /// Closure margin of the trust region, relative to the expansion point.
    pub trust_margin: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Interior-point tolerance for each convex subproblem.
    pub conic_tol: f64,
    /// Absolute tolerance used when certifying feasibility of a point.
    pub feas_tol: f64,
    /// Largest objective decrease between iterates that still counts as ascent.
    pub ascent_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            conv_tol: 1e-4,
            max_iters: 50,
            init_max_iters: 50,
            init_stall_window: 5,
            init_stall_tol: 1e-4,
            trust_margin: 1e-9,
            alpha_min: 1.0 + 1e-6,
            alpha_max: 1e6,
            conic_tol: 1e-8,
            feas_tol: 1e-6,
            ascent_tol: 1e-6,
        }
    }
}

/// All constants describing one two-zone downlink scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_antennas: usize,
    /// Users per zone (the same `K` for both zones).
    pub users_per_zone: usize,
    pub pmax_dbm: f64,
    /// Per-user minimum throughput in bits/s/Hz.
    pub rbar_bits: f64,
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub cell_radius_m: f64,
    pub zone1_radius_m: f64,
    pub min_distance_m: f64,
    pub solver: SolverSettings,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            num_antennas: 5,
            users_per_zone: 4,
            pmax_dbm: 30.0,
            rbar_bits: 0.0,
            noise_density_dbm_hz: -174.0,
            bandwidth_hz: 10e6,
            cell_radius_m: 500.0,
            zone1_radius_m: 200.0,
            min_distance_m: 10.0,
            solver: SolverSettings::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.num_antennas < 1 {
            return bad("num_antennas must be at least 1");
        }
        if self.users_per_zone < 1 {
            return bad("users_per_zone must be at least 1");
        }
        if !self.pmax_dbm.is_finite() {
            return bad("pmax_dbm must be finite");
        }
        if !(self.rbar_bits >= 0.0) || !self.rbar_bits.is_finite() {
            return bad("rbar_bits must be a finite non-negative number");
        }
        if !(self.bandwidth_hz > 0.0) {
            return bad("bandwidth_hz must be positive");
        }
        if !(self.min_distance_m > 0.0
            && self.min_distance_m < self.zone1_radius_m
            && self.zone1_radius_m < self.cell_radius_m)
        {
            return bad("radii must satisfy 0 < min_distance_m < zone1_radius_m < cell_radius_m");
        }
        let s = &self.solver;
        if !(s.conv_tol > 0.0 && s.conic_tol > 0.0 && s.feas_tol > 0.0 && s.ascent_tol >= 0.0) {
            return bad("solver tolerances must be positive");
        }
        if s.max_iters == 0 || s.init_max_iters == 0 || s.init_stall_window == 0 {
            return bad("iteration caps must be positive");
        }
        if !(s.alpha_min > 1.0 && s.alpha_max > s.alpha_min) {
            return bad("alpha bounds must satisfy 1 < alpha_min < alpha_max");
        }
        if !(s.trust_margin >= 0.0) {
            return bad("trust_margin must be non-negative");
        }
        Ok(())
    }

    /// Power budget in watts.
    pub fn pmax_watts(&self) -> f64 {
        dbm_to_watts(self.pmax_dbm)
    }

    /// Per-user QoS target in nats/s/Hz.
    pub fn qos_nats(&self) -> f64 {
        self.rbar_bits * std::f64::consts::LN_2
    }

    /// Noise power per user in watts.
    pub fn noise_power(&self) -> f64 {
        // validate() guarantees a positive bandwidth
        noise_power(self.noise_density_dbm_hz, self.bandwidth_hz).unwrap_or(f64::NAN)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Distance-dependent path loss in dB; `d_km` is in kilometers.
pub fn pathloss_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) || !d_km.is_finite() {
        return Err(Error::InvalidInput(format!(
            "distance must be positive and finite, got {d_km}"
        )));
    }
    Ok(128.1 + 37.6 * d_km.log10())
}

/// Noise power in watts over `bandwidth_hz` for a density in dBm/Hz.
pub fn noise_power(density_dbm_hz: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    Ok(10f64.powf((density_dbm_hz + 10.0 * bandwidth_hz.log10() - 30.0) / 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pathloss_reference_points() {
        assert_relative_eq!(pathloss_db(1.0).unwrap(), 128.1, epsilon = 1e-12);
        // 128.1 + 37.6 * log10(0.5)
        assert_relative_eq!(pathloss_db(0.5).unwrap(), 116.781272, epsilon = 1e-6);
        assert_relative_eq!(pathloss_db(0.01).unwrap(), 52.9, epsilon = 1e-9);
    }

    #[test]
    fn pathloss_rejects_nonpositive_distance() {
        assert!(matches!(pathloss_db(0.0), Err(Error::InvalidInput(_))));
        assert!(pathloss_db(-1.0).is_err());
        assert!(pathloss_db(f64::NAN).is_err());
    }

    #[test]
    fn pathloss_is_increasing() {
        let mut last = f64::NEG_INFINITY;
        for i in 1..500 {
            let pl = pathloss_db(i as f64 * 1e-3).unwrap();
            assert!(pl > last);
            last = pl;
        }
    }

    #[test]
    fn noise_power_reference_points() {
        assert_relative_eq!(noise_power(-174.0, 1.0).unwrap(), 10f64.powf(-20.4), max_relative = 1e-12);
        assert_relative_eq!(noise_power(-174.0, 1e7).unwrap(), 3.981072e-14, max_relative = 1e-6);
        assert_relative_eq!(noise_power(-174.0, 1e6).unwrap(), 3.981072e-15, max_relative = 1e-6);
        assert!(noise_power(-174.0, 0.0).is_err());
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_relative_eq!(cfg.pmax_watts(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_radii_rejected() {
        let cfg = SystemConfig {
            zone1_radius_m: 600.0,
            ..SystemConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
