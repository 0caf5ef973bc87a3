use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::TimeSplit;

/// Reciprocal time fractions `(1/tau1, 1/tau2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSplit {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AlphaSplit {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha2 > 0.0) || !alpha1.is_finite() || !alpha2.is_finite() {
            return Err(Error::InvalidInput(format!(
                "alpha ({alpha1}, {alpha2}) must be positive and finite"
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn get(&self, zone: usize) -> f64 {
        match zone {
            0 => self.alpha1,
            _ => self.alpha2,
        }
    }

    /// `1 - 1/alpha1 - 1/alpha2`; non-negative when the time budget holds.
    pub fn time_slack(&self) -> f64 {
        1.0 - 1.0 / self.alpha1 - 1.0 / self.alpha2
    }
}

pub fn to_alpha(tau: TimeSplit) -> Result<AlphaSplit> {
    if !(tau.tau1 > 0.0 && tau.tau2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "time fractions must be positive to invert, got ({}, {})",
            tau.tau1, tau.tau2
        )));
    }
    AlphaSplit::new(1.0 / tau.tau1, 1.0 / tau.tau2)
}

pub fn from_alpha(alpha: AlphaSplit) -> TimeSplit {
    TimeSplit {
        tau1: 1.0 / alpha.alpha1,
        tau2: 1.0 / alpha.alpha2,
    }
}
