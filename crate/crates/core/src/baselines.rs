//! Comparison schemes and the registry of scheme names.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::params::SystemConfig;
use crate::rates::RateMode;
use crate::sca::{self, Engine, Solution};

/// Maximizes the sum throughput when all users share the whole time unit.
///
/// Every other user's beam interferes, the power budget is `||w||^2 <= P_max`
/// and the minorant is the fractional-time one with the time variable fixed
/// to one. Initialization, trust region and tolerances are those of
/// [`sca::sca_solve`].
pub fn conventional_dl_solve(channel: &ChannelRealization, config: &SystemConfig) -> Result<Solution> {
    Ok(Engine::new(channel, config, RateMode::Conventional)?.solve_sum_rate())
}

/// Schemes known to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    FractionalTime,
    ConventionalDl,
    MaxMinFractionalTime,
    Noma,
    FtNomaBoth,
    FtNomaZone1,
    FtNomaZone2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeDescriptor {
    pub scheme: Scheme,
    pub name: &'static str,
    pub description: &'static str,
    pub implemented: bool,
    /// Why the scheme is not available, for unimplemented entries.
    pub reason: Option<&'static str>,
}

const NOMA_REASON: &str =
    "NOMA beamforming, SIC decoding and user clustering come from external designs not covered here";

const REGISTRY: [SchemeDescriptor; 7] = [
    SchemeDescriptor {
        scheme: Scheme::FractionalTime,
        name: "ft",
        description: "fractional-time beamforming, sum throughput",
        implemented: true,
        reason: None,
    },
    SchemeDescriptor {
        scheme: Scheme::ConventionalDl,
        name: "conventional-dl",
        description: "concurrent service of both zones, sum throughput",
        implemented: true,
        reason: None,
    },
    SchemeDescriptor {
        scheme: Scheme::MaxMinFractionalTime,
        name: "maxmin-ft",
        description: "fractional-time beamforming, worst-user throughput",
        implemented: true,
        reason: None,
    },
    SchemeDescriptor {
        scheme: Scheme::Noma,
        name: "noma",
        description: "NOMA with zone-1/zone-2 user pairs",
        implemented: false,
        reason: Some(NOMA_REASON),
    },
    SchemeDescriptor {
        scheme: Scheme::FtNomaBoth,
        name: "ft-noma-both",
        description: "fractional time with NOMA in both zones",
        implemented: false,
        reason: Some(NOMA_REASON),
    },
    SchemeDescriptor {
        scheme: Scheme::FtNomaZone1,
        name: "ft-noma-zone1",
        description: "fractional time with NOMA in zone 1",
        implemented: false,
        reason: Some(NOMA_REASON),
    },
    SchemeDescriptor {
        scheme: Scheme::FtNomaZone2,
        name: "ft-noma-zone2",
        description: "fractional time with NOMA in zone 2",
        implemented: false,
        reason: Some(NOMA_REASON),
    },
];

pub fn scheme_registry() -> &'static [SchemeDescriptor] {
    &REGISTRY
}

impl Scheme {
    pub fn descriptor(&self) -> &'static SchemeDescriptor {
        REGISTRY
            .iter()
            .find(|d| d.scheme == *self)
            .expect("every scheme is registered")
    }

    pub fn name(&self) -> &'static str {
        self.descriptor().name
    }

    /// Looks up a scheme by name, known or not.
    pub fn parse(name: &str) -> Result<Scheme> {
        REGISTRY
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.scheme)
            .ok_or_else(|| Error::UnknownScheme(name.to_string()))
    }

    /// Looks up a scheme that can actually be run.
    pub fn lookup(name: &str) -> Result<Scheme> {
        let scheme = Self::parse(name)?;
        scheme.ensure_implemented()?;
        Ok(scheme)
    }

    pub fn ensure_implemented(&self) -> Result<()> {
        let d = self.descriptor();
        if d.implemented {
            Ok(())
        } else {
            Err(Error::UnsupportedScheme {
                name: d.name.to_string(),
                reason: d.reason.unwrap_or("not implemented").to_string(),
            })
        }
    }

    /// Runs the scheme on one realization.
    pub fn solve(&self, channel: &ChannelRealization, config: &SystemConfig) -> Result<Solution> {
        match self {
            Scheme::FractionalTime => sca::sca_solve(channel, config),
            Scheme::ConventionalDl => conventional_dl_solve(channel, config),
            Scheme::MaxMinFractionalTime => sca::maxmin_solve(channel, config),
            other => {
                other.ensure_implemented()?;
                unreachable!("implemented schemes are matched above")
            }
        }
    }
}
