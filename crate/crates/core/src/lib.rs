//! Joint fractional time allocation and beamforming for a two-zone multiuser
//! MISO downlink.
//!
//! The near and far zones are served in separate fractions of the time unit,
//! so each zone only sees intra-zone interference. Beamformers and time
//! fractions are optimized jointly by successive convex approximation: each
//! iteration maximizes a tight concave minorant of the sum throughput over a
//! trust region, solving a second-order cone program.

pub mod baselines;
pub mod channel;
pub mod conic;
pub mod error;
pub mod experiment;
pub mod params;
pub mod rates;
pub mod sca;

pub use channel::{sample_scenario, ChannelRealization, UserChannel};
pub use error::{Error, Result};
pub use params::{SolverSettings, SystemConfig};
pub use rates::{BeamformerSet, FeasibilityReport, TimeSplit};
pub use sca::{AlphaSplit, Solution, Status, SurrogateCoeffs};
