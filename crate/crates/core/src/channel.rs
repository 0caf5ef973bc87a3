//! Random user placement and Rayleigh channel generation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{noise_power, pathloss_db, SystemConfig};

/// Number of zones served by the base station.
pub const NUM_ZONES: usize = 2;

/// Channel to a single user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserChannel {
    pub h: Vec<Complex64>,
    pub distance_km: f64,
}

/// One Monte Carlo draw: channels to every user of both zones.
///
/// Zone 0 is the near zone, zone 1 the far zone. The zones normally hold the
/// same number of users, but either may be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    zones: [Vec<UserChannel>; NUM_ZONES],
    sigma2: f64,
    num_antennas: usize,
}

impl ChannelRealization {
    pub fn new(zones: [Vec<UserChannel>; NUM_ZONES], sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidInput(format!("noise power must be positive, got {sigma2}")));
        }
        let num_antennas = zones
            .iter()
            .flatten()
            .map(|u| u.h.len())
            .next()
            .ok_or_else(|| Error::InvalidInput("realization has no users".into()))?;
        if num_antennas == 0 {
            return Err(Error::Dimension("channel vectors must be non-empty".into()));
        }
        for u in zones.iter().flatten() {
            if u.h.len() != num_antennas {
                return Err(Error::Dimension(format!(
                    "channel length {} differs from {num_antennas}",
                    u.h.len()
                )));
            }
            if u.h.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidInput("channel has non-finite entries".into()));
            }
        }
        Ok(Self {
            zones,
            sigma2,
            num_antennas,
        })
    }

    /// Builds a realization from bare channel vectors (distances set to zero).
    pub fn from_vectors(zones: [Vec<Vec<Complex64>>; NUM_ZONES], sigma2: f64) -> Result<Self> {
        let [z0, z1] = zones;
        let wrap = |z: Vec<Vec<Complex64>>| {
            z.into_iter()
                .map(|h| UserChannel { h, distance_km: 0.0 })
                .collect::<Vec<_>>()
        };
        Self::new([wrap(z0), wrap(z1)], sigma2)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn zone(&self, zone: usize) -> &[UserChannel] {
        &self.zones[zone]
    }

    pub fn zone_sizes(&self) -> [usize; NUM_ZONES] {
        [self.zones[0].len(), self.zones[1].len()]
    }

    pub fn num_users(&self) -> usize {
        self.zones.iter().map(Vec::len).sum()
    }

    pub fn h(&self, zone: usize, user: usize) -> &[Complex64] {
        &self.zones[zone][user].h
    }

    /// Iterates over `(zone, user)` pairs in zone-major order.
    pub fn users(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..NUM_ZONES).flat_map(move |i| (0..self.zones[i].len()).map(move |k| (i, k)))
    }
}

/// Uniform-over-area radius in the annulus `[r_in, r_out]`.
fn sample_radius<R: Rng>(rng: &mut R, r_in: f64, r_out: f64) -> f64 {
    let u: f64 = rng.gen();
    (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt()
}

/// Draws `CN(0, I)` entries.
fn sample_cn<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Places `K` users per zone and draws their path-loss scaled Rayleigh channels.
///
/// The same `(seed, config)` always produces a bit-identical realization.
pub fn sample_scenario(seed: u64, config: &SystemConfig) -> Result<ChannelRealization> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rings = [
        (config.min_distance_m, config.zone1_radius_m),
        (config.zone1_radius_m, config.cell_radius_m),
    ];
    let mut zones: [Vec<UserChannel>; NUM_ZONES] = Default::default();
    for (zone, &(r_in, r_out)) in zones.iter_mut().zip(rings.iter()) {
        for _ in 0..config.users_per_zone {
            let mut r = sample_radius(&mut rng, r_in, r_out);
            // zone 2 is open at its inner radius
            if r <= r_in && r_in == config.zone1_radius_m {
                r = r_in.next_up();
            }
            let distance_km = r / 1000.0;
            let gain = 10f64.powf(-pathloss_db(distance_km)? / 10.0).sqrt();
            let h = sample_cn(&mut rng, config.num_antennas)
                .into_iter()
                .map(|c| c * gain)
                .collect();
            zone.push(UserChannel { h, distance_km });
        }
    }
    let sigma2 = noise_power(config.noise_density_dbm_hz, config.bandwidth_hz)?;
    ChannelRealization::new(zones, sigma2)
}
