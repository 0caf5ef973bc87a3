//! Concave minorant of the per-user throughput around an expansion point.
//!
//! For `x, xb, y, yb, t, tb > 0` with `d = xb^2 / yb`,
//!
//! ```text
//! ln(1 + x^2/y) / t  >=  a - b y / x^2 - c t  >=  a - b y / (xb (2x - xb)) - c t
//! a = 2 ln(1+d)/tb + d/(tb (d+1)),  b = d^2/(tb (d+1)),  c = ln(1+d)/tb^2
//! ```
//!
//! the second bound holding on the trust region `2x - xb > 0`. All three
//! expressions coincide at `(xb, yb, tb)`. Here `x` is the real part of the
//! desired-signal amplitude, `y` the interference-plus-noise power and `t`
//! the reciprocal time fraction.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, NUM_ZONES};
use crate::error::{Error, Result};
use crate::rates::{inner, interference_plus_noise, BeamformerSet, RateMode};

use super::AlphaSplit;

/// Smallest SINR used when building coefficients.
pub const MIN_SINR: f64 = 1e-12;

/// Expansion-point constants of one user's minorant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserCoeffs {
    pub x: f64,
    pub y: f64,
    pub d: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// The expansion value of `t`.
    pub t: f64,
}

impl UserCoeffs {
    /// Coefficients at `(x, y, t)`; the SINR is floored at [`MIN_SINR`].
    pub fn new(x: f64, y: f64, t: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::TrustRegion {
                zone: 0,
                user: 0,
                detail: format!("expansion point needs Re{{h^H w}} > 0, got {x}"),
            });
        }
        if !(y > 0.0 && t > 0.0) {
            return Err(Error::InvalidInput(format!(
                "interference-plus-noise and t must be positive, got y={y}, t={t}"
            )));
        }
        let d = (x * x / y).max(MIN_SINR);
        let l = d.ln_1p();
        Ok(Self {
            x,
            y,
            d,
            a: 2.0 * l / t + d / (t * (d + 1.0)),
            b: d * d / (t * (d + 1.0)),
            c: l / (t * t),
            t,
        })
    }

    /// `a - b y / x^2 - c t`.
    pub fn quadratic_bound(&self, x: f64, y: f64, t: f64) -> f64 {
        self.a - self.b * y / (x * x) - self.c * t
    }

    /// `a - b y / (xb (2x - xb)) - c t`, or `None` outside the trust region.
    pub fn trust_bound(&self, x: f64, y: f64, t: f64) -> Option<f64> {
        let s = self.x * (2.0 * x - self.x);
        (s > 0.0).then(|| self.a - self.b * y / s - self.c * t)
    }
}

/// Coefficients for every user at one expansion point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateCoeffs {
    pub mode: RateMode,
    pub users: [Vec<UserCoeffs>; NUM_ZONES],
}

impl SurrogateCoeffs {
    pub fn user(&self, zone: usize, user: usize) -> &UserCoeffs {
        &self.users[zone][user]
    }
}

pub(crate) fn build_coeffs(
    channel: &ChannelRealization,
    beams: &BeamformerSet,
    t: [f64; NUM_ZONES],
    mode: RateMode,
) -> Result<SurrogateCoeffs> {
    beams.check_shape(channel)?;
    let mut users: [Vec<UserCoeffs>; NUM_ZONES] = Default::default();
    for (i, k) in channel.users() {
        let x = inner(channel.h(i, k), beams.beam(i, k)).re;
        let y = interference_plus_noise(channel, beams, i, k, mode);
        let coeffs = UserCoeffs::new(x, y, t[i]).map_err(|e| match e {
            Error::TrustRegion { detail, .. } => Error::TrustRegion {
                zone: i,
                user: k,
                detail,
            },
            other => other,
        })?;
        users[i].push(coeffs);
    }
    Ok(SurrogateCoeffs { mode, users })
}

/// Minorant coefficients of the fractional-time throughputs at `(w_prev, alpha_prev)`.
pub fn surrogate_coeffs(
    channel: &ChannelRealization,
    w_prev: &BeamformerSet,
    alpha_prev: AlphaSplit,
) -> Result<SurrogateCoeffs> {
    build_coeffs(
        channel,
        w_prev,
        [alpha_prev.alpha1, alpha_prev.alpha2],
        RateMode::FractionalTime,
    )
}

/// Minorant coefficients of the full-interference throughputs (`t` fixed to one).
pub fn conventional_coeffs(
    channel: &ChannelRealization,
    w_prev: &BeamformerSet,
) -> Result<SurrogateCoeffs> {
    build_coeffs(channel, w_prev, [1.0, 1.0], RateMode::Conventional)
}

/// Evaluates user `(zone, user)`'s minorant at `(w, alpha)`.
///
/// For conventional coefficients `alpha` is ignored and `t = 1`.
pub fn eval_surrogate(
    coeffs: &SurrogateCoeffs,
    channel: &ChannelRealization,
    w: &BeamformerSet,
    alpha: AlphaSplit,
    zone: usize,
    user: usize,
) -> Result<f64> {
    let uc = coeffs.user(zone, user);
    let x = inner(channel.h(zone, user), w.beam(zone, user)).re;
    let y = interference_plus_noise(channel, w, zone, user, coeffs.mode);
    let t = match coeffs.mode {
        RateMode::FractionalTime => alpha.get(zone),
        RateMode::Conventional => 1.0,
    };
    uc.trust_bound(x, y, t).ok_or_else(|| Error::TrustRegion {
        zone,
        user,
        detail: format!("2 Re{{h^H w}} - x = {} is not positive", 2.0 * x - uc.x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_coefficients() {
        // x = 2, y = 1, t = 2  ->  d = 4
        let uc = UserCoeffs::new(2.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(uc.d, 4.0);
        assert_relative_eq!(uc.a, 5f64.ln() + 0.4, epsilon = 1e-12);
        assert_relative_eq!(uc.a, 2.009438, epsilon = 1e-6);
        assert_relative_eq!(uc.b, 1.6, epsilon = 1e-12);
        assert_relative_eq!(uc.c, 0.402359, epsilon = 1e-6);
    }

    #[test]
    fn vanishing_sinr_limits() {
        let uc = UserCoeffs::new(1e-9, 1.0, 1.0).unwrap();
        assert!(uc.a < 1e-11 && uc.b < 1e-11 && uc.c < 1e-11);
        assert!(uc.a > 0.0 && uc.b > 0.0 && uc.c > 0.0 && uc.d > 0.0);
    }

    #[test]
    fn nonpositive_gain_is_trust_violation() {
        assert!(matches!(UserCoeffs::new(0.0, 1.0, 1.0), Err(Error::TrustRegion { .. })));
        assert!(matches!(UserCoeffs::new(-1.0, 1.0, 1.0), Err(Error::TrustRegion { .. })));
    }

    #[test]
    fn tight_at_expansion_point() {
        for &(x, y, t) in &[(2.0, 1.0, 2.0), (0.3, 5.0, 1.1), (40.0, 0.2, 7.0)] {
            let uc = UserCoeffs::new(x, y, t).unwrap();
            let exact = (1.0 + x * x / y).ln() / t;
            assert_relative_eq!(uc.quadratic_bound(x, y, t), exact, epsilon = 1e-12);
            assert_relative_eq!(uc.trust_bound(x, y, t).unwrap(), exact, epsilon = 1e-12);
            // a - b/d - c t = ln(1+d)/t
            assert_relative_eq!(uc.a - uc.b / uc.d - uc.c * t, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn outside_trust_region_is_none() {
        let uc = UserCoeffs::new(2.0, 1.0, 1.0).unwrap();
        assert!(uc.trust_bound(1.0, 1.0, 1.0).is_none());
        assert!(uc.trust_bound(1.01, 1.0, 1.0).is_some());
    }

    #[test]
    fn surrogate_decreases_with_interference() {
        let uc = UserCoeffs::new(1.5, 0.7, 2.0).unwrap();
        let lo = uc.trust_bound(1.6, 0.7, 2.0).unwrap();
        let hi = uc.trust_bound(1.6, 0.9, 2.0).unwrap();
        assert!(hi < lo);
    }
}
