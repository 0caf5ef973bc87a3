//! Assembly of the convex program solved at each path-following iteration.
//!
//! Complex beams are stacked as real and imaginary parts and scaled by
//! `sqrt(P_max)`, so the stored variables are dimensionless. Each user's
//! minorant enters through an epigraph variable `v` and the rotated cone
//!
//! ```text
//! v * (2 Re{h^H w_k} - x) / x  >=  sum_{j} |h^H w_j|^2 / y + sigma^2 / y
//! ```
//!
//! which is the quadratic-over-linear term of the minorant rescaled by its
//! value at the expansion point, so `v = 1` there.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, NUM_ZONES};
use crate::conic::{ConicProblem, LinExpr, VarId};
use crate::error::{Error, Result};
use crate::params::SystemConfig;
use crate::rates::{norm_sqr, BeamformerSet, RateMode};

use super::{AlphaSplit, SurrogateCoeffs};

/// What the subproblem maximizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// Sum of minorants, with each minorant held above the configured QoS target.
    SumRate,
    /// Smallest `minorant / target` over users with a positive target (nats).
    MinRatio { targets: [Vec<f64>; NUM_ZONES] },
}

impl ObjectiveMode {
    pub fn min_ratio_uniform(channel: &ChannelRealization, target: f64) -> Self {
        let [k0, k1] = channel.zone_sizes();
        ObjectiveMode::MinRatio {
            targets: [vec![target; k0], vec![target; k1]],
        }
    }
}

/// Constraint group labels counted as the core constraints of the program.
pub const CORE_LABELS: [&str; 6] = ["qos", "ratio", "sign", "trust", "time", "power"];

/// Where each quantity lives in the variable vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub mode: RateMode,
    /// `(re, im)` variable pairs per zone, user and antenna.
    pub beams: [Vec<Vec<(VarId, VarId)>>; NUM_ZONES],
    pub alpha: Option<[VarId; NUM_ZONES]>,
    /// Minorant epigraph variable per user.
    pub epigraph: [Vec<VarId>; NUM_ZONES],
    /// Min-ratio level, present in min-ratio mode.
    pub level: Option<VarId>,
    /// Physical beams are `beam_scale` times the stored ones.
    pub beam_scale: f64,
}

impl Layout {
    /// Complex beam coordinates plus time variables.
    pub fn core_variable_count(&self) -> usize {
        let beams: usize = self.beams.iter().flatten().map(Vec::len).sum();
        beams + self.alpha.map_or(0, |a| a.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subproblem {
    pub problem: ConicProblem,
    pub layout: Layout,
}

impl Subproblem {
    /// Number of rows in the core constraint groups (see [`CORE_LABELS`]).
    pub fn core_constraint_count(&self) -> usize {
        self.problem
            .blocks
            .iter()
            .filter(|b| {
                let base = b.label.split('[').next().unwrap_or("");
                CORE_LABELS.contains(&base)
            })
            .map(|b| b.rows.len())
            .sum()
    }

    /// Recovers physical beams and, for fractional time, the reciprocal time fractions.
    pub fn extract(&self, x: &[f64]) -> (BeamformerSet, Option<AlphaSplit>) {
        let scale = self.layout.beam_scale;
        let zone = |i: usize| {
            self.layout.beams[i]
                .iter()
                .map(|beam| {
                    beam.iter()
                        .map(|&(re, im)| Complex64::new(x[re.0], x[im.0]) * scale)
                        .collect()
                })
                .collect()
        };
        let beams = BeamformerSet {
            zones: [zone(0), zone(1)],
        };
        let alpha = self.layout.alpha.map(|[a1, a2]| AlphaSplit {
            alpha1: x[a1.0],
            alpha2: x[a2.0],
        });
        (beams, alpha)
    }
}

/// `Re{h^H w}` and `Im{h^H w}` as affine expressions in the stacked beam variables.
fn inner_exprs(h: &[Complex64], beam: &[(VarId, VarId)], scale: f64) -> (LinExpr, LinExpr) {
    let mut re = LinExpr::zero();
    let mut im = LinExpr::zero();
    for (hn, &(a, b)) in h.iter().zip(beam) {
        // conj(h) (a + jb) = (hr a + hi b) + j (hr b - hi a)
        re.add_term(a, hn.re * scale).add_term(b, hn.im * scale);
        im.add_term(b, hn.re * scale).add_term(a, -hn.im * scale);
    }
    (re, im)
}

/// Assembles the convex subproblem around `(w_prev, alpha_prev)`.
///
/// The rate mode of `coeffs` picks the scheme: fractional time needs
/// `alpha_prev`, conventional service ignores it.
pub fn build_subproblem(
    coeffs: &SurrogateCoeffs,
    channel: &ChannelRealization,
    w_prev: &BeamformerSet,
    alpha_prev: Option<AlphaSplit>,
    config: &SystemConfig,
    objective: &ObjectiveMode,
) -> Result<Subproblem> {
    w_prev.check_shape(channel)?;
    let mode = coeffs.mode;
    let alpha_prev = match (mode, alpha_prev) {
        (RateMode::FractionalTime, Some(a)) => Some(a),
        (RateMode::FractionalTime, None) => {
            return Err(Error::InvalidInput(
                "fractional-time subproblem needs an expansion point for alpha".into(),
            ))
        }
        (RateMode::Conventional, _) => None,
    };
    if let ObjectiveMode::MinRatio { targets } = objective {
        if targets[0].len() != channel.zone(0).len() || targets[1].len() != channel.zone(1).len() {
            return Err(Error::Dimension("one ratio target per user is required".into()));
        }
    }

    let settings = &config.solver;
    let pmax = config.pmax_watts();
    let scale = pmax.sqrt();
    let nt = channel.num_antennas();
    let mut p = ConicProblem::new();

    let mut beams: [Vec<Vec<(VarId, VarId)>>; NUM_ZONES] = Default::default();
    for (i, k) in channel.users() {
        let vars = (0..nt)
            .map(|n| {
                (
                    p.add_var(format!("w[{i},{k},{n}].re")),
                    p.add_var(format!("w[{i},{k},{n}].im")),
                )
            })
            .collect();
        debug_assert_eq!(beams[i].len(), k);
        beams[i].push(vars);
    }
    let alpha = alpha_prev.map(|_| [p.add_var("alpha[0]"), p.add_var("alpha[1]")]);
    let mut epigraph: [Vec<VarId>; NUM_ZONES] = Default::default();
    for (i, k) in channel.users() {
        epigraph[i].push(p.add_var(format!("v[{i},{k}]")));
    }
    let level = match objective {
        ObjectiveMode::MinRatio { .. } => Some(p.add_var("level")),
        ObjectiveMode::SumRate => None,
    };

    // Per-user minorant, sign condition and trust region.
    let qos = config.qos_nats();
    let mut total_rate = LinExpr::zero();
    for (i, k) in channel.users() {
        let uc = coeffs.user(i, k);
        let h = channel.h(i, k);
        let (re_own, _) = inner_exprs(h, &beams[i][k], scale);
        let trust_expr = (re_own.clone() * (2.0 / uc.x)) - 1.0;

        let inv_sqrt_y = 1.0 / uc.y.sqrt();
        let mut interference = Vec::new();
        for (j, zone_beams) in beams.iter().enumerate() {
            if mode == RateMode::FractionalTime && j != i {
                continue;
            }
            for (l, beam) in zone_beams.iter().enumerate() {
                if j == i && l == k {
                    continue;
                }
                let (re, im) = inner_exprs(h, beam, scale);
                interference.push(re * inv_sqrt_y);
                interference.push(im * inv_sqrt_y);
            }
        }
        interference.push(LinExpr::constant(channel.sigma2().sqrt() * inv_sqrt_y));
        let v = LinExpr::var(epigraph[i][k]);
        p.rotated_soc(format!("rate-cone[{i},{k}]"), v.clone(), trust_expr.clone(), interference);

        // a - b q - c t with q = v y / x^2
        let mut rate = LinExpr::constant(uc.a) - v * (uc.b * uc.y / (uc.x * uc.x));
        match alpha {
            Some(a) => rate = rate - LinExpr::term(a[i], uc.c),
            None => rate = rate - uc.c,
        }

        match objective {
            ObjectiveMode::SumRate => {
                p.nonneg(format!("qos[{i},{k}]"), vec![rate.clone() - qos]);
            }
            ObjectiveMode::MinRatio { targets } => {
                let target = targets[i][k];
                if target > 0.0 {
                    let lvl = LinExpr::var(level.expect("min-ratio level"));
                    p.nonneg(format!("ratio[{i},{k}]"), vec![rate.clone() * (1.0 / target) - lvl]);
                }
            }
        }
        p.nonneg(format!("sign[{i},{k}]"), vec![re_own * (1.0 / uc.x)]);
        p.nonneg(format!("trust[{i},{k}]"), vec![trust_expr - settings.trust_margin]);
        total_rate = total_rate + rate;
    }

    // Time budget and power.
    let flat = |zone: usize| -> Vec<LinExpr> {
        beams[zone]
            .iter()
            .flatten()
            .flat_map(|&(a, b)| [LinExpr::var(a), LinExpr::var(b)])
            .collect()
    };
    match (alpha, alpha_prev) {
        (Some(a), Some(a_prev)) => {
            p.nonneg(
                "alpha-bounds",
                vec![
                    LinExpr::var(a[0]) - settings.alpha_min,
                    LinExpr::var(a[1]) - settings.alpha_min,
                    settings.alpha_max - LinExpr::var(a[0]),
                    settings.alpha_max - LinExpr::var(a[1]),
                ],
            );
            // u_i >= 1 / alpha_i, written as (u_i a_i^k)(alpha_i / a_i^k) >= 1 so that
            // both cone factors stay near one however lopsided the time split is
            let u = [p.add_var("u[0]"), p.add_var("u[1]")];
            for zone in 0..NUM_ZONES {
                let ak = a_prev.get(zone);
                p.rotated_soc(
                    format!("time-cone[{zone}]"),
                    LinExpr::var(u[zone]) * ak,
                    LinExpr::var(a[zone]) * (1.0 / ak),
                    vec![LinExpr::constant(1.0)],
                );
            }
            p.nonneg("time", vec![1.0 - LinExpr::var(u[0]) - LinExpr::var(u[1])]);

            // ||w1||^2 + ||w2||^2 / alpha2 minus the linearization of ||w1||^2 / alpha2,
            // all divided by P_max.
            let t1 = p.add_var("power[0]");
            let t2 = p.add_var("power[1]");
            p.rotated_soc("power-cone[0]", LinExpr::var(t1), LinExpr::constant(1.0), flat(0));
            let a2 = a_prev.alpha2;
            p.rotated_soc(
                "power-cone[1]",
                LinExpr::var(t2) * a2,
                LinExpr::var(a[1]) * (1.0 / a2),
                flat(1),
            );
            let mut row = 1.0 - LinExpr::var(t1) - LinExpr::var(t2);
            let mut prev_energy = 0.0;
            for (k, beam) in beams[0].iter().enumerate() {
                let prev = w_prev.beam(0, k);
                prev_energy += norm_sqr(prev) / pmax;
                for (wn, &(re, im)) in prev.iter().zip(beam) {
                    // Re{conj(wp) w} in scaled units
                    row.add_term(re, 2.0 * wn.re / scale / a2);
                    row.add_term(im, 2.0 * wn.im / scale / a2);
                }
            }
            row.add_term(a[1], -prev_energy / (a2 * a2));
            p.nonneg("power", vec![row]);
        }
        _ => {
            let t = p.add_var("power[0]");
            let mut all = flat(0);
            all.extend(flat(1));
            p.rotated_soc("power-cone[0]", LinExpr::var(t), LinExpr::constant(1.0), all);
            p.nonneg("power", vec![1.0 - LinExpr::var(t)]);
        }
    }

    match objective {
        ObjectiveMode::SumRate => p.minimize(&(-total_rate)),
        ObjectiveMode::MinRatio { .. } => p.minimize(&-LinExpr::var(level.expect("level"))),
    }
    p.validate()?;

    Ok(Subproblem {
        problem: p,
        layout: Layout {
            mode,
            beams,
            alpha,
            epigraph,
            level,
            beam_scale: scale,
        },
    })
}

/// Stacked variable vector representing `(w, alpha)` exactly, with every
/// auxiliary variable set to its tightest feasible value.
pub fn embed_point(
    sub: &Subproblem,
    coeffs: &SurrogateCoeffs,
    channel: &ChannelRealization,
    w: &BeamformerSet,
    alpha: Option<AlphaSplit>,
    objective: &ObjectiveMode,
) -> Vec<f64> {
    let p = &sub.problem;
    let layout = &sub.layout;
    let scale = layout.beam_scale;
    let mut x = vec![0.0; p.num_vars()];
    for (i, k) in channel.users() {
        for (wn, &(re, im)) in w.beam(i, k).iter().zip(&layout.beams[i][k]) {
            x[re.0] = wn.re / scale;
            x[im.0] = wn.im / scale;
        }
    }
    if let (Some(vars), Some(a)) = (layout.alpha, alpha) {
        x[vars[0].0] = a.alpha1;
        x[vars[1].0] = a.alpha2;
    }
    let mut level = f64::INFINITY;
    for (i, k) in channel.users() {
        let uc = coeffs.user(i, k);
        let xr = crate::rates::inner(channel.h(i, k), w.beam(i, k)).re;
        let y = crate::rates::interference_plus_noise(channel, w, i, k, coeffs.mode);
        let s = (2.0 * xr - uc.x) / uc.x;
        let v = y / uc.y / s;
        x[layout.epigraph[i][k].0] = v;
        if let ObjectiveMode::MinRatio { targets } = objective {
            if targets[i][k] > 0.0 {
                let t = alpha.map_or(1.0, |a| a.get(i));
                let rate = uc.a - uc.b * uc.y / (uc.x * uc.x) * v - uc.c * t;
                level = level.min(rate / targets[i][k]);
            }
        }
    }
    if let Some(l) = layout.level {
        x[l.0] = if level.is_finite() { level } else { 0.0 };
    }
    for (j, name) in p.var_names.iter().enumerate() {
        match name.as_str() {
            "u[0]" => x[j] = alpha.map_or(0.0, |a| 1.0 / a.alpha1),
            "u[1]" => x[j] = alpha.map_or(0.0, |a| 1.0 / a.alpha2),
            "power[0]" => {
                x[j] = match alpha {
                    Some(_) => w.zone_energy(0) / scale / scale,
                    None => (w.zone_energy(0) + w.zone_energy(1)) / scale / scale,
                }
            }
            "power[1]" => x[j] = alpha.map_or(0.0, |a| w.zone_energy(1) / scale / scale / a.alpha2),
            _ => {}
        }
    }
    x
}
