#![allow(dead_code)]

use ftbeam::{sample_scenario, ChannelRealization, SystemConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Table I scenario at the given power and QoS.
pub fn table_config(pmax_dbm: f64, rbar_bits: f64) -> SystemConfig {
    SystemConfig {
        pmax_dbm,
        rbar_bits,
        ..SystemConfig::default()
    }
}

pub fn small_config(nt: usize, k: usize, pmax_dbm: f64, rbar_bits: f64) -> SystemConfig {
    SystemConfig {
        num_antennas: nt,
        users_per_zone: k,
        ..table_config(pmax_dbm, rbar_bits)
    }
}

pub fn scenario(seed: u64, cfg: &SystemConfig) -> ChannelRealization {
    sample_scenario(seed, cfg).expect("valid config")
}

/// Random channel with unit-variance entries and unit noise.
pub fn unit_channel(seed: u64, nt: usize, k: usize) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zone = || -> Vec<Vec<Complex64>> {
        (0..k)
            .map(|_| (0..nt).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect()
    };
    let z0 = zone();
    let z1 = zone();
    ChannelRealization::from_vectors([z0, z1], 1.0).unwrap()
}

/// Best sum throughput (nats) for one user per zone, by exhaustive search.
///
/// With a single user in each zone matched filtering is optimal, so the
/// problem reduces to the time split and the energy split, both searched on
/// a grid of the given step. Returns `None` when no grid point meets the QoS target.
pub fn brute_force_single_user(ch: &ChannelRealization, pmax: f64, qos_nats: f64, step: f64) -> Option<f64> {
    let gain = |i: usize| ch.h(i, 0).iter().map(|z| z.norm_sqr()).sum::<f64>() / ch.sigma2();
    let (g1, g2) = (gain(0), gain(1));
    let n = (1.0 / step).round() as usize;
    let mut best: Option<f64> = None;
    for a in 1..n {
        let t1 = a as f64 * step;
        let t2 = 1.0 - t1;
        for b in 0..=n {
            let f = b as f64 * step;
            let r1 = t1 * (1.0 + g1 * f * pmax / t1).ln();
            let r2 = t2 * (1.0 + g2 * (1.0 - f) * pmax / t2).ln();
            if r1 >= qos_nats && r2 >= qos_nats {
                let s = r1 + r2;
                if best.map_or(true, |v| s > v) {
                    best = Some(s);
                }
            }
        }
    }
    best
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn herm_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Least total power meeting `SINR_k >= gamma` for every user of one
/// interference group, or `None` when the targets are unreachable.
///
/// Uses the uplink-downlink duality fixed point and then recovers downlink
/// powers for the dual beams, so a returned value is always achievable.
pub fn min_power_for_sinr(h: &[Vec<Complex64>], gamma: f64, sigma2: f64) -> Option<f64> {
    let k = h.len();
    if k == 0 {
        return Some(0.0);
    }
    let n = h[0].len();
    let hs: Vec<Vec<Complex64>> = h
        .iter()
        .map(|v| v.iter().map(|z| z / sigma2.sqrt()).collect())
        .collect();
    let cov = |lam: &[f64]| -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1.0;
        }
        for (l, v) in lam.iter().zip(&hs) {
            for (r, row) in m.iter_mut().enumerate() {
                for (c, e) in row.iter_mut().enumerate() {
                    *e += v[r] * v[c].conj() * *l;
                }
            }
        }
        m
    };
    let mut lam = vec![1e-3; k];
    let mut converged = false;
    for _ in 0..2000 {
        let m = cov(&lam);
        let mut next = Vec::with_capacity(k);
        for v in &hs {
            let x = solve_complex(m.clone(), v.clone())?;
            next.push(1.0 / ((1.0 + 1.0 / gamma) * herm_dot(v, &x).re));
        }
        if next.iter().sum::<f64>() > 1e12 {
            return None;
        }
        let change = next.iter().zip(&lam).map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max);
        lam = next;
        if change < 1e-11 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let m = cov(&lam);
    let beams: Vec<Vec<Complex64>> = hs
        .iter()
        .map(|v| {
            let x = solve_complex(m.clone(), v.clone()).expect("nonsingular");
            let norm = herm_dot(&x, &x).re.sqrt();
            x.into_iter().map(|z| z / norm).collect()
        })
        .collect();
    let gain = |a: usize, b: usize| herm_dot(&hs[a], &beams[b]).norm_sqr();
    let mat: Vec<Vec<Complex64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| Complex64::new(if a == b { gain(a, a) / gamma } else { -gain(a, b) }, 0.0))
                .collect()
        })
        .collect();
    let p = solve_complex(mat, vec![Complex64::new(1.0, 0.0); k])?;
    if p.iter().any(|z| z.re < 0.0) {
        return None;
    }
    Some(p.iter().map(|z| z.re).sum())
}

/// Least time-weighted energy (W) for every user to reach `qos_nats` under
/// fractional time, minimized over `tau1` on a grid of step 0.01.
pub fn ft_min_energy(ch: &ChannelRealization, qos_nats: f64) -> Option<f64> {
    let zone = |i: usize| -> Vec<Vec<Complex64>> { ch.zone(i).iter().map(|u| u.h.clone()).collect() };
    let (z0, z1) = (zone(0), zone(1));
    (1..100)
        .filter_map(|a| {
            let t1 = a as f64 * 0.01;
            let e0 = min_power_for_sinr(&z0, (qos_nats / t1).exp_m1(), ch.sigma2())?;
            let e1 = min_power_for_sinr(&z1, (qos_nats / (1.0 - t1)).exp_m1(), ch.sigma2())?;
            Some(t1 * e0 + (1.0 - t1) * e1)
        })
        .min_by(f64::total_cmp)
}

/// Least total power for every user to reach `qos_nats` when all share the slot.
pub fn conventional_min_power(ch: &ChannelRealization, qos_nats: f64) -> Option<f64> {
    let all: Vec<Vec<Complex64>> = ch.users().map(|(i, k)| ch.h(i, k).to_vec()).collect();
    min_power_for_sinr(&all, qos_nats.exp_m1(), ch.sigma2())
}
