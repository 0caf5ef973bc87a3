mod common;

use common::{brute_force_single_user, c, scenario, small_config, table_config};
use ftbeam::baselines::conventional_dl_solve;
use ftbeam::rates::{check_conventional_feasibility, check_feasibility};
use ftbeam::sca::{find_initial_point, maxmin_solve, sca_solve, from_alpha, Status};
use ftbeam::{ChannelRealization, Error};

#[test]
fn matches_exhaustive_search_for_one_user_per_zone() {
    for (pmax, rbar) in [(30.0, 0.0), (20.0, 1.0)] {
        let cfg = small_config(2, 1, pmax, rbar);
        for seed in 0..4 {
            let ch = scenario(seed, &cfg);
            let sol = sca_solve(&ch, &cfg).unwrap();
            let oracle = brute_force_single_user(&ch, cfg.pmax_watts(), cfg.qos_nats(), 1e-3);
            match oracle {
                Some(best) => {
                    assert!(sol.status.is_feasible(), "seed {seed}: {:?}", sol.status);
                    let gap = (sol.sum_throughput - best).abs() / best;
                    assert!(gap <= 0.02, "seed {seed}: {} vs {best}", sol.sum_throughput);
                }
                None => assert_eq!(sol.status, Status::InfeasibleInit),
            }
        }
    }
}

#[test]
fn trace_is_nondecreasing_and_final_point_feasible() {
    let cfg = table_config(30.0, 1.0);
    for seed in 0..3 {
        let ch = scenario(seed, &cfg);
        let sol = sca_solve(&ch, &cfg).unwrap();
        assert_eq!(sol.status, Status::Converged);
        assert!(sol.trace.windows(2).all(|p| p[1] >= p[0] - 1e-6), "{:?}", sol.trace);
        let tau = sol.time_split.unwrap();
        let report = check_feasibility(&ch, &sol.beamformers, tau, &cfg);
        assert!(report.feasible, "{report:?}");
        assert_eq!(sol.trace.len(), sol.iterations + 1);
        assert!((sol.trace.last().unwrap() - sol.sum_throughput).abs() < 1e-12);
    }
}

#[test]
fn zero_target_needs_no_feasibility_phase() {
    let cfg = table_config(30.0, 0.0);
    let ch = scenario(1, &cfg);
    let init = find_initial_point(&ch, &cfg).unwrap();
    assert_eq!(init.iterations, 0);
    let report = check_feasibility(&ch, &init.beams, from_alpha(init.alpha), &cfg);
    assert!(report.feasible);
}

#[test]
fn feasibility_phase_reaches_the_target() {
    let cfg = table_config(30.0, 1.0);
    let ch = scenario(2, &cfg);
    let init = find_initial_point(&ch, &cfg).unwrap();
    assert!(init.iterations >= 1);
    let report = check_feasibility(&ch, &init.beams, from_alpha(init.alpha), &cfg);
    assert!(report.feasible, "{report:?}");
    assert!(*init.ratio_trace.last().unwrap() >= 1.0);
}

#[test]
fn unreachable_target_reports_infeasible_init() {
    let cfg = table_config(-20.0, 3.0);
    let ch = scenario(4, &cfg);
    match find_initial_point(&ch, &cfg) {
        Err(Error::InfeasibleInit { best_ratio, .. }) => assert!(best_ratio < 1.0),
        other => panic!("expected infeasible init, got {other:?}"),
    }
    let sol = sca_solve(&ch, &cfg).unwrap();
    assert_eq!(sol.status, Status::InfeasibleInit);
    assert!(!sol.status.is_feasible());
}

#[test]
fn maxmin_balances_symmetric_users() {
    let cfg = small_config(2, 1, 10.0, 0.0);
    let h = vec![c(1e-6, 2e-7), c(-4e-7, 8e-7)];
    let ch = ChannelRealization::from_vectors([vec![h.clone()], vec![h]], 4e-14).unwrap();
    let sol = maxmin_solve(&ch, &cfg).unwrap();
    assert!(sol.status.is_feasible());
    let r = &sol.rates_nats;
    let (a, b) = (r[0][0], r[1][0]);
    assert!((a - b).abs() <= 0.01 * a.max(b), "{a} vs {b}");
    assert!(sol.trace.windows(2).all(|p| p[1] >= p[0] - 1e-6));
}

#[test]
fn maxmin_never_loses_to_sum_rate_on_the_worst_user() {
    let cfg = table_config(30.0, 0.0);
    let ch = scenario(7, &cfg);
    let mm = maxmin_solve(&ch, &cfg).unwrap();
    let sr = sca_solve(&ch, &cfg).unwrap();
    assert!(mm.min_throughput >= sr.min_throughput * 0.99);
    assert!(check_feasibility(&ch, &mm.beamformers, mm.time_split.unwrap(), &cfg).feasible);
}

#[test]
fn single_user_gets_the_same_rate_either_way() {
    let cfg = small_config(3, 1, 20.0, 0.0);
    let h = vec![c(3e-7, 1e-7), c(-2e-7, 5e-7), c(1e-7, -1e-7)];
    let ch = ChannelRealization::from_vectors([vec![h], vec![]], 4e-14).unwrap();
    let ft = sca_solve(&ch, &cfg).unwrap();
    let dl = conventional_dl_solve(&ch, &cfg).unwrap();
    assert!(ft.status.is_feasible() && dl.status.is_feasible());
    let gap = (ft.sum_throughput - dl.sum_throughput).abs() / dl.sum_throughput;
    assert!(gap < 1e-3, "{} vs {}", ft.sum_throughput, dl.sum_throughput);
}

#[test]
fn conventional_solution_is_feasible() {
    let cfg = table_config(30.0, 0.5);
    for seed in 0..3 {
        let ch = scenario(seed, &cfg);
        let dl = conventional_dl_solve(&ch, &cfg).unwrap();
        assert!(dl.time_split.is_none());
        if dl.status.is_feasible() {
            assert!(check_conventional_feasibility(&ch, &dl.beamformers, &cfg).feasible);
        }
    }
}

// Paired over the same draws, no QoS target.
#[test]
fn ft_matches_or_beats_conventional_on_average() {
    let cfg = table_config(30.0, 0.0);
    let (mut ft, mut dl) = (0.0, 0.0);
    let n = 50;
    for seed in 0..n {
        let ch = scenario(seed, &cfg);
        let a = sca_solve(&ch, &cfg).unwrap();
        let b = conventional_dl_solve(&ch, &cfg).unwrap();
        assert!(a.status.is_feasible() && b.status.is_feasible());
        ft += a.sum_throughput;
        dl += b.sum_throughput;
    }
    let (ft, dl) = (ft / n as f64, dl / n as f64);
    assert!(ft >= 0.99 * dl, "FT {ft} vs DL {dl}");
}

// The min-energy oracle is exact for fixed tau, so away from the boundary the
// feasibility phase must agree with it in both directions.
#[test]
fn feasibility_phase_agrees_with_min_energy_oracle() {
    let mut checked = 0;
    for pmax in [10.0, 14.0] {
        let cfg = table_config(pmax, 1.0);
        for seed in 0..8 {
            let ch = scenario(seed, &cfg);
            let ratio = common::ft_min_energy(&ch, cfg.qos_nats()).map_or(f64::INFINITY, |e| e / cfg.pmax_watts());
            if (ratio - 1.0).abs() < 0.05 {
                continue;
            }
            let sol = sca_solve(&ch, &cfg).unwrap();
            assert_eq!(sol.status.is_feasible(), ratio < 1.0, "P {pmax} seed {seed}: E/P {ratio}, {:?}", sol.status);
            let dl = conventional_dl_solve(&ch, &cfg).unwrap();
            let dl_ratio = common::conventional_min_power(&ch, cfg.qos_nats()).map_or(f64::INFINITY, |e| e / cfg.pmax_watts());
            if (dl_ratio - 1.0).abs() >= 0.05 {
                assert_eq!(dl.status.is_feasible(), dl_ratio < 1.0, "DL P {pmax} seed {seed}: {dl_ratio}");
            }
            checked += 1;
        }
    }
    assert!(checked >= 8);
}

#[test]
fn min_energy_oracle_matches_closed_form_for_one_user() {
    // a single user needs gamma * sigma2 / ||h||^2
    let h = vec![vec![c(3.0, 4.0), c(0.0, 0.0)]];
    let p = common::min_power_for_sinr(&h, 2.0, 0.5).unwrap();
    assert!((p - 2.0 * 0.5 / 25.0).abs() < 1e-12);
}
