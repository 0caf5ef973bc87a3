use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftbeam::conic;
use ftbeam::rates::RateMode;
use ftbeam::sca::{first_subproblem, maxmin_solve, sca_solve};
use ftbeam_bench::{config, scenarios};

fn full_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for rbar in [0.0, 1.0] {
        let cfg = config(30.0, rbar);
        let chans = scenarios(&cfg, 4);
        group.bench_with_input(BenchmarkId::new("ft", rbar), &chans, |b, chans| {
            b.iter(|| chans.iter().map(|ch| sca_solve(ch, &cfg).map(|s| s.objective).unwrap_or(0.0)).sum::<f64>())
        });
        group.bench_with_input(BenchmarkId::new("maxmin-ft", rbar), &chans, |b, chans| {
            b.iter(|| chans.iter().map(|ch| maxmin_solve(ch, &cfg).map(|s| s.objective).unwrap_or(0.0)).sum::<f64>())
        });
    }
    group.finish();
}

// one interior-point solve of a full-size subproblem
fn subproblem(c: &mut Criterion) {
    let cfg = config(30.0, 1.0);
    let ch = &scenarios(&cfg, 1)[0];
    let mut group = c.benchmark_group("subproblem");
    for (name, mode) in [("ft", RateMode::FractionalTime), ("conventional-dl", RateMode::Conventional)] {
        let sub = first_subproblem(ch, &cfg, mode).expect("feasible scenario");
        group.bench_function(name, |b| b.iter(|| conic::solve(&sub.problem, cfg.solver.conic_tol).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, full_solves, subproblem);
criterion_main!(benches);
