use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use whkernel::dist::ServiceDistribution;
use whkernel::exec::ExecMode;
use whkernel::simulate::{simulate_bankruptcy, simulate_workload, RateSpec, SimConfig};

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut m = vec![("sequential", ExecMode::Sequential)];
    if ExecMode::is_parallel_available() {
        m.push(("parallel", ExecMode::Parallel));
    }
    m
}

fn workload(c: &mut Criterion) {
    let dist = ServiceDistribution::erlang(2, 4.0).unwrap();
    let mut group = c.benchmark_group("simulate_workload");
    group.sample_size(10);
    for (name, exec) in modes() {
        let cfg = SimConfig { replications: 16, time: 2e4, burn_in: 50.0, exec, ..SimConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| simulate_workload(1.0, &dist, RateSpec::Constant { omega: 1.0 }, black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn bankruptcy(c: &mut Criterion) {
    let dist = ServiceDistribution::exponential(1.0).unwrap();
    let mut group = c.benchmark_group("simulate_bankruptcy");
    group.sample_size(10);
    for (name, exec) in modes() {
        let cfg = SimConfig { replications: 16, paths: 20_000, exec, ..SimConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| simulate_bankruptcy(1.0, 1.5, RateSpec::Constant { omega: 1.0 }, &dist, 0.0, black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, workload, bankruptcy);
criterion_main!(benches);
