use bcs2gp::crossover::crossover_scan;
use bcs2gp::gap::GapOptions;
use bcs2gp::gp::{ExternalFields, PeriodicField};
use bcs2gp::semiclassics::{BdgFamily, LatticeSpec};
use bcs2gp::twobody::{solve_ground_state, GridSpec, PotentialSpec};
use bcs2gp::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn floquet_family(c: &mut Criterion) {
    let v = PotentialSpec::gaussian(1, 8.0, 1.0);
    let bs = solve_ground_state(&v, &GridSpec::for_potential(&v)).unwrap();
    let psi = PeriodicField::real_trig_1d(1, 1.0, &[0.4], &[]).unwrap();
    let fields = ExternalFields::zero(1);
    let spec = LatticeSpec { h: 0.05, mu: -bs.binding_energy, n_modes: None, theta_samples: 16 };
    let mut group = c.benchmark_group("bdg_family");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| BdgFamily::build(black_box(&psi), &fields, &bs, &spec, exec).unwrap())
        });
    }
    group.finish();
}

fn crossover(c: &mut Criterion) {
    let v = PotentialSpec::gaussian(3, 4.0, 1.0);
    let bs = solve_ground_state(&v, &GridSpec::for_potential(&v)).unwrap();
    let hs = [0.4, 0.35, 0.3, 0.25];
    let opts = GapOptions::default();
    let mut group = c.benchmark_group("crossover_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| crossover_scan(&bs, black_box(1.0), &hs, &opts, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, floquet_family, crossover);
criterion_main!(benches);
