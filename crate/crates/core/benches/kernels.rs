use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dahsim_core::engine::{PauliOperator, StateVector};
use dahsim_core::noise::trajectory_average;
use dahsim_core::par::ExecPolicy;
use dahsim_core::pauli::PauliSum;
use dahsim_core::zeromode::{autocorr_sampled, AutocorrOptions, BulkBasis, ZeroModeSpec};
use dahsim_core::Complex64;

const POLICIES: [(&str, ExecPolicy); 2] = [
    ("sequential", ExecPolicy::Sequential),
    ("parallel", ExecPolicy::Parallel),
];

fn chain(l: usize) -> (PauliSum, PauliSum) {
    let s = ZeroModeSpec::new(l, 1.0, 0.5, 0.2).unwrap();
    let a = PauliSum::from(s.edge_modes().unwrap()[2].clone());
    (a, s.hamiltonian().unwrap())
}

fn matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for l in [14, 18] {
        let (_, h) = chain(l);
        let psi = StateVector::product(&vec![[Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]; l]).unwrap();
        for (name, policy) in POLICIES {
            let op = PauliOperator::new(&h).unwrap().with_parallel(policy.is_parallel());
            let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
            group.bench_with_input(BenchmarkId::new(name, l), &l, |b, _| {
                b.iter(|| op.apply(black_box(psi.amplitudes()), &mut out))
            });
        }
    }
    group.finish();
}

fn sampled_autocorr(c: &mut Criterion) {
    let mut group = c.benchmark_group("autocorr_sampled");
    group.sample_size(10);
    let (a, h) = chain(10);
    let times = [0.0, 1.0, 2.0, 4.0];
    for (name, policy) in POLICIES {
        let opts = AutocorrOptions { tol: 1e-8, policy };
        group.bench_function(name, |b| {
            b.iter(|| autocorr_sampled(&a, &h, &times, 32, BulkBasis::X, 7, &opts).unwrap())
        });
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectory_average");
    for (name, policy) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| {
                trajectory_average(256, policy, |k| {
                    Ok((0..64).map(|s| ((k * 64 + s) as f64).cos()).collect())
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, matvec, sampled_autocorr, trajectories);
criterion_main!(benches);
