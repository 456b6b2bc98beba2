use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use unipulse::dynamics::{evolve_lindblad, evolve_state_stepper, evolve_unitary, LindbladParams};
use unipulse::protocols::sweep_single_pulse;
use unipulse::quantum::StateVector;
use unipulse_bench::*;

fn propagators(c: &mut Criterion) {
    let q = qubit_ramsey();
    let r = register_three_stage();
    c.bench_function("evolve_unitary/qubit", |b| b.iter(|| evolve_unitary(black_box(&q)).unwrap()));
    c.bench_function("evolve_unitary/register", |b| b.iter(|| evolve_unitary(black_box(&r)).unwrap()));

    let dt = 0.01 / q.max_hamiltonian_norm();
    let psi = StateVector::ground();
    c.bench_function("stepper/qubit", |b| b.iter(|| evolve_state_stepper(black_box(&q), &psi, dt).unwrap()));

    let lp = LindbladParams::new(0.3, 0.6).unwrap();
    let rho = psi.projector();
    c.bench_function("lindblad/qubit", |b| b.iter(|| evolve_lindblad(black_box(&q), &rho, &lp, 0.05).unwrap()));
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep_single_pulse");
    for n in [16, 64] {
        let spec = single_sweep(n);
        g.bench_with_input(BenchmarkId::from_parameter(n * n), &spec, |b, s| b.iter(|| sweep_single_pulse(s).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, propagators, sweeps);
criterion_main!(benches);
