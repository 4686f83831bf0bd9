//! Benchmarks of the hot paths: the pencil SVD partition, one conic
//! subproblem solve, a full two-stage run, and the grid oracle.

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use strad::{
    conic, oracle, AffineFamily, NormKind, PencilKind, RadiusProblem, SolverConfig,
    StructureMap,
};

fn stability_problem() -> RadiusProblem {
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[
            79.0, 20.0, -30.0, -20.0, //
            -41.0, -12.0, 17.0, 13.0, //
            167.0, 40.0, -60.0, -38.0, //
            33.5, 9.0, -14.5, -11.0,
        ],
    );
    let e = DMatrix::from_row_slice(
        4,
        2,
        &[0.2190, 0.9347, 0.0470, 0.3835, 0.6789, 0.5194, 0.6793, 0.8310],
    );
    let h = DMatrix::from_row_slice(
        2,
        4,
        &[0.0346, 0.5297, 0.0077, 0.0668, 0.0535, 0.6711, 0.3848, 0.4175],
    );
    let basis: Vec<DMatrix<f64>> = (0..2)
        .map(|i| {
            let mut g = DMatrix::zeros(2, 2);
            g[(i, i)] = 1.0;
            &e * g * &h
        })
        .collect();
    RadiusProblem::new(
        PencilKind::Stability,
        AffineFamily::new(a, basis).unwrap(),
        None,
        StructureMap::diagonal(2).unwrap(),
        NormKind::Frobenius,
    )
    .unwrap()
}

fn bench_svd_partition(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z = DMatrix::from_fn(8, 10, |_, _| rng.random_range(-1.0..1.0));
    c.bench_function("svd_partition_8x10", |b| {
        b.iter(|| strad::svd_partition(black_box(&z), 7).unwrap())
    });
}

fn bench_subproblem_solve(c: &mut Criterion) {
    let problem = stability_problem();
    let pencil = problem.pencil();
    let z = pencil.evaluate(&[0.3, -0.2], 0.0, 1.0).unwrap();
    let part = strad::svd_partition(&z, pencil.rank_bound() - 1).unwrap();
    c.bench_function("subproblem_solve_stability", |b| {
        b.iter(|| {
            let sub = conic::build_subproblem(
                pencil,
                problem.map(),
                problem.norm(),
                black_box(&part),
                5.0,
            )
            .unwrap();
            sub.program.solve(&Default::default()).unwrap()
        })
    });
}

fn bench_full_run(c: &mut Criterion) {
    let problem = stability_problem();
    let config = SolverConfig::default();
    c.bench_function("two_stage_run_stability", |b| {
        b.iter(|| problem.run_trial(black_box(&config), 0).unwrap())
    });
}

fn bench_grid_oracle(c: &mut Criterion) {
    let problem = stability_problem();
    c.bench_function("grid_oracle_21x21", |b| {
        b.iter(|| {
            oracle::rssr_grid_oracle(
                problem.state_family(),
                problem.map(),
                NormKind::Frobenius,
                black_box(&[(-0.6, 0.6), (-0.6, 0.6)]),
                21,
            )
            .unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_svd_partition, bench_subproblem_solve, bench_full_run, bench_grid_oracle
}
criterion_main!(benches);
