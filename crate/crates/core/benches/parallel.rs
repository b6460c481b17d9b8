use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftinv_core::invariance::check_shift_invariance;
use shiftinv_core::{
    build_j_map, par, verify_theorem_pipeline, LaurentMatrix, LaurentPoly, ShiftCondition,
    SpanSubspace, TaylorPoly, Tolerances, C64,
};

fn random_span(rng: &mut ChaCha8Rng, cap: usize, dim: usize) -> SpanSubspace<TaylorPoly> {
    let gens = (0..dim)
        .map(|_| {
            let deg = rng.random_range(0..cap / 2);
            let c: Vec<C64> = (0..=deg)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            TaylorPoly::new(c, cap).unwrap()
        })
        .collect();
    SpanSubspace::orthonormalize(gens, 1e-9).unwrap()
}

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn bench_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spaces: Vec<_> = (0..48).map(|_| random_span(&mut rng, 96, 24)).collect();
    let mut group = c.benchmark_group("invariance_batch");
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| {
                let out = par::map(&spaces, |m| check_shift_invariance(m, 3, false, 1e-8));
                black_box(out)
            })
        });
    }
    group.finish();
    par::set_parallel(true);
}

fn bench_pipeline(c: &mut Criterion) {
    let z = |e| LaurentPoly::monomial(e, C64::new(1.0, 0.0));
    let theta = LaurentMatrix::diag(vec![z(0), z(1), z(1)]);
    let conds = [
        ShiftCondition { gamma: 1, k: 1 },
        ShiftCondition { gamma: 2, k: 1 },
    ];
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("theorem_pipeline");
    group.sample_size(10);
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| black_box(verify_theorem_pipeline(&theta, 3, &conds, 95, &tol).unwrap()))
        });
    }
    group.finish();
    par::set_parallel(true);
}

fn bench_j_map(c: &mut Criterion) {
    let cap = 127;
    let gens = (0..40)
        .map(|j| {
            TaylorPoly::from_real(&[1.0, 2.0, -1.0], cap)
                .unwrap()
                .shift_pow(3 * j)
                .unwrap()
        })
        .collect();
    let space = SpanSubspace::orthonormalize(gens, 1e-9).unwrap();
    let mut group = c.benchmark_group("j_map");
    group.sample_size(10);
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| black_box(build_j_map(&space, 3, 1e-8).unwrap()))
        });
    }
    group.finish();
    par::set_parallel(true);
}

criterion_group!(benches, bench_batch, bench_pipeline, bench_j_map);
criterion_main!(benches);
