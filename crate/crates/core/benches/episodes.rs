//! Sequential versus rayon-parallel execution of episode batches.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wavefront::gridworld::{generate_world, EpisodeSpec};
use wavefront::model::{Mlp, DEFAULT_LAYERS};
use wavefront::rng::rng_for;
use wavefront::trainers::{collect_episode, evaluate_policy, PolicySpec};
use wavefront::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn episodes(n: u64) -> Vec<EpisodeSpec> {
    (0..n)
        .map(|s| EpisodeSpec::corners(generate_world("shifted_gaps", s, 64, 64).unwrap()).unwrap())
        .collect()
}

fn evaluation(c: &mut Criterion) {
    let specs = episodes(16);
    let mlp = Mlp::init(&DEFAULT_LAYERS, 0);
    let mut group = c.benchmark_group("evaluate_learned");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| evaluate_policy(&PolicySpec::Learned(&mlp), &specs, 2000, exec).unwrap())
        });
    }
    group.finish();
}

fn collection(c: &mut Criterion) {
    let specs = episodes(16);
    let mlp = Mlp::init(&DEFAULT_LAYERS, 0);
    let mut group = c.benchmark_group("collect_mixture");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(specs.len(), |j| {
                    let rng = rng_for(0, &[j as u64]);
                    collect_episode(&specs[j], Some(&mlp), 0.5, 50, 1100, false, rng).unwrap().points.len()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, evaluation, collection);
criterion_main!(benches);
