use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebdist::jcn::shared_quantizations;
use reebdist::synthetic::{self, random_reeb_graph};
use reebdist::*;
use reebdist_bench::bivariate_sphere;

fn persistence(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graphs: Vec<ReebGraph> = (0..64).map(|_| morseify(&random_reeb_graph(&mut rng, 60, 20), 1e-3)).collect();
    c.bench_function("persistence/three diagrams x64", |b| {
        b.iter(|| {
            for g in &graphs {
                compute_pd0(g).unwrap();
                compute_pd0_neg(g).unwrap();
                compute_exdg1(g).unwrap();
            }
        })
    });
}

fn bottleneck_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("bottleneck");
    for n in [10, 50, 200] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut side = || {
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let b: f64 = rng.gen_range(0.0..10.0);
                    (b, b + rng.gen_range(0.0..3.0))
                })
                .collect();
            PersistenceDiagram::from_pairs(DiagramKind::Pd0, &pairs)
        };
        let (x, y) = (side(), side());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| bottleneck(&x, &y).unwrap()));
    }
    group.finish();
}

fn jcn_and_mdrg(c: &mut Criterion) {
    let mut group = c.benchmark_group("jcn+mdrg");
    group.sample_size(10);
    let mesh = bivariate_sphere(3, 7);
    for q in [8, 16, 32] {
        let quants = reebdist::jcn::own_quantizations(&mesh, &[q]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &q, |b, _| {
            b.iter(|| build_mdrg(&build_jcn(&mesh, &quants, FragmentMode::Clip).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn distance(c: &mut Criterion) {
    let (a, b) = (bivariate_sphere(3, 1), bivariate_sphere(3, 2));
    let quants = shared_quantizations(&a, &b, &[16]).unwrap();
    let ma = build_mdrg(&build_jcn(&a, &quants, FragmentMode::Clip).unwrap()).unwrap();
    let mb = build_mdrg(&build_jcn(&b, &quants, FragmentMode::Clip).unwrap()).unwrap();
    let mut group = c.benchmark_group("total distance q16");
    for objective in [BijectionObjective::Minimax, BijectionObjective::Hungarian] {
        group.bench_function(format!("{objective:?}"), |bench| {
            bench.iter(|| total_distance(&ma, &mb, Weights::default(), objective).unwrap())
        });
    }
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("descriptors E=12");
    group.sample_size(10);
    for level in [2, 3] {
        let mesh = synthetic::icosphere(level);
        group.bench_with_input(BenchmarkId::from_parameter(mesh.vertex_count()), &level, |b, _| {
            b.iter(|| mesh_descriptors(&mesh, 12, LaplaceOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, persistence, bottleneck_distance, jcn_and_mdrg, distance, eigen);
criterion_main!(benches);
