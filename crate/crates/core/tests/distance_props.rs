use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebdist::jcn::own_quantizations;
use reebdist::quantize::{value_range, Quantization};
use reebdist::synthetic;
use reebdist::{
    build_jcn, build_mdrg, compare_fields, generalized_distance, shape_distance, total_distance, BijectionObjective,
    DistanceConfig, FragmentMode, Mdrg, MultiFieldMesh, Weights,
};

fn config(q: usize) -> DistanceConfig {
    DistanceConfig {
        slabs: vec![q],
        ..Default::default()
    }
}

fn random_pair_field(mesh: &MultiFieldMesh, rng: &mut ChaCha8Rng) -> MultiFieldMesh {
    let f = synthetic::random_smooth_field(mesh, rng, 3, 2.5);
    let g = synthetic::random_smooth_field(mesh, rng, 3, 2.5);
    mesh.without_fields().with_field("f1", f).unwrap().with_field("f2", g).unwrap()
}

fn mdrg_on(mesh: &MultiFieldMesh, quants: &[Quantization]) -> Mdrg {
    build_mdrg(&build_jcn(mesh, quants, FragmentMode::Clip).unwrap()).unwrap()
}

#[test]
fn pseudo_metric_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mesh = synthetic::icosphere(2);
    for _ in 0..8 {
        let a = random_pair_field(&mesh, &mut rng);
        let b = random_pair_field(&mesh, &mut rng);
        let ab = compare_fields(&a, &b, &config(8)).unwrap();
        let ba = compare_fields(&b, &a, &config(8)).unwrap();
        assert!(ab.total >= 0.0);
        assert_eq!(ab.total, ba.total);
        assert!((ab.total - ab.recombine()).abs() <= 1e-12);
        assert_eq!(compare_fields(&a, &a, &config(8)).unwrap().total, 0.0);
    }
}

#[test]
fn triangle_inequality_on_a_common_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mesh = synthetic::icosphere(2);
    for _ in 0..6 {
        let ms: Vec<MultiFieldMesh> = (0..3).map(|_| random_pair_field(&mesh, &mut rng)).collect();
        let quants: Vec<Quantization> = (0..2)
            .map(|k| {
                let cols: Vec<&[f64]> = ms.iter().map(|m| m.fields()[k].as_slice()).collect();
                Quantization::covering_values(&cols, 8).unwrap()
            })
            .collect();
        let g: Vec<Mdrg> = ms.iter().map(|m| mdrg_on(m, &quants)).collect();
        let d = |i: usize, j: usize| {
            total_distance(&g[i], &g[j], Weights::default(), BijectionObjective::Minimax)
                .unwrap()
                .total
        };
        assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }
}

#[test]
fn stability_bound_with_slack() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mesh = synthetic::icosphere(2);
    for _ in 0..8 {
        let a = random_pair_field(&mesh, &mut rng);
        let delta: f64 = rng.gen_range(0.0..0.3);
        let noisy: Vec<Vec<f64>> = a
            .fields()
            .iter()
            .map(|f| f.iter().map(|v| v + rng.gen_range(-delta..=delta)).collect())
            .collect();
        let b = mesh
            .without_fields()
            .with_field("f1", noisy[0].clone())
            .unwrap()
            .with_field("f2", noisy[1].clone())
            .unwrap();
        let r = compare_fields(&a, &b, &config(8)).unwrap();
        let sup = a.fields()[0].iter().zip(&noisy[0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let amp = |f: &[f64]| {
            let (lo, hi) = value_range(f).unwrap();
            hi - lo
        };
        let width = reebdist::jcn::shared_quantizations(&a, &b, &[8])
            .unwrap()
            .iter()
            .map(|q| q.width())
            .fold(0.0, f64::max);
        let bound = 3.0 * sup + 0.5 * amp(&a.fields()[1]).max(amp(&noisy[1])) + 2.0 * width;
        assert!(r.total <= bound, "{} > {}", r.total, bound);
    }
}

#[test]
fn generalized_reduces_to_total_and_vanishes_on_self() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mesh = synthetic::icosphere(2);
    let a = random_pair_field(&mesh, &mut rng);
    let b = random_pair_field(&mesh, &mut rng);
    let quants = reebdist::jcn::shared_quantizations(&a, &b, &[6]).unwrap();
    let (ma, mb) = (mdrg_on(&a, &quants), mdrg_on(&b, &quants));
    let w = Weights::default();
    let t = total_distance(&ma, &mb, w, BijectionObjective::Minimax).unwrap();
    let gd = generalized_distance(&ma, &mb, w, BijectionObjective::Minimax).unwrap();
    assert_eq!(t.total, gd.total);

    let grid = reebdist::RegularGrid::new([4, 4, 4], [0.5; 3]).unwrap();
    let n = grid.point_count();
    let f = |k: f64| (0..n).map(|i| (i as f64 * k).cos()).collect::<Vec<_>>();
    let grid = grid.with_field("a", f(0.3)).unwrap().with_field("b", f(0.8)).unwrap().with_field("c", f(1.9)).unwrap();
    let tets = reebdist::grid_to_mesh(&grid).unwrap();
    let m3 = mdrg_on(&tets, &own_quantizations(&tets, &[3]).unwrap());
    assert_eq!(generalized_distance(&m3, &m3, w, BijectionObjective::Minimax).unwrap().total, 0.0);
    assert!(generalized_distance(&ma, &m3, w, BijectionObjective::Minimax).is_err());
}

#[test]
fn minimax_never_exceeds_hungarian() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mesh = synthetic::icosphere(2);
    for _ in 0..4 {
        let a = random_pair_field(&mesh, &mut rng);
        let b = random_pair_field(&mesh, &mut rng);
        let mut c = config(6);
        let mm = compare_fields(&a, &b, &c).unwrap();
        c.bijection = BijectionObjective::Hungarian;
        let hu = compare_fields(&a, &b, &c).unwrap();
        for (x, y) in mm.parts.iter().zip(&hu.parts) {
            for (lx, ly) in x.levels.iter().zip(&y.levels) {
                for (bx, by) in lx.bins.iter().zip(&ly.bins) {
                    assert!(bx.cost <= by.cost);
                }
            }
        }
    }
}

#[test]
fn shape_distance_terms() {
    let mesh = synthetic::torus(16, 8, 1.0, 0.4);
    let other = synthetic::icosphere(2);
    let da = reebdist::mesh_descriptors(&mesh, 4, Default::default()).unwrap();
    let db = reebdist::mesh_descriptors(&other, 4, Default::default()).unwrap();
    let c = config(6);
    let same = shape_distance(&mesh, &da, &mesh, &da, 3, &c).unwrap();
    assert_eq!(same.total, 0.0);
    let two = shape_distance(&mesh, &da, &other, &db, 2, &c).unwrap();
    assert_eq!(two.terms.len(), 1);
    let three = shape_distance(&mesh, &da, &other, &db, 3, &c).unwrap();
    assert_eq!(three.terms.len(), 2);
    assert_eq!(three.terms[0], two.terms[0]);
    assert_eq!(three.total, three.terms[0] + three.terms[1]);
    assert!(shape_distance(&mesh, &da, &other, &db, 5, &c).is_err());
}
