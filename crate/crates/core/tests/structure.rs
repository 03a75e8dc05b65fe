use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reebdist::jcn::own_quantizations;
use reebdist::synthetic::{self, random_reeb_graph};
use reebdist::{build_jcn, build_mdrg, morseify, FragmentMode, Mdrg, MultiFieldMesh};

fn bivariate(seed: u64, level: usize) -> MultiFieldMesh {
    let mesh = synthetic::icosphere(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    let g = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    mesh.with_field("f", f).unwrap().with_field("g", g).unwrap()
}

/// Member sets of the deepest level must cover every JCN node once.
fn assert_partition(m: &Mdrg, jcn_nodes: usize) {
    let leaves = m.level(m.level_count() - 1);
    let mut count = vec![0usize; jcn_nodes];
    for g in leaves {
        for node in g.graph.nodes() {
            for &j in &node.members {
                count[j] += 1;
            }
        }
    }
    assert!(count.iter().all(|&c| c == 1), "{count:?}");
}

#[test]
fn leaves_partition_the_jcn() {
    for seed in 0..6 {
        let mesh = bivariate(seed, 2);
        for q in [[3, 5], [8, 8]] {
            let jcn = build_jcn(&mesh, &own_quantizations(&mesh, &q).unwrap(), FragmentMode::Clip).unwrap();
            let m = build_mdrg(&jcn).unwrap();
            assert_partition(&m, jcn.node_count());
            // Children grouped by parent bin cover the whole second level.
            let grouped: usize = (0..q[0]).map(|c| m.children_in_bin(0, c).len()).sum();
            assert_eq!(grouped, m.level(1).len());
            for c in 0..q[0] {
                for &g in m.children_in_bin(0, c) {
                    assert_eq!(m.level(1)[g].parent_bin, Some(c));
                }
            }
        }
    }
}

#[test]
fn trivariate_partition_on_tetrahedra() {
    let grid = reebdist::RegularGrid::new([4, 4, 4], [0.5; 3]).unwrap();
    let n = grid.point_count();
    let f = |k: f64| (0..n).map(|i| (i as f64 * k).sin()).collect::<Vec<_>>();
    let grid = grid
        .with_field("a", f(0.37))
        .unwrap()
        .with_field("b", f(0.91))
        .unwrap()
        .with_field("c", f(1.7))
        .unwrap();
    let mesh = reebdist::grid_to_mesh(&grid).unwrap();
    let jcn = build_jcn(&mesh, &own_quantizations(&mesh, &[3]).unwrap(), FragmentMode::Clip).unwrap();
    let m = build_mdrg(&jcn).unwrap();
    assert_eq!(m.level_count(), 3);
    assert_partition(&m, jcn.node_count());
}

#[test]
fn duplicated_field_gives_single_node_children() {
    let mesh = synthetic::icosphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    let mesh = mesh.with_field("f", f.clone()).unwrap().with_field("g", f).unwrap();
    let jcn = build_jcn(&mesh, &own_quantizations(&mesh, &[6]).unwrap(), FragmentMode::Clip).unwrap();
    let m = build_mdrg(&jcn).unwrap();
    assert!(m.level(1).iter().all(|g| g.graph.node_count() == 1));
}

#[test]
fn constant_second_field_keeps_the_scalar_graph() {
    let mesh = synthetic::icosphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    let scalar = mesh.clone().with_field("f", f.clone()).unwrap();
    let pair = scalar.clone().with_field("g", vec![0.25; mesh.vertex_count()]).unwrap();
    let qs = own_quantizations(&scalar, &[7]).unwrap();
    let qp = own_quantizations(&pair, &[7]).unwrap();
    let js = build_jcn(&scalar, &qs, FragmentMode::Clip).unwrap();
    let jp = build_jcn(&pair, &qp, FragmentMode::Clip).unwrap();
    let ms = build_mdrg(&js).unwrap();
    let mp = build_mdrg(&jp).unwrap();
    assert_eq!(ms.level1().values(), mp.level1().values());
    assert_eq!(ms.level1().edges(), mp.level1().edges());
    assert_eq!(ms.level1().edges(), js.edges());
}

#[test]
fn double_torus_pair_has_two_loops() {
    let mesh = synthetic::double_torus(0.2);
    let x: Vec<f64> = mesh.vertices().iter().map(|p| p[0]).collect();
    let y: Vec<f64> = mesh.vertices().iter().map(|p| p[1]).collect();
    let mesh = mesh.with_field("x", x).unwrap().with_field("y", y).unwrap();
    let jcn = build_jcn(&mesh, &own_quantizations(&mesh, &[16, 5]).unwrap(), FragmentMode::Clip).unwrap();
    let m = build_mdrg(&jcn).unwrap();
    assert_eq!(m.level1().cycle_rank(), 2);
    assert_partition(&m, jcn.node_count());
}

#[test]
fn mdrg_is_deterministic() {
    let mesh = bivariate(1, 2);
    let q = own_quantizations(&mesh, &[5]).unwrap();
    let a = build_mdrg(&build_jcn(&mesh, &q, FragmentMode::Clip).unwrap()).unwrap();
    let b = build_mdrg(&build_jcn(&mesh, &q, FragmentMode::Clip).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
}

#[test]
fn morseify_preserves_betti_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let g = random_reeb_graph(&mut rng, 12, 5);
        let m = morseify(&g, 1e-3);
        assert!(m.is_morse());
        assert_eq!(m.cycle_rank(), g.cycle_rank());
        assert_eq!(m.components().1, g.components().1);
        assert_eq!(morseify(&m, 1e-3), m);
    }
}
