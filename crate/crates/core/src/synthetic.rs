//! Synthetic meshes, fields and graphs for tests, benchmarks and demos.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

use crate::mesh::{cross, dot, norm, sub, MultiFieldMesh, Point3};
use crate::reeb::ReebGraph;

/// Unit icosphere: the icosahedron subdivided `level` times, vertices pushed
/// to the sphere. Level 4 has 2562 vertices.
pub fn icosphere(level: usize) -> MultiFieldMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let unit = |p: Point3| {
        let n = norm(p);
        [p[0] / n, p[1] / n, p[2] / n]
    };
    for v in &mut vertices {
        *v = unit(*v);
    }
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoint.entry(key).or_insert_with(|| {
                    let (p, q) = (vertices[a], vertices[b]);
                    vertices.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    vertices.len() - 1
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push(mid);
        }
        faces = next;
    }
    let simplices = faces.iter().flat_map(|f| f.iter().copied()).collect();
    MultiFieldMesh::from_flat_unchecked(vertices, 2, simplices)
}

/// Torus of revolution around the z axis with `nu × nv` vertices.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> MultiFieldMesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = std::f64::consts::TAU * j as f64 / nv as f64;
            let r = major + minor * v.cos();
            vertices.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut simplices = Vec::with_capacity(nu * nv * 6);
    for i in 0..nu {
        for j in 0..nv {
            simplices.extend_from_slice(&[id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            simplices.extend_from_slice(&[id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    MultiFieldMesh::from_flat_unchecked(vertices, 2, simplices)
}

/// Triangulated `[0, 1]²` with `nx × ny` vertices in the plane `z = 0`.
pub fn plane(nx: usize, ny: usize) -> MultiFieldMesh {
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push([i as f64 / (nx - 1) as f64, j as f64 / (ny - 1) as f64, 0.0]);
        }
    }
    let mut simplices = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            simplices.extend_from_slice(&[a, a + 1, a + nx + 1, a, a + nx + 1, a + nx]);
        }
    }
    MultiFieldMesh::from_flat_unchecked(vertices, 2, simplices)
}

/// Both meshes side by side, fields dropped.
pub fn disjoint_union(a: &MultiFieldMesh, b: &MultiFieldMesh) -> MultiFieldMesh {
    let mut vertices = a.vertices().to_vec();
    vertices.extend_from_slice(b.vertices());
    let n = a.vertex_count();
    let mut simplices: Vec<usize> = a.simplices().flatten().copied().collect();
    simplices.extend(b.simplices().flatten().map(|&v| v + n));
    MultiFieldMesh::from_flat_unchecked(vertices, a.dimension(), simplices)
}

/// Surface of a signed distance function sampled on a Freudenthal grid over
/// the box `[lo, hi]` with cell size `h`, extracted by marching tetrahedra.
///
/// Grid samples too close to zero are nudged off the surface so no triangle
/// degenerates.
pub fn marching_tetrahedra(sdf: impl Fn(Point3) -> f64, lo: Point3, hi: Point3, h: f64) -> MultiFieldMesh {
    let dims: [usize; 3] = std::array::from_fn(|a| ((hi[a] - lo[a]) / h).ceil() as usize + 1);
    let index = |x: usize, y: usize, z: usize| x + dims[0] * (y + dims[1] * z);
    let pos = |x: usize, y: usize, z: usize| [lo[0] + x as f64 * h, lo[1] + y as f64 * h, lo[2] + z as f64 * h];
    let mut samples = vec![0.0; dims[0] * dims[1] * dims[2]];
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let mut s = sdf(pos(x, y, z));
                if s.abs() < 1e-3 * h {
                    s = if s < 0.0 { -1e-3 * h } else { 1e-3 * h };
                }
                samples[index(x, y, z)] = s;
            }
        }
    }

    let mut vertices: Vec<Point3> = Vec::new();
    let mut on_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut simplices = Vec::new();
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for z in 0..dims[2] - 1 {
        for y in 0..dims[1] - 1 {
            for x in 0..dims[0] - 1 {
                for order in orders {
                    let mut c = [x, y, z];
                    let mut tet = [(index(c[0], c[1], c[2]), pos(c[0], c[1], c[2])); 4];
                    for (k, &axis) in order.iter().enumerate() {
                        c[axis] += 1;
                        tet[k + 1] = (index(c[0], c[1], c[2]), pos(c[0], c[1], c[2]));
                    }
                    let inside: Vec<usize> = (0..4).filter(|&i| samples[tet[i].0] < 0.0).collect();
                    let outside: Vec<usize> = (0..4).filter(|&i| samples[tet[i].0] >= 0.0).collect();
                    let mut crossing = |a: usize, b: usize| -> usize {
                        let (ia, ib) = (tet[a].0, tet[b].0);
                        let key = (ia.min(ib), ia.max(ib));
                        *on_edge.entry(key).or_insert_with(|| {
                            let (sa, sb) = (samples[ia], samples[ib]);
                            let t = sa / (sa - sb);
                            let (pa, pb) = (tet[a].1, tet[b].1);
                            vertices.push(std::array::from_fn(|k| pa[k] + t * (pb[k] - pa[k])));
                            vertices.len() - 1
                        })
                    };
                    let mut tris: Vec<[usize; 3]> = Vec::new();
                    match (inside.len(), outside.len()) {
                        (1, 3) | (3, 1) => {
                            let (lone, rest) = if inside.len() == 1 { (inside[0], &outside) } else { (outside[0], &inside) };
                            tris.push([crossing(lone, rest[0]), crossing(lone, rest[1]), crossing(lone, rest[2])]);
                        }
                        (2, 2) => {
                            let (a, b, c2, d) = (inside[0], inside[1], outside[0], outside[1]);
                            let p = [crossing(a, c2), crossing(a, d), crossing(b, d), crossing(b, c2)];
                            tris.push([p[0], p[1], p[2]]);
                            tris.push([p[0], p[2], p[3]]);
                        }
                        _ => {}
                    }
                    let centroid_in = inside.iter().fold([0.0; 3], |acc, &i| {
                        let p = tet[i].1;
                        [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
                    });
                    let centroid_in = centroid_in.map(|v| v / inside.len().max(1) as f64);
                    for mut t in tris {
                        // Orient outward: the normal points away from the inside corners.
                        let n = cross(sub(vertices[t[1]], vertices[t[0]]), sub(vertices[t[2]], vertices[t[0]]));
                        if dot(n, sub(vertices[t[0]], centroid_in)) < 0.0 {
                            t.swap(1, 2);
                        }
                        simplices.extend_from_slice(&t);
                    }
                }
            }
        }
    }
    MultiFieldMesh::from_flat_unchecked(vertices, 2, simplices)
}

/// Genus-two surface: the union of two tori (major radius 1, minor 0.4)
/// centred at `x = ±1.25`, meshed with cell size `h`.
pub fn double_torus(h: f64) -> MultiFieldMesh {
    let torus_sdf = |p: Point3, cx: f64| {
        let q = ((p[0] - cx).powi(2) + p[1] * p[1]).sqrt() - 1.0;
        (q * q + p[2] * p[2]).sqrt() - 0.4
    };
    let sdf = |p: Point3| torus_sdf(p, 1.25).min(torus_sdf(p, -1.25));
    let pad = 1.5 * h;
    marching_tetrahedra(
        sdf,
        [-2.65 - pad, -1.4 - pad, -0.4 - pad],
        [2.65 + pad, 1.4 + pad, 0.4 + pad],
        h,
    )
}

/// Uniformly random rotation matrix (rows).
pub fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Rotates about the origin, then translates.
pub fn apply_isometry(mesh: &mut MultiFieldMesh, rotation: [[f64; 3]; 3], translation: Point3) {
    mesh.map_vertices(|p| std::array::from_fn(|i| dot(rotation[i], p) + translation[i]));
}

/// Applies a random rotation and a random translation of up to `shift`.
pub fn random_isometry(mesh: &mut MultiFieldMesh, rng: &mut impl Rng, shift: f64) {
    let r = random_rotation(rng);
    let t: [f64; 3] = UnitSphere.sample(rng);
    let len = rng.gen_range(0.0..=shift);
    apply_isometry(mesh, r, t.map(|v| v * len));
}

/// Length of the bounding-box diagonal.
pub fn bounding_diagonal(mesh: &MultiFieldMesh) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in mesh.vertices() {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    norm(sub(hi, lo))
}

/// Gaussian vertex displacement with RMS length `fraction` of the
/// bounding-box diagonal.
pub fn add_vertex_noise(mesh: &mut MultiFieldMesh, rng: &mut impl Rng, fraction: f64) {
    let sigma = fraction * bounding_diagonal(mesh) / 3f64.sqrt();
    let offsets: Vec<Point3> = (0..mesh.vertex_count())
        .map(|_| std::array::from_fn(|_| sigma * Distribution::<f64>::sample(&StandardNormal, rng)))
        .collect();
    let mut i = 0;
    mesh.map_vertices(|p| {
        let o = offsets[i];
        i += 1;
        [p[0] + o[0], p[1] + o[1], p[2] + o[2]]
    });
}

/// Smooth random function of position: a sum of `modes` plane waves with
/// wave numbers up to `max_frequency`.
pub fn random_smooth_field(mesh: &MultiFieldMesh, rng: &mut impl Rng, modes: usize, max_frequency: f64) -> Vec<f64> {
    let waves: Vec<(Point3, f64, f64)> = (0..modes)
        .map(|_| {
            let dir: [f64; 3] = UnitSphere.sample(rng);
            let k = rng.gen_range(0.5..=max_frequency);
            (dir.map(|v| v * k), rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.2..1.0))
        })
        .collect();
    mesh.vertices()
        .iter()
        .map(|&p| waves.iter().map(|(k, phase, amp)| amp * (dot(*k, p) + phase).sin()).sum())
        .collect()
}

/// Random connected graph with `2..=max_nodes` nodes and up to `max_extra`
/// edges beyond a spanning tree. Values are either small integers (many
/// ties) or uniform reals; adjacent nodes never share a value.
pub fn random_reeb_graph(rng: &mut impl Rng, max_nodes: usize, max_extra: usize) -> ReebGraph {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let integer = rng.gen_bool(0.5);
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            if integer {
                rng.gen_range(0..6) as f64
            } else {
                rng.gen_range(0.0..10.0)
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    for _ in 0..rng.gen_range(0..=max_extra) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !edges.contains(&(a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    // Break ties along edges by nudging the later node.
    for _ in 0..n {
        let mut clean = true;
        for &(a, b) in &edges {
            if values[a] == values[b] {
                values[b] += 0.5;
                clean = false;
            }
        }
        if clean {
            break;
        }
    }
    ReebGraph::new(values, edges).expect("generated graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn icosphere_counts() {
        for (level, v) in [(0, 12), (1, 42), (2, 162), (4, 2562)] {
            let m = icosphere(level);
            assert_eq!(m.vertex_count(), v);
            assert_eq!(m.euler_characteristic(), 2);
        }
    }

    #[test]
    fn torus_and_double_torus_topology() {
        let t = torus(24, 12, 1.0, 0.4);
        assert_eq!(t.euler_characteristic(), 0);
        assert_eq!(t.component_count(), 1);
        let d = double_torus(0.2);
        assert_eq!(d.euler_characteristic(), -2);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn rotations_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_rotation(&mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(r[i], r[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_graphs_have_no_adjacent_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let g = random_reeb_graph(&mut rng, 12, 5);
            assert_eq!(g.components().1, 1);
            assert!(g.edges().iter().all(|&(a, b)| g.value(a) != g.value(b)));
        }
    }
}
