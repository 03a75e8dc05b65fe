//! Inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reebdist::synthetic;
use reebdist::MultiFieldMesh;

/// An icosphere carrying two smooth random fields.
pub fn bivariate_sphere(level: usize, seed: u64) -> MultiFieldMesh {
    let mesh = synthetic::icosphere(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    let g = synthetic::random_smooth_field(&mesh, &mut rng, 3, 2.0);
    mesh.with_field("f", f).unwrap().with_field("g", g).unwrap()
}
