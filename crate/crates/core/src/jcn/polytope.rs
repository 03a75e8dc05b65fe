//! Convex polytopes cut out of a single simplex by affine constraints.
//!
//! Points are written in local coordinates `x ∈ ℝᵏ`, barycentric weights
//! `(1 − Σx, x₁, …, xₖ)`. A polytope is the feasible set of a handful of
//! normalized half-spaces; with `k ≤ 3` and at most ten constraints, brute
//! force vertex enumeration is both simple and fast.

/// Feasibility slack in local coordinates.
const FEAS_TOL: f64 = 1e-10;
/// Vertices closer than this are merged.
const MERGE_TOL: f64 = 1e-9;
/// Affine-rank threshold.
const RANK_TOL: f64 = 1e-9;

/// `g·x + c ≥ 0`, with `|g| = 1` (or `g = 0` for a constant row).
#[derive(Clone, Copy, Debug)]
pub(crate) struct HalfSpace {
    g: [f64; 3],
    c: f64,
}

impl HalfSpace {
    fn eval(&self, x: &[f64; 3]) -> f64 {
        self.g[0] * x[0] + self.g[1] * x[1] + self.g[2] * x[2] + self.c
    }
}

/// A simplex of dimension `k` with per-vertex scalar values, used to turn
/// field bounds into half-spaces.
#[derive(Clone, Debug)]
pub(crate) struct LocalSimplex {
    k: usize,
    rows: Vec<HalfSpace>,
}

impl LocalSimplex {
    pub(crate) fn new(k: usize) -> Self {
        debug_assert!((1..=3).contains(&k));
        let mut rows = Vec::with_capacity(k + 7);
        for j in 0..k {
            let mut g = [0.0; 3];
            g[j] = 1.0;
            rows.push(HalfSpace { g, c: 0.0 });
        }
        let s = 1.0 / (k as f64).sqrt();
        let mut g = [0.0; 3];
        g[..k].iter_mut().for_each(|v| *v = -s);
        rows.push(HalfSpace { g, c: s });
        Self { k, rows }
    }

    pub(crate) fn dimension(&self) -> usize {
        self.k
    }

    /// Adds `f ≥ level` (or `f ≤ level` when `upper`) for the affine function
    /// taking `values[j]` at vertex `j`. Returns `false` (and adds nothing)
    /// when the function is constant.
    pub(crate) fn bound(&mut self, values: &[f64], level: f64, upper: bool) -> bool {
        let a0 = values[0];
        let mut g = [0.0; 3];
        for j in 0..self.k {
            g[j] = values[j + 1] - a0;
        }
        let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if n == 0.0 {
            return false;
        }
        let sign = if upper { -1.0 } else { 1.0 };
        let row = HalfSpace {
            g: g.map(|v| sign * v / n),
            c: sign * (a0 - level) / n,
        };
        self.rows.push(row);
        true
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
    }

    pub(crate) fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Vertices of the feasible set.
    pub(crate) fn vertices(&self) -> Vec<[f64; 3]> {
        let k = self.k;
        let rows = &self.rows;
        let mut out: Vec<[f64; 3]> = Vec::new();
        let mut consider = |x: [f64; 3]| {
            if rows.iter().all(|r| r.eval(&x) >= -FEAS_TOL)
                && !out.iter().any(|y| dist(y, &x) <= MERGE_TOL)
            {
                out.push(x);
            }
        };
        let n = rows.len();
        match k {
            1 => {
                for a in 0..n {
                    if let Some(x) = solve(&[rows[a]], 1) {
                        consider(x);
                    }
                }
            }
            2 => {
                for a in 0..n {
                    for b in a + 1..n {
                        if let Some(x) = solve(&[rows[a], rows[b]], 2) {
                            consider(x);
                        }
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            if let Some(x) = solve(&[rows[a], rows[b], rows[c]], 3) {
                                consider(x);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Dimension of the feasible set (`None` when empty) and its measure as
    /// a fraction of the simplex.
    pub(crate) fn cell(&self) -> Option<(usize, f64)> {
        let verts = self.vertices();
        if verts.is_empty() {
            return None;
        }
        let dim = affine_rank(&verts);
        let frac = if dim == self.k { self.measure(&verts) } else { 0.0 };
        Some((dim, frac))
    }

    fn measure(&self, verts: &[[f64; 3]]) -> f64 {
        let factorial = [1.0, 1.0, 2.0, 6.0][self.k];
        let m = match self.k {
            1 => {
                let (lo, hi) = verts
                    .iter()
                    .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v[0]), b.max(v[0])));
                hi - lo
            }
            2 => polygon_area(verts, [0.0, 0.0, 1.0]),
            _ => polyhedron_volume(verts, &self.rows),
        };
        (m * factorial).min(1.0)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Intersection point of `k` hyperplanes `g·x + c = 0`, if well-conditioned.
fn solve(rows: &[HalfSpace], k: usize) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for (i, r) in rows.iter().enumerate() {
        a[i][..k].copy_from_slice(&r.g[..k]);
        a[i][3] = -r.c;
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        for i in 0..k {
            if i != col {
                let f = a[i][col] / a[col][col];
                for j in col..4 {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    let mut x = [0.0; 3];
    for i in 0..k {
        x[i] = a[i][3] / a[i][i];
    }
    Some(x)
}

fn affine_rank(verts: &[[f64; 3]]) -> usize {
    let mut basis: Vec<[f64; 3]> = Vec::new();
    for v in &verts[1..] {
        let mut d = sub(v, &verts[0]);
        for b in &basis {
            let p = dot(&d, b);
            d = [d[0] - p * b[0], d[1] - p * b[1], d[2] - p * b[2]];
        }
        let n = dot(&d, &d).sqrt();
        if n > RANK_TOL {
            basis.push(d.map(|c| c / n));
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis.len()
}

/// Area of a planar convex polygon given by unordered vertices, projected
/// along `normal`.
fn polygon_area(verts: &[[f64; 3]], normal: [f64; 3]) -> f64 {
    if verts.len() < 3 {
        return 0.0;
    }
    let n = verts.len() as f64;
    let c = verts.iter().fold([0.0; 3], |acc, v| [acc[0] + v[0] / n, acc[1] + v[1] / n, acc[2] + v[2] / n]);
    let ordered = sort_around(verts, &c, &normal);
    let mut twice = [0.0; 3];
    for i in 0..ordered.len() {
        let a = sub(&ordered[i], &c);
        let b = sub(&ordered[(i + 1) % ordered.len()], &c);
        let x = cross(&a, &b);
        twice = [twice[0] + x[0], twice[1] + x[1], twice[2] + x[2]];
    }
    0.5 * dot(&twice, &twice).sqrt()
}

fn sort_around(verts: &[[f64; 3]], c: &[f64; 3], normal: &[f64; 3]) -> Vec<[f64; 3]> {
    // Any direction in the plane works as the angular reference.
    let reference = verts
        .iter()
        .map(|v| sub(v, c))
        .max_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
        .unwrap();
    let e1 = {
        let p = dot(&reference, normal);
        let d = [reference[0] - p * normal[0], reference[1] - p * normal[1], reference[2] - p * normal[2]];
        let n = dot(&d, &d).sqrt();
        d.map(|v| v / n)
    };
    let e2 = cross(normal, &e1);
    let mut keyed: Vec<(f64, [f64; 3])> = verts
        .iter()
        .map(|v| {
            let d = sub(v, c);
            (dot(&d, &e2).atan2(dot(&d, &e1)), *v)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, v)| v).collect()
}

fn polyhedron_volume(verts: &[[f64; 3]], rows: &[HalfSpace]) -> f64 {
    let n = verts.len() as f64;
    let c = verts.iter().fold([0.0; 3], |acc, v| [acc[0] + v[0] / n, acc[1] + v[1] / n, acc[2] + v[2] / n]);
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut volume = 0.0;
    for r in rows {
        if r.g == [0.0; 3] {
            continue;
        }
        let on: Vec<usize> = (0..verts.len()).filter(|&i| r.eval(&verts[i]).abs() <= 1e-8).collect();
        if on.len() < 3 || seen.contains(&on) {
            continue;
        }
        let face: Vec<[f64; 3]> = on.iter().map(|&i| verts[i]).collect();
        let area = polygon_area(&face, r.g);
        let height = r.eval(&c).abs();
        volume += area * height / 3.0;
        seen.push(on);
    }
    volume
}
