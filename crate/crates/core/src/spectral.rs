//! Discrete Laplace–Beltrami spectra of triangle meshes.
//!
//! The operator is assembled as a cotangent stiffness matrix `M` and a lumped
//! mass matrix `S`; eigenpairs solve `M φ = λ S φ`. Descriptors are the
//! absolute eigenfunctions scaled by `1/√λ`, which removes both the sign
//! ambiguity and the dependence on overall scale.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{cross, dot, norm, sub, MultiFieldMesh};

/// Descriptor count used when none is given.
pub const DEFAULT_EIGEN_COUNT: usize = 12;

/// Largest residual `‖Mφ − λSφ‖ / ‖Sφ‖` accepted from the eigensolver.
pub const MAX_EIGEN_RESIDUAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaplaceOptions {
    /// Replace negative edge weights (from obtuse angles) by zero.
    pub clamp_negative_weights: bool,
}

/// Cotangent stiffness matrix and diagonal mass matrix of a triangle mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceOperator {
    /// Row-wise sparse stiffness, columns ascending, diagonal included.
    rows: Vec<Vec<(usize, f64)>>,
    mass: Vec<f64>,
}

impl LaplaceOperator {
    pub fn size(&self) -> usize {
        self.mass.len()
    }

    /// Lumped vertex areas `s_i`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn stiffness_row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn stiffness_entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by(|&(c, _)| c.cmp(&j))
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    /// `M x`.
    pub fn apply_stiffness(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, m)| m * x[j]).sum())
            .collect()
    }

    /// `L x = S⁻¹ M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.apply_stiffness(x);
        for (v, s) in y.iter_mut().zip(&self.mass) {
            *v /= s;
        }
        y
    }
}

/// Assembles `M` with `m_ij = (cot α_ij + cot β_ij) / 2` (a single cotangent on
/// boundary edges) and `S` with one third of the incident triangle areas.
pub fn cotangent_laplacian(mesh: &MultiFieldMesh, options: LaplaceOptions) -> Result<LaplaceOperator> {
    if !mesh.is_triangle_mesh() {
        return Err(Error::NotTriangleMesh);
    }
    let n = mesh.vertex_count();
    let pos = mesh.vertices();
    let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
    let mut incidence: HashMap<(usize, usize), u32> = HashMap::new();
    let mut mass = vec![0.0; n];

    for (t, tri) in mesh.simplices().enumerate() {
        let [a, b, c] = [tri[0], tri[1], tri[2]];
        let twice_area = norm(cross(sub(pos[b], pos[a]), sub(pos[c], pos[a])));
        let scale = [(a, b), (b, c), (c, a)]
            .iter()
            .map(|&(i, j)| dot(sub(pos[i], pos[j]), sub(pos[i], pos[j])))
            .fold(0.0, f64::max);
        if !(twice_area > 1e-14 * scale) {
            return Err(Error::DegenerateTriangle { simplex: t });
        }
        for v in [a, b, c] {
            mass[v] += twice_area / 6.0;
        }
        // Angle at `k` is opposite edge (i, j).
        for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
            let u = sub(pos[i], pos[k]);
            let w = sub(pos[j], pos[k]);
            let cot = dot(u, w) / norm(cross(u, w));
            let key = (i.min(j), i.max(j));
            *weights.entry(key).or_insert(0.0) += 0.5 * cot;
            let count = incidence.entry(key).or_insert(0);
            *count += 1;
            if *count > 2 {
                return Err(Error::NonManifoldEdge(key.0, key.1));
            }
        }
    }

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    let mut keys: Vec<_> = weights.into_iter().collect();
    keys.sort_by(|x, y| x.0.cmp(&y.0));
    for ((i, j), mut m) in keys {
        if options.clamp_negative_weights && m < 0.0 {
            m = 0.0;
        }
        rows[i].push((j, -m));
        rows[j].push((i, -m));
        diag[i] += m;
        diag[j] += m;
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row.push((i, diag[i]));
        row.sort_by_key(|&(c, _)| c);
    }
    Ok(LaplaceOperator { rows, mass })
}

/// The smallest eigenpairs of `M φ = λ S φ`, S-orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// One vector of length `n` per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    /// Largest relative residual over the returned pairs.
    pub max_residual: f64,
}

fn lexicographic_abs(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.abs().total_cmp(&y.abs()) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Solves for the `k + 1` smallest eigenpairs via a dense symmetric solve of
/// `S^{-1/2} M S^{-1/2}`.
///
/// Pairs are ordered by eigenvalue; eigenvalues equal to within `1e-9`
/// relative are ordered by the lexicographic order of their absolute-value
/// vectors so repeated eigenvalues come out in a reproducible order.
pub fn solve_eigen(op: &LaplaceOperator, k: usize) -> Result<Eigenpairs> {
    let n = op.size();
    if k >= n {
        return Err(Error::TooManyEigenpairs {
            requested: k,
            vertices: n,
        });
    }
    let inv_sqrt: Vec<f64> = op.mass.iter().map(|s| 1.0 / s.sqrt()).collect();
    let mut a = Mat::<f64>::zeros(n, n);
    for (i, row) in op.rows.iter().enumerate() {
        for &(j, m) in row {
            a[(i, j)] = m * inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    let s = eig.S();
    let u = eig.U();

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|c| {
            let v: Vec<f64> = (0..n).map(|r| u[(r, c)] * inv_sqrt[r]).collect();
            (s[c], v)
        })
        .collect();
    pairs.sort_by(|x, y| {
        let tol = 1e-9 * x.0.abs().max(y.0.abs()).max(1.0);
        if (x.0 - y.0).abs() <= tol {
            lexicographic_abs(&x.1, &y.1)
        } else {
            x.0.total_cmp(&y.0)
        }
    });
    pairs.truncate(k + 1);

    let mut max_residual: f64 = 0.0;
    for (lambda, phi) in &pairs {
        max_residual = max_residual.max(residual(op, *lambda, phi));
    }
    if !(max_residual <= MAX_EIGEN_RESIDUAL) {
        return Err(Error::EigenSolver(format!(
            "eigenpair residual {max_residual:e} exceeds {MAX_EIGEN_RESIDUAL:e}"
        )));
    }
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigenpairs {
        values,
        vectors,
        max_residual,
    })
}

/// `‖Mφ − λSφ‖ / ‖Sφ‖`.
pub fn residual(op: &LaplaceOperator, lambda: f64, phi: &[f64]) -> f64 {
    let m_phi = op.apply_stiffness(phi);
    let mut num = 0.0;
    let mut den = 0.0;
    for ((mp, p), s) in m_phi.iter().zip(phi).zip(&op.mass) {
        let sp = s * p;
        num += (mp - lambda * sp).powi(2);
        den += sp * sp;
    }
    (num / den).sqrt()
}

/// `φ_iᵀ S φ_j`.
pub fn mass_inner(op: &LaplaceOperator, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).zip(&op.mass).map(|((x, y), s)| x * y * s).sum()
}

/// Normalized absolute eigenfunctions `|φ_i| / √λ_i` for `i = 1..=E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenDescriptorSet {
    /// `λ_0 ..= λ_E` when computed here; for imported descriptors one label
    /// value per column (NaN when the header is not numeric).
    pub eigenvalues: Vec<f64>,
    /// `descriptors[i - 1]` holds descriptor `i`, one value per vertex.
    pub descriptors: Vec<Vec<f64>>,
}

impl EigenDescriptorSet {
    pub fn count(&self) -> usize {
        self.descriptors.len()
    }

    /// Descriptor `i` (1-based, matching the eigenvalue index).
    pub fn descriptor(&self, i: usize) -> Option<&[f64]> {
        i.checked_sub(1)
            .and_then(|k| self.descriptors.get(k))
            .map(Vec::as_slice)
    }

    pub fn vertex_count(&self) -> usize {
        self.descriptors.first().map_or(0, Vec::len)
    }

    /// CSV with one row per vertex; the header row holds the eigenvalues.
    pub fn to_csv(&self) -> String {
        let offset = self.eigenvalues.len().saturating_sub(self.descriptors.len());
        let mut out = String::new();
        let header: Vec<String> = (0..self.descriptors.len())
            .map(|i| {
                self.eigenvalues
                    .get(i + offset)
                    .map_or_else(|| format!("d{}", i + 1), |l| format!("{l}"))
            })
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for v in 0..self.vertex_count() {
            let row: Vec<String> = self.descriptors.iter().map(|d| format!("{}", d[v])).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Reads the CSV layout written by [`to_csv`](Self::to_csv). Externally
    /// computed signatures (HKS, WKS, ...) can use any header labels.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = crate::io::parse_csv_table(text)?;
        let eigenvalues = table
            .header
            .iter()
            .map(|h| h.parse::<f64>().unwrap_or(f64::NAN))
            .collect();
        Ok(Self {
            eigenvalues,
            descriptors: table.columns,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

/// Builds descriptors `1..=count` from raw eigenpairs (index 0 is the
/// constant mode and is skipped).
pub fn descriptors(eig: &Eigenpairs, count: usize) -> Result<EigenDescriptorSet> {
    let available = eig.values.len().saturating_sub(1);
    if count > available {
        return Err(Error::NotEnoughDescriptors {
            requested: count,
            available,
        });
    }
    let scale = eig.values.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut out = Vec::with_capacity(count);
    for i in 1..=count {
        let lambda = eig.values[i];
        if !(lambda > 1e-10 * scale) {
            return Err(Error::NonPositiveEigenvalue { index: i, value: lambda });
        }
        let inv = 1.0 / lambda.sqrt();
        out.push(eig.vectors[i].iter().map(|x| x.abs() * inv).collect());
    }
    Ok(EigenDescriptorSet {
        eigenvalues: eig.values[..=count].to_vec(),
        descriptors: out,
    })
}

/// Laplacian, eigensolve and descriptor normalization in one call.
pub fn mesh_descriptors(
    mesh: &MultiFieldMesh,
    count: usize,
    options: LaplaceOptions,
) -> Result<EigenDescriptorSet> {
    let op = cotangent_laplacian(mesh, options)?;
    let eig = solve_eigen(&op, count)?;
    descriptors(&eig, count)
}
