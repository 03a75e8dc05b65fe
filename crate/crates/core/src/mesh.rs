//! Simplicial meshes carrying per-vertex scalar fields.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

pub type Point3 = [f64; 3];

/// A triangle surface or tetrahedral volume with `r` scalar fields sampled at
/// its vertices.
///
/// Simplices are stored flat, `dimension + 1` indices per simplex. The mesh is
/// immutable apart from field attachment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiFieldMesh {
    vertices: Vec<Point3>,
    dimension: usize,
    simplices: Vec<usize>,
    fields: Vec<Vec<f64>>,
    field_names: Vec<String>,
    component_count: usize,
}

impl MultiFieldMesh {
    /// Builds a mesh from vertex positions and simplex index tuples.
    ///
    /// Every simplex must have the same arity (3 for triangles, 4 for
    /// tetrahedra) and reference existing vertices.
    pub fn new(vertices: Vec<Point3>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let arity = simplices.first().map_or(3, Vec::len);
        if !(3..=4).contains(&arity) {
            return Err(Error::Invalid(format!(
                "simplices must be triangles or tetrahedra, got arity {arity}"
            )));
        }
        let mut flat = Vec::with_capacity(simplices.len() * arity);
        for (s, simplex) in simplices.iter().enumerate() {
            if simplex.len() != arity {
                return Err(Error::MixedSimplexDimension {
                    first: arity - 1,
                    other: simplex.len().saturating_sub(1),
                });
            }
            for &index in simplex {
                if index >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        simplex: s,
                        index,
                        count: vertices.len(),
                    });
                }
            }
            flat.extend_from_slice(simplex);
        }
        Ok(Self::from_flat_unchecked(vertices, arity - 1, flat))
    }

    pub(crate) fn from_flat_unchecked(
        vertices: Vec<Point3>,
        dimension: usize,
        simplices: Vec<usize>,
    ) -> Self {
        let mut mesh = Self {
            vertices,
            dimension,
            simplices,
            fields: Vec::new(),
            field_names: Vec::new(),
            component_count: 0,
        };
        mesh.component_count = mesh.vertex_components().1;
        mesh
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    /// 2 for triangle meshes, 3 for tetrahedral meshes.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_triangle_mesh(&self) -> bool {
        self.dimension == 2
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len() / (self.dimension + 1)
    }

    pub fn simplex(&self, i: usize) -> &[usize] {
        let k = self.dimension + 1;
        &self.simplices[i * k..(i + 1) * k]
    }

    pub fn simplices(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.simplices.chunks_exact(self.dimension + 1)
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    pub fn field_names(&self) -> &[String] {
        &self.field_names
    }

    pub fn fields(&self) -> &[Vec<f64>] {
        &self.fields
    }

    pub fn field(&self, index: usize) -> Option<&[f64]> {
        self.fields.get(index).map(Vec::as_slice)
    }

    pub fn field_by_name(&self, name: &str) -> Option<&[f64]> {
        self.field_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.fields[i].as_slice())
    }

    /// Appends a named field. Fails on a length mismatch or a duplicate name.
    pub fn attach_field(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.vertices.len() {
            return Err(Error::LengthMismatch {
                expected: self.vertices.len(),
                actual: values.len(),
            });
        }
        if self.field_names.contains(&name) {
            return Err(Error::DuplicateField(name));
        }
        self.field_names.push(name);
        self.fields.push(values);
        Ok(())
    }

    /// Consuming form of [`attach_field`](Self::attach_field).
    pub fn with_field(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.attach_field(name, values)?;
        Ok(self)
    }

    /// A copy of the geometry with the listed fields, in the given order.
    pub fn select_fields(&self, names: &[&str]) -> Result<Self> {
        let mut out = self.without_fields();
        for &name in names {
            let values = self
                .field_by_name(name)
                .ok_or_else(|| Error::UnknownField(name.to_string()))?;
            out.attach_field(name, values.to_vec())?;
        }
        Ok(out)
    }

    pub fn without_fields(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            dimension: self.dimension,
            simplices: self.simplices.clone(),
            fields: Vec::new(),
            field_names: Vec::new(),
            component_count: self.component_count,
        }
    }

    /// Number of connected components of the 1-skeleton, counting isolated
    /// vertices.
    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Component label per vertex and the number of components.
    pub fn vertex_components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.vertices.len());
        for s in self.simplices() {
            for w in s.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.labels()
    }

    /// Unique undirected edges as sorted index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for s in self.simplices() {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    let (a, b) = (s[i].min(s[j]), s[i].max(s[j]));
                    edges.insert((a, b));
                }
            }
        }
        edges.into_iter().collect()
    }

    /// Alternating count of vertices, edges, faces and (for volumes) cells.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edges().len() as i64;
        match self.dimension {
            2 => v - e + self.simplex_count() as i64,
            _ => {
                let mut faces = BTreeSet::new();
                for s in self.simplices() {
                    for skip in 0..4 {
                        let mut f: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| s[i]).collect();
                        f.sort_unstable();
                        faces.insert(f);
                    }
                }
                v - e + faces.len() as i64 - self.simplex_count() as i64
            }
        }
    }

    /// Unsigned area (triangles) or volume (tetrahedra) of simplex `i`.
    pub fn simplex_measure(&self, i: usize) -> f64 {
        let s = self.simplex(i);
        let p = |k: usize| self.vertices[s[k]];
        match self.dimension {
            2 => 0.5 * norm(cross(sub(p(1), p(0)), sub(p(2), p(0)))),
            _ => signed_volume(p(0), p(1), p(2), p(3)).abs(),
        }
    }

    /// Applies `transform` to every vertex position.
    pub fn map_vertices(&mut self, mut transform: impl FnMut(Point3) -> Point3) {
        for v in &mut self.vertices {
            *v = transform(*v);
        }
    }
}

/// A regular volumetric grid with vertex-sampled fields in x-fastest order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularGrid {
    dims: [usize; 3],
    spacing: [f64; 3],
    fields: Vec<Vec<f64>>,
    field_names: Vec<String>,
}

impl RegularGrid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3]) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidGrid(format!(
                "every dimension must be at least 2, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {spacing:?}"
            )));
        }
        Ok(Self {
            dims,
            spacing,
            fields: Vec::new(),
            field_names: Vec::new(),
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn point_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn fields(&self) -> &[Vec<f64>] {
        &self.fields
    }

    pub fn field_names(&self) -> &[String] {
        &self.field_names
    }

    pub fn attach_field(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.point_count() {
            return Err(Error::LengthMismatch {
                expected: self.point_count(),
                actual: values.len(),
            });
        }
        if self.field_names.contains(&name) {
            return Err(Error::DuplicateField(name));
        }
        self.field_names.push(name);
        self.fields.push(values);
        Ok(())
    }

    pub fn with_field(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.attach_field(name, values)?;
        Ok(self)
    }
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn signed_volume(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0
}
