//! Joint Contour Nets.
//!
//! A simplex is cut by the slab boundaries of every field into fragments,
//! one per bin-vector whose slab box meets the simplex in a full-dimensional
//! piece (fields are linear on a simplex, so that piece is convex and
//! unique). Fragments with the same bin-vector that share a facet piece are
//! merged into one node; fragments with different bin-vectors that share a
//! codimension-one piece become edges.

mod polytope;

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::MultiFieldMesh;
use crate::quantize::{value_range, Quantization};
use crate::union_find::UnionFind;
use polytope::LocalSimplex;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FragmentMode {
    /// Exact per-simplex slab clipping.
    #[default]
    Clip,
    /// Each simplex takes the bin-vector of its barycenter. Coarser but cheap.
    Barycenter,
}

/// A piece of one simplex lying in a single bin-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub simplex: usize,
    pub bins: Vec<usize>,
    /// Volume (or area) of the piece.
    pub measure: f64,
    pub node: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JcnNode {
    pub bins: Vec<usize>,
    /// Fragment ids, ascending.
    pub fragments: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointContourNet {
    quantizations: Vec<Quantization>,
    ranges: Vec<(f64, f64)>,
    field_names: Vec<String>,
    nodes: Vec<JcnNode>,
    edges: Vec<(usize, usize)>,
    fragments: Vec<Fragment>,
}

impl JointContourNet {
    /// Assembles a net directly from bin-vectors and edges. Ranges default to
    /// the quantization bounds. Intended for tests and hand-built examples.
    pub fn from_graph(
        quantizations: Vec<Quantization>,
        bins: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let r = quantizations.len();
        for b in &bins {
            if b.len() != r {
                return Err(Error::QuantizationCount {
                    expected: b.len(),
                    actual: r,
                });
            }
            for (k, q) in b.iter().zip(&quantizations) {
                if *k >= q.slabs() {
                    return Err(Error::Invalid(format!("bin {k} out of range for {} slabs", q.slabs())));
                }
            }
        }
        let n = bins.len();
        let mut clean: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a}, {b}) out of range")));
            }
            if a != b {
                clean.push((a.min(b), a.max(b)));
            }
        }
        clean.sort_unstable();
        clean.dedup();
        Ok(Self {
            ranges: quantizations.iter().map(|q| (q.lo(), q.hi())).collect(),
            field_names: (0..r).map(|i| format!("f{}", i + 1)).collect(),
            quantizations,
            nodes: bins
                .into_iter()
                .map(|bins| JcnNode {
                    bins,
                    fragments: Vec::new(),
                })
                .collect(),
            edges: clean,
            fragments: Vec::new(),
        })
    }

    pub fn field_count(&self) -> usize {
        self.quantizations.len()
    }

    pub fn quantizations(&self) -> &[Quantization] {
        &self.quantizations
    }

    /// Actual `(min, max)` of each source field.
    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    pub fn field_names(&self) -> &[String] {
        &self.field_names
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[JcnNode] {
        &self.nodes
    }

    pub fn node_bins(&self, node: usize) -> &[usize] {
        &self.nodes[node].bins
    }

    /// Bin centers of a node.
    pub fn node_values(&self, node: usize) -> Vec<f64> {
        self.nodes[node]
            .bins
            .iter()
            .zip(&self.quantizations)
            .map(|(&k, q)| q.center(k))
            .collect()
    }

    /// Sorted `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = (0..self.nodes.len())
            .map(|i| {
                serde_json::json!({
                    "id": i,
                    "bins": self.nodes[i].bins,
                    "values": self.node_values(i),
                    "fragments": self.nodes[i].fragments.len(),
                })
            })
            .collect();
        serde_json::json!({
            "fields": self.field_names,
            "quantizations": self.quantizations,
            "nodes": nodes,
            "edges": self.edges,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph jcn {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label: Vec<String> = n.bins.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "  n{i} [label=\"({})\"];", label.join(","));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Closed slab `k` with the outer slabs extended to infinity.
fn slab_bounds(q: &Quantization, k: usize) -> (Option<f64>, Option<f64>) {
    let lower = (k > 0).then(|| q.level(k));
    let upper = (k + 1 < q.slabs()).then(|| q.level(k + 1));
    (lower, upper)
}

fn in_closed_slab(q: &Quantization, k: usize, v: f64) -> bool {
    let (lo, hi) = slab_bounds(q, k);
    lo.map_or(true, |l| v >= l) && hi.map_or(true, |h| v <= h)
}

/// Per-simplex field values, `values[field][local vertex]`.
fn simplex_values(mesh: &MultiFieldMesh, simplex: &[usize]) -> Vec<Vec<f64>> {
    mesh.fields()
        .iter()
        .map(|f| simplex.iter().map(|&v| f[v]).collect())
        .collect()
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

/// Full-dimensional bin-vectors of one simplex, lexicographically ordered,
/// with the measure fraction of each.
fn clip_simplex(values: &[Vec<f64>], quants: &[Quantization], k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(values.len());
    for (vals, q) in values.iter().zip(quants) {
        let (lo, hi) = value_range(vals).unwrap();
        candidates.push((q.bin(lo)..=q.bin(hi)).collect());
    }
    let mut out = Vec::new();
    let mut cell = LocalSimplex::new(k);
    let mut bins = Vec::with_capacity(values.len());
    descend(values, quants, &candidates, &mut cell, &mut bins, &mut out);
    out
}

fn descend(
    values: &[Vec<f64>],
    quants: &[Quantization],
    candidates: &[Vec<usize>],
    cell: &mut LocalSimplex,
    bins: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, f64)>,
) {
    let i = bins.len();
    if i == values.len() {
        if let Some((dim, frac)) = cell.cell() {
            if dim == cell.dimension() {
                out.push((bins.clone(), frac));
            }
        }
        return;
    }
    let vals = &values[i];
    if is_constant(vals) {
        bins.push(quants[i].bin(vals[0]));
        descend(values, quants, candidates, cell, bins, out);
        bins.pop();
        return;
    }
    let mark = cell.row_count();
    for &b in &candidates[i] {
        let (lo, hi) = slab_bounds(&quants[i], b);
        if let Some(l) = lo {
            cell.bound(vals, l, false);
        }
        if let Some(h) = hi {
            cell.bound(vals, h, true);
        }
        // Prune on the partial bin-vector before descending.
        let alive = match cell.cell() {
            Some((dim, _)) => dim == cell.dimension(),
            None => false,
        };
        if alive {
            bins.push(b);
            descend(values, quants, candidates, cell, bins, out);
            bins.pop();
        }
        cell.truncate(mark);
    }
}

/// Whether the closures of two bin-vector boxes, restricted to a `k`-simplex
/// with the given values, meet in a piece of dimension at least `need`.
fn boxes_touch(values: &[Vec<f64>], quants: &[Quantization], a: &[usize], b: &[usize], k: usize, need: usize) -> bool {
    let mut cell = LocalSimplex::new(k);
    for (i, (vals, q)) in values.iter().zip(quants).enumerate() {
        let (ka, kb) = (a[i], b[i]);
        if ka.abs_diff(kb) > 1 {
            return false;
        }
        if is_constant(vals) {
            if !(in_closed_slab(q, ka, vals[0]) && in_closed_slab(q, kb, vals[0])) {
                return false;
            }
            continue;
        }
        let (la, ha) = slab_bounds(q, ka);
        let (lb, hb) = slab_bounds(q, kb);
        let lower = match (la, lb) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let upper = match (ha, hb) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        if let Some(l) = lower {
            cell.bound(vals, l, false);
        }
        if let Some(h) = upper {
            cell.bound(vals, h, true);
        }
    }
    matches!(cell.cell(), Some((dim, _)) if dim >= need)
}

/// Builds the Joint Contour Net of all fields of `mesh`, one quantization
/// per field.
pub fn build_jcn(mesh: &MultiFieldMesh, quants: &[Quantization], mode: FragmentMode) -> Result<JointContourNet> {
    let r = mesh.field_count();
    if r == 0 {
        return Err(Error::Invalid("mesh has no fields".into()));
    }
    if r > mesh.dimension() {
        return Err(Error::TooManyFields {
            fields: r,
            dimension: mesh.dimension(),
        });
    }
    if quants.len() != r {
        return Err(Error::QuantizationCount {
            expected: r,
            actual: quants.len(),
        });
    }
    let d = mesh.dimension();

    let per_simplex: Vec<Vec<(Vec<usize>, f64)>> = (0..mesh.simplex_count())
        .into_par_iter()
        .map(|s| {
            let values = simplex_values(mesh, mesh.simplex(s));
            let measure = mesh.simplex_measure(s);
            match mode {
                FragmentMode::Clip => clip_simplex(&values, quants, d)
                    .into_iter()
                    .map(|(b, frac)| (b, frac * measure))
                    .collect(),
                FragmentMode::Barycenter => {
                    let bins = values
                        .iter()
                        .zip(quants)
                        .map(|(v, q)| q.bin(v.iter().sum::<f64>() / v.len() as f64))
                        .collect();
                    vec![(bins, measure)]
                }
            }
        })
        .collect();

    let mut first_fragment = Vec::with_capacity(per_simplex.len() + 1);
    let mut fragments = Vec::new();
    for (s, list) in per_simplex.into_iter().enumerate() {
        first_fragment.push(fragments.len());
        for (bins, measure) in list {
            fragments.push(Fragment {
                simplex: s,
                bins,
                measure,
                node: usize::MAX,
            });
        }
    }
    first_fragment.push(fragments.len());
    let frags_of = |s: usize| first_fragment[s]..first_fragment[s + 1];

    // Facets keyed by sorted vertex ids.
    let mut facet_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (s, simplex) in mesh.simplices().enumerate() {
        for skip in 0..=d {
            let mut key: Vec<usize> = (0..=d).filter(|&i| i != skip).map(|i| simplex[i]).collect();
            key.sort_unstable();
            facet_map.entry(key).or_default().push(s);
        }
    }
    let mut facets: Vec<(Vec<usize>, Vec<usize>)> = facet_map.into_iter().filter(|(_, v)| v.len() > 1).collect();
    facets.sort_unstable();

    // (fragment, fragment, same bin-vector)
    let facet_links: Vec<(usize, usize, bool)> = facets
        .par_iter()
        .flat_map_iter(|(key, owners)| {
            let values = simplex_values(mesh, key);
            let mut links = Vec::new();
            for (i, &s) in owners.iter().enumerate() {
                for &t in &owners[i + 1..] {
                    for a in frags_of(s) {
                        for b in frags_of(t) {
                            let (ba, bb) = (&fragments[a].bins, &fragments[b].bins);
                            let touching = match mode {
                                FragmentMode::Barycenter => true,
                                FragmentMode::Clip => boxes_touch(&values, quants, ba, bb, d - 1, d - 1),
                            };
                            if touching {
                                links.push((a, b, ba == bb));
                            }
                        }
                    }
                }
            }
            links
        })
        .collect();

    let inner_links: Vec<(usize, usize)> = match mode {
        FragmentMode::Barycenter => Vec::new(),
        FragmentMode::Clip => (0..mesh.simplex_count())
            .into_par_iter()
            .flat_map_iter(|s| {
                let range = frags_of(s);
                let mut links = Vec::new();
                if range.len() > 1 {
                    let values = simplex_values(mesh, mesh.simplex(s));
                    for a in range.clone() {
                        for b in a + 1..range.end {
                            if boxes_touch(&values, quants, &fragments[a].bins, &fragments[b].bins, d, d - 1) {
                                links.push((a, b));
                            }
                        }
                    }
                }
                links
            })
            .collect(),
    };

    let mut uf = UnionFind::new(fragments.len());
    for &(a, b, same) in &facet_links {
        if same {
            uf.union(a, b);
        }
    }
    // Node ids in order of each node's smallest fragment.
    let (labels, node_count) = uf.labels();
    let mut nodes: Vec<JcnNode> = vec![
        JcnNode {
            bins: Vec::new(),
            fragments: Vec::new(),
        };
        node_count
    ];
    for (f, frag) in fragments.iter_mut().enumerate() {
        let n = labels[f];
        frag.node = n;
        if nodes[n].fragments.is_empty() {
            nodes[n].bins = frag.bins.clone();
        }
        nodes[n].fragments.push(f);
    }
    let mut edges: Vec<(usize, usize)> = facet_links
        .iter()
        .filter(|l| !l.2)
        .map(|&(a, b, _)| (a, b))
        .chain(inner_links)
        .filter_map(|(a, b)| {
            let (x, y) = (labels[a], labels[b]);
            (x != y).then(|| (x.min(y), x.max(y)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();

    Ok(JointContourNet {
        quantizations: quants.to_vec(),
        ranges: mesh.fields().iter().map(|f| value_range(f).unwrap()).collect(),
        field_names: mesh.field_names().to_vec(),
        nodes,
        edges,
        fragments,
    })
}

/// Quantizations covering the fields of both meshes, field by field.
pub fn shared_quantizations(a: &MultiFieldMesh, b: &MultiFieldMesh, slabs: &[usize]) -> Result<Vec<Quantization>> {
    if a.field_count() != b.field_count() {
        return Err(Error::Invalid(format!(
            "field counts differ: {} vs {}",
            a.field_count(),
            b.field_count()
        )));
    }
    (0..a.field_count())
        .map(|i| {
            let q = slab_count(slabs, i)?;
            Quantization::covering_values(&[a.fields()[i].as_slice(), b.fields()[i].as_slice()], q)
        })
        .collect()
}

/// Quantizations of a single mesh's own field ranges.
pub fn own_quantizations(mesh: &MultiFieldMesh, slabs: &[usize]) -> Result<Vec<Quantization>> {
    (0..mesh.field_count())
        .map(|i| Quantization::covering_values(&[mesh.fields()[i].as_slice()], slab_count(slabs, i)?))
        .collect()
}

/// `slabs[i]`, or the last entry when the list is shorter.
pub fn slab_count(slabs: &[usize], i: usize) -> Result<usize> {
    slabs
        .get(i)
        .or_else(|| slabs.last())
        .copied()
        .ok_or(Error::ZeroSlabs)
}
