//! Multi-Dimensional Reeb Graphs.
//!
//! Level 1 is the Reeb graph of `f1` read off the JCN by contracting nodes
//! that share an `f1` bin. Every node `p` of a level-`i` graph spawns the
//! Reeb graphs of `f_{i+1}` restricted to `p`'s JCN nodes, one per connected
//! component.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jcn::JointContourNet;
use crate::quantize::Quantization;
use crate::reeb::{ReebGraph, ReebNode};
use crate::union_find::UnionFind;

/// One Reeb graph inside the hierarchy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdrgGraph {
    pub graph: ReebGraph,
    /// Bin of this level's field for every node.
    pub bins: Vec<usize>,
    /// `(graph index in the previous level, node index)`.
    pub parent: Option<(usize, usize)>,
    /// Bin of the parent node in the previous level's field.
    pub parent_bin: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mdrg {
    quantizations: Vec<Quantization>,
    ranges: Vec<(f64, f64)>,
    levels: Vec<Vec<MdrgGraph>>,
    /// `groups[i][c]`: graphs of level `i + 1` whose parent lies in bin `c`
    /// of field `i`.
    groups: Vec<Vec<Vec<usize>>>,
}

impl Mdrg {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn quantizations(&self) -> &[Quantization] {
        &self.quantizations
    }

    /// Actual `(min, max)` of each field.
    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    pub fn level1(&self) -> &ReebGraph {
        &self.levels[0][0].graph
    }

    /// Graphs of level `i` (0-based).
    pub fn level(&self, i: usize) -> &[MdrgGraph] {
        &self.levels[i]
    }

    /// Indices into level `i + 1` of the graphs whose parent sits in bin `c`
    /// of field `i`.
    pub fn children_in_bin(&self, i: usize, c: usize) -> &[usize] {
        &self.groups[i][c]
    }

    /// Children of node `node` of graph `graph` on level `i`.
    pub fn children_of(&self, i: usize, graph: usize, node: usize) -> Vec<usize> {
        self.levels
            .get(i + 1)
            .map(|next| {
                next.iter()
                    .enumerate()
                    .filter(|(_, g)| g.parent == Some((graph, node)))
                    .map(|(k, _)| k)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<_> = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|g| {
                        serde_json::json!({
                            "parent": g.parent,
                            "parent_bin": g.parent_bin,
                            "bins": g.bins,
                            "graph": g.graph.to_json(),
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        serde_json::json!({
            "quantizations": self.quantizations,
            "ranges": self.ranges,
            "levels": levels,
        })
    }

    /// DOT for level `i`, one cluster per graph.
    pub fn to_dot(&self, i: usize) -> String {
        let mut out = format!("graph level{} {{\n", i + 1);
        for (k, g) in self.levels[i].iter().enumerate() {
            let _ = writeln!(out, " subgraph cluster_{k} {{");
            if let Some((pg, pn)) = g.parent {
                let _ = writeln!(out, "  label=\"parent {pg}:{pn}\";");
            }
            g.graph.write_dot(&mut out, &format!("g{k}_"));
            out.push_str(" }\n");
        }
        out.push_str("}\n");
        out
    }
}

/// Contracts the JCN nodes in `members` (ascending) along equal bins of
/// `field`. With `split`, one graph per connected component is returned;
/// otherwise a single graph.
fn contract(
    jcn: &JointContourNet,
    adjacency: &[Vec<usize>],
    members: &[usize],
    field: usize,
    split: bool,
) -> Vec<(ReebGraph, Vec<usize>)> {
    let mut local = std::collections::HashMap::with_capacity(members.len());
    for (i, &m) in members.iter().enumerate() {
        local.insert(m, i);
    }
    let mut same = UnionFind::new(members.len());
    let mut whole = UnionFind::new(members.len());
    let mut inner_edges = Vec::new();
    for (i, &m) in members.iter().enumerate() {
        for &w in &adjacency[m] {
            if let Some(&j) = local.get(&w) {
                if j > i {
                    whole.union(i, j);
                    if jcn.node_bins(m)[field] == jcn.node_bins(w)[field] {
                        same.union(i, j);
                    } else {
                        inner_edges.push((i, j));
                    }
                }
            }
        }
    }
    let (contracted, count) = same.labels();
    let (component, components) = if split { whole.labels() } else { (vec![0; members.len()], 1) };
    let q = &jcn.quantizations()[field];

    // Contracted node -> (component, index within its graph).
    let mut place = vec![usize::MAX; count];
    let mut graphs: Vec<(Vec<ReebNode>, Vec<usize>, Vec<(usize, usize)>)> = vec![Default::default(); components];
    for (i, &m) in members.iter().enumerate() {
        let c = contracted[i];
        let g = &mut graphs[component[i]];
        if place[c] == usize::MAX {
            place[c] = g.0.len();
            let bin = jcn.node_bins(m)[field];
            g.0.push(ReebNode {
                value: q.center(bin),
                members: Vec::new(),
            });
            g.1.push(bin);
        }
        g.0[place[c]].members.push(m);
    }
    for (i, j) in inner_edges {
        let (a, b) = (contracted[i], contracted[j]);
        if a != b {
            graphs[component[i]].2.push((place[a], place[b]));
        }
    }
    graphs
        .into_iter()
        .map(|(nodes, bins, edges)| (ReebGraph::with_nodes(nodes, edges).expect("contracted graph is valid"), bins))
        .collect()
}

/// Level-1 Reeb graph: components of each `f1` bin, joined by the JCN edges
/// between them.
pub fn reeb_of_dimension1(jcn: &JointContourNet) -> Result<ReebGraph> {
    if jcn.node_count() == 0 {
        return Err(Error::EmptyJcn);
    }
    let members: Vec<usize> = (0..jcn.node_count()).collect();
    Ok(contract(jcn, &jcn.adjacency(), &members, 0, false).remove(0).0)
}

/// Reeb graphs of field `field` restricted to the JCN nodes in `members`,
/// one per connected component.
pub fn restrict_and_reeb(jcn: &JointContourNet, members: &[usize], field: usize) -> Result<Vec<ReebGraph>> {
    if field >= jcn.field_count() {
        return Err(Error::FieldIndex {
            index: field,
            fields: jcn.field_count(),
        });
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(contract(jcn, &jcn.adjacency(), &sorted, field, true)
        .into_iter()
        .map(|(g, _)| g)
        .collect())
}

pub fn build_mdrg(jcn: &JointContourNet) -> Result<Mdrg> {
    if jcn.node_count() == 0 {
        return Err(Error::EmptyJcn);
    }
    let adjacency = jcn.adjacency();
    let all: Vec<usize> = (0..jcn.node_count()).collect();
    let (g1, bins1) = contract(jcn, &adjacency, &all, 0, false).remove(0);
    let mut levels = vec![vec![MdrgGraph {
        graph: g1,
        bins: bins1,
        parent: None,
        parent_bin: None,
    }]];
    let mut groups = Vec::new();
    for field in 1..jcn.field_count() {
        let prev = levels.last().unwrap();
        let parents: Vec<(usize, usize)> = prev
            .iter()
            .enumerate()
            .flat_map(|(gi, g)| (0..g.graph.node_count()).map(move |n| (gi, n)))
            .collect();
        let next: Vec<MdrgGraph> = parents
            .par_iter()
            .flat_map_iter(|&(gi, n)| {
                let parent = &prev[gi];
                let members = &parent.graph.nodes()[n].members;
                let parent_bin = parent.bins[n];
                contract(jcn, &adjacency, members, field, true)
                    .into_iter()
                    .map(move |(graph, bins)| MdrgGraph {
                        graph,
                        bins,
                        parent: Some((gi, n)),
                        parent_bin: Some(parent_bin),
                    })
            })
            .collect();
        let mut by_bin = vec![Vec::new(); jcn.quantizations()[field - 1].slabs()];
        for (k, g) in next.iter().enumerate() {
            by_bin[g.parent_bin.unwrap()].push(k);
        }
        groups.push(by_bin);
        levels.push(next);
    }
    Ok(Mdrg {
        quantizations: jcn.quantizations().to_vec(),
        ranges: jcn.ranges().to_vec(),
        levels,
        groups,
    })
}
