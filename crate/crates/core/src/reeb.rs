//! Reeb graphs with scalar node values, node classification and
//! Morse-ification.
//!
//! Up and down neighbours are decided by the total order `(value, id)`, so
//! equal values never leave a node's classification ambiguous.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReebNode {
    pub value: f64,
    /// JCN nodes collapsed into this node. Empty for nodes added by
    /// Morse-ification.
    pub members: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeClass {
    Minimum,
    Maximum,
    /// Up-degree 2, down-degree 1.
    UpFork,
    /// Down-degree 2, up-degree 1.
    DownFork,
    Regular,
    /// A node with no neighbours.
    Isolated,
    Degenerate,
}

impl NodeClass {
    pub fn is_critical(self) -> bool {
        !matches!(self, NodeClass::Regular | NodeClass::Isolated)
    }

    fn from_degrees(up: usize, down: usize) -> Self {
        match (up, down) {
            (0, 0) => NodeClass::Isolated,
            (1, 0) => NodeClass::Minimum,
            (0, 1) => NodeClass::Maximum,
            (1, 1) => NodeClass::Regular,
            (2, 1) => NodeClass::UpFork,
            (1, 2) => NodeClass::DownFork,
            _ => NodeClass::Degenerate,
        }
    }
}

/// A simple undirected graph with a scalar value per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReebGraph {
    nodes: Vec<ReebNode>,
    /// Sorted, deduplicated `(a, b)` with `a < b`.
    edges: Vec<(usize, usize)>,
}

impl ReebGraph {
    pub fn new(values: Vec<f64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let nodes = values
            .into_iter()
            .map(|value| ReebNode {
                value,
                members: Vec::new(),
            })
            .collect();
        Self::with_nodes(nodes, edges)
    }

    /// Self-loops are rejected; parallel edges collapse into one.
    pub fn with_nodes(nodes: Vec<ReebNode>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = nodes.len();
        if let Some(node) = nodes.iter().position(|n| !n.value.is_finite()) {
            return Err(Error::Invalid(format!("node {node} has a non-finite value")));
        }
        let mut clean = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Invalid(format!("invalid edge ({a}, {b}) for {n} nodes")));
            }
            clean.push((a.min(b), a.max(b)));
        }
        clean.sort_unstable();
        clean.dedup();
        Ok(Self { nodes, edges: clean })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[ReebNode] {
        &self.nodes
    }

    pub fn value(&self, node: usize) -> f64 {
        self.nodes[node].value
    }

    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.value).collect()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `a` comes before `b` in the `(value, id)` order.
    pub fn below(&self, a: usize, b: usize) -> bool {
        (self.nodes[a].value, a) < (self.nodes[b].value, b)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// `(up-degree, down-degree)` of every node.
    pub fn degrees(&self) -> Vec<(usize, usize)> {
        let mut deg = vec![(0, 0); self.nodes.len()];
        for &(a, b) in &self.edges {
            let (lo, hi) = if self.below(a, b) { (a, b) } else { (b, a) };
            deg[lo].0 += 1;
            deg[hi].1 += 1;
        }
        deg
    }

    pub fn classify(&self) -> Vec<NodeClass> {
        self.degrees()
            .into_iter()
            .map(|(u, d)| NodeClass::from_degrees(u, d))
            .collect()
    }

    /// Component label per node and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.labels()
    }

    /// First Betti number `|E| − |V| + components`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components().1 - self.nodes.len()
    }

    /// Only the five Morse node types (plus isolated nodes) occur, and
    /// critical values are pairwise distinct.
    pub fn is_morse(&self) -> bool {
        self.check_morse().is_ok()
    }

    pub(crate) fn check_morse(&self) -> Result<()> {
        let classes = self.classify();
        let degrees = self.degrees();
        let mut critical = Vec::new();
        for (i, c) in classes.iter().enumerate() {
            if *c == NodeClass::Degenerate {
                let (up, down) = degrees[i];
                return Err(Error::NotMorse { node: i, up, down });
            }
            if c.is_critical() {
                critical.push(self.nodes[i].value);
            }
        }
        critical.sort_by(f64::total_cmp);
        if critical.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("critical nodes share a value".into()));
        }
        Ok(())
    }

    /// The same graph with every value negated.
    pub fn negated(&self) -> Self {
        let mut g = self.clone();
        for n in &mut g.nodes {
            n.value = -n.value;
        }
        g
    }

    /// Adds `k` to every node value.
    pub fn shifted(&self, k: f64) -> Self {
        let mut g = self.clone();
        for n in &mut g.nodes {
            n.value += k;
        }
        g
    }

    pub fn to_json(&self) -> serde_json::Value {
        let classes = self.classify();
        let nodes: Vec<_> = self
            .nodes
            .iter()
            .zip(classes)
            .enumerate()
            .map(|(i, (n, c))| serde_json::json!({"id": i, "value": n.value, "class": c, "members": n.members}))
            .collect();
        serde_json::json!({"nodes": nodes, "edges": self.edges})
    }

    /// DOT body lines, node names prefixed with `prefix`.
    pub fn write_dot(&self, out: &mut String, prefix: &str) {
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  {prefix}{i} [label=\"{}\"];", n.value);
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  {prefix}{a} -- {prefix}{b};");
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph reeb {\n");
        self.write_dot(&mut out, "n");
        out.push_str("}\n");
        out
    }
}

/// Mutable working copy used by [`morseify`].
struct Work {
    values: Vec<f64>,
    members: Vec<Vec<usize>>,
    adj: Vec<BTreeSet<usize>>,
}

impl Work {
    fn key(&self, v: usize) -> (f64, usize) {
        (self.values[v], v)
    }

    fn push(&mut self, value: f64) -> usize {
        self.values.push(value);
        self.members.push(Vec::new());
        self.adj.push(BTreeSet::new());
        self.values.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }

    /// Up and down neighbours, each sorted ascending in `(value, id)`.
    fn split(&self, u: usize) -> (Vec<usize>, Vec<usize>) {
        let (mut up, mut down): (Vec<usize>, Vec<usize>) =
            self.adj[u].iter().partition(|&&w| self.key(w) > self.key(u));
        up.sort_by(|&a, &b| self.key(a).partial_cmp(&self.key(b)).unwrap());
        down.sort_by(|&a, &b| self.key(a).partial_cmp(&self.key(b)).unwrap());
        (up, down)
    }
}

/// Turns `rg` into the Reeb graph of a Morse function.
///
/// Tied values are first spread apart without changing the `(value, id)`
/// order, so no edge changes direction. Degenerate nodes are then split
/// into chains of forks offset by multiples of a step `e ≤ epsilon`, with
/// `e` small enough that every new node stays within half the smallest gap
/// of its origin. New nodes are appended after the existing ones and carry
/// no members. Components and cycle rank are unchanged.
pub fn morseify(rg: &ReebGraph, epsilon: f64) -> ReebGraph {
    if rg.is_morse() {
        return rg.clone();
    }
    let mut values = rg.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut i = 0;
    while i < order.len() {
        let v = values[order[i]];
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == v {
            j += 1;
        }
        if j - i > 1 {
            let room = order.get(j).map_or(f64::INFINITY, |&n| values[n] - v);
            let step = epsilon.min(room / (j - i + 1) as f64);
            for (k, &u) in order[i..j].iter().enumerate() {
                values[u] = v + k as f64 * step;
            }
        }
        i = j;
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let max_degree = rg.adjacency().iter().map(Vec::len).max().unwrap_or(0);
    let epsilon = epsilon.min(gap / (2 * max_degree + 2) as f64);

    let mut w = Work {
        values,
        members: rg.nodes.iter().map(|n| n.members.clone()).collect(),
        adj: {
            let mut adj = vec![BTreeSet::new(); rg.node_count()];
            for &(a, b) in &rg.edges {
                adj[a].insert(b);
                adj[b].insert(a);
            }
            adj
        },
    };

    // Nodes with several edges both above and below: move the upper edges to
    // a new node just above.
    for u in 0..rg.node_count() {
        let (up, down) = w.split(u);
        if up.len() >= 2 && down.len() >= 2 {
            let top = w.push(w.values[u] + epsilon);
            for c in up {
                w.unlink(u, c);
                w.link(top, c);
            }
            w.link(u, top);
        }
    }

    // Extremum and fork at once: add the missing extremum.
    for u in 0..w.values.len() {
        let (up, down) = w.split(u);
        if up.is_empty() && down.len() >= 2 {
            let m = w.push(w.values[u] + epsilon);
            w.link(u, m);
        } else if down.is_empty() && up.len() >= 2 {
            let m = w.push(w.values[u] - epsilon);
            w.link(u, m);
        }
    }

    // Forks of degree ≥ 3: peel the two lowest (or highest) branches first.
    for u in 0..w.values.len() {
        let (up, down) = w.split(u);
        let v = w.values[u];
        if down.len() >= 3 {
            let d = down.len();
            let mut prev = down[0];
            for (j, &c) in down.iter().enumerate().skip(1).take(d - 2) {
                let n = w.push(v - (d - 1 - j) as f64 * epsilon);
                w.unlink(u, prev);
                w.unlink(u, c);
                w.link(n, prev);
                w.link(n, c);
                w.link(u, n);
                prev = n;
            }
        }
        if up.len() >= 3 {
            let d = up.len();
            let desc: Vec<usize> = up.iter().rev().copied().collect();
            let mut prev = desc[0];
            for (j, &c) in desc.iter().enumerate().skip(1).take(d - 2) {
                let n = w.push(v + (d - 1 - j) as f64 * epsilon);
                w.unlink(u, prev);
                w.unlink(u, c);
                w.link(n, prev);
                w.link(n, c);
                w.link(u, n);
                prev = n;
            }
        }
    }

    let nodes = w
        .values
        .into_iter()
        .zip(w.members)
        .map(|(value, members)| ReebNode { value, members })
        .collect();
    let mut edges = Vec::new();
    for (a, set) in w.adj.iter().enumerate() {
        edges.extend(set.iter().filter(|&&b| b > a).map(|&b| (a, b)));
    }
    let out = ReebGraph::with_nodes(nodes, edges).expect("morseify keeps a valid graph");
    debug_assert!(out.is_morse());
    out
}
