//! Persistence diagrams of Reeb graphs: PD0 of `f`, PD0 of `−f`, and the
//! first extended diagram ExDg1.
//!
//! All functions expect a Morse-ified graph (see [`crate::reeb::morseify`]).
//! Disconnected graphs are handled one component at a time; isolated nodes
//! contribute nothing.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reeb::ReebGraph;
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramKind {
    Pd0,
    Pd0Neg,
    Exdg1,
}

impl DiagramKind {
    pub const ALL: [DiagramKind; 3] = [DiagramKind::Pd0, DiagramKind::Pd0Neg, DiagramKind::Exdg1];

    pub fn name(self) -> &'static str {
        match self {
            DiagramKind::Pd0 => "pd0",
            DiagramKind::Pd0Neg => "pd0-neg",
            DiagramKind::Exdg1 => "exdg1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    /// The paired critical nodes, birth node first.
    pub nodes: [usize; 2],
}

impl DiagramPoint {
    /// L∞ distance to the nearest diagonal point.
    pub fn half_persistence(&self) -> f64 {
        (self.death - self.birth).abs() / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub kind: DiagramKind,
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn empty(kind: DiagramKind) -> Self {
        Self { kind, points: Vec::new() }
    }

    pub fn from_pairs(kind: DiagramKind, pairs: &[(f64, f64)]) -> Self {
        Self {
            kind,
            points: pairs
                .iter()
                .map(|&(birth, death)| DiagramPoint {
                    birth,
                    death,
                    nodes: [usize::MAX; 2],
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(birth, death)` pairs sorted lexicographically.
    pub fn sorted_pairs(&self) -> Vec<(f64, f64)> {
        let mut p: Vec<_> = self.points.iter().map(|p| (p.birth, p.death)).collect();
        p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        p
    }

    pub fn max_half_persistence(&self) -> f64 {
        self.points.iter().map(DiagramPoint::half_persistence).fold(0.0, f64::max)
    }

    /// `birth,death,kind,birth_node,death_node` rows under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("birth,death,kind,birth_node,death_node\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{},{}", p.birth, p.death, self.kind.name(), p.nodes[0], p.nodes[1]);
        }
        out
    }
}

/// Ascending union-find sweep in the order given by `rank`. Returns the
/// merge pairs plus one `(min, max)` pair per component with an edge.
fn sweep0(rg: &ReebGraph, negate: bool) -> Vec<DiagramPoint> {
    let n = rg.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let o = rg.value(a).total_cmp(&rg.value(b)).then(a.cmp(&b));
        if negate {
            o.reverse()
        } else {
            o
        }
    });
    let mut rank = vec![0; n];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    let val = |u: usize| if negate { -rg.value(u) } else { rg.value(u) };
    let adj = rg.adjacency();

    let mut uf = UnionFind::new(n);
    let mut oldest: Vec<usize> = (0..n).collect();
    let mut points = Vec::new();
    for &u in &order {
        let mut roots: Vec<usize> = adj[u].iter().filter(|&&w| rank[w] < rank[u]).map(|&w| uf.find(w)).collect();
        roots.sort_by_key(|&r| rank[oldest[r]]);
        roots.dedup();
        for (k, &r) in roots.iter().enumerate() {
            if k > 0 {
                let born = oldest[r];
                points.push(DiagramPoint {
                    birth: val(born),
                    death: val(u),
                    nodes: [born, u],
                });
            }
        }
        let eldest = roots.first().map(|&r| oldest[r]).unwrap_or(u);
        for &r in &roots {
            uf.union(u, r);
        }
        let root = uf.find(u);
        oldest[root] = eldest;
    }

    // Essential classes: (min, max) per component.
    let mut top: Vec<Option<usize>> = vec![None; n];
    let mut has_edge = vec![false; n];
    for &(a, _) in rg.edges() {
        has_edge[uf.find(a)] = true;
    }
    for &u in &order {
        let r = uf.find(u);
        top[r] = Some(u);
    }
    let mut roots: Vec<usize> = (0..n).filter(|&u| uf.find(u) == u && has_edge[u]).collect();
    roots.sort_by_key(|&r| rank[oldest[r]]);
    for r in roots {
        let (lo, hi) = (oldest[r], top[r].unwrap());
        points.push(DiagramPoint {
            birth: val(lo),
            death: val(hi),
            nodes: [lo, hi],
        });
    }
    points
}

/// Minima paired with ordinary down-forks (elder rule), plus the global
/// `(min, max)` pair of every component in place of the infinite bar.
pub fn compute_pd0(rg: &ReebGraph) -> Result<PersistenceDiagram> {
    rg.check_morse()?;
    Ok(PersistenceDiagram {
        kind: DiagramKind::Pd0,
        points: sweep0(rg, false),
    })
}

/// PD0 of `−f`, reported in `−f` coordinates.
pub fn compute_pd0_neg(rg: &ReebGraph) -> Result<PersistenceDiagram> {
    rg.check_morse()?;
    Ok(PersistenceDiagram {
        kind: DiagramKind::Pd0Neg,
        points: sweep0(rg, true),
    })
}

/// Essential down-forks, i.e. down-forks whose two lower branches are
/// already connected below them, in ascending order.
pub fn essential_down_forks(rg: &ReebGraph) -> Vec<usize> {
    let n = rg.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rg.value(a).total_cmp(&rg.value(b)).then(a.cmp(&b)));
    let adj = rg.adjacency();
    let mut seen = vec![false; n];
    let mut uf = UnionFind::new(n);
    let mut out = Vec::new();
    for &u in &order {
        let down: Vec<usize> = adj[u].iter().copied().filter(|&w| seen[w]).collect();
        if down.len() == 2 && uf.find(down[0]) == uf.find(down[1]) {
            out.push(u);
        }
        for w in down {
            uf.union(u, w);
        }
        seen[u] = true;
    }
    out
}

/// Pairs each essential down-fork `u` with the minimum `v` of the cycle
/// through `u` whose minimum is largest, giving `(f(u), f(v))`.
///
/// The cycle is found as a widest path between the two lower neighbours of
/// `u`: nodes below `u` are added in descending order until the neighbours
/// connect; the node that connects them is `v`.
pub fn compute_exdg1(rg: &ReebGraph) -> Result<PersistenceDiagram> {
    rg.check_morse()?;
    let n = rg.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rg.value(a).total_cmp(&rg.value(b)).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    let adj = rg.adjacency();
    let mut forks = essential_down_forks(rg);
    forks.reverse();
    let mut points = Vec::with_capacity(forks.len());
    for u in forks {
        let down: Vec<usize> = adj[u].iter().copied().filter(|&w| rank[w] < rank[u]).collect();
        let (d1, d2) = (down[0], down[1]);
        let mut uf = UnionFind::new(n);
        let mut active = vec![false; n];
        for &x in order[..rank[u]].iter().rev() {
            active[x] = true;
            for &w in &adj[x] {
                if active[w] {
                    uf.union(x, w);
                }
            }
            if active[d1] && active[d2] && uf.find(d1) == uf.find(d2) {
                points.push(DiagramPoint {
                    birth: rg.value(u),
                    death: rg.value(x),
                    nodes: [u, x],
                });
                break;
            }
        }
    }
    Ok(PersistenceDiagram {
        kind: DiagramKind::Exdg1,
        points,
    })
}

pub fn compute(rg: &ReebGraph, kind: DiagramKind) -> Result<PersistenceDiagram> {
    match kind {
        DiagramKind::Pd0 => compute_pd0(rg),
        DiagramKind::Pd0Neg => compute_pd0_neg(rg),
        DiagramKind::Exdg1 => compute_exdg1(rg),
    }
}

/// Checks a diagram kind, for callers that need matching kinds.
pub fn ensure_same_kind(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<()> {
    if a.kind != b.kind {
        return Err(Error::KindMismatch(a.kind, b.kind));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reeb::{morseify, NodeClass};
    use crate::synthetic::random_reeb_graph;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(values: &[f64], edges: &[(usize, usize)]) -> ReebGraph {
        ReebGraph::new(values.to_vec(), edges.to_vec()).unwrap()
    }

    #[test]
    fn single_edge() {
        let e = g(&[0.0, 1.0], &[(0, 1)]);
        assert_eq!(compute_pd0(&e).unwrap().sorted_pairs(), vec![(0.0, 1.0)]);
        assert_eq!(compute_pd0_neg(&e).unwrap().sorted_pairs(), vec![(-1.0, -0.0)]);
        assert!(compute_exdg1(&e).unwrap().is_empty());
    }

    #[test]
    fn w_shape() {
        // Minima 0 and 0.2 meet at the down-fork 1; maximum 2.
        let w = g(&[0.0, 0.2, 1.0, 2.0], &[(0, 2), (1, 2), (2, 3)]);
        assert_eq!(compute_pd0(&w).unwrap().sorted_pairs(), vec![(0.0, 2.0), (0.2, 1.0)]);
    }

    #[test]
    fn m_shape_mirrors_w() {
        let w = g(&[0.0, 0.2, 1.0, 2.0], &[(0, 2), (1, 2), (2, 3)]);
        let m = w.negated();
        assert_eq!(
            compute_pd0_neg(&m).unwrap().sorted_pairs(),
            compute_pd0(&w).unwrap().sorted_pairs()
        );
    }

    #[test]
    fn single_cycle() {
        // Minimum 0, up-fork 2, down-fork 5, maximum 6; two arcs 3 and 4.
        let c = g(&[0.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]);
        assert_eq!(compute_exdg1(&c).unwrap().sorted_pairs(), vec![(5.0, 2.0)]);
        assert_eq!(compute_pd0(&c).unwrap().sorted_pairs(), vec![(0.0, 6.0)]);
    }

    #[test]
    fn tree_has_no_loops() {
        let t = g(&[0.0, 0.5, 1.0, 3.0, 2.5], &[(0, 2), (1, 2), (2, 3), (2, 4)]);
        let t = morseify(&t, 1e-3);
        assert!(compute_exdg1(&t).unwrap().is_empty());
    }

    #[test]
    fn theta_graph() {
        // Up-fork chain 1 (v=1) and 2 (v=2), down-fork chain 5 (v=5) and 6 (v=6);
        // three arcs between the chains give two independent cycles.
        let theta = g(
            &[0.0, 1.0, 2.0, 3.0, 3.5, 5.0, 6.0, 7.0, 4.0],
            &[(0, 1), (1, 2), (1, 8), (2, 3), (2, 4), (3, 5), (4, 5), (5, 6), (8, 6), (6, 7)],
        );
        assert!(theta.is_morse());
        let d = compute_exdg1(&theta).unwrap();
        assert_eq!(d.sorted_pairs(), vec![(5.0, 2.0), (6.0, 1.0)]);
        assert_eq!(d.len(), theta.cycle_rank());
    }

    #[test]
    fn non_morse_input_is_rejected() {
        let y = g(&[0.0, 0.1, 0.2, 1.0], &[(0, 3), (1, 3), (2, 3)]);
        assert!(matches!(compute_pd0(&y), Err(Error::NotMorse { node: 3, .. })));
        assert!(compute_exdg1(&y).is_err());
    }

    #[test]
    fn isolated_nodes_give_empty_diagrams() {
        let one = g(&[4.0], &[]);
        for kind in DiagramKind::ALL {
            assert!(compute(&one, kind).unwrap().is_empty());
        }
    }

    #[test]
    fn csv_layout() {
        let d = compute_pd0(&g(&[0.0, 1.0], &[(0, 1)])).unwrap();
        assert_eq!(d.to_csv(), "birth,death,kind,birth_node,death_node\n0,1,pd0,0,1\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn counts_and_shift(seed in any::<u64>(), k in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = morseify(&random_reeb_graph(&mut rng, 12, 4), 1e-6);
            let classes = m.classify();
            let pd0 = compute_pd0(&m).unwrap();
            let neg = compute_pd0_neg(&m).unwrap();
            let ex = compute_exdg1(&m).unwrap();
            prop_assert_eq!(ex.len(), m.cycle_rank());
            let up_forks = classes.iter().filter(|c| **c == NodeClass::UpFork).count();
            prop_assert_eq!(neg.len(), up_forks - m.cycle_rank() + 1);
            for p in &pd0.points { prop_assert!(p.birth <= p.death); }
            for p in &neg.points { prop_assert!(p.birth <= p.death); }
            for p in &ex.points { prop_assert!(p.birth >= p.death); }
            for d in [&pd0, &neg, &ex] {
                prop_assert!(2 * d.len() <= m.node_count());
            }
            // Essential up-forks are used once each.
            let mut ups: Vec<usize> = ex.points.iter().map(|p| p.nodes[1]).collect();
            prop_assert!(ups.iter().all(|&u| classes[u] == NodeClass::UpFork));
            ups.sort_unstable();
            ups.dedup();
            prop_assert_eq!(ups.len(), ex.len());

            let shifted = m.shifted(k);
            let a = compute_pd0(&shifted).unwrap();
            for (p, q) in a.points.iter().zip(&pd0.points) {
                prop_assert_eq!(p.birth, q.birth + k);
                prop_assert_eq!(p.death, q.death + k);
            }
        }
    }
}
