//! Brute-force oracles shared by the integration tests. Each one recomputes
//! its answer from definitions, without the library's data structures.

#![allow(dead_code)]

use reebdist::ReebGraph;

/// Sorted `(birth, death)` pairs.
pub type Pairs = Vec<(f64, f64)>;

pub fn sorted(mut v: Pairs) -> Pairs {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

/// Node order by `(value, id)`, optionally reversed.
fn order(g: &ReebGraph, reverse: bool) -> Vec<usize> {
    let mut o: Vec<usize> = (0..g.node_count()).collect();
    o.sort_by(|&a, &b| g.value(a).total_cmp(&g.value(b)).then(a.cmp(&b)));
    if reverse {
        o.reverse();
    }
    o
}

/// Connected components of the subgraph induced by `alive`, by BFS. Each
/// component is listed as its node set.
fn components(g: &ReebGraph, alive: &[bool]) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &w in &adj[u] {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Sublevel-set sweep: at every step recompute the components from scratch;
/// whenever several old components merge, all but the one with the oldest
/// minimum die. Components with an edge add `(min, max)`. Values are read
/// as `−f` when `negate` is set.
pub fn pd0_oracle(g: &ReebGraph, negate: bool) -> Pairs {
    let ord = order(g, negate);
    let pos: Vec<usize> = {
        let mut p = vec![0; ord.len()];
        for (i, &u) in ord.iter().enumerate() {
            p[u] = i;
        }
        p
    };
    let val = |u: usize| if negate { -g.value(u) } else { g.value(u) };
    let n = g.node_count();
    let mut alive = vec![false; n];
    let mut out = Vec::new();
    for &u in &ord {
        let before = components(g, &alive);
        alive[u] = true;
        let after = components(g, &alive);
        let merged = after.iter().find(|c| c.contains(&u)).unwrap();
        let mut oldest: Vec<usize> = before
            .iter()
            .filter(|c| c.iter().any(|x| merged.contains(x)))
            .map(|c| *c.iter().min_by_key(|&&x| pos[x]).unwrap())
            .collect();
        oldest.sort_by_key(|&x| pos[x]);
        for &m in oldest.iter().skip(1) {
            out.push((val(m), val(u)));
        }
    }
    let all = vec![true; n];
    for comp in components(g, &all) {
        if comp.len() > 1 {
            let lo = *comp.iter().min_by_key(|&&x| pos[x]).unwrap();
            let hi = *comp.iter().max_by_key(|&&x| pos[x]).unwrap();
            out.push((val(lo), val(hi)));
        }
    }
    sorted(out)
}

/// Every simple path from `a` to `b` through allowed nodes; returns the
/// largest achievable minimum value along a path (in `(value, id)` order).
fn widest_simple_path(g: &ReebGraph, allowed: &[bool], a: usize, b: usize) -> Option<usize> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for &(x, y) in g.edges() {
        adj[x].push(y);
        adj[y].push(x);
    }
    let key = |u: usize| (g.value(u), u);
    let mut best: Option<usize> = None;
    fn dfs(
        u: usize,
        b: usize,
        low: usize,
        adj: &[Vec<usize>],
        allowed: &[bool],
        on_path: &mut [bool],
        best: &mut Option<usize>,
        key: &dyn Fn(usize) -> (f64, usize),
    ) {
        if u == b {
            if best.map_or(true, |x| key(low) > key(x)) {
                *best = Some(low);
            }
            return;
        }
        for &w in &adj[u] {
            if allowed[w] && !on_path[w] {
                on_path[w] = true;
                let nl = if key(w) < key(low) { w } else { low };
                dfs(w, b, nl, adj, allowed, on_path, best, key);
                on_path[w] = false;
            }
        }
    }
    let mut on_path = vec![false; n];
    on_path[a] = true;
    dfs(a, b, a, &adj, allowed, &mut on_path, &mut best, &key);
    best
}

/// For every down-fork whose two lower neighbours are joined below it, the
/// cycle through it with the largest minimum, found by enumerating simple
/// paths between the two lower neighbours.
pub fn exdg1_oracle(g: &ReebGraph) -> Pairs {
    let key = |u: usize| (g.value(u), u);
    let n = g.node_count();
    let mut out = Vec::new();
    for u in 0..n {
        let down: Vec<usize> = g
            .edges()
            .iter()
            .filter_map(|&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None })
            .filter(|&w| key(w) < key(u))
            .collect();
        if down.len() != 2 {
            continue;
        }
        let allowed: Vec<bool> = (0..n).map(|x| key(x) < key(u)).collect();
        if let Some(v) = widest_simple_path(g, &allowed, down[0], down[1]) {
            out.push((g.value(u), g.value(v)));
        }
    }
    sorted(out)
}

pub fn diagram_pairs(d: &reebdist::PersistenceDiagram) -> Pairs {
    sorted(d.points.iter().map(|p| (p.birth, p.death)).collect())
}

pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn half(a: (f64, f64)) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

/// Bottleneck distance by enumerating every partial injection of `x` into
/// `y`; unmatched points go to the diagonal.
pub fn bottleneck_oracle(x: &[(f64, f64)], y: &[(f64, f64)]) -> f64 {
    fn go(i: usize, x: &[(f64, f64)], y: &[(f64, f64)], used: &mut [bool], worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == x.len() {
            let rest = y
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(p, _)| half(*p))
                .fold(worst, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, x, y, used, worst.max(half(x[i])), best);
        for j in 0..y.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, x, y, used, worst.max(linf(x[i], y[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, x, y, &mut vec![false; y.len()], 0.0, &mut best);
    best
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// `(min sum, min max)` over all permutations.
pub fn assignment_oracle(cost: &[Vec<f64>]) -> (f64, f64) {
    let mut best = (f64::INFINITY, f64::INFINITY);
    for p in permutations(cost.len()) {
        let sum: f64 = p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        let max = p.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max);
        best = (best.0.min(sum), best.1.min(max));
    }
    best
}

/// A Reeb graph with global minimum 1 and global maximum 12: two minima
/// merging at 4, a loop from the up-fork at 5 to the down-fork at 9, and an
/// up-fork at 10 splitting into maxima 11 and 12.
pub fn looped_graph() -> ReebGraph {
    ReebGraph::new(
        vec![1.0, 3.0, 4.0, 5.0, 6.0, 7.0, 9.0, 10.0, 11.0, 12.0],
        vec![(0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6), (6, 7), (7, 8), (7, 9)],
    )
    .unwrap()
}
