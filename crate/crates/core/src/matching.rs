//! Bipartite matching and assignment solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation `row → columns[row]` with its sum and maximum cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub columns: Vec<usize>,
    pub total: f64,
    pub max: f64,
}

impl Assignment {
    fn from_columns(cost: &[Vec<f64>], columns: Vec<usize>) -> Self {
        let total = columns.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        let max = columns.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max);
        Self { columns, total, max }
    }
}

fn validate(cost: &[Vec<f64>]) -> Result<usize> {
    let n = cost.len();
    for (i, row) in cost.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NonSquare { rows: n, cols: row.len() });
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(n)
}

/// Maximum bipartite matching (Hopcroft–Karp). `adj[l]` lists the right
/// vertices of left vertex `l`. Returns the partner of every left vertex.
pub fn maximum_matching(adj: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let n = adj.len();
    let mut left = vec![FREE; n];
    let mut right = vec![FREE; right_count];
    let mut dist = vec![0usize; n];
    loop {
        // BFS layers from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for l in 0..n {
            if left[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = right[r];
                if m == FREE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut progressed = false;
        for l in 0..n {
            if left[l] == FREE && augment(l, adj, &mut left, &mut right, &mut dist) {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    left.into_iter().map(|r| (r != FREE).then_some(r)).collect()
}

fn augment(l: usize, adj: &[Vec<usize>], left: &mut [usize], right: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let m = right[r];
        let ok = m == usize::MAX || (dist[m] == dist[l] + 1 && augment(m, adj, left, right, dist));
        if ok {
            left[l] = r;
            right[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// Perfect matching of the square graph, if one exists.
pub(crate) fn perfect_matching(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    maximum_matching(adj, adj.len()).into_iter().collect()
}

/// Minimum-sum assignment (Hungarian method with potentials, O(n³)).
pub fn hungarian(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = validate(cost)?;
    if n == 0 {
        return Ok(Assignment {
            columns: Vec::new(),
            total: 0.0,
            max: 0.0,
        });
    }
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for j in 1..=n {
        columns[p[j] - 1] = j - 1;
    }
    Ok(Assignment::from_columns(cost, columns))
}

/// Assignment minimizing the largest selected entry: binary search over the
/// sorted distinct entries for the smallest threshold admitting a perfect
/// matching.
pub fn bottleneck_assignment(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = validate(cost)?;
    if n == 0 {
        return Ok(Assignment {
            columns: Vec::new(),
            total: 0.0,
            max: 0.0,
        });
    }
    let mut values: Vec<f64> = cost.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let feasible = |t: f64| {
        let adj: Vec<Vec<usize>> = cost
            .iter()
            .map(|row| (0..n).filter(|&j| row[j] <= t).collect())
            .collect();
        perfect_matching(&adj)
    };
    let (mut lo, mut hi) = (0, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(values[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let columns = feasible(values[lo]).expect("the largest entry always admits a matching");
    Ok(Assignment::from_columns(cost, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
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

    #[test]
    fn small_cases() {
        let a = hungarian(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(a.columns, vec![0, 1]);
        assert_eq!(a.total, 0.0);
        let b = hungarian(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(b.columns, vec![1, 0]);
        assert_eq!(b.total, 3.0);
        let c = bottleneck_assignment(&[vec![1.0, 5.0], vec![5.0, 1.0]]).unwrap();
        assert_eq!(c.columns, vec![0, 1]);
        assert_eq!(c.max, 1.0);
    }

    #[test]
    fn invalid_matrices() {
        assert!(matches!(hungarian(&[vec![1.0, 2.0]]), Err(Error::NonSquare { .. })));
        assert!(matches!(
            bottleneck_assignment(&[vec![1.0, f64::NAN], vec![0.0, 0.0]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(hungarian(&[]).unwrap().columns.is_empty());
    }

    #[test]
    fn matching_on_a_path() {
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(perfect_matching(&adj), Some(vec![1, 0]));
        assert_eq!(perfect_matching(&[vec![0], vec![0]]), None);
    }

    proptest! {
        #[test]
        fn oracles(rows in prop::collection::vec(prop::collection::vec(0u8..20, 7), 1..=7)) {
            let n = rows.len();
            let cost: Vec<Vec<f64>> = rows.iter().map(|r| r[..n].iter().map(|&v| v as f64).collect()).collect();
            let perms = permutations(n);
            let best_sum = perms.iter().map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>()).fold(f64::INFINITY, f64::min);
            let best_max = perms.iter().map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)).fold(f64::INFINITY, f64::min);
            let h = hungarian(&cost).unwrap();
            let b = bottleneck_assignment(&cost).unwrap();
            prop_assert_eq!(h.total, best_sum);
            prop_assert_eq!(b.max, best_max);
            prop_assert!(b.max <= h.max);
        }
    }
}
