//! Bottleneck distance between persistence diagrams.
//!
//! Each side is augmented with the diagonal projections of the other side's
//! points, so every point may be matched either to a point or to its nearest
//! diagonal point (at L∞ distance half its persistence). The distance is the
//! smallest threshold admitting a perfect matching of the augmented graph.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matching::perfect_matching;
use crate::persistence::{ensure_same_kind, PersistenceDiagram};

/// One pair of a matching. `None` stands for the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub cost: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    /// Largest pair cost.
    pub cost: f64,
}

pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn half_persistence(a: (f64, f64)) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

/// Bottleneck distance and an optimal matching between point sets.
pub fn bottleneck_points(x: &[(f64, f64)], y: &[(f64, f64)]) -> (f64, Matching) {
    let (n, m) = (x.len(), y.len());
    if n + m == 0 {
        return (0.0, Matching::default());
    }
    // Left: x points, then diagonal copies of y. Right: y points, then
    // diagonal copies of x.
    let size = n + m;
    let edge_cost = |l: usize, r: usize| -> Option<f64> {
        match (l < n, r < m) {
            (true, true) => Some(linf(x[l], y[r])),
            (true, false) => (r - m == l).then(|| half_persistence(x[l])),
            (false, true) => (l - n == r).then(|| half_persistence(y[r])),
            (false, false) => Some(0.0),
        }
    };
    let mut candidates: Vec<f64> = vec![0.0];
    for l in 0..size {
        for r in 0..size {
            if let Some(c) = edge_cost(l, r) {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |t: f64| {
        let adj: Vec<Vec<usize>> = (0..size)
            .map(|l| (0..size).filter(|&r| edge_cost(l, r).is_some_and(|c| c <= t)).collect())
            .collect();
        perfect_matching(&adj)
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let partner = feasible(candidates[lo]).expect("largest candidate is always feasible");
    let mut pairs = Vec::new();
    for (l, &r) in partner.iter().enumerate() {
        let cost = edge_cost(l, r).unwrap();
        match (l < n, r < m) {
            (true, true) => pairs.push(MatchedPair {
                left: Some(l),
                right: Some(r),
                cost,
            }),
            (true, false) => pairs.push(MatchedPair {
                left: Some(l),
                right: None,
                cost,
            }),
            (false, true) => pairs.push(MatchedPair {
                left: None,
                right: Some(r),
                cost,
            }),
            (false, false) => {}
        }
    }
    let cost = pairs.iter().map(|p| p.cost).fold(0.0, f64::max);
    (cost, Matching { pairs, cost })
}

/// Bottleneck distance between two diagrams of the same kind.
pub fn bottleneck(x: &PersistenceDiagram, y: &PersistenceDiagram) -> Result<(f64, Matching)> {
    ensure_same_kind(x, y)?;
    let px: Vec<_> = x.points.iter().map(|p| (p.birth, p.death)).collect();
    let py: Vec<_> = y.points.iter().map(|p| (p.birth, p.death)).collect();
    Ok(bottleneck_points(&px, &py))
}
