//! Retrieval metrics over a labeled distance matrix, and peak picking on a
//! sequence of distances.
//!
//! Every query ranks the other items by `(distance, index)`. With `C` the
//! query's class (itself included):
//! - NN: the first retrieved item shares the class.
//! - 1-Tier / 2-Tier: recall within the first `|C|−1` / `2(|C|−1)` results.
//! - E-measure: `2PR/(P+R)` over the first `min(cutoff, |C|−1)` results.
//! - DCG: gain 1 for class members, discount `1/log2(rank)` from rank 2,
//!   divided by the DCG of the ideal ranking.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_EMEASURE_CUTOFF: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDistanceMatrix {
    ids: Vec<String>,
    values: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl LabeledDistanceMatrix {
    pub fn new(values: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let ids = (0..values.len()).map(|i| i.to_string()).collect();
        Self::with_ids(ids, values, labels)
    }

    pub fn with_ids(ids: Vec<String>, values: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let n = values.len();
        if labels.len() != n || ids.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: labels.len().min(ids.len()),
            });
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare { rows: n, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::InvalidMatrix(format!("negative entry at ({i}, {j})")));
                }
                if (v - values[j][i]).abs() > 1e-9 {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
        }
        Ok(Self { ids, values, labels })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Matrix CSV: a header `id,<id1>,…` then one `<id>,<values…>` row per
    /// item. Labels CSV: `id,label` rows after a header; ids are matched by
    /// name.
    pub fn from_csv(matrix: &str, labels: &str) -> Result<Self> {
        let (ids, values) = parse_matrix_csv(matrix)?;
        let mut by_id = BTreeMap::new();
        for (n, line) in labels.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (id, label) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: "expected id,label".into(),
            })?;
            by_id.insert(id.trim().to_string(), label.trim().to_string());
        }
        let labels = ids
            .iter()
            .map(|id| by_id.get(id).cloned().ok_or_else(|| Error::UnknownField(id.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::with_ids(ids, values, labels)
    }

    pub fn load(matrix: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<Self> {
        let m = std::fs::read_to_string(matrix.as_ref()).map_err(|e| Error::io(matrix.as_ref(), e))?;
        let l = std::fs::read_to_string(labels.as_ref()).map_err(|e| Error::io(labels.as_ref(), e))?;
        Self::from_csv(&m, &l)
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty matrix".into(),
    })?;
    let ids: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    let mut values = Vec::with_capacity(ids.len());
    for (n, line) in lines {
        let mut cells = line.split(',');
        let id = cells.next().unwrap_or("").trim();
        if id != ids.get(values.len()).map(String::as_str).unwrap_or("") {
            return Err(Error::Parse {
                line: n + 1,
                message: format!("row id {id} does not follow the header order"),
            });
        }
        let row = cells
            .map(|c| {
                c.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: n + 1,
                    message: format!("not a number: {c}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        values.push(row);
    }
    if values.len() != ids.len() {
        return Err(Error::NonSquare {
            rows: values.len(),
            cols: ids.len(),
        });
    }
    Ok((ids, values))
}

/// Inverse of [`parse_matrix_csv`]. Values use the shortest round-trip form.
pub fn format_matrix_csv(ids: &[String], values: &[Vec<f64>]) -> String {
    let mut out = String::from("id");
    for id in ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for (id, row) in ids.iter().zip(values) {
        out.push_str(id);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalMetrics {
    pub nn: f64,
    pub tier1: f64,
    pub tier2: f64,
    pub emeasure: f64,
    pub dcg: f64,
}

pub fn retrieval_metrics(m: &LabeledDistanceMatrix) -> Result<RetrievalMetrics> {
    retrieval_metrics_with_cutoff(m, DEFAULT_EMEASURE_CUTOFF)
}

pub fn retrieval_metrics_with_cutoff(m: &LabeledDistanceMatrix, cutoff: usize) -> Result<RetrievalMetrics> {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &m.labels {
        *sizes.entry(l.as_str()).or_default() += 1;
    }
    if let Some((l, _)) = sizes.iter().find(|(_, &s)| s < 2) {
        return Err(Error::SingletonClass(l.to_string()));
    }
    if cutoff == 0 {
        return Err(Error::Invalid("e-measure cutoff must be positive".into()));
    }
    let n = m.len();
    let per_query: Vec<[f64; 5]> = (0..n).into_par_iter().map(|i| query_metrics(m, &sizes, i, cutoff)).collect();
    let mean = |k: usize| per_query.iter().map(|q| q[k]).sum::<f64>() / n as f64;
    Ok(RetrievalMetrics {
        nn: mean(0),
        tier1: mean(1),
        tier2: mean(2),
        emeasure: mean(3),
        dcg: mean(4),
    })
}

/// `[nn, tier1, tier2, emeasure, dcg]` of query `i`.
fn query_metrics(m: &LabeledDistanceMatrix, sizes: &BTreeMap<&str, usize>, i: usize, cutoff: usize) -> [f64; 5] {
    let n = m.len();
    let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| m.values[i][a].total_cmp(&m.values[i][b]).then(a.cmp(&b)));
    let hits: Vec<bool> = order.iter().map(|&j| m.labels[j] == m.labels[i]).collect();
    let rel = sizes[m.labels[i].as_str()] - 1;
    let found = |k: usize| hits.iter().take(k).filter(|&&h| h).count() as f64;
    let nn = if hits[0] { 1.0 } else { 0.0 };
    let tier1 = found(rel) / rel as f64;
    let tier2 = found(2 * rel) / rel as f64;
    let k = cutoff.min(rel);
    let (p, r) = (found(k) / k as f64, found(k) / rel as f64);
    let e = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    let discount = |rank: usize| if rank == 1 { 1.0 } else { 1.0 / (rank as f64).log2() };
    let dcg: f64 = hits.iter().enumerate().filter(|(_, &h)| h).map(|(r, _)| discount(r + 1)).sum();
    let ideal: f64 = (1..=rel).map(discount).sum();
    [nn, tier1, tier2, e, dcg / ideal]
}

/// A local maximum of the distance sequence. `t` is 1-based: the peak
/// measures the step from site `t` to site `t+1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: usize,
    pub distance: f64,
    pub prominence: f64,
}

/// Peaks ranked by prominence (then distance, then position).
///
/// A peak is a maximal run of equal values whose existing neighbours are
/// strictly smaller; every position of the run is reported. A side's
/// shoulder is the lowest value between the run and the nearest higher
/// value on that side (or the end of the sequence), and the prominence is
/// the value minus the higher of the two shoulders.
pub fn timeseries_peaks(distances: &[f64]) -> Vec<Peak> {
    let n = distances.len();
    let mut peaks = Vec::new();
    let mut start = 0;
    while start < n {
        let v = distances[start];
        let mut end = start;
        while end + 1 < n && distances[end + 1] == v {
            end += 1;
        }
        let left = start.checked_sub(1).map(|i| distances[i]);
        let right = distances.get(end + 1).copied();
        let is_peak = (left.is_some() || right.is_some()) && left.map_or(true, |l| l < v) && right.map_or(true, |r| r < v);
        if is_peak {
            let mut shoulders = Vec::new();
            if left.is_some() {
                shoulders.push(
                    distances[..start]
                        .iter()
                        .rev()
                        .take_while(|&&x| x <= v)
                        .fold(f64::INFINITY, |a, &b| a.min(b)),
                );
            }
            if right.is_some() {
                shoulders.push(
                    distances[end + 1..]
                        .iter()
                        .take_while(|&&x| x <= v)
                        .fold(f64::INFINITY, |a, &b| a.min(b)),
                );
            }
            let prominence = v - shoulders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for i in start..=end {
                peaks.push(Peak {
                    t: i + 1,
                    distance: v,
                    prominence,
                });
            }
        }
        start = end + 1;
    }
    peaks.sort_by(|a, b| {
        b.prominence
            .total_cmp(&a.prominence)
            .then(b.distance.total_cmp(&a.distance))
            .then(a.t.cmp(&b.t))
    });
    peaks
}

/// `t,distance,prominence` rows in rank order.
pub fn peaks_to_csv(peaks: &[Peak]) -> String {
    let mut out = String::from("t,distance,prominence\n");
    for p in peaks {
        let _ = writeln!(out, "{},{},{}", p.t, p.distance, p.prominence);
    }
    out
}

/// Whitespace-separated `t distance` columns for gnuplot.
pub fn distances_to_gnuplot(distances: &[f64]) -> String {
    let mut out = String::from("# t distance\n");
    for (i, d) in distances.iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn block(classes: usize, per: usize) -> (Vec<Vec<f64>>, Vec<String>) {
        let n = classes * per;
        let values = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else if i / per == j / per { 0.5 } else { 1.0 }).collect())
            .collect();
        (values, (0..n).map(|i| format!("c{}", i / per)).collect())
    }

    #[test]
    fn perfect_retrieval() {
        let (v, l) = block(3, 4);
        let r = retrieval_metrics(&LabeledDistanceMatrix::new(v, l).unwrap()).unwrap();
        assert_eq!(
            r,
            RetrievalMetrics {
                nn: 1.0,
                tier1: 1.0,
                tier2: 1.0,
                emeasure: 1.0,
                dcg: 1.0
            }
        );
    }

    #[test]
    fn four_items_by_hand() {
        // Items 0,1 in class a; 2,3 in class b. Item 0's nearest is 2.
        let v = vec![
            vec![0.0, 3.0, 1.0, 4.0],
            vec![3.0, 0.0, 5.0, 6.0],
            vec![1.0, 5.0, 0.0, 2.0],
            vec![4.0, 6.0, 2.0, 0.0],
        ];
        let m = LabeledDistanceMatrix::new(v, labels(&["a", "a", "b", "b"])).unwrap();
        let r = retrieval_metrics(&m).unwrap();
        // Rankings: 0 -> [2,1,3], 1 -> [0,2,3], 2 -> [0,3,1], 3 -> [2,0,1].
        assert_eq!(r.nn, 0.5);
        assert_eq!(r.tier1, 0.5);
        assert_eq!(r.tier2, 1.0);
        assert_eq!(r.emeasure, 0.5);
        // Every query finds its partner within two ranks; discount 1 either way.
        assert_eq!(r.dcg, 1.0);
    }

    #[test]
    fn dcg_by_hand() {
        // Items on a line; query 0 ranks [1, 3, 2, 4, 5] with hits at 1 and 3.
        let x = [0.0, 1.0, 3.0, 2.0, 4.0, 5.0];
        let v: Vec<Vec<f64>> = x.iter().map(|a: &f64| x.iter().map(|b| (a - b).abs()).collect()).collect();
        let m = LabeledDistanceMatrix::new(v, labels(&["a", "a", "a", "b", "b", "b"])).unwrap();
        let sizes = BTreeMap::from([("a", 3), ("b", 3)]);
        let q = query_metrics(&m, &sizes, 0, 32);
        assert_eq!(q[0], 1.0);
        assert_eq!(q[1], 0.5);
        assert_eq!(q[2], 1.0);
        // P = R = 1/2 over the first two results.
        assert_eq!(q[3], 0.5);
        assert!((q[4] - (1.0 + 1.0 / 3f64.log2()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            retrieval_metrics(&LabeledDistanceMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], labels(&["a", "b"])).unwrap()),
            Err(Error::SingletonClass(_))
        ));
        assert!(LabeledDistanceMatrix::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]], labels(&["a", "a"])).is_err());
        assert!(LabeledDistanceMatrix::new(vec![vec![1.0]], labels(&["a"])).is_err());
        assert!(LabeledDistanceMatrix::new(vec![vec![0.0]], labels(&[])).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let (v, l) = block(2, 2);
        let ids: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
        let text = format_matrix_csv(&ids, &v);
        let lab: String = std::iter::once("id,label\n".to_string())
            .chain(ids.iter().zip(&l).rev().map(|(i, c)| format!("{i},{c}\n")))
            .collect();
        let m = LabeledDistanceMatrix::from_csv(&text, &lab).unwrap();
        assert_eq!(m.values(), v.as_slice());
        assert_eq!(m.labels(), l.as_slice());
    }

    #[test]
    fn shuffled_labels_give_chance_nn() {
        // Structured matrix: 10 true classes of 20 items; labels shuffled.
        let (v, truth) = block(10, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let runs = 200;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..runs {
            let mut l = truth.clone();
            l.shuffle(&mut rng);
            let nn = retrieval_metrics(&LabeledDistanceMatrix::new(v.clone(), l).unwrap()).unwrap().nn;
            sum += nn;
            sq += nn * nn;
        }
        let mean = sum / runs as f64;
        let sd = ((sq / runs as f64 - mean * mean).max(0.0) / runs as f64).sqrt();
        // A random other item shares the class with probability 19/199.
        let expected = 19.0 / 199.0;
        assert!((mean - expected).abs() <= 3.0 * sd.max(1e-3), "{mean} vs {expected}");
    }

    #[test]
    fn peaks_examples() {
        assert!(timeseries_peaks(&[0.0; 5]).is_empty());
        // Anomalous site k=4 among 6: steps 3 and 4 jump.
        let p = timeseries_peaks(&[0.0, 0.0, 2.0, 2.0, 0.0]);
        assert_eq!(p.iter().map(|p| p.t).collect::<Vec<_>>(), vec![3, 4]);
        assert!(p.iter().all(|p| p.prominence == 2.0));
        let q = timeseries_peaks(&[1.0, 3.0, 2.0, 5.0, 0.5]);
        // Shoulders 1 (left) and 0.5 (right); the higher one counts.
        assert_eq!(q[0].t, 4);
        assert_eq!(q[0].prominence, 4.0);
        assert_eq!(q[1].t, 2);
        assert_eq!(q[1].prominence, 1.0);
        assert_eq!(timeseries_peaks(&[2.0, 1.0])[0].t, 1);
        assert!(timeseries_peaks(&[4.0]).is_empty());
    }

    #[test]
    fn peak_report_formats() {
        let p = timeseries_peaks(&[0.0, 1.5, 0.0]);
        assert_eq!(peaks_to_csv(&p), "t,distance,prominence\n2,1.5,1.5\n");
        assert_eq!(distances_to_gnuplot(&[0.5]), "# t distance\n1 0.5\n");
    }

    fn matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<String>)> {
        (4usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..10, n * n),
                prop::collection::vec(0usize..2, n),
            )
                .prop_map(move |(raw, cls)| {
                    let v = (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| if i == j { 0.0 } else { raw[i.min(j) * n + i.max(j)] as f64 })
                                .collect()
                        })
                        .collect();
                    // Guarantee two members per class.
                    let l = (0..n)
                        .map(|i| if i < 2 { "a".into() } else if i < 4 { "b".into() } else { ["a", "b"][cls[i]].into() })
                        .collect();
                    (v, l)
                })
        })
    }

    proptest! {
        #[test]
        fn metrics_are_rank_based((v, l) in matrix(), perm_seed in any::<u64>()) {
            let m = LabeledDistanceMatrix::new(v.clone(), l.clone()).unwrap();
            let r = retrieval_metrics(&m).unwrap();
            for x in [r.nn, r.tier1, r.tier2, r.emeasure, r.dcg] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&x));
            }
            let mono: Vec<Vec<f64>> = v.iter().map(|row| row.iter().map(|&x| (x * 3.0).exp() - 1.0).collect()).collect();
            let r2 = retrieval_metrics(&LabeledDistanceMatrix::new(mono, l.clone()).unwrap()).unwrap();
            prop_assert_eq!(r, r2);

            let n = v.len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
            let pv = (0..n).map(|i| (0..n).map(|j| v[perm[i]][perm[j]]).collect()).collect();
            let pl = perm.iter().map(|&i| l[i].clone()).collect();
            let r3 = retrieval_metrics(&LabeledDistanceMatrix::new(pv, pl).unwrap()).unwrap();
            // Ties may reorder under relabeling; NN is invariant up to ties,
            // so compare on tie-free matrices only.
            let tie_free = (0..n).all(|i| {
                let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| v[i][j]).collect();
                row.sort_by(f64::total_cmp);
                row.len() < 2 || row[0] != row[1]
            });
            if tie_free {
                prop_assert_eq!(r.nn, r3.nn);
            }
        }
    }
}
