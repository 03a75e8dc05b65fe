//! Drivers that run many comparisons: distance matrices and site sequences.
//!
//! Work is spread over rayon's pool but results are keyed by pair, so the
//! output never depends on the worker count or completion order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{compare_fields, shape_distance, DistanceConfig};
use crate::error::{Error, Result};
use crate::evaluate::{timeseries_peaks, Peak};
use crate::mesh::MultiFieldMesh;
use crate::spectral::EigenDescriptorSet;

/// Symmetric matrix with zero diagonal from a pair function evaluated once
/// per unordered pair `i < j`. `known` may supply finished pairs.
pub fn pairwise_matrix<F>(n: usize, known: impl Fn(usize, usize) -> Option<f64> + Sync, pair: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| match known(i, j) {
            Some(v) => Ok(v),
            None => {
                let start = std::time::Instant::now();
                let v = pair(i, j)?;
                log::info!("pair ({i}, {j}) = {v} in {:.3}s", start.elapsed().as_secs_f64());
                Ok(v)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut m = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

/// A shape ready for comparison: its geometry and eigenfunction descriptors.
#[derive(Clone, Debug)]
pub struct ShapeItem {
    pub id: String,
    pub mesh: MultiFieldMesh,
    pub descriptors: EigenDescriptorSet,
}

/// Shape distance between every pair of items using the first `count`
/// descriptors.
pub fn shape_matrix(items: &[ShapeItem], count: usize, config: &DistanceConfig) -> Result<Vec<Vec<f64>>> {
    pairwise_matrix(
        items.len(),
        |_, _| None,
        |i, j| {
            let (a, b) = (&items[i], &items[j]);
            Ok(shape_distance(&a.mesh, &a.descriptors, &b.mesh, &b.descriptors, count, config)?.total)
        },
    )
}

/// Total distance between every pair of multi-field meshes.
pub fn field_matrix(items: &[MultiFieldMesh], config: &DistanceConfig) -> Result<Vec<Vec<f64>>> {
    pairwise_matrix(items.len(), |_, _| None, |i, j| Ok(compare_fields(&items[i], &items[j], config)?.total))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesReport {
    /// `distances[t−1]` compares site `t` with site `t+1`.
    pub distances: Vec<f64>,
    pub peaks: Vec<Peak>,
}

/// Distances between consecutive sites and their ranked peaks.
pub fn timeseries(sites: &[MultiFieldMesh], config: &DistanceConfig) -> Result<TimeseriesReport> {
    if sites.len() < 2 {
        return Err(Error::Invalid("a time series needs at least two sites".into()));
    }
    let distances = (0..sites.len() - 1)
        .into_par_iter()
        .map(|t| Ok(compare_fields(&sites[t], &sites[t + 1], config)?.total))
        .collect::<Result<Vec<f64>>>()?;
    let peaks = timeseries_peaks(&distances);
    Ok(TimeseriesReport { distances, peaks })
}
