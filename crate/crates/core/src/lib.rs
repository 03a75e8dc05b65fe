//! Topological distances between multi-fields.
//!
//! The pipeline runs mesh → [`JointContourNet`] → [`Mdrg`] → persistence
//! diagrams → bottleneck-based distances. Spectral descriptors turn a single
//! surface into a stack of scalar fields so shapes can be compared the same
//! way.

pub mod bottleneck;
pub mod distance;
pub mod error;
pub mod evaluate;
pub mod grid;
pub mod io;
pub mod jcn;
pub mod matching;
pub mod mdrg;
pub mod mesh;
pub mod persistence;
pub mod pipeline;
pub mod quantize;
pub mod reeb;
pub mod spectral;
pub mod synthetic;
pub mod union_find;

pub use bottleneck::{bottleneck, Matching, MatchedPair};
pub use distance::{
    compare_fields, generalized_distance, mdrg_distance, optimal_bijection, shape_distance, total_distance, Bijection,
    BijectionObjective, DistanceConfig, DistanceReport, KindReport, ShapeReport, Weights,
};
pub use error::{Error, Result};
pub use evaluate::{retrieval_metrics, timeseries_peaks, LabeledDistanceMatrix, Peak, RetrievalMetrics};
pub use grid::grid_to_mesh;
pub use jcn::{build_jcn, FragmentMode, JointContourNet};
pub use matching::{bottleneck_assignment, hungarian, Assignment};
pub use mdrg::{build_mdrg, Mdrg};
pub use mesh::{MultiFieldMesh, Point3, RegularGrid};
pub use pipeline::{pairwise_matrix, shape_matrix, timeseries, ShapeItem, TimeseriesReport};
pub use persistence::{compute_exdg1, compute_pd0, compute_pd0_neg, DiagramKind, DiagramPoint, PersistenceDiagram};
pub use quantize::Quantization;
pub use reeb::{morseify, NodeClass, ReebGraph};
pub use spectral::{
    cotangent_laplacian, descriptors, mesh_descriptors, solve_eigen, EigenDescriptorSet, Eigenpairs, LaplaceOperator,
    LaplaceOptions,
};
