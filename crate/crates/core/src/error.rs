use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face {face} has {arity} vertices; only triangles are supported")]
    NonTriangleFace { face: usize, arity: usize },

    #[error("simplex {simplex} references vertex {index}, but the mesh has {count} vertices")]
    IndexOutOfRange {
        simplex: usize,
        index: usize,
        count: usize,
    },

    #[error("simplices must all have the same dimension (found {first} and {other})")]
    MixedSimplexDimension { first: usize, other: usize },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("field `{0}` already exists")]
    DuplicateField(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("triangle {simplex} is degenerate (zero area)")]
    DegenerateTriangle { simplex: usize },

    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("operation requires a triangle mesh")]
    NotTriangleMesh,

    #[error("requested {requested} eigenpairs but the mesh has only {vertices} vertices")]
    TooManyEigenpairs { requested: usize, vertices: usize },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("eigenvalue {index} is {value}, expected a positive value")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("requested {requested} descriptors, only {available} available")]
    NotEnoughDescriptors { requested: usize, available: usize },

    #[error("slab count must be at least 1")]
    ZeroSlabs,

    #[error("{fields} fields exceed the simplex dimension {dimension}; the Reeb space is undefined")]
    TooManyFields { fields: usize, dimension: usize },

    #[error("expected {expected} quantizations, got {actual}")]
    QuantizationCount { expected: usize, actual: usize },

    #[error("empty joint contour net")]
    EmptyJcn,

    #[error("field index {index} out of range for {fields} fields")]
    FieldIndex { index: usize, fields: usize },

    #[error("Reeb graph is not Morse: node {node} has up-degree {up} and down-degree {down}")]
    NotMorse { node: usize, up: usize, down: usize },

    #[error("diagram kinds differ: {0:?} vs {1:?}")]
    KindMismatch(crate::DiagramKind, crate::DiagramKind),

    #[error("cost matrix must be square (got {rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("cost matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("MDRGs were built over different quantizations")]
    QuantizationMismatch,

    #[error("MDRG level counts differ: {0} vs {1}")]
    LevelMismatch(usize, usize),

    #[error("invalid weights {0:?}: must be nonnegative and sum to 1")]
    InvalidWeights([f64; 3]),

    #[error("class `{0}` has a single member")]
    SingletonClass(String),

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
