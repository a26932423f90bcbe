//! Error types, one enum per pipeline stage.

use thiserror::Error;

/// Errors from OBJ parsing and mesh validation.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("malformed mesh at line {line}: {reason}")]
    MalformedMesh { line: usize, reason: String },
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from grid construction, classification and map files.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid of {cells} cells exceeds the budget of {budget} (resolution too fine for these bounds)")]
    GridTooLarge { cells: u128, budget: u64 },
    #[error("free-space seed {reason}")]
    SeedInvalid { reason: String },
    #[error("invalid slice config: {0}")]
    InvalidConfig(String),
    #[error("malformed map file: {0}")]
    MalformedMap(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from clearance-field and navigation-graph extraction.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("grid contains no occupied cell; clearance is undefined")]
    NoObstacles,
    #[error("no ridge cell satisfies the minimum clearance of {min_clearance} m")]
    EmptyGraph { min_clearance: f64 },
    #[error("invalid graph config: {0}")]
    InvalidConfig(String),
    #[error("malformed graph file: {0}")]
    MalformedGraph(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from pose sampling and pose files.
#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error("empty graph: nothing to sample")]
    EmptyGraph,
    #[error("malformed pose file at line {line}: {reason}")]
    MalformedPoses { line: usize, reason: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from annotation/prediction files and the split protocol.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("schema error in record '{image_id}': {reason}")]
    SchemaError { image_id: String, reason: String },
    #[error("environment '{env_id}' has {count} images; at least {required} required to split")]
    TooFewImages {
        env_id: String,
        count: usize,
        required: usize,
    },
    #[error("unknown environment '{0}'")]
    UnknownEnvironment(String),
    #[error("records span multiple environments ({0} and {1}); split one environment at a time")]
    MixedEnvironments(String, String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from detector evaluation and report aggregation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction references unknown image '{image_id}'")]
    ImageMismatch { image_id: String },
    #[error("no ground-truth box of class '{class}'; AP is undefined")]
    NoGroundTruth { class: String },
    #[error("invalid eval config: {0}")]
    InvalidConfig(String),
    #[error("detector '{label}' is missing environment '{env_id}' present in the reference")]
    EnvMismatch { label: String, env_id: String },
    #[error("compare_reports needs at least one detector")]
    NoDetectors,
}
