//! doorscape-core — turn indoor 3D meshes into robot-plausible camera-pose
//! datasets and evaluate door-status detectors.
//!
//! The pipeline stages are:
//!
//! 1. **mesh/slicing** – load a triangle mesh and cut it with parallel
//!    horizontal planes into 2D obstacle segments.
//! 2. **grid** – aggregate all cross-sections into a metric occupancy grid
//!    and flood-fill the reachable free space.
//! 3. **clearance/ridge/graph** – exact Euclidean clearance field,
//!    generalized Voronoi ridge, and the pruned navigation graph.
//! 4. **sampler** – spaced position sampling on the graph and expansion
//!    into camera acquisition poses (two heights, eight headings by
//!    default).
//! 5. **dataset/eval/report** – annotation records, the leave-one-out and
//!    quarter-split protocol, TP/FP/BFD matching, per-class average
//!    precision, confidence sweeps, and cross-detector tables.
//!
//! All metric math is generic over the [`Scalar`] floating type; the
//! `*64` aliases below fix `f64`, which is what the CLI uses.

pub mod clearance;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod grid;
pub mod grid_io;
pub mod mesh;
pub mod report;
pub mod ridge;
pub mod sampler;
pub mod scalar;
pub mod slicing;

pub use clearance::{distance_transform, ClearanceField};
pub use dataset::{
    compose_finetune_sets, leave_one_out, load_records, parse_records, records_to_jsonl,
    save_records, split_environment, BBox, DoorStatus, FinetuneSets, ImageRecord, RecordKind,
    SplitPlan,
};
pub use error::{DatasetError, EvalError, GraphError, GridError, MeshError, SamplerError};
pub use eval::{
    average_precision, evaluate, iou, match_image, pr_curve, sweep_confidence, ClassAp, Counts,
    EnvBreakdown, EvalConfig, EvalReport, MatchOutcome, MatchRef, SweepPoint,
};
pub use graph::{build_graph, GraphConfig, GraphEdge, GraphNode, NavGraph};
pub use grid::{
    classify_free_space, rasterize_slices, rasterize_slices_bounded, CellState, OccupancyGrid,
    DEFAULT_CELL_BUDGET,
};
pub use grid_io::{from_pgm_bytes, read_map, to_pgm_bytes, to_yaml_string, write_map};
pub use mesh::{load_mesh, parse_obj, TriangleMesh};
pub use report::{compare_reports, render_counts_table, AggregateStat, ComparisonTable};
pub use ridge::{extract_voronoi_ridge, RidgeSet};
pub use sampler::{
    enumerate_camera_poses, poses_from_jsonl, poses_to_csv, poses_to_jsonl, sample_positions,
    CameraPose, SamplePosition, SamplerConfig,
};
pub use scalar::Scalar;
pub use slicing::{slice_mesh, slice_plane, PlaneSlice, Segment2D, SliceConfig};

/// Double-precision aliases for the common pipeline.
pub type TriangleMesh64 = mesh::TriangleMesh<f64>;
pub type SliceConfig64 = slicing::SliceConfig<f64>;
pub type OccupancyGrid64 = grid::OccupancyGrid<f64>;
pub type ClearanceField64 = clearance::ClearanceField<f64>;
pub type GraphConfig64 = graph::GraphConfig<f64>;
pub type NavGraph64 = graph::NavGraph<f64>;
pub type SamplerConfig64 = sampler::SamplerConfig<f64>;
pub type CameraPose64 = sampler::CameraPose<f64>;
pub type ImageRecord64 = dataset::ImageRecord<f64>;
pub type EvalConfig64 = eval::EvalConfig<f64>;
pub type EvalReport64 = eval::EvalReport<f64>;
