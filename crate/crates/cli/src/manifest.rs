//! TOML pipeline manifest with flat per-stage tables. Command-line flags
//! override manifest values, which override the built-in defaults.

use std::path::{Path, PathBuf};

use doorscape_core::{EvalConfig64, GraphConfig64, SamplerConfig64, SliceConfig64};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub mesh: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub slice: SliceSection,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSection {
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub z_step: Option<f64>,
    pub resolution: Option<f64>,
    pub padding: Option<usize>,
    pub cell_budget: Option<u64>,
    pub free_seed: Option<[f64; 2]>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub min_clearance: Option<f64>,
    pub spur_prune_length: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub min_distance: Option<f64>,
    pub heights: Option<Vec<f64>>,
    pub yaw_count: Option<usize>,
    pub yaw_start: Option<f64>,
    pub shuffle_ties: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub rho_a: Option<f64>,
    pub rho_c: Option<f64>,
    pub max_detections: Option<usize>,
}

impl Manifest {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Manifest::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))
    }

    /// Slice config from defaults, manifest, then explicit overrides.
    #[allow(clippy::too_many_arguments)]
    pub fn slice_config(
        &self,
        z_min: Option<f64>,
        z_max: Option<f64>,
        z_step: Option<f64>,
        resolution: Option<f64>,
        padding: Option<usize>,
    ) -> SliceConfig64 {
        let defaults = SliceConfig64::default();
        SliceConfig64 {
            z_min: z_min.or(self.slice.z_min).unwrap_or(defaults.z_min),
            z_max: z_max.or(self.slice.z_max).unwrap_or(defaults.z_max),
            z_step: z_step.or(self.slice.z_step).unwrap_or(defaults.z_step),
            resolution: resolution
                .or(self.slice.resolution)
                .unwrap_or(defaults.resolution),
            padding: padding.or(self.slice.padding).unwrap_or(defaults.padding),
        }
    }

    pub fn graph_config(
        &self,
        min_clearance: Option<f64>,
        spur_prune_length: Option<f64>,
    ) -> GraphConfig64 {
        let defaults = GraphConfig64::default();
        GraphConfig64 {
            min_clearance: min_clearance
                .or(self.graph.min_clearance)
                .unwrap_or(defaults.min_clearance),
            spur_prune_length: spur_prune_length
                .or(self.graph.spur_prune_length)
                .unwrap_or(defaults.spur_prune_length),
        }
    }

    pub fn sampler_config(
        &self,
        min_distance: Option<f64>,
        heights: Option<Vec<f64>>,
        yaw_count: Option<usize>,
        yaw_start: Option<f64>,
        shuffle_ties: bool,
        seed: u64,
    ) -> SamplerConfig64 {
        let defaults = SamplerConfig64::default();
        SamplerConfig64 {
            min_distance: min_distance
                .or(self.sampler.min_distance)
                .unwrap_or(defaults.min_distance),
            heights: heights
                .or_else(|| self.sampler.heights.clone())
                .unwrap_or(defaults.heights),
            yaw_count: yaw_count
                .or(self.sampler.yaw_count)
                .unwrap_or(defaults.yaw_count),
            yaw_start: yaw_start
                .or(self.sampler.yaw_start)
                .unwrap_or(defaults.yaw_start),
            rng_seed: seed,
            shuffle_ties: shuffle_ties || self.sampler.shuffle_ties.unwrap_or(false),
        }
    }

    pub fn eval_config(
        &self,
        rho_a: Option<f64>,
        rho_c: Option<f64>,
        max_detections: Option<usize>,
    ) -> EvalConfig64 {
        let defaults = EvalConfig64::default();
        EvalConfig64 {
            iou_threshold: rho_a.or(self.eval.rho_a).unwrap_or(defaults.iou_threshold),
            confidence_threshold: rho_c
                .or(self.eval.rho_c)
                .unwrap_or(defaults.confidence_threshold),
            max_detections: max_detections
                .or(self.eval.max_detections)
                .unwrap_or(defaults.max_detections),
        }
    }
}
