//! Spaced position sampling on the navigation graph and camera-pose
//! enumeration.
//!
//! Candidates are all graph nodes plus edge-polyline cells resampled every
//! `D/2` of arc length. Sorted by clearance (descending), a greedy pass
//! accepts a candidate only if it keeps Euclidean distance >= `D` to every
//! accepted position; the result is maximal and deterministic.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::SamplerError;
use crate::graph::NavGraph;
use crate::scalar::{cmp_scalar, Scalar};

/// Sampling parameters. `rng_seed` is only used when `shuffle_ties` asks
/// for a randomized (but seed-deterministic) ordering of equal-clearance
/// candidates; the default keeps the fully deterministic id/arc order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SamplerConfig<S: Scalar> {
    pub min_distance: S,
    pub heights: Vec<S>,
    pub yaw_count: usize,
    pub yaw_start: S,
    pub rng_seed: u64,
    pub shuffle_ties: bool,
}

impl<S: Scalar> Default for SamplerConfig<S> {
    fn default() -> Self {
        Self {
            min_distance: S::one(),
            heights: vec![S::cast_f64(0.1), S::cast_f64(0.7)],
            yaw_count: 8,
            yaw_start: S::zero(),
            rng_seed: 0,
            shuffle_ties: false,
        }
    }
}

impl<S: Scalar> SamplerConfig<S> {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.min_distance.is_finite() && self.min_distance > S::zero()) {
            return Err(SamplerError::InvalidConfig(
                "min_distance must be positive".into(),
            ));
        }
        if self.yaw_count == 0 {
            return Err(SamplerError::InvalidConfig(
                "yaw_count must be at least 1".into(),
            ));
        }
        if self.heights.is_empty() {
            return Err(SamplerError::InvalidConfig(
                "heights must not be empty".into(),
            ));
        }
        if self
            .heights
            .iter()
            .any(|h| !(h.is_finite() && *h > S::zero()))
        {
            return Err(SamplerError::InvalidConfig(
                "heights must be positive".into(),
            ));
        }
        if !self.yaw_start.is_finite() {
            return Err(SamplerError::InvalidConfig(
                "yaw_start must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// A sampled 2D viewpoint. `node_id` is the node the position sits on, or
/// the nearer endpoint for positions resampled along an edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SamplePosition<S: Scalar> {
    pub x: S,
    pub y: S,
    pub clearance: S,
    pub node_id: usize,
}

/// A full acquisition pose: position, camera height and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CameraPose<S: Scalar> {
    pub x: S,
    pub y: S,
    pub height: S,
    pub yaw_deg: S,
    pub node_id: usize,
}

#[derive(Clone, Copy)]
struct Candidate<S: Scalar> {
    x: S,
    y: S,
    clearance: S,
    kind: u8, // 0 = node, 1 = edge cell
    owner: usize,
    vertex: usize, // polyline index; 0 for nodes
    node_id: usize,
}

/// Greedy maximal selection of graph positions with pairwise spacing `D`.
pub fn sample_positions<S: Scalar>(
    graph: &NavGraph<S>,
    cfg: &SamplerConfig<S>,
) -> Result<Vec<SamplePosition<S>>, SamplerError> {
    cfg.validate()?;
    if graph.nodes.is_empty() {
        return Err(SamplerError::EmptyGraph);
    }

    let mut candidates: Vec<Candidate<S>> = graph
        .nodes
        .iter()
        .map(|n| Candidate {
            x: n.wx,
            y: n.wy,
            clearance: n.clearance,
            kind: 0,
            owner: n.id,
            vertex: 0,
            node_id: n.id,
        })
        .collect();

    let step = cfg.min_distance / (S::one() + S::one());
    for (edge_idx, edge) in graph.edges.iter().enumerate() {
        let cells = &edge.polyline;
        if cells.len() < 2 || edge.length <= S::zero() {
            continue;
        }
        let node_a = &graph.nodes[edge.a];
        let node_b = &graph.nodes[edge.b];
        let sqrt2 = (S::one() + S::one()).sqrt();
        let Some(res) = graph.edge_cell_size(edge) else {
            continue;
        };

        // Emit the first vertex at or past each multiple of D/2. Absolute
        // thresholds `step * m` (not an accumulated target) keep the
        // candidate set exactly nested when D is halved.
        let mut cum = S::zero();
        let mut m: usize = 1;
        for k in 1..cells.len() {
            let diagonal = cells[k - 1][0] != cells[k][0] && cells[k - 1][1] != cells[k][1];
            cum = cum + if diagonal { sqrt2 * res } else { res };
            if k == cells.len() - 1 {
                break; // terminal vertex is the node itself
            }
            let mut emit = false;
            while step * S::cast_usize(m) <= cum {
                emit = true;
                m += 1;
            }
            if emit {
                let dx = S::cast_usize(cells[k][0]) - S::cast_usize(cells[0][0]);
                let dy = S::cast_usize(cells[k][1]) - S::cast_usize(cells[0][1]);
                let x = node_a.wx + res * dx;
                let y = node_a.wy + res * dy;
                let frac = cum / edge.length;
                let clearance = node_a.clearance + (node_b.clearance - node_a.clearance) * frac;
                let node_id = if frac <= S::cast_f64(0.5) {
                    node_a.id
                } else {
                    node_b.id
                };
                candidates.push(Candidate {
                    x,
                    y,
                    clearance,
                    kind: 1,
                    owner: edge_idx,
                    vertex: k,
                    node_id,
                });
            }
        }
    }

    if cfg.shuffle_ties {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        candidates.shuffle(&mut rng);
        candidates.sort_by(|p, q| cmp_scalar(q.clearance, p.clearance));
    } else {
        candidates.sort_by(|p, q| {
            cmp_scalar(q.clearance, p.clearance)
                .then(p.kind.cmp(&q.kind))
                .then(p.owner.cmp(&q.owner))
                .then(p.vertex.cmp(&q.vertex))
        });
    }

    let mut accepted: Vec<SamplePosition<S>> = Vec::new();
    for c in &candidates {
        let far_enough = accepted.iter().all(|p| {
            let dx = p.x - c.x;
            let dy = p.y - c.y;
            (dx * dx + dy * dy).sqrt() >= cfg.min_distance
        });
        if far_enough {
            accepted.push(SamplePosition {
                x: c.x,
                y: c.y,
                clearance: c.clearance,
                node_id: c.node_id,
            });
        }
    }
    Ok(accepted)
}

/// Expands positions into camera poses: position-major, then height, then
/// yaw at `yaw_start + k*(360/yaw_count)` wrapped into [0, 360).
pub fn enumerate_camera_poses<S: Scalar>(
    positions: &[SamplePosition<S>],
    cfg: &SamplerConfig<S>,
) -> Result<Vec<CameraPose<S>>, SamplerError> {
    cfg.validate()?;
    let full_turn = S::cast_f64(360.0);
    let yaw_step = full_turn / S::cast_usize(cfg.yaw_count);
    let mut poses = Vec::with_capacity(positions.len() * cfg.heights.len() * cfg.yaw_count);
    for p in positions {
        for &height in &cfg.heights {
            for k in 0..cfg.yaw_count {
                let raw = cfg.yaw_start + S::cast_usize(k) * yaw_step;
                let yaw = raw - full_turn * (raw / full_turn).floor();
                poses.push(CameraPose {
                    x: p.x,
                    y: p.y,
                    height,
                    yaw_deg: yaw,
                    node_id: p.node_id,
                });
            }
        }
    }
    Ok(poses)
}

/// One pose per line as JSON.
pub fn poses_to_jsonl<S: Scalar>(poses: &[CameraPose<S>]) -> String {
    let mut out = String::new();
    for pose in poses {
        out.push_str(&serde_json::to_string(pose).expect("pose serializes"));
        out.push('\n');
    }
    out
}

pub fn poses_from_jsonl<S: Scalar>(text: &str) -> Result<Vec<CameraPose<S>>, SamplerError> {
    let mut poses = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pose: CameraPose<S> =
            serde_json::from_str(line).map_err(|e| SamplerError::MalformedPoses {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        poses.push(pose);
    }
    Ok(poses)
}

/// CSV rendition with a fixed header.
pub fn poses_to_csv<S: Scalar>(poses: &[CameraPose<S>]) -> String {
    let mut out = String::from("x,y,height,yaw_deg,node_id\n");
    for pose in poses {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            pose.x, pose.y, pose.height, pose.yaw_deg, pose.node_id
        ));
    }
    out
}
