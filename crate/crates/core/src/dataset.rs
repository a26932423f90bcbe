//! Annotation/prediction records and the fine-tuning split protocol.
//!
//! Records live in JSON Lines files, one image per line. Ground-truth boxes
//! carry no confidence; prediction boxes must carry one. Splits always
//! operate on whole images: an environment is shuffled by seed, dealt into
//! four balanced quarters, and the quarters compose the nested fine-tune
//! sets plus the held-out test set.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::scalar::{cmp_scalar, Scalar};

/// Door state; also the detection class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoorStatus {
    Closed,
    Open,
}

impl DoorStatus {
    pub const ALL: [DoorStatus; 2] = [DoorStatus::Closed, DoorStatus::Open];

    pub fn as_str(&self) -> &'static str {
        match self {
            DoorStatus::Closed => "closed",
            DoorStatus::Open => "open",
        }
    }
}

/// Axis-aligned box in continuous pixel coordinates. `confidence` is
/// present on predictions and absent on ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BBox<S: Scalar> {
    pub x_min: S,
    pub y_min: S,
    pub x_max: S,
    pub y_max: S,
    pub status: DoorStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<S>,
}

impl<S: Scalar> BBox<S> {
    pub fn area(&self) -> S {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    fn sort_key(&self) -> (DoorStatus, S, S, S, S, S) {
        (
            self.status,
            self.x_min,
            self.y_min,
            self.x_max,
            self.y_max,
            self.confidence.unwrap_or(S::zero()),
        )
    }
}

/// All annotations or detections of one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImageRecord<S: Scalar> {
    pub image_id: String,
    pub env_id: String,
    pub width: u32,
    pub height: u32,
    pub boxes: Vec<BBox<S>>,
}

/// Which confidence convention a file must follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    GroundTruth,
    Predictions,
    Any,
}

impl<S: Scalar> ImageRecord<S> {
    /// Checks the record invariants; `kind` additionally enforces the
    /// confidence convention.
    pub fn validate(&self, kind: RecordKind) -> Result<(), DatasetError> {
        let fail = |reason: String| {
            Err(DatasetError::SchemaError {
                image_id: self.image_id.clone(),
                reason,
            })
        };
        if self.image_id.is_empty() {
            return fail("empty image_id".into());
        }
        if self.env_id.is_empty() {
            return fail("empty env_id".into());
        }
        let (w, h) = (S::cast_usize(self.width as usize), S::cast_usize(self.height as usize));
        for (i, b) in self.boxes.iter().enumerate() {
            let finite = [b.x_min, b.y_min, b.x_max, b.y_max]
                .iter()
                .all(|v| v.is_finite());
            if !finite {
                return fail(format!("box {i} has a non-finite coordinate"));
            }
            if b.x_min >= b.x_max {
                return fail(format!("box {i} has x_min >= x_max"));
            }
            if b.y_min >= b.y_max {
                return fail(format!("box {i} has y_min >= y_max"));
            }
            if b.x_min < S::zero() || b.y_min < S::zero() || b.x_max > w || b.y_max > h {
                return fail(format!("box {i} exceeds the image bounds"));
            }
            if let Some(c) = b.confidence {
                if !(c.is_finite() && c >= S::zero() && c <= S::one()) {
                    return fail(format!("box {i} confidence outside [0, 1]"));
                }
            }
            match kind {
                RecordKind::GroundTruth if b.confidence.is_some() => {
                    return fail(format!("box {i}: ground truth must omit confidence"));
                }
                RecordKind::Predictions if b.confidence.is_none() => {
                    return fail(format!("box {i}: predictions must carry confidence"));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Sorts boxes into the canonical (status, coordinates) order.
    pub fn canonicalize(&mut self) {
        self.boxes.sort_by(|a, b| {
            let (sa, axa, aya, axb, ayb, ac) = a.sort_key();
            let (sb, bxa, bya, bxb, byb, bc) = b.sort_key();
            sa.cmp(&sb)
                .then(cmp_scalar(axa, bxa))
                .then(cmp_scalar(aya, bya))
                .then(cmp_scalar(axb, bxb))
                .then(cmp_scalar(ayb, byb))
                .then(cmp_scalar(ac, bc))
        });
    }
}

/// Parses JSON Lines records and validates them.
pub fn parse_records<S: Scalar>(
    text: &str,
    kind: RecordKind,
) -> Result<Vec<ImageRecord<S>>, DatasetError> {
    let mut records: Vec<ImageRecord<S>> = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ImageRecord<S> =
            serde_json::from_str(line).map_err(|e| DatasetError::SchemaError {
                image_id: format!("line {}", lineno + 1),
                reason: e.to_string(),
            })?;
        record.validate(kind)?;
        if !seen.insert(record.image_id.clone()) {
            return Err(DatasetError::SchemaError {
                image_id: record.image_id,
                reason: "duplicate image_id".into(),
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_records<S: Scalar>(
    path: &Path,
    kind: RecordKind,
) -> Result<Vec<ImageRecord<S>>, DatasetError> {
    parse_records(&std::fs::read_to_string(path)?, kind)
}

/// Serializes records with canonical box ordering, one JSON object per line.
pub fn records_to_jsonl<S: Scalar>(records: &[ImageRecord<S>]) -> String {
    let mut out = String::new();
    for record in records {
        let mut canonical = record.clone();
        canonical.canonicalize();
        out.push_str(&serde_json::to_string(&canonical).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn save_records<S: Scalar>(records: &[ImageRecord<S>], path: &Path) -> Result<(), DatasetError> {
    std::fs::write(path, records_to_jsonl(records))?;
    Ok(())
}

/// Four balanced, disjoint quarters of one environment's image ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub env_id: String,
    pub seed: u64,
    pub quarters: [Vec<String>; 4],
}

/// The nested fine-tune sets and the held-out test set, as image ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneSets {
    pub train_25: Vec<String>,
    pub train_50: Vec<String>,
    pub train_75: Vec<String>,
    pub test: Vec<String>,
}

/// Shuffles one environment's images by seed and deals them round-robin
/// into four quarters whose sizes differ by at most one.
pub fn split_environment<S: Scalar>(
    records: &[ImageRecord<S>],
    seed: u64,
) -> Result<SplitPlan, DatasetError> {
    let env_id = match records.first() {
        Some(r) => r.env_id.clone(),
        None => {
            return Err(DatasetError::TooFewImages {
                env_id: "<empty>".into(),
                count: 0,
                required: 4,
            })
        }
    };
    for r in records {
        if r.env_id != env_id {
            return Err(DatasetError::MixedEnvironments(env_id, r.env_id.clone()));
        }
    }
    if records.len() < 4 {
        return Err(DatasetError::TooFewImages {
            env_id,
            count: records.len(),
            required: 4,
        });
    }

    // Sort first so the permutation depends only on the id set and seed,
    // not on input order.
    let mut ids: Vec<String> = records.iter().map(|r| r.image_id.clone()).collect();
    ids.sort();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let mut quarters: [Vec<String>; 4] = Default::default();
    for (i, id) in ids.into_iter().enumerate() {
        quarters[i % 4].push(id);
    }
    Ok(SplitPlan {
        env_id,
        seed,
        quarters,
    })
}

/// Composes the nested train sets and the test set from a split plan.
pub fn compose_finetune_sets(plan: &SplitPlan) -> FinetuneSets {
    let concat = |qs: &[&Vec<String>]| -> Vec<String> {
        qs.iter().flat_map(|q| q.iter().cloned()).collect()
    };
    FinetuneSets {
        train_25: concat(&[&plan.quarters[0]]),
        train_50: concat(&[&plan.quarters[0], &plan.quarters[1]]),
        train_75: concat(&[&plan.quarters[0], &plan.quarters[1], &plan.quarters[2]]),
        test: concat(&[&plan.quarters[3]]),
    }
}

/// Splits the full dataset into the held-out environment and the rest.
pub fn leave_one_out<S: Scalar>(
    records: &[ImageRecord<S>],
    env_id: &str,
) -> Result<(Vec<ImageRecord<S>>, Vec<ImageRecord<S>>), DatasetError> {
    if !records.iter().any(|r| r.env_id == env_id) {
        return Err(DatasetError::UnknownEnvironment(env_id.to_string()));
    }
    let mut general_train = Vec::new();
    let mut env_set = Vec::new();
    for r in records {
        if r.env_id == env_id {
            env_set.push(r.clone());
        } else {
            general_train.push(r.clone());
        }
    }
    Ok((general_train, env_set))
}
