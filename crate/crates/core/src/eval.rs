//! Detector evaluation: the deployment-style matcher (TP/FP/BFD against
//! ground-truth doors) and per-class average precision with all-point
//! interpolation.
//!
//! The matcher mirrors how a robot consumes detections: predictions below
//! the confidence threshold are discarded, each surviving box belongs to
//! its highest-IOU door when that IOU clears the acceptance threshold, and
//! per door only the most confident box counts -- with the right status as
//! a true positive, with the wrong one as a false positive. Boxes matching
//! no door are background false detections. AP instead sweeps every
//! confidence, so no confidence filter applies there.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{BBox, DoorStatus, ImageRecord};
use crate::error::EvalError;
use crate::scalar::{cmp_scalar, Scalar};

/// Matching thresholds and the per-image detection cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EvalConfig<S: Scalar> {
    /// IOU acceptance threshold for matching a prediction to a door.
    pub iou_threshold: S,
    /// Confidence floor below which predictions are discarded.
    pub confidence_threshold: S,
    /// Keep at most this many predictions per image, by confidence.
    pub max_detections: usize,
}

impl<S: Scalar> Default for EvalConfig<S> {
    fn default() -> Self {
        Self {
            iou_threshold: S::cast_f64(0.5),
            confidence_threshold: S::cast_f64(0.75),
            max_detections: 10,
        }
    }
}

impl<S: Scalar> EvalConfig<S> {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.iou_threshold > S::zero() && self.iou_threshold <= S::one()) {
            return Err(EvalError::InvalidConfig(
                "iou_threshold must be in (0, 1]".into(),
            ));
        }
        if !(self.confidence_threshold >= S::zero()) || self.confidence_threshold.is_nan() {
            return Err(EvalError::InvalidConfig(
                "confidence_threshold must be non-negative".into(),
            ));
        }
        if self.max_detections == 0 {
            return Err(EvalError::InvalidConfig(
                "max_detections must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Intersection over union of two boxes; statuses are ignored.
pub fn iou<S: Scalar>(a: &BBox<S>, b: &BBox<S>) -> S {
    let iw = a.x_max.min(b.x_max) - a.x_min.max(b.x_min);
    let ih = a.y_max.min(b.y_max) - a.y_min.max(b.y_min);
    if iw <= S::zero() || ih <= S::zero() {
        return S::zero();
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= S::zero() {
        return S::zero();
    }
    inter / union
}

/// A (door, prediction) pairing by index into the input slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRef {
    pub gt_index: usize,
    pub pred_index: usize,
}

/// Classification of every evaluated prediction of one image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchOutcome {
    pub true_positives: Vec<MatchRef>,
    pub false_positives: Vec<MatchRef>,
    pub background_false_detections: Vec<usize>,
    pub suppressed: Vec<MatchRef>,
}

impl MatchOutcome {
    pub fn evaluated_count(&self) -> usize {
        self.true_positives.len()
            + self.false_positives.len()
            + self.background_false_detections.len()
            + self.suppressed.len()
    }
}

/// Runs the deployment matcher on one image.
///
/// Predictions must carry confidences (enforced upstream by the record
/// kinds). Indices in the outcome refer to the original slices.
pub fn match_image<S: Scalar>(
    preds: &[BBox<S>],
    gts: &[BBox<S>],
    cfg: &EvalConfig<S>,
) -> MatchOutcome {
    let conf = |i: usize| preds[i].confidence.expect("prediction carries confidence");

    // Confidence gate, then the per-image cap (most confident first; ties
    // keep input order via the stable sort).
    let mut kept: Vec<usize> = (0..preds.len())
        .filter(|&i| conf(i) >= cfg.confidence_threshold)
        .collect();
    kept.sort_by(|&i, &j| cmp_scalar(conf(j), conf(i)));
    kept.truncate(cfg.max_detections);

    // Each prediction belongs to its highest-IOU door (ties to the lower
    // door index) when that IOU clears the acceptance threshold.
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); gts.len()];
    let mut outcome = MatchOutcome::default();
    for &p in &kept {
        let mut best: Option<(S, usize)> = None;
        for (g, gt) in gts.iter().enumerate() {
            let overlap = iou(&preds[p], gt);
            let better = match best {
                None => true,
                Some((bo, _)) => overlap > bo,
            };
            if better {
                best = Some((overlap, g));
            }
        }
        match best {
            Some((overlap, g)) if overlap >= cfg.iou_threshold => assigned[g].push(p),
            _ => outcome.background_false_detections.push(p),
        }
    }

    // Per door, the most confident box decides TP vs FP; the rest of its
    // boxes are ruled out of the evaluation.
    for (g, mut candidates) in assigned.into_iter().enumerate() {
        if candidates.is_empty() {
            continue;
        }
        candidates.sort_by(|&i, &j| cmp_scalar(conf(j), conf(i)));
        let selected = candidates[0];
        let hit = MatchRef {
            gt_index: g,
            pred_index: selected,
        };
        if preds[selected].status == gts[g].status {
            outcome.true_positives.push(hit);
        } else {
            outcome.false_positives.push(hit);
        }
        for &extra in &candidates[1..] {
            outcome.suppressed.push(MatchRef {
                gt_index: g,
                pred_index: extra,
            });
        }
    }
    outcome
}

/// Count block shared by report totals and per-environment breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Counts<S: Scalar> {
    pub gt: usize,
    pub tp: usize,
    pub fp: usize,
    pub bfd: usize,
    pub tp_pct: S,
    pub fp_pct: S,
    pub bfd_pct: S,
}

impl<S: Scalar> Counts<S> {
    fn from_raw(gt: usize, tp: usize, fp: usize, bfd: usize) -> Self {
        let pct = |n: usize| {
            if gt == 0 {
                S::zero()
            } else {
                S::cast_usize(n) / S::cast_usize(gt)
            }
        };
        Self {
            gt,
            tp,
            fp,
            bfd,
            tp_pct: pct(tp),
            fp_pct: pct(fp),
            bfd_pct: pct(bfd),
        }
    }
}

/// Average precision per status class; absent when the class has no
/// ground-truth doors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClassAp<S: Scalar> {
    pub closed: Option<S>,
    pub open: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnvBreakdown<S: Scalar> {
    #[serde(flatten)]
    pub counts: Counts<S>,
    pub ap_closed: Option<S>,
    pub ap_open: Option<S>,
}

/// Sweep sample: totals at one confidence threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SweepPoint<S: Scalar> {
    pub confidence_threshold: S,
    pub totals: Counts<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EvalReport<S: Scalar> {
    pub config: EvalConfig<S>,
    pub totals: Counts<S>,
    pub per_env: BTreeMap<String, EnvBreakdown<S>>,
    pub per_class_ap: ClassAp<S>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepPoint<S>>>,
}

impl<S: Scalar> EvalReport<S> {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json_str(s: &str) -> Result<Self, EvalError> {
        serde_json::from_str(s).map_err(|e| EvalError::InvalidConfig(e.to_string()))
    }
}

/// Evaluates a prediction set against a ground-truth set.
///
/// Ground-truth images without predictions count as empty prediction
/// lists; a prediction for an image absent from the ground truth is an
/// error.
pub fn evaluate<S: Scalar>(
    pred_set: &[ImageRecord<S>],
    gt_set: &[ImageRecord<S>],
    cfg: &EvalConfig<S>,
) -> Result<EvalReport<S>, EvalError> {
    cfg.validate()?;

    let preds_by_image: BTreeMap<&str, &ImageRecord<S>> = pred_set
        .iter()
        .map(|r| (r.image_id.as_str(), r))
        .collect();
    let gt_ids: std::collections::BTreeSet<&str> =
        gt_set.iter().map(|r| r.image_id.as_str()).collect();
    for pred in pred_set {
        if !gt_ids.contains(pred.image_id.as_str()) {
            return Err(EvalError::ImageMismatch {
                image_id: pred.image_id.clone(),
            });
        }
    }

    let empty: Vec<BBox<S>> = Vec::new();
    let mut total = (0usize, 0usize, 0usize, 0usize);
    let mut per_env_raw: BTreeMap<String, (usize, usize, usize, usize)> = BTreeMap::new();
    for gt in gt_set {
        let preds = preds_by_image
            .get(gt.image_id.as_str())
            .map(|r| &r.boxes)
            .unwrap_or(&empty);
        let outcome = match_image(preds, &gt.boxes, cfg);
        let entry = per_env_raw.entry(gt.env_id.clone()).or_default();
        let add = |acc: &mut (usize, usize, usize, usize)| {
            acc.0 += gt.boxes.len();
            acc.1 += outcome.true_positives.len();
            acc.2 += outcome.false_positives.len();
            acc.3 += outcome.background_false_detections.len();
        };
        add(&mut total);
        add(entry);
    }

    let class_ap = |preds: &[ImageRecord<S>], gts: &[ImageRecord<S>], class: DoorStatus| {
        match pr_curve(preds, gts, class, cfg.iou_threshold) {
            Ok(curve) => Ok(Some(average_precision(&curve))),
            Err(EvalError::NoGroundTruth { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut per_env = BTreeMap::new();
    for (env, raw) in per_env_raw {
        let env_gts: Vec<ImageRecord<S>> = gt_set
            .iter()
            .filter(|r| r.env_id == env)
            .cloned()
            .collect();
        let env_ids: std::collections::BTreeSet<&str> =
            env_gts.iter().map(|r| r.image_id.as_str()).collect();
        let env_preds: Vec<ImageRecord<S>> = pred_set
            .iter()
            .filter(|r| env_ids.contains(r.image_id.as_str()))
            .cloned()
            .collect();
        per_env.insert(
            env,
            EnvBreakdown {
                counts: Counts::from_raw(raw.0, raw.1, raw.2, raw.3),
                ap_closed: class_ap(&env_preds, &env_gts, DoorStatus::Closed)?,
                ap_open: class_ap(&env_preds, &env_gts, DoorStatus::Open)?,
            },
        );
    }

    Ok(EvalReport {
        config: *cfg,
        totals: Counts::from_raw(total.0, total.1, total.2, total.3),
        per_env,
        per_class_ap: ClassAp {
            closed: class_ap(pred_set, gt_set, DoorStatus::Closed)?,
            open: class_ap(pred_set, gt_set, DoorStatus::Open)?,
        },
        sweep: None,
    })
}

/// VOC-style precision/recall curve for one status class.
///
/// All predictions participate regardless of confidence (the curve sweeps
/// confidence by construction); ranking is confidence-descending with ties
/// by image id then box order. Each prediction matches the highest-IOU
/// *unmatched* door of its class when that IOU clears `iou_threshold`.
pub fn pr_curve<S: Scalar>(
    pred_set: &[ImageRecord<S>],
    gt_set: &[ImageRecord<S>],
    class: DoorStatus,
    iou_threshold: S,
) -> Result<Vec<(S, S)>, EvalError> {
    let mut gt_boxes: BTreeMap<&str, Vec<&BBox<S>>> = BTreeMap::new();
    let mut gt_total = 0usize;
    for record in gt_set {
        let boxes: Vec<&BBox<S>> = record
            .boxes
            .iter()
            .filter(|b| b.status == class)
            .collect();
        gt_total += boxes.len();
        gt_boxes.insert(record.image_id.as_str(), boxes);
    }
    if gt_total == 0 {
        return Err(EvalError::NoGroundTruth {
            class: class.as_str().to_string(),
        });
    }

    struct Ranked<'a, S: Scalar> {
        image_id: &'a str,
        box_index: usize,
        bbox: &'a BBox<S>,
    }
    let mut ranked: Vec<Ranked<S>> = Vec::new();
    for record in pred_set {
        if !gt_boxes.contains_key(record.image_id.as_str()) {
            return Err(EvalError::ImageMismatch {
                image_id: record.image_id.clone(),
            });
        }
        for (box_index, bbox) in record.boxes.iter().enumerate() {
            if bbox.status == class {
                ranked.push(Ranked {
                    image_id: &record.image_id,
                    box_index,
                    bbox,
                });
            }
        }
    }
    let conf = |r: &Ranked<S>| r.bbox.confidence.expect("prediction carries confidence");
    ranked.sort_by(|a, b| {
        cmp_scalar(conf(b), conf(a))
            .then(a.image_id.cmp(b.image_id))
            .then(a.box_index.cmp(&b.box_index))
    });

    let mut matched: BTreeMap<&str, Vec<bool>> = gt_boxes
        .iter()
        .map(|(id, boxes)| (*id, vec![false; boxes.len()]))
        .collect();
    let mut curve = Vec::with_capacity(ranked.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for r in &ranked {
        let gts = &gt_boxes[r.image_id];
        let taken = matched.get_mut(r.image_id).expect("image present");
        let mut best: Option<(S, usize)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let overlap = iou(r.bbox, gt);
            let better = match best {
                None => true,
                Some((bo, _)) => overlap > bo,
            };
            if better {
                best = Some((overlap, g));
            }
        }
        match best {
            Some((overlap, g)) if overlap >= iou_threshold => {
                taken[g] = true;
                tp += 1;
            }
            _ => fp += 1,
        }
        let recall = S::cast_usize(tp) / S::cast_usize(gt_total);
        let precision = S::cast_usize(tp) / S::cast_usize(tp + fp);
        curve.push((recall, precision));
    }
    Ok(curve)
}

/// All-point interpolated average precision.
///
/// The interpolated precision at recall r is the maximum precision among
/// curve points with recall >= r; AP integrates it over the distinct
/// recall steps. An empty curve scores 0.
pub fn average_precision<S: Scalar>(curve: &[(S, S)]) -> S {
    if curve.is_empty() {
        return S::zero();
    }
    // Right-to-left running max gives the precision envelope.
    let mut envelope: Vec<(S, S)> = Vec::with_capacity(curve.len());
    let mut running = S::zero();
    for &(recall, precision) in curve.iter().rev() {
        running = running.max(precision);
        envelope.push((recall, running));
    }
    envelope.reverse();

    let mut ap = S::zero();
    let mut prev_recall = S::zero();
    let mut i = 0;
    while i < envelope.len() {
        let recall = envelope[i].0;
        // Skip forward over duplicate recalls; the first occurrence holds
        // the largest envelope value at this recall.
        let interp = envelope[i].1;
        let mut j = i + 1;
        while j < envelope.len() && envelope[j].0 == recall {
            j += 1;
        }
        if recall > prev_recall {
            ap = ap + (recall - prev_recall) * interp;
            prev_recall = recall;
        }
        i = j;
    }
    ap
}

/// Evaluates once per confidence threshold (ascending).
pub fn sweep_confidence<S: Scalar>(
    pred_set: &[ImageRecord<S>],
    gt_set: &[ImageRecord<S>],
    thresholds: &[S],
    base: &EvalConfig<S>,
) -> Result<Vec<EvalReport<S>>, EvalError> {
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(EvalError::InvalidConfig(
            "sweep thresholds must be sorted ascending".into(),
        ));
    }
    thresholds
        .iter()
        .map(|&t| {
            let cfg = EvalConfig {
                confidence_threshold: t,
                ..*base
            };
            evaluate(pred_set, gt_set, &cfg)
        })
        .collect()
}
