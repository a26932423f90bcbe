//! Cross-detector aggregation and table rendering.
//!
//! Detectors are compared in a given order (baseline first). For each
//! detector and class the table reports the mean AP across environments
//! with its population standard deviation, plus the increment over the
//! detector immediately above: increments are computed per environment and
//! then averaged, which is not the same number as the increment between
//! the two means.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::DoorStatus;
use crate::error::EvalError;
use crate::eval::EvalReport;
use crate::scalar::Scalar;

/// Mean/σ of an AP column plus the per-environment increment statistics
/// against the previous detector. Increments are percentages; environments
/// with a zero or missing reference AP are excluded and counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AggregateStat<S: Scalar> {
    pub mean: Option<S>,
    pub sigma: Option<S>,
    pub increment_mean: Option<S>,
    pub increment_sigma: Option<S>,
    pub excluded_envs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DetectorRow<S: Scalar> {
    pub label: String,
    pub class: DoorStatus,
    pub stat: AggregateStat<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ComparisonTable<S: Scalar> {
    pub environments: Vec<String>,
    pub rows: Vec<DetectorRow<S>>,
}

fn mean_sigma<S: Scalar>(values: &[S]) -> (Option<S>, Option<S>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = S::cast_usize(values.len());
    let mean = values.iter().fold(S::zero(), |acc, v| acc + *v) / n;
    let var = values
        .iter()
        .fold(S::zero(), |acc, v| acc + (*v - mean) * (*v - mean))
        / n;
    (Some(mean), Some(var.sqrt()))
}

/// Aggregates ordered per-detector reports into a comparison table.
///
/// Every report must cover the same environment set; the first detector is
/// the reference and carries no increment columns.
pub fn compare_reports<S: Scalar>(
    entries: &[(String, EvalReport<S>)],
) -> Result<ComparisonTable<S>, EvalError> {
    let (_, first) = entries.first().ok_or(EvalError::NoDetectors)?;
    let environments: Vec<String> = first.per_env.keys().cloned().collect();
    let env_set: BTreeSet<&String> = environments.iter().collect();
    for (label, report) in entries {
        let this_set: BTreeSet<&String> = report.per_env.keys().collect();
        if this_set != env_set {
            let missing = env_set
                .symmetric_difference(&this_set)
                .next()
                .map(|s| s.to_string())
                .unwrap_or_default();
            return Err(EvalError::EnvMismatch {
                label: label.clone(),
                env_id: missing,
            });
        }
    }

    let ap_of = |report: &EvalReport<S>, env: &str, class: DoorStatus| -> Option<S> {
        let breakdown = report.per_env.get(env)?;
        match class {
            DoorStatus::Closed => breakdown.ap_closed,
            DoorStatus::Open => breakdown.ap_open,
        }
    };

    let hundred = S::cast_f64(100.0);
    let mut rows = Vec::new();
    for (idx, (label, report)) in entries.iter().enumerate() {
        for class in DoorStatus::ALL {
            let values: Vec<S> = environments
                .iter()
                .filter_map(|env| ap_of(report, env, class))
                .collect();
            let (mean, sigma) = mean_sigma(&values);

            let (increment_mean, increment_sigma, excluded) = if idx == 0 {
                (None, None, 0)
            } else {
                let reference = &entries[idx - 1].1;
                let mut increments = Vec::new();
                let mut excluded = 0usize;
                for env in &environments {
                    match (ap_of(reference, env, class), ap_of(report, env, class)) {
                        (Some(prev), Some(cur)) if prev > S::zero() => {
                            increments.push((cur - prev) / prev * hundred);
                        }
                        _ => excluded += 1,
                    }
                }
                let (im, is) = mean_sigma(&increments);
                (im, is, excluded)
            };

            rows.push(DetectorRow {
                label: label.clone(),
                class,
                stat: AggregateStat {
                    mean,
                    sigma,
                    increment_mean,
                    increment_sigma,
                    excluded_envs: excluded,
                },
            });
        }
    }
    Ok(ComparisonTable { environments, rows })
}

fn round_percent<S: Scalar>(fraction: S) -> i64 {
    (fraction.to_f64_lossy() * 100.0).round() as i64
}

fn round_points(points: f64) -> i64 {
    points.round() as i64
}

impl<S: Scalar> ComparisonTable<S> {
    /// Markdown table with columns Exp./Label/AP/σ/Increment/σ and
    /// whole-percent values. Class labels read Closed/Open; the AP and σ
    /// columns are percent points of the AP fractions.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Exp. | Label | AP | σ | Increment | σ |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for row in &self.rows {
            let class = match row.class {
                DoorStatus::Closed => "Closed",
                DoorStatus::Open => "Open",
            };
            let ap = row
                .stat
                .mean
                .map(|m| round_percent(m).to_string())
                .unwrap_or_else(|| "--".into());
            let sigma = row
                .stat
                .sigma
                .map(|s| round_percent(s).to_string())
                .unwrap_or_else(|| "--".into());
            let inc = row
                .stat
                .increment_mean
                .map(|m| format!("{}%", round_points(m.to_f64_lossy())))
                .unwrap_or_else(|| "--".into());
            let inc_sigma = row
                .stat
                .increment_sigma
                .map(|s| round_points(s.to_f64_lossy()).to_string())
                .unwrap_or_else(|| "--".into());
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                row.label, class, ap, sigma, inc, inc_sigma
            ));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }
}

/// Markdown table of the robot-oriented counts, one row per environment
/// and detector plus an `all` row per detector. Percentages are scaled by
/// GT and truncated to whole percent.
pub fn render_counts_table<S: Scalar>(entries: &[(String, &EvalReport<S>)]) -> String {
    let pct = |fraction: S| (fraction.to_f64_lossy() * 100.0).floor() as i64;
    let mut out = String::from("| Env. | Exp. | GT | TP (TP%) | FP (FP%) | BFD (BFD%) |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    let mut envs: BTreeSet<&String> = BTreeSet::new();
    for (_, report) in entries {
        envs.extend(report.per_env.keys());
    }
    for env in envs {
        for (label, report) in entries {
            if let Some(b) = report.per_env.get(env) {
                out.push_str(&format!(
                    "| {} | {} | {} | {} ({}%) | {} ({}%) | {} ({}%) |\n",
                    env,
                    label,
                    b.counts.gt,
                    b.counts.tp,
                    pct(b.counts.tp_pct),
                    b.counts.fp,
                    pct(b.counts.fp_pct),
                    b.counts.bfd,
                    pct(b.counts.bfd_pct),
                ));
            }
        }
    }
    for (label, report) in entries {
        let t = &report.totals;
        out.push_str(&format!(
            "| all | {} | {} | {} ({}%) | {} ({}%) | {} ({}%) |\n",
            label,
            t.gt,
            t.tp,
            pct(t.tp_pct),
            t.fp,
            pct(t.fp_pct),
            t.bfd,
            pct(t.bfd_pct),
        ));
    }
    out
}
