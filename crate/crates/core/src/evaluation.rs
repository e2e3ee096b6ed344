//! Rule-based grasp matching, non-maximum suppression, and ranked
//! success/coverage metrics.
//!
//! Predictions are compared to annotations by center distance and by
//! per-component wrapped Euler angle gaps under the fixed Z-Y-X
//! convention. Metrics run over the top k% of confidence-ranked,
//! NMS-filtered predictions.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;

use crate::grasp::{quat_to_euler, Grasp};
use crate::wrap_angle;

/// Matching and suppression thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalThresholds {
    /// Center distance bound for a rule-based match.
    pub center_tol: f64,
    /// Per-component angle bound for a rule-based match.
    pub angle_tol: f64,
    /// Center distance bound for NMS removal.
    pub nms_center: f64,
    /// Per-component angle bound for NMS removal.
    pub nms_angle: f64,
}

impl Default for EvalThresholds {
    fn default() -> EvalThresholds {
        EvalThresholds {
            center_tol: 0.025,
            angle_tol: 30.0_f64.to_radians(),
            nms_center: 0.040,
            nms_angle: 60.0_f64.to_radians(),
        }
    }
}

/// The k percentages reported by [`evaluate`].
pub const REPORT_KS: [u32; 4] = [10, 30, 50, 100];

/// Metrics over one ranked prediction set, indexed like [`REPORT_KS`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub success_at: [f64; 4],
    pub coverage_at: [f64; 4],
    pub nms_survivors: usize,
    /// Match flag per NMS-surviving prediction, in rank order.
    pub match_flags: Vec<bool>,
}

/// Failure modes of the ranked metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    EmptyPredictions,
    EmptyGroundTruth,
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::EmptyPredictions => write!(f, "prediction list is empty"),
            EvalError::EmptyGroundTruth => write!(f, "ground-truth list is empty"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Absolute wrapped gaps between the two orientations' Euler
/// components, ordered (roll, pitch, yaw).
pub fn angle_gaps(a: &Grasp, b: &Grasp) -> [f64; 3] {
    let ea = quat_to_euler(&a.orientation);
    let eb = quat_to_euler(&b.orientation);
    [
        wrap_angle(ea.roll - eb.roll).abs(),
        wrap_angle(ea.pitch - eb.pitch).abs(),
        wrap_angle(ea.yaw - eb.yaw).abs(),
    ]
}

/// True when the centers are within `center_tol` and every Euler
/// component gap is within `angle_tol`.
pub fn match_rule_based(pred: &Grasp, gt: &Grasp, tol: &EvalThresholds) -> bool {
    if (pred.center - gt.center).norm() > tol.center_tol {
        return false;
    }
    angle_gaps(pred, gt).iter().all(|&g| g <= tol.angle_tol)
}

/// Greedy non-maximum suppression by descending confidence.
///
/// A prediction is removed exactly when some retained higher-confidence
/// prediction sits within `nms_center` of its center and within
/// `nms_angle` on all three Euler components. Ties in confidence keep
/// input order.
pub fn nms(preds: &[(Grasp, f64)], tol: &EvalThresholds) -> Vec<(Grasp, f64)> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| {
        preds[b]
            .1
            .partial_cmp(&preds[a].1)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let suppressed = kept.iter().any(|&k| {
            (preds[k].0.center - preds[i].0.center).norm() <= tol.nms_center
                && angle_gaps(&preds[k].0, &preds[i].0)
                    .iter()
                    .all(|&g| g <= tol.nms_angle)
        });
        if !suppressed {
            kept.push(i);
        }
    }
    kept.into_iter().map(|i| preds[i].clone()).collect()
}

/// Number of predictions covered by the top k percent: ⌈k% · n⌉.
fn top_count(n: usize, k_percent: f64) -> usize {
    assert!(
        k_percent > 0.0 && k_percent <= 100.0,
        "k must be in (0, 100]"
    );
    // the 1e-9 backs off float dust so exact integer products do not
    // round up to one extra prediction
    ((k_percent / 100.0 * n as f64) - 1e-9).ceil().max(1.0) as usize
}

/// Fraction of the top ⌈k%·n⌉ ranked predictions matching any
/// ground-truth positive.
pub fn success_at(
    preds: &[(Grasp, f64)],
    gt_pos: &[Grasp],
    k_percent: f64,
    tol: &EvalThresholds,
) -> Result<f64, EvalError> {
    if preds.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    let top = top_count(preds.len(), k_percent);
    let hits = preds[..top]
        .iter()
        .filter(|(p, _)| gt_pos.iter().any(|g| match_rule_based(p, g, tol)))
        .count();
    Ok(hits as f64 / top as f64)
}

/// Fraction of ground-truth positives matched by at least one of the
/// top ⌈k%·n⌉ ranked predictions.
pub fn coverage_at(
    preds: &[(Grasp, f64)],
    gt_pos: &[Grasp],
    k_percent: f64,
    tol: &EvalThresholds,
) -> Result<f64, EvalError> {
    if gt_pos.is_empty() {
        return Err(EvalError::EmptyGroundTruth);
    }
    if preds.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    let top = top_count(preds.len(), k_percent);
    let covered = gt_pos
        .iter()
        .filter(|g| preds[..top].iter().any(|(p, _)| match_rule_based(p, g, tol)))
        .count();
    Ok(covered as f64 / gt_pos.len() as f64)
}

/// Full evaluation: NMS, confidence ranking, then success and coverage
/// at every k in [`REPORT_KS`].
pub fn evaluate(
    preds: &[(Grasp, f64)],
    gt_pos: &[Grasp],
    tol: &EvalThresholds,
) -> Result<EvalReport, EvalError> {
    if preds.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    if gt_pos.is_empty() {
        return Err(EvalError::EmptyGroundTruth);
    }
    let kept = nms(preds, tol);
    let mut success_at_k = [0.0; 4];
    let mut coverage_at_k = [0.0; 4];
    for (slot, &k) in REPORT_KS.iter().enumerate() {
        success_at_k[slot] = success_at(&kept, gt_pos, k as f64, tol)?;
        coverage_at_k[slot] = coverage_at(&kept, gt_pos, k as f64, tol)?;
    }
    let match_flags = kept
        .iter()
        .map(|(p, _)| gt_pos.iter().any(|g| match_rule_based(p, g, tol)))
        .collect();
    Ok(EvalReport {
        success_at: success_at_k,
        coverage_at: coverage_at_k,
        nms_survivors: kept.len(),
        match_flags,
    })
}
