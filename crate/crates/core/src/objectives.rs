//! Training objectives as pure scalar functions: antipodal and grasp
//! classification cross-entropies, the offset-and-pitch regression loss
//! with pitch-ambiguity weighting, and the label assignment rule for
//! classifier training data.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evaluation::{angle_gaps, EvalThresholds};
use crate::grasp::Grasp;
use nalgebra::Vector3;

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` so a
/// confident wrong prediction yields a large finite loss.
pub const PROB_CLAMP: f64 = 1e-7;

/// Weights combining the component losses, plus the regularizer of the
/// pitch weighting rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl Default for LossWeights {
    fn default() -> LossWeights {
        LossWeights {
            alpha: 1.0,
            beta: 1.0,
            delta: 1e-3,
        }
    }
}

fn cross_entropy(label: bool, pred: f64) -> f64 {
    let p = pred.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    if label {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Binary cross-entropy on the antipodal validity prediction.
pub fn loss_antipodal(label: bool, pred: f64) -> f64 {
    cross_entropy(label, pred)
}

/// Binary cross-entropy on the grasp classification prediction.
pub fn loss_classification(label: bool, pred: f64) -> f64 {
    cross_entropy(label, pred)
}

/// Normalized inverse-gap weights over the ground-truth pitches: the
/// closer a ground truth's cosine is to the prediction, the more of the
/// unit weight budget it receives.
fn pitch_weights(pitch_pred: f64, pitch_gts: &[f64], delta: f64) -> Vec<f64> {
    let raw: Vec<f64> = pitch_gts
        .iter()
        .map(|&g| 1.0 / ((pitch_pred.cos() - g.cos()).abs() + delta))
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Offset-and-pitch regression loss against a pitch-ambiguous ground
/// truth.
///
/// The offset term is the Euclidean gap; the pitch term averages the
/// per-ground-truth cosine gaps under the inverse-gap weights, so the
/// nearest admissible pitch dominates while the rest fade.
pub fn loss_regression(
    offset_gt: &Vector3<f64>,
    offset_pred: &Vector3<f64>,
    pitch_pred: f64,
    pitch_gts: &[f64],
    delta: f64,
) -> f64 {
    assert!(!pitch_gts.is_empty(), "at least one ground-truth pitch");
    assert!(delta > 0.0, "delta must be positive");
    let weights = pitch_weights(pitch_pred, pitch_gts, delta);
    let angle: f64 = pitch_gts
        .iter()
        .zip(&weights)
        .map(|(&g, &w)| w * (pitch_pred.cos() - g.cos()).abs())
        .sum();
    (offset_gt - offset_pred).norm() + angle / pitch_gts.len() as f64
}

/// Weighted sum of the component losses.
pub fn loss_total(l_ap: f64, l_cls: f64, l_reg: f64, weights: &LossWeights) -> f64 {
    l_ap + weights.alpha * l_cls + weights.beta * l_reg
}

/// Labels a predicted grasp by its nearest annotation.
///
/// Nearest means smallest center distance, ties broken by the smallest
/// maximum wrapped Euler gap; positives are scanned first so exact ties
/// resolve positive. The label is the nearest annotation's sign, forced
/// to negative when even the nearest lies outside the rule-based
/// matching thresholds.
pub fn assign_grasp_labels(
    pred: &Grasp,
    gt_pos: &[Grasp],
    gt_neg: &[Grasp],
    tol: &EvalThresholds,
) -> bool {
    assert!(
        !gt_pos.is_empty() || !gt_neg.is_empty(),
        "at least one annotated grasp"
    );
    let mut best: Option<(f64, f64, bool)> = None;
    for (set, sign) in [(gt_pos, true), (gt_neg, false)] {
        for g in set {
            let d = (pred.center - g.center).norm();
            let a = angle_gaps(pred, g).into_iter().fold(0.0, f64::max);
            if best.map_or(true, |(bd, ba, _)| (d, a) < (bd, ba)) {
                best = Some((d, a, sign));
            }
        }
    }
    let (d, a, sign) = best.unwrap();
    sign && d <= tol.center_tol && a <= tol.angle_tol
}

/// Draws a training batch targeting a 3:7 positive:negative mix.
///
/// Returns `(is_positive, pool_index)` entries in a seeded shuffled
/// order. Pools larger than their quota are sampled without
/// replacement; smaller pools repeat entries. An empty pool cedes its
/// share to the other.
pub fn sample_batch(
    positive_count: usize,
    negative_count: usize,
    batch_size: usize,
    seed: u64,
) -> Vec<(bool, usize)> {
    assert!(
        positive_count + negative_count > 0,
        "both pools cannot be empty"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos_quota = (batch_size * 3 + 5) / 10;
    if positive_count == 0 {
        pos_quota = 0;
    } else if negative_count == 0 {
        pos_quota = batch_size;
    }
    let neg_quota = batch_size - pos_quota;
    let mut out: Vec<(bool, usize)> = Vec::with_capacity(batch_size);
    for (quota, pool, sign) in [
        (pos_quota, positive_count, true),
        (neg_quota, negative_count, false),
    ] {
        if quota == 0 {
            continue;
        }
        if quota <= pool {
            for i in rand::seq::index::sample(&mut rng, pool, quota) {
                out.push((sign, i));
            }
        } else {
            for _ in 0..quota {
                out.push((sign, rng.gen_range(0..pool)));
            }
        }
    }
    // deterministic interleave so batches are not label-sorted
    for i in (1..out.len()).rev() {
        out.swap(i, rng.gen_range(0..=i));
    }
    out
}
