//! Presentation-attack detection metrics over labeled classifier scores.
//!
//! Classification rule throughout: a sample is called live iff
//! `score >= threshold` (ties go to live). Scores are expected in
//! `[0, 1]` with higher meaning more live, but none of the formulas
//! depend on the range.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("score set must contain both live and spoof samples")]
    OneClassOnly,
    #[error("every spoof record must carry an attack type")]
    MissingAttackType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Truth {
    Live,
    Spoof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttackType {
    None,
    PlanePrint,
    BentPrint,
    Replay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub sample_id: String,
    pub score: f64,
    pub truth: Truth,
    pub attack_type: AttackType,
}

impl ScoreRecord {
    pub fn is_live(&self) -> bool {
        self.truth == Truth::Live
    }
}

fn check_both_classes(scores: &[ScoreRecord]) -> Result<(), MetricsError> {
    let lives = scores.iter().filter(|r| r.is_live()).count();
    if lives == 0 || lives == scores.len() {
        return Err(MetricsError::OneClassOnly);
    }
    Ok(())
}

/// FAR at a threshold: fraction of spoof samples accepted as live
/// (`score >= t`).
pub fn far_at(scores: &[ScoreRecord], t: f64) -> f64 {
    let spoof: Vec<_> = scores.iter().filter(|r| !r.is_live()).collect();
    spoof.iter().filter(|r| r.score >= t).count() as f64 / spoof.len() as f64
}

/// FRR at a threshold: fraction of live samples rejected (`score < t`).
pub fn frr_at(scores: &[ScoreRecord], t: f64) -> f64 {
    let live: Vec<_> = scores.iter().filter(|r| r.is_live()).collect();
    live.iter().filter(|r| r.score < t).count() as f64 / live.len() as f64
}

/// The full (threshold, FAR, FRR) curve over all unique scores plus an
/// upper sentinel, sorted by threshold. FAR is non-increasing and FRR
/// non-decreasing along the curve; the endpoints are (1, 0) and (0, 1).
pub fn far_frr_curve(scores: &[ScoreRecord]) -> Result<Vec<(f64, f64, f64)>, MetricsError> {
    check_both_classes(scores)?;
    let mut thresholds: Vec<f64> = scores.iter().map(|r| r.score).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);
    Ok(thresholds
        .into_iter()
        .map(|t| (t, far_at(scores, t), frr_at(scores, t)))
        .collect())
}

/// Equal error rate: the curve point minimizing `|FAR - FRR|` (ties
/// broken toward the lower threshold), reported as the midpoint
/// `(FAR + FRR) / 2` with its threshold.
pub fn eer(scores: &[ScoreRecord]) -> Result<(f64, f64), MetricsError> {
    let curve = far_frr_curve(scores)?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (t, far, frr) in curve {
        let gap = libm::fabs(far - frr);
        if gap < best.0 {
            best = (gap, t, (far + frr) / 2.0);
        }
    }
    Ok((best.2, best.1))
}

/// HTER: fix the threshold at the development set's EER point, then
/// report `(FAR + FRR) / 2` on the test set at that threshold.
pub fn hter(dev: &[ScoreRecord], test: &[ScoreRecord]) -> Result<f64, MetricsError> {
    check_both_classes(test)?;
    let (_, t) = eer(dev)?;
    Ok((far_at(test, t) + frr_at(test, t)) / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadMetrics {
    /// Per-attack-type misclassification rate, for types present.
    pub apcer_by_type: Vec<(AttackType, f64)>,
    /// Maximum over attack types.
    pub apcer: f64,
    pub bpcer: f64,
    pub acer: f64,
    /// Binary classification accuracy at the threshold, in [0, 1].
    pub top1: f64,
}

/// APCER / BPCER / ACER / Top-1 at a fixed threshold.
pub fn pad_metrics(scores: &[ScoreRecord], threshold: f64) -> Result<PadMetrics, MetricsError> {
    check_both_classes(scores)?;
    if scores
        .iter()
        .any(|r| !r.is_live() && r.attack_type == AttackType::None)
    {
        return Err(MetricsError::MissingAttackType);
    }
    let mut types: Vec<AttackType> = scores
        .iter()
        .filter(|r| !r.is_live())
        .map(|r| r.attack_type)
        .collect();
    types.sort();
    types.dedup();
    let apcer_by_type: Vec<(AttackType, f64)> = types
        .into_iter()
        .map(|ty| {
            let of_type: Vec<_> = scores.iter().filter(|r| r.attack_type == ty).collect();
            let wrong = of_type.iter().filter(|r| r.score >= threshold).count();
            (ty, wrong as f64 / of_type.len() as f64)
        })
        .collect();
    let apcer = apcer_by_type
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    let bpcer = frr_at(scores, threshold);
    let correct = scores
        .iter()
        .filter(|r| (r.score >= threshold) == r.is_live())
        .count();
    Ok(PadMetrics {
        apcer_by_type,
        apcer,
        bpcer,
        acer: (apcer + bpcer) / 2.0,
        top1: correct as f64 / scores.len() as f64,
    })
}
