//! Precision/recall under one-to-one IoU matching and many-to-many IoP/IoG matching.

use serde::{Deserialize, Serialize};

use super::metrics::{iog, iop, iou, Threshold};
use crate::label::BoundingBox;

/// Ground truth and predictions for one image.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationPair {
    pub ground_truth: Vec<BoundingBox>,
    pub predictions: Vec<BoundingBox>,
}

fn score(b: &BoundingBox) -> f64 {
    b.confidence.unwrap_or(1.0)
}

/// Raw counts behind one precision/recall point, summed over images.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrCounts {
    /// Predictions counted as correct.
    pub true_predictions: u64,
    /// Predictions above the confidence threshold.
    pub kept_predictions: u64,
    /// Ground-truth boxes counted as found.
    pub recalled_ground_truth: u64,
    pub total_ground_truth: u64,
}

impl PrCounts {
    /// 1.0 when nothing was kept.
    pub fn precision(&self) -> f64 {
        if self.kept_predictions == 0 {
            1.0
        } else {
            self.true_predictions as f64 / self.kept_predictions as f64
        }
    }

    /// 1.0 when there is no ground truth.
    pub fn recall(&self) -> f64 {
        if self.total_ground_truth == 0 {
            1.0
        } else {
            self.recalled_ground_truth as f64 / self.total_ground_truth as f64
        }
    }

    fn add(&mut self, o: &PrCounts) {
        self.true_predictions += o.true_predictions;
        self.kept_predictions += o.kept_predictions;
        self.recalled_ground_truth += o.recalled_ground_truth;
        self.total_ground_truth += o.total_ground_truth;
    }
}

/// Matching rule and thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MetricMode {
    /// Greedy one-to-one matching at an IoU threshold.
    Standard { iou: f64 },
    /// Precision from IoP against all ground truth, recall from IoG against all kept predictions.
    ManyToMany { iop: f64, iog: f64 },
}

impl MetricMode {
    pub fn name(&self) -> &'static str {
        match self {
            MetricMode::Standard { .. } => "standard",
            MetricMode::ManyToMany { .. } => "m2m",
        }
    }
}

fn kept(predictions: &[BoundingBox], confidence: f64) -> Vec<BoundingBox> {
    predictions
        .iter()
        .filter(|p| score(p) >= confidence)
        .cloned()
        .collect()
}

fn image_counts_m2m(gt: &[BoundingBox], kept: &[BoundingBox], iop_t: &Threshold, iog_t: &Threshold) -> PrCounts {
    PrCounts {
        true_predictions: kept.iter().filter(|p| iop_t.is_met_by(&iop(p, gt))).count() as u64,
        kept_predictions: kept.len() as u64,
        recalled_ground_truth: gt.iter().filter(|g| iog_t.is_met_by(&iog(g, kept))).count() as u64,
        total_ground_truth: gt.len() as u64,
    }
}

/// Greedy matching: predictions by descending confidence (ties keep input
/// order), each taking the unmatched ground truth of highest IoU (ties: lowest
/// index) if that IoU meets the threshold.
fn image_counts_standard(gt: &[BoundingBox], kept: &[BoundingBox], iou_t: &Threshold) -> PrCounts {
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by(|&a, &b| score(&kept[b]).total_cmp(&score(&kept[a])));
    let mut matched = vec![false; gt.len()];
    let mut tp = 0u64;
    for &pi in &order {
        let mut best: Option<(usize, num_rational::Ratio<u64>)> = None;
        for (gi, g) in gt.iter().enumerate() {
            if matched[gi] {
                continue;
            }
            let r = iou(&kept[pi], g);
            if best.as_ref().is_none_or(|(_, br)| r > *br) {
                best = Some((gi, r));
            }
        }
        if let Some((gi, r)) = best {
            if iou_t.is_met_by(&r) {
                matched[gi] = true;
                tp += 1;
            }
        }
    }
    PrCounts {
        true_predictions: tp,
        kept_predictions: kept.len() as u64,
        recalled_ground_truth: tp,
        total_ground_truth: gt.len() as u64,
    }
}

fn image_counts(pair: &EvaluationPair, confidence: f64, mode: &PreparedMode) -> PrCounts {
    let k = kept(&pair.predictions, confidence);
    match mode {
        PreparedMode::Standard(t) => image_counts_standard(&pair.ground_truth, &k, t),
        PreparedMode::ManyToMany(p, g) => image_counts_m2m(&pair.ground_truth, &k, p, g),
    }
}

enum PreparedMode {
    Standard(Threshold),
    ManyToMany(Threshold, Threshold),
}

impl PreparedMode {
    fn new(mode: MetricMode) -> Self {
        match mode {
            MetricMode::Standard { iou } => PreparedMode::Standard(Threshold::new(iou)),
            MetricMode::ManyToMany { iop, iog } => {
                PreparedMode::ManyToMany(Threshold::new(iop), Threshold::new(iog))
            }
        }
    }
}

/// Many-to-many counts at one confidence threshold, micro-averaged over images.
pub fn pr_at_threshold_m2m(
    pairs: &[EvaluationPair],
    confidence: f64,
    iop_threshold: f64,
    iog_threshold: f64,
) -> PrCounts {
    pr_at_threshold(pairs, confidence, MetricMode::ManyToMany { iop: iop_threshold, iog: iog_threshold })
}

/// One-to-one counts at one confidence threshold, micro-averaged over images.
pub fn pr_at_threshold_standard(pairs: &[EvaluationPair], confidence: f64, iou_threshold: f64) -> PrCounts {
    pr_at_threshold(pairs, confidence, MetricMode::Standard { iou: iou_threshold })
}

pub fn pr_at_threshold(pairs: &[EvaluationPair], confidence: f64, mode: MetricMode) -> PrCounts {
    let prepared = PreparedMode::new(mode);
    let mut total = PrCounts::default();
    for p in pairs {
        total.add(&image_counts(p, confidence, &prepared));
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub confidence: f64,
    pub precision: f64,
    pub recall: f64,
    pub counts: PrCounts,
}

/// Points ordered by descending confidence threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub mode: MetricMode,
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    /// Curve from bare `(recall, precision)` pairs, for hand-built curves.
    pub fn from_recall_precision(mode: MetricMode, pts: &[(f64, f64)]) -> Self {
        let n = pts.len();
        Self {
            mode,
            points: pts
                .iter()
                .enumerate()
                .map(|(i, &(recall, precision))| PrPoint {
                    confidence: 1.0 - i as f64 / n.max(1) as f64,
                    precision,
                    recall,
                    counts: PrCounts::default(),
                })
                .collect(),
        }
    }
}

/// One point per distinct prediction confidence, descending.
///
/// Each image's counts only change at its own confidences, so per-image counts
/// are computed at those levels and summed in a single sweep.
pub fn pr_curve(pairs: &[EvaluationPair], mode: MetricMode) -> PrCurve {
    let prepared = PreparedMode::new(mode);
    // (confidence, image, counts after admitting everything >= confidence)
    let mut events: Vec<(f64, usize, PrCounts)> = Vec::new();
    let mut current: Vec<PrCounts> = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let mut levels: Vec<f64> = pair.predictions.iter().map(score).collect();
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();
        for c in levels {
            events.push((c, i, image_counts(pair, c, &prepared)));
        }
        current.push(PrCounts {
            total_ground_truth: pair.ground_truth.len() as u64,
            ..PrCounts::default()
        });
    }
    if events.is_empty() {
        return PrCurve {
            mode,
            points: vec![PrPoint {
                confidence: 1.0,
                precision: 1.0,
                recall: 0.0,
                counts: PrCounts {
                    total_ground_truth: current.iter().map(|c| c.total_ground_truth).sum(),
                    ..PrCounts::default()
                },
            }],
        };
    }
    events.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut total = PrCounts::default();
    for c in &current {
        total.add(c);
    }
    let mut points = Vec::new();
    let mut k = 0;
    while k < events.len() {
        let level = events[k].0;
        while k < events.len() && events[k].0 == level {
            let (_, img, counts) = events[k];
            let old = current[img];
            total.true_predictions = total.true_predictions - old.true_predictions + counts.true_predictions;
            total.kept_predictions = total.kept_predictions - old.kept_predictions + counts.kept_predictions;
            total.recalled_ground_truth =
                total.recalled_ground_truth - old.recalled_ground_truth + counts.recalled_ground_truth;
            current[img] = counts;
            k += 1;
        }
        points.push(PrPoint {
            confidence: level,
            precision: total.precision(),
            recall: total.recall(),
            counts: total,
        });
    }
    PrCurve { mode, points }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApResult {
    pub ap: f64,
    pub mode: MetricMode,
}

/// All-points interpolated average precision: the precision envelope
/// (running maximum from high recall down) integrated over recall from 0.
pub fn average_precision(curve: &PrCurve) -> ApResult {
    let mut pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.recall, p.precision)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in (0..pts.len().saturating_sub(1)).rev() {
        pts[i].1 = pts[i].1.max(pts[i + 1].1);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &(r, p) in &pts {
        ap += (r - prev_recall) * p;
        prev_recall = r;
    }
    ApResult { ap, mode: curve.mode }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1)
    }

    fn p(x0: u32, y0: u32, x1: u32, y1: u32, c: f64) -> BoundingBox {
        BoundingBox::scored(x0, y0, x1, y1, c)
    }

    #[test]
    fn exact_predictions_score_perfectly() {
        let pair = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10), g(20, 20, 40, 30)],
            predictions: vec![p(0, 0, 10, 10, 0.9), p(20, 20, 40, 30, 0.8)],
        };
        for t in [0.1, 0.5, 1.0] {
            let m = pr_at_threshold_m2m(std::slice::from_ref(&pair), 0.0, t, t);
            assert_eq!((m.precision(), m.recall()), (1.0, 1.0));
            let s = pr_at_threshold_standard(std::slice::from_ref(&pair), 0.0, t);
            assert_eq!((s.precision(), s.recall()), (1.0, 1.0));
        }
    }

    #[test]
    fn nothing_kept_means_precision_one_recall_zero() {
        let pair = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10)],
            predictions: vec![p(0, 0, 10, 10, 0.2)],
        };
        let m = pr_at_threshold_m2m(&[pair], 0.5, 0.5, 0.5);
        assert_eq!((m.precision(), m.recall()), (1.0, 0.0));
    }

    #[test]
    fn two_half_boxes() {
        let pair = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10)],
            predictions: vec![p(0, 0, 5, 10, 0.9), p(5, 0, 10, 10, 0.9)],
        };
        let m = pr_at_threshold_m2m(std::slice::from_ref(&pair), 0.5, 0.5, 0.5);
        assert_eq!(m.true_predictions, 2);
        assert_eq!((m.precision(), m.recall()), (1.0, 1.0));
        let s = pr_at_threshold_standard(&[pair], 0.5, 0.5);
        assert_eq!(s.true_predictions, 1);
        assert_eq!((s.precision(), s.recall()), (0.5, 1.0));
    }

    #[test]
    fn duplicate_prediction_is_a_false_positive() {
        let pair = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10)],
            predictions: vec![p(0, 0, 10, 10, 0.9), p(0, 0, 10, 10, 0.8)],
        };
        let s = pr_at_threshold_standard(&[pair], 0.0, 0.5);
        assert_eq!((s.precision(), s.recall()), (0.5, 1.0));
    }

    #[test]
    fn curve_single_prediction_and_empty() {
        let pair = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10)],
            predictions: vec![p(0, 0, 10, 10, 0.7)],
        };
        let c = pr_curve(&[pair], MetricMode::ManyToMany { iop: 0.5, iog: 0.5 });
        assert_eq!(c.points.len(), 1);
        assert_eq!(c.points[0].confidence, 0.7);
        let empty = EvaluationPair {
            ground_truth: vec![g(0, 0, 10, 10)],
            predictions: vec![],
        };
        let c = pr_curve(&[empty], MetricMode::Standard { iou: 0.5 });
        assert_eq!(c.points.len(), 1);
        assert_eq!((c.points[0].precision, c.points[0].recall), (1.0, 0.0));
    }

    #[test]
    fn ap_examples() {
        let mode = MetricMode::Standard { iou: 0.5 };
        assert_eq!(average_precision(&PrCurve::from_recall_precision(mode, &[(1.0, 1.0)])).ap, 1.0);
        assert_eq!(average_precision(&PrCurve::from_recall_precision(mode, &[(0.0, 1.0)])).ap, 0.0);
        let c = PrCurve::from_recall_precision(mode, &[(0.2, 1.0), (0.5, 0.6), (0.8, 0.7)]);
        assert!((average_precision(&c).ap - 0.62).abs() < 1e-12);
    }
}
