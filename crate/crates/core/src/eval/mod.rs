//! Detector scoring: IoU, union area, IoP/IoG, precision/recall, PR curves and AP.

pub mod io;
mod metrics;
mod pr;

use std::path::PathBuf;

use thiserror::Error;

pub use io::{parse_predictions, plot_pr_curve, read_predictions, EvaluationReport, PredictionRecord};
pub use metrics::{covered_area, iog, iop, iou, union_area, AreaRatio, Threshold};
pub use pr::{
    average_precision, pr_at_threshold, pr_at_threshold_m2m, pr_at_threshold_standard, pr_curve,
    ApResult, EvaluationPair, MetricMode, PrCounts, PrCurve, PrPoint,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("predictions line {line}: {message}")]
    Prediction { line: usize, message: String },
}
