//! Prediction files, evaluation reports and PR plots.

use std::path::Path;

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::pr::{ApResult, MetricMode, PrCurve, PrPoint};
use super::EvalError;
use crate::label::BoundingBox;

/// One line of a predictions file, coordinates as written by the detector.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRecord {
    pub image_id: String,
    pub class: String,
    pub confidence: f64,
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub line: usize,
}

impl PredictionRecord {
    /// Rounds to the nearest pixel edge and clamps into a `width`×`height` image.
    pub fn to_box(&self, width: u32, height: u32) -> Result<BoundingBox, EvalError> {
        let clamp = |v: f64, hi: u32| v.round().clamp(0.0, hi as f64) as u32;
        let (x0, x1) = (clamp(self.xmin, width), clamp(self.xmax, width));
        let (y0, y1) = (clamp(self.ymin, height), clamp(self.ymax, height));
        if x0 >= x1 || y0 >= y1 {
            return Err(EvalError::Prediction {
                line: self.line,
                message: format!(
                    "box ({}, {}, {}, {}) is empty inside the {width}x{height} image",
                    self.xmin, self.ymin, self.xmax, self.ymax
                ),
            });
        }
        Ok(BoundingBox {
            xmin: x0,
            ymin: y0,
            xmax: x1,
            ymax: y1,
            label: self.class.clone(),
            confidence: Some(self.confidence),
        })
    }
}

/// Parses `image-id class confidence xmin ymin xmax ymax` lines.
/// Blank lines and `#` comments are skipped.
pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 7 {
            return Err(EvalError::Prediction {
                line,
                message: format!("expected 7 fields, found {}", toks.len()),
            });
        }
        let num = |k: usize, what: &str| -> Result<f64, EvalError> {
            toks[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| EvalError::Prediction {
                    line,
                    message: format!("{what} is not a number: {:?}", toks[k]),
                })
        };
        let confidence = num(2, "confidence")?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(EvalError::Prediction {
                line,
                message: format!("confidence {confidence} outside [0, 1]"),
            });
        }
        out.push(PredictionRecord {
            image_id: toks[0].to_string(),
            class: toks[1].to_string(),
            confidence,
            xmin: num(3, "xmin")?,
            ymin: num(4, "ymin")?,
            xmax: num(5, "xmax")?,
            ymax: num(6, "ymax")?,
            line,
        });
    }
    Ok(out)
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_predictions(&text)
}

/// Structured output of an evaluation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: MetricMode,
    pub ground_truth_expansion: u32,
    pub images: usize,
    pub ground_truth_boxes: usize,
    pub predictions: usize,
    pub average_precision: f64,
    pub points: Vec<PrPoint>,
}

impl EvaluationReport {
    pub fn new(curve: &PrCurve, ap: &ApResult, expansion: u32, images: usize, gt: usize, preds: usize) -> Self {
        Self {
            mode: curve.mode,
            ground_truth_expansion: expansion,
            images,
            ground_truth_boxes: gt,
            predictions: preds,
            average_precision: ap.ap,
            points: curve.points.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, c);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Precision (vertical) against recall (horizontal), both on [0, 1].
pub fn plot_pr_curve(curve: &PrCurve, size: u32) -> RgbImage {
    let size = size.max(64);
    let margin = size as i64 / 10;
    let span = size as i64 - 2 * margin;
    let mut img = RgbImage::from_pixel(size, size, Rgb([255, 255, 255]));
    let to_px = |r: f64, p: f64| {
        (
            margin + (r.clamp(0.0, 1.0) * span as f64).round() as i64,
            margin + span - (p.clamp(0.0, 1.0) * span as f64).round() as i64,
        )
    };
    let axis = Rgb([0, 0, 0]);
    draw_line(&mut img, to_px(0.0, 0.0), to_px(1.0, 0.0), axis);
    draw_line(&mut img, to_px(0.0, 0.0), to_px(0.0, 1.0), axis);
    let grid = Rgb([220, 220, 220]);
    for k in 1..=4 {
        let t = k as f64 / 4.0;
        draw_line(&mut img, to_px(t, 0.0), to_px(t, 1.0), grid);
        draw_line(&mut img, to_px(0.0, t), to_px(1.0, t), grid);
    }
    let color = Rgb([200, 30, 30]);
    let mut pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.recall, p.precision)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        draw_line(&mut img, to_px(w[0].0, w[0].1), to_px(w[1].0, w[1].1), color);
    }
    if let [only] = pts.as_slice() {
        let (x, y) = to_px(only.0, only.1);
        draw_line(&mut img, (x - 2, y), (x + 2, y), color);
    }
    img
}
