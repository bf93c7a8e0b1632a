use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::LabelError;

/// Class name used for every box this crate produces.
pub const CRACK_LABEL: &str = "crack";

/// Axis-aligned pixel box, inclusive min / exclusive max.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: u32,
    pub ymin: u32,
    pub xmax: u32,
    pub ymax: u32,
    pub label: String,
    /// Detector score; `None` for ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl BoundingBox {
    /// Ground-truth crack box. Panics if the box is empty.
    pub fn new(xmin: u32, ymin: u32, xmax: u32, ymax: u32) -> Self {
        assert!(xmin < xmax && ymin < ymax, "empty box ({xmin},{ymin},{xmax},{ymax})");
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
            label: CRACK_LABEL.to_string(),
            confidence: None,
        }
    }

    /// Prediction box with a confidence score.
    pub fn scored(xmin: u32, ymin: u32, xmax: u32, ymax: u32, confidence: f64) -> Self {
        Self {
            confidence: Some(confidence),
            ..Self::new(xmin, ymin, xmax, ymax)
        }
    }

    pub fn width(&self) -> u32 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> u32 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    /// Intersection box, if non-empty.
    pub fn intersect(&self, o: &BoundingBox) -> Option<BoundingBox> {
        let xmin = self.xmin.max(o.xmin);
        let ymin = self.ymin.max(o.ymin);
        let xmax = self.xmax.min(o.xmax);
        let ymax = self.ymax.min(o.ymax);
        (xmin < xmax && ymin < ymax).then(|| BoundingBox {
            xmin,
            ymin,
            xmax,
            ymax,
            label: self.label.clone(),
            confidence: None,
        })
    }

    pub fn contains_box(&self, o: &BoundingBox) -> bool {
        self.xmin <= o.xmin && self.ymin <= o.ymin && self.xmax >= o.xmax && self.ymax >= o.ymax
    }

    pub fn check(&self, width: u32, height: u32) -> Result<(), String> {
        if self.xmin >= self.xmax {
            return Err(format!("xmax {} <= xmin {}", self.xmax, self.xmin));
        }
        if self.ymin >= self.ymax {
            return Err(format!("ymax {} <= ymin {}", self.ymax, self.ymin));
        }
        if self.xmax > width || self.ymax > height {
            return Err(format!(
                "box ({},{},{},{}) exceeds image {width}x{height}",
                self.xmin, self.ymin, self.xmax, self.ymax
            ));
        }
        if let Some(c) = self.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(format!("confidence {c} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Boxes for one image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageAnnotation {
    pub image_path: PathBuf,
    pub width: u32,
    pub height: u32,
    pub boxes: Vec<BoundingBox>,
}

impl ImageAnnotation {
    pub fn new(image_path: impl Into<PathBuf>, width: u32, height: u32) -> Self {
        Self {
            image_path: image_path.into(),
            width,
            height,
            boxes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), LabelError> {
        for (index, b) in self.boxes.iter().enumerate() {
            b.check(self.width, self.height)
                .map_err(|reason| LabelError::InvalidBox { index, reason })?;
        }
        Ok(())
    }
}

/// Grows every box by `n` pixels on each side, clamped to the image.
pub fn expand_boxes(annotation: &ImageAnnotation, n: u32) -> ImageAnnotation {
    let mut out = annotation.clone();
    for b in &mut out.boxes {
        b.xmin = b.xmin.saturating_sub(n);
        b.ymin = b.ymin.saturating_sub(n);
        b.xmax = b.xmax.saturating_add(n).min(annotation.width);
        b.ymax = b.ymax.saturating_add(n).min(annotation.height);
    }
    out
}
