//! Crack-id buffers to boxes, box expansion, Pascal VOC I/O and debug overlays.

mod bbox;
mod mask;
mod overlay;
mod voc;

use std::path::PathBuf;

use thiserror::Error;

pub use bbox::{expand_boxes, BoundingBox, ImageAnnotation, CRACK_LABEL};
pub use mask::{mask_to_boxes, mask_to_labeled_boxes, IdBuffer, LabeledBox, DEFAULT_MERGE_DISTANCE};
pub use overlay::{render_debug_overlay, OVERLAY_COLOR};
pub use voc::{parse_voc_str, read_voc_xml, to_voc_string, write_voc_xml};

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed VOC XML: {0}")]
    Xml(String),
    #[error("VOC annotation has no <size> element")]
    MissingSize,
    #[error("object {index}: {reason}")]
    InvalidBox { index: usize, reason: String },
    #[error("image is {image:?} but annotation says {annotation:?}")]
    DimensionMismatch {
        image: (u32, u32),
        annotation: (u32, u32),
    },
}
