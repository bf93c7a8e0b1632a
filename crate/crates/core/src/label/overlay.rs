use image::{Rgb, RgbImage};

use super::bbox::ImageAnnotation;
use super::LabelError;

pub const OVERLAY_COLOR: [u8; 3] = [255, 0, 0];

/// Copy of `image` with a 1-pixel outline along the inner edge of every box.
pub fn render_debug_overlay(image: &RgbImage, annotation: &ImageAnnotation) -> Result<RgbImage, LabelError> {
    if image.dimensions() != (annotation.width, annotation.height) {
        return Err(LabelError::DimensionMismatch {
            image: image.dimensions(),
            annotation: (annotation.width, annotation.height),
        });
    }
    annotation.validate()?;
    let mut out = image.clone();
    let color = Rgb(OVERLAY_COLOR);
    for b in &annotation.boxes {
        let (x1, y1) = (b.xmax - 1, b.ymax - 1);
        for x in b.xmin..=x1 {
            out.put_pixel(x, b.ymin, color);
            out.put_pixel(x, y1, color);
        }
        for y in b.ymin..=y1 {
            out.put_pixel(b.xmin, y, color);
            out.put_pixel(x1, y, color);
        }
    }
    Ok(out)
}
