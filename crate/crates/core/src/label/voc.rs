//! Pascal VOC XML.
//!
//! Boxes are stored internally as 0-based inclusive-min / exclusive-max and
//! written in the VOC convention of 1-based inclusive corners, so
//! `xmin_voc = xmin + 1` and `xmax_voc = xmax`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use quick_xml::escape::escape;
use serde::Deserialize;

use super::bbox::{BoundingBox, ImageAnnotation};
use super::LabelError;

pub fn to_voc_string(annotation: &ImageAnnotation) -> String {
    let path = annotation.image_path.to_string_lossy();
    let folder = annotation
        .image_path
        .parent()
        .map(|p| p.to_string_lossy().into_owned())
        .unwrap_or_default();
    let filename = annotation
        .image_path
        .file_name()
        .map(|p| p.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut s = String::new();
    s.push_str("<annotation>\n");
    let _ = writeln!(s, "\t<folder>{}</folder>", escape(folder.as_str()));
    let _ = writeln!(s, "\t<filename>{}</filename>", escape(filename.as_str()));
    let _ = writeln!(s, "\t<path>{}</path>", escape(path.as_ref()));
    s.push_str("\t<source>\n\t\t<database>crackforge</database>\n\t</source>\n");
    let _ = writeln!(
        s,
        "\t<size>\n\t\t<width>{}</width>\n\t\t<height>{}</height>\n\t\t<depth>3</depth>\n\t</size>",
        annotation.width, annotation.height
    );
    s.push_str("\t<segmented>0</segmented>\n");
    for b in &annotation.boxes {
        s.push_str("\t<object>\n");
        let _ = writeln!(s, "\t\t<name>{}</name>", escape(b.label.as_str()));
        s.push_str("\t\t<pose>Unspecified</pose>\n\t\t<truncated>0</truncated>\n\t\t<difficult>0</difficult>\n");
        if let Some(c) = b.confidence {
            let _ = writeln!(s, "\t\t<confidence>{c}</confidence>");
        }
        let _ = writeln!(
            s,
            "\t\t<bndbox>\n\t\t\t<xmin>{}</xmin>\n\t\t\t<ymin>{}</ymin>\n\t\t\t<xmax>{}</xmax>\n\t\t\t<ymax>{}</ymax>\n\t\t</bndbox>",
            b.xmin + 1,
            b.ymin + 1,
            b.xmax,
            b.ymax
        );
        s.push_str("\t</object>\n");
    }
    s.push_str("</annotation>\n");
    s
}

pub fn write_voc_xml(annotation: &ImageAnnotation, path: &Path) -> Result<(), LabelError> {
    annotation.validate()?;
    fs::write(path, to_voc_string(annotation)).map_err(|source| LabelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_voc_xml(path: &Path) -> Result<ImageAnnotation, LabelError> {
    let text = fs::read_to_string(path).map_err(|source| LabelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_voc_str(&text)
}

#[derive(Deserialize)]
struct RawAnnotation {
    #[serde(default)]
    folder: Option<String>,
    #[serde(default)]
    filename: Option<String>,
    #[serde(default)]
    path: Option<String>,
    #[serde(default)]
    size: Option<RawSize>,
    #[serde(rename = "object", default)]
    objects: Vec<RawObject>,
}

#[derive(Deserialize)]
struct RawSize {
    width: String,
    height: String,
}

#[derive(Deserialize)]
struct RawObject {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    confidence: Option<String>,
    #[serde(default)]
    bndbox: Option<RawBndBox>,
}

#[derive(Deserialize)]
struct RawBndBox {
    xmin: String,
    ymin: String,
    xmax: String,
    ymax: String,
}

/// VOC coordinates are sometimes written as decimals; accept integral ones.
fn coord(value: &str, what: &str, index: usize) -> Result<i64, LabelError> {
    let bad = || LabelError::InvalidBox {
        index,
        reason: format!("{what} is not a pixel coordinate: {value:?}"),
    };
    let v: f64 = value.trim().parse().map_err(|_| bad())?;
    if !v.is_finite() || v.fract() != 0.0 || v.abs() > u32::MAX as f64 {
        return Err(bad());
    }
    Ok(v as i64)
}

pub fn parse_voc_str(text: &str) -> Result<ImageAnnotation, LabelError> {
    let raw: RawAnnotation =
        quick_xml::de::from_str(text).map_err(|e| LabelError::Xml(e.to_string()))?;
    let size = raw.size.ok_or(LabelError::MissingSize)?;
    let dim = |v: &str, what: &str| -> Result<u32, LabelError> {
        v.trim()
            .parse::<u32>()
            .map_err(|_| LabelError::Xml(format!("<size><{what}> is not a positive integer: {v:?}")))
    };
    let width = dim(&size.width, "width")?;
    let height = dim(&size.height, "height")?;
    let image_path = match (raw.path, raw.folder, raw.filename) {
        (Some(p), _, _) if !p.is_empty() => PathBuf::from(p),
        (_, Some(folder), Some(file)) => Path::new(&folder).join(file),
        (_, None, Some(file)) => PathBuf::from(file),
        _ => PathBuf::new(),
    };

    let mut boxes = Vec::with_capacity(raw.objects.len());
    for (index, obj) in raw.objects.into_iter().enumerate() {
        let bb = obj.bndbox.ok_or_else(|| LabelError::InvalidBox {
            index,
            reason: "missing <bndbox>".into(),
        })?;
        let xmin = coord(&bb.xmin, "xmin", index)? - 1;
        let ymin = coord(&bb.ymin, "ymin", index)? - 1;
        let xmax = coord(&bb.xmax, "xmax", index)?;
        let ymax = coord(&bb.ymax, "ymax", index)?;
        if xmin < 0 || ymin < 0 {
            return Err(LabelError::InvalidBox {
                index,
                reason: "box starts before pixel 1".into(),
            });
        }
        let confidence = match obj.confidence {
            Some(c) => Some(c.trim().parse::<f64>().map_err(|_| LabelError::InvalidBox {
                index,
                reason: format!("bad confidence {c:?}"),
            })?),
            None => None,
        };
        let b = BoundingBox {
            xmin: xmin as u32,
            ymin: ymin as u32,
            xmax: xmax as u32,
            ymax: ymax as u32,
            label: obj.name.unwrap_or_else(|| super::CRACK_LABEL.to_string()),
            confidence,
        };
        b.check(width, height)
            .map_err(|reason| LabelError::InvalidBox { index, reason })?;
        boxes.push(b);
    }
    Ok(ImageAnnotation {
        image_path,
        width,
        height,
        boxes,
    })
}
