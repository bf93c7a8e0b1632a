use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use image::{ImageBuffer, Luma, RgbImage};

use super::RenderError;
use crate::label::IdBuffer;

/// Crack id to annotation name, stored next to id-buffer images.
pub type IdMap = BTreeMap<u32, String>;

pub fn save_color_png(image: &RgbImage, path: &Path) -> Result<(), RenderError> {
    image.save(path).map_err(|source| RenderError::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes ids as a 16-bit grayscale PNG. Ids above 65535 are an error.
pub fn save_id_png(ids: &IdBuffer, path: &Path) -> Result<(), RenderError> {
    let mut data = Vec::with_capacity(ids.data().len());
    for &id in ids.data() {
        data.push(u16::try_from(id).map_err(|_| RenderError::IdOverflow { id })?);
    }
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(ids.width(), ids.height(), data).expect("buffer matches dimensions");
    img.save(path).map_err(|source| RenderError::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_id_png(path: &Path) -> Result<IdBuffer, RenderError> {
    let img = image::open(path).map_err(|source| RenderError::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let luma = img.into_luma16();
    let (w, h) = luma.dimensions();
    Ok(IdBuffer::from_vec(w, h, luma.into_raw().into_iter().map(u32::from).collect()))
}

pub fn save_id_map(map: &IdMap, path: &Path) -> Result<(), RenderError> {
    let text = serde_json::to_string_pretty(map).expect("string map serializes");
    fs::write(path, text).map_err(|source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_id_map(path: &Path) -> Result<IdMap, RenderError> {
    let text = fs::read_to_string(path).map_err(|source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| RenderError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_png_round_trip_and_overflow() {
        let dir = tempfile::tempdir().unwrap();
        let mut ids = IdBuffer::new(5, 3);
        ids.set(0, 0, 1);
        ids.set(4, 2, 65535);
        ids.set(2, 1, 300);
        let p = dir.path().join("ids.png");
        save_id_png(&ids, &p).unwrap();
        assert_eq!(load_id_png(&p).unwrap(), ids);
        ids.set(1, 1, 65536);
        assert!(matches!(save_id_png(&ids, &p), Err(RenderError::IdOverflow { id: 65536 })));
    }

    #[test]
    fn id_map_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let map: IdMap = [(1, "a".to_string()), (7, "b".to_string())].into();
        let p = dir.path().join("ids.json");
        save_id_map(&map, &p).unwrap();
        assert_eq!(load_id_map(&p).unwrap(), map);
    }
}
