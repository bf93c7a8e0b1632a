//! Virtual flights: solar position, camera interpolation and rasterization.

mod camera;
mod flight;
pub mod io;
mod raster;
mod solar;

use std::path::PathBuf;

use thiserror::Error;

pub use camera::{interpolate_camera, CameraPath, CameraPose, Keyframe};
pub use flight::{render_flight, render_flight_serial};
pub use raster::{
    render_frame, shade, LightingEnvironment, RenderedFrame, Resolution, BACKGROUND, NEAR_PLANE,
    SKY_DIFFUSE,
};
pub use solar::{sun_direction, SolarPosition};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("viewport has zero area")]
    ZeroViewport,
    #[error("invalid camera path: {0}")]
    InvalidCameraPath(String),
    #[error("frame {index} out of range ({count} frames)")]
    FrameOutOfRange { index: usize, count: usize },
    #[error("invalid lighting: {0}")]
    InvalidLighting(String),
    #[error("crack id {id} does not fit a 16-bit id image")]
    IdOverflow { id: u32 },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}
