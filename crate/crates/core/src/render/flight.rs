use rayon::prelude::*;

use super::camera::{interpolate_camera, CameraPath};
use super::raster::{render_indexed, LightingEnvironment, RenderedFrame, Resolution};
use super::RenderError;
use crate::geometry::TriangleMesh;
use crate::scalar::Real;

/// Renders every frame of `path`, in parallel, ordered by frame index.
pub fn render_flight<S: Real>(
    mesh: &TriangleMesh<S>,
    path: &CameraPath<S>,
    lighting: &LightingEnvironment,
    resolution: Resolution,
) -> Result<Vec<RenderedFrame<S>>, RenderError> {
    (0..path.frame_count())
        .into_par_iter()
        .map(|i| render_indexed(mesh, &interpolate_camera(path, i)?, lighting, resolution, i))
        .collect()
}

/// Single-threaded [`render_flight`].
pub fn render_flight_serial<S: Real>(
    mesh: &TriangleMesh<S>,
    path: &CameraPath<S>,
    lighting: &LightingEnvironment,
    resolution: Resolution,
) -> Result<Vec<RenderedFrame<S>>, RenderError> {
    (0..path.frame_count())
        .map(|i| render_indexed(mesh, &interpolate_camera(path, i)?, lighting, resolution, i))
        .collect()
}
