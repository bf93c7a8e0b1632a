//! Triangle meshes: loading, validation, component selection and retexturing.

mod component;
pub mod io;
mod mesh;
mod vector;

use std::path::PathBuf;

use thiserror::Error;

pub use component::{
    retexture_component, retexture_component_from_file, select_component, Aabb, BrickGrid,
    Component, Selector, SurfacePoint, SurfaceProjector,
};
pub use io::{load_mesh, save_mesh, MeshFormat};
pub use mesh::{
    area_weighted_normals, planar_uvs, FaceAttr, Material, RepairReport, Texture, TriangleMesh,
};
pub use vector::{closest_point_on_triangle, orient2d, triangle_area, Vec2, Vec3};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("mesh has no faces")]
    NoFaces,
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("vertex {vertex} has a zero or non-finite normal")]
    InvalidNormal { vertex: usize },
    #[error("{attribute}: expected {expected} entries, found {found}")]
    AttributeCount {
        attribute: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unsupported mesh format: {0}")]
    UnsupportedFormat(PathBuf),
    #[error("cannot read texture {path}: {source}")]
    Texture {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("selection for component {0:?} contains no faces")]
    EmptySelection(String),
    #[error("face {face} out of range ({face_count} faces)")]
    FaceOutOfRange { face: usize, face_count: usize },
    #[error("invalid brick grid: {0}")]
    InvalidBrickGrid(String),
}
