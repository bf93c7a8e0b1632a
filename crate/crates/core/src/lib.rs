//! Semi-synthetic crack imagery from textured 3D meshes.
//!
//! Expert-placed meta-annotations describe where cracks may appear and how
//! they vary; [`crack`] turns them into randomized crack instances carved into
//! the mesh, [`render`] rasterizes virtual flights with solar lighting,
//! [`label`] derives boxes and Pascal VOC files from per-pixel crack ids, and
//! [`eval`] scores detectors with one-to-one IoU and many-to-many IoP/IoG
//! metrics. [`pipeline`] ties it together behind a scene file and the CLI.
//!
//! Geometry is generic over [`Real`] (`f32`/`f64`); the aliases below fix the
//! `f64` instantiation used by the pipeline. Box metrics use exact integer
//! and rational arithmetic.

pub mod crack;
pub mod eval;
pub mod geometry;
pub mod label;
pub mod pipeline;
pub mod render;
pub mod scalar;

pub use scalar::Real;

pub type Vec3d = geometry::Vec3<f64>;
pub type Vec2d = geometry::Vec2<f64>;
pub type Mesh = geometry::TriangleMesh<f64>;
pub type BrickGridF64 = geometry::BrickGrid<f64>;

pub type CrackInstanceF64 = crack::CrackInstance<f64>;
pub type CameraPathF64 = render::CameraPath<f64>;
pub type CameraPoseF64 = render::CameraPose<f64>;
