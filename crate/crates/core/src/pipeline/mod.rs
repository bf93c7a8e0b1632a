//! Scene files, dataset generation, manifests and evaluation runs.

mod config;
mod evaluate;
mod generate;
mod manifest;

use std::path::PathBuf;

use thiserror::Error;

use crate::crack::CrackError;
use crate::eval::EvalError;
use crate::geometry::MeshError;
use crate::label::LabelError;
use crate::render::RenderError;

pub use config::{
    parse_scene, parse_scene_str, AnnotationSpec, BoxSpec, BrickGridSpec, ComponentSpec, Flight, FlightSpec,
    GroupSpec, KeyframeSpec, LightingSpec, ParamsSpec, Scene, SceneConfig, SpallingSpec,
    DEFAULT_ANCHOR_MAX_DISTANCE,
};
pub use evaluate::evaluate_dataset;
pub use generate::{generate_dataset, GenerateOptions, INCOMPLETE_MARKER, MANIFEST_FILE};
pub use manifest::{
    dataset_stats, rebalance, DatasetManifest, DatasetStats, ManifestCounts, ManifestEntry, Origin,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("scene file: {0}")]
    Toml(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("annotation {path}: {message}")]
    Annotation { path: PathBuf, message: String },
    #[error("output directory {0} is not empty and was not produced by a previous run")]
    OutputNotEmpty(PathBuf),
    #[error("prediction refers to unknown image {0:?}")]
    UnknownImage(String),
    #[error("prediction image id {0:?} matches more than one image")]
    AmbiguousImage(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Crack(#[from] CrackError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PipelineError {
    /// Whether the input itself is at fault, as opposed to a runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            PipelineError::Config { .. } | PipelineError::Toml(_) | PipelineError::Mesh(_) => true,
            PipelineError::Crack(e) => !matches!(
                e,
                CrackError::Bowtie { .. } | CrackError::SelfIntersection { .. }
            ),
            _ => false,
        }
    }
}
