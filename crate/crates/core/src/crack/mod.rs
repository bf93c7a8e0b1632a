//! Randomized crack instances from meta-annotations, carved into meshes.

mod annotation;
mod carve;
mod centerline;
mod damage;
mod masonry;
mod params;
mod profile;
mod spalling;

use thiserror::Error;

use crate::geometry::MeshError;

pub use annotation::{
    AnnotationGroup, DamageScene, MetaAnnotation, ParamSource, SceneComponent, SpallingConfig,
};
pub use carve::{carve_crack, CarveStats, GROOVE_COLOR, SPALL_SECTORS};
pub use centerline::{generate_centerline, sample_displacement, Centerline, DisplacementProfile, FINE_SEGMENTS};
pub use damage::{
    active_annotations, generate_damage_state, generate_instance, max_level, CrackInstance,
    DamageState, SkippedCrack,
};
pub use masonry::{nearest_node, snap_path, snap_to_masonry, GridNode};
pub use params::{
    annotation_seed, mix64, sample_parameters, stage_seed, CrackParamRanges, ParamRange,
    SampledParams, Stage,
};
pub use profile::{
    arc_lengths, build_profile, densify, polyline_length, taper, CrackProfile, TAPER_RESIDUAL,
    TAPER_ZONE,
};
pub use spalling::{generate_spalling, spalling_site_count, SpallPatch};

#[derive(Debug, Error)]
pub enum CrackError {
    #[error("{param}: {reason}")]
    InvalidRange { param: &'static str, reason: String },
    #[error("annotation {id}: {reason}")]
    InvalidAnnotation { id: u32, reason: String },
    #[error("annotation {annotation}: {reason}")]
    InvalidAnchor { annotation: u32, reason: String },
    #[error("annotation {annotation} references unknown group {group:?}")]
    UnknownGroup { annotation: u32, group: String },
    #[error("enable order {0} is used by more than one group")]
    DuplicateEnableOrder(u32),
    #[error("annotation {annotation} lies on masonry component {component:?} which has no brick grid")]
    MissingBrickGrid { annotation: u32, component: String },
    #[error("point at grid coordinates ({u:.4}, {v:.4}) lies outside the brick grid")]
    OutsideBrickGrid { u: f64, v: f64 },
    #[error("annotation endpoints coincide")]
    DegenerateAnnotation,
    #[error("crack {crack}: ribbon folds over itself at segment {segment}")]
    Bowtie { crack: u32, segment: usize },
    #[error("crack {crack}: centerline segments {first} and {second} intersect")]
    SelfIntersection { crack: u32, first: usize, second: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<CrackError>,
    },
}

impl CrackError {
    pub(crate) fn in_context(self, context: String) -> Self {
        CrackError::Context {
            context,
            source: Box::new(self),
        }
    }
}
