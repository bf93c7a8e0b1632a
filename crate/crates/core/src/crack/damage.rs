use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::annotation::{DamageScene, MetaAnnotation};
use super::carve::carve_crack;
use super::centerline::generate_centerline;
use super::masonry::snap_to_masonry;
use super::params::{annotation_seed, sample_parameters, stage_seed, SampledParams, Stage};
use super::profile::{build_profile, densify, polyline_length};
use super::spalling::{generate_spalling, SpallPatch};
use super::CrackError;
use crate::geometry::{Material, SurfaceProjector, TriangleMesh, Vec3};
use crate::scalar::Real;

/// One generated crack, ready to be carved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrackInstance<S> {
    /// Id of the originating annotation; also the id-buffer value.
    pub id: u32,
    pub name: String,
    pub seed: u64,
    pub material: Material,
    /// Whether the path was snapped to mortar joints.
    pub masonry: bool,
    pub params: SampledParams<S>,
    pub points: Vec<Vec3<S>>,
    pub normals: Vec<Vec3<S>>,
    pub widths: Vec<S>,
    pub depths: Vec<S>,
    pub spalling: Vec<SpallPatch<S>>,
}

impl<S: Real> CrackInstance<S> {
    pub fn length(&self) -> S {
        polyline_length(&self.points)
    }
}

/// A crack that was generated but could not be carved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedCrack {
    pub id: u32,
    pub reason: String,
}

/// Mesh and cracks at one damage level.
#[derive(Clone, Debug)]
pub struct DamageState<S> {
    pub level: u32,
    pub mesh: TriangleMesh<S>,
    /// Carved cracks in ascending id order.
    pub instances: Vec<CrackInstance<S>>,
    pub skipped: Vec<SkippedCrack>,
}

/// Annotations active at `level`, in ascending id order.
pub fn active_annotations<S: Real>(scene: &DamageScene<S>, level: u32) -> Result<Vec<&MetaAnnotation<S>>, CrackError> {
    let mut out = Vec::new();
    for a in &scene.annotations {
        if scene.enable_order_of(a)? <= level {
            out.push(a);
        }
    }
    out.sort_by_key(|a| a.id);
    Ok(out)
}

/// Highest level that activates anything new.
pub fn max_level<S: Real>(scene: &DamageScene<S>) -> u32 {
    scene.groups.iter().map(|g| g.enable_order).max().unwrap_or(0)
}

/// Samples one annotation's crack. `None` when the appearance draw fails.
/// Depends only on the master seed and the annotation, never on the level.
pub fn generate_instance<S: Real>(
    mesh: &TriangleMesh<S>,
    scene: &DamageScene<S>,
    annotation: &MetaAnnotation<S>,
    master_seed: u64,
) -> Result<Option<CrackInstance<S>>, CrackError> {
    let seed = annotation_seed(master_seed, annotation.id);
    let ranges = scene.ranges_for(annotation)?;
    let params = sample_parameters(ranges, stage_seed(seed, Stage::Parameters));
    if !params.appears {
        return Ok(None);
    }
    let comp = scene
        .components
        .get(annotation.component)
        .ok_or_else(|| CrackError::InvalidAnnotation {
            id: annotation.id,
            reason: format!("component index {} out of range", annotation.component),
        })?;
    let line = generate_centerline(
        mesh,
        &comp.component,
        &annotation.start,
        &annotation.end,
        &params,
        stage_seed(seed, Stage::Centerline),
    )?;
    let material = comp.component.material_of(mesh, annotation.start.face);
    let masonry = material == Material::Masonry;
    let (points, normals) = if masonry {
        let grid = comp.brick_grid.as_ref().ok_or_else(|| CrackError::MissingBrickGrid {
            annotation: annotation.id,
            component: comp.component.name.clone(),
        })?;
        let nodes = snap_to_masonry(&line.points, grid)?;
        let dense = densify(&nodes, grid.pitch_u().min(grid.pitch_v()) / S::lit(4.0));
        let (lo, hi) = dense
            .iter()
            .fold((dense[0], dense[0]), |(lo, hi), p| (lo.min_by_component(*p), hi.max_by_component(*p)));
        let projector = SurfaceProjector::near(mesh, &comp.component, lo, hi, grid.pitch_u().max(grid.pitch_v()));
        dense
            .iter()
            .map(|p| {
                let (q, sp, _) = projector.project(*p);
                (q, projector.face_normal(sp.face))
            })
            .unzip()
    } else {
        (line.points, line.normals)
    };
    let profile = build_profile(&points, params.thickness, params.depth);
    let spalling = generate_spalling(
        &points,
        &normals,
        &profile.widths,
        &profile.depths,
        ranges.spalling_probability,
        &scene.spalling,
        stage_seed(seed, Stage::Spalling),
    );
    Ok(Some(CrackInstance {
        id: annotation.id,
        name: annotation.name.clone(),
        seed,
        material,
        masonry,
        params,
        points,
        normals,
        widths: profile.widths,
        depths: profile.depths,
        spalling,
    }))
}

/// Generates every crack active at `level` (in parallel) and carves them in
/// ascending id order. Cracks whose geometry cannot be carved are skipped
/// and reported.
pub fn generate_damage_state<S: Real>(
    mesh: &TriangleMesh<S>,
    scene: &DamageScene<S>,
    level: u32,
    master_seed: u64,
) -> Result<DamageState<S>, CrackError> {
    scene.validate(mesh)?;
    let active = active_annotations(scene, level)?;
    let generated: Vec<Option<CrackInstance<S>>> = active
        .par_iter()
        .map(|a| generate_instance(mesh, scene, a, master_seed))
        .collect::<Result<_, _>>()?;

    let mut out = mesh.clone();
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for inst in generated.into_iter().flatten() {
        match carve_crack(&mut out, &inst) {
            Ok(_) => instances.push(inst),
            Err(e) => {
                log::warn!("skipping crack {}: {e}", inst.id);
                skipped.push(SkippedCrack {
                    id: inst.id,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(DamageState {
        level,
        mesh: out,
        instances,
        skipped,
    })
}
