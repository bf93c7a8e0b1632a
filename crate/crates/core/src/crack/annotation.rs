use serde::{Deserialize, Serialize};

use super::params::CrackParamRanges;
use super::CrackError;
use crate::geometry::{BrickGrid, Component, SurfacePoint, TriangleMesh};
use crate::scalar::Real;

/// Where an annotation takes its parameter ranges from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamSource<S> {
    Own(CrackParamRanges<S>),
    Group(String),
}

/// Expert-placed line on a component governing random crack generation.
#[derive(Clone, Debug, PartialEq)]
pub struct MetaAnnotation<S> {
    /// Positive id; also the crack id written to id buffers.
    pub id: u32,
    pub name: String,
    /// Index into the scene's component list.
    pub component: usize,
    pub start: SurfacePoint<S>,
    pub end: SurfacePoint<S>,
    pub params: ParamSource<S>,
}

/// Annotations sharing one set of ranges, switched on at a damage level.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationGroup<S> {
    pub id: String,
    pub ranges: CrackParamRanges<S>,
    /// Lower values switch on at lower damage levels.
    pub enable_order: u32,
}

/// A damageable component plus its optional masonry layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneComponent<S> {
    pub component: Component,
    pub brick_grid: Option<BrickGrid<S>>,
}

/// Spalling site rule; lengths in metres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpallingConfig<S> {
    /// One candidate site per this much centerline arc length.
    pub site_spacing: S,
    /// Patch radius range as multiples of the local crack width.
    pub radius_factor_min: S,
    pub radius_factor_max: S,
}

impl<S: Real> Default for SpallingConfig<S> {
    fn default() -> Self {
        Self {
            site_spacing: S::half(),
            radius_factor_min: S::one(),
            radius_factor_max: S::lit(3.0),
        }
    }
}

/// Everything crack generation needs besides the mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct DamageScene<S> {
    pub components: Vec<SceneComponent<S>>,
    pub annotations: Vec<MetaAnnotation<S>>,
    pub groups: Vec<AnnotationGroup<S>>,
    pub spalling: SpallingConfig<S>,
}

impl<S: Real> DamageScene<S> {
    pub fn group(&self, id: &str) -> Option<&AnnotationGroup<S>> {
        self.groups.iter().find(|g| g.id == id)
    }

    /// Ranges governing `a`: its own, or exactly its group's.
    pub fn ranges_for<'a>(&'a self, a: &'a MetaAnnotation<S>) -> Result<&'a CrackParamRanges<S>, CrackError> {
        match &a.params {
            ParamSource::Own(r) => Ok(r),
            ParamSource::Group(g) => self
                .group(g)
                .map(|g| &g.ranges)
                .ok_or_else(|| CrackError::UnknownGroup {
                    annotation: a.id,
                    group: g.clone(),
                }),
        }
    }

    /// Damage level from which `a` is active. Ungrouped annotations are always active.
    pub fn enable_order_of(&self, a: &MetaAnnotation<S>) -> Result<u32, CrackError> {
        match &a.params {
            ParamSource::Own(_) => Ok(0),
            ParamSource::Group(g) => self
                .group(g)
                .map(|g| g.enable_order)
                .ok_or_else(|| CrackError::UnknownGroup {
                    annotation: a.id,
                    group: g.clone(),
                }),
        }
    }

    pub fn validate(&self, mesh: &TriangleMesh<S>) -> Result<(), CrackError> {
        let mut orders: Vec<u32> = self.groups.iter().map(|g| g.enable_order).collect();
        orders.sort_unstable();
        if let Some(w) = orders.windows(2).find(|w| w[0] == w[1]) {
            return Err(CrackError::DuplicateEnableOrder(w[0]));
        }
        for g in &self.groups {
            g.ranges.validate().map_err(|e| e.in_context(format!("group {:?}", g.id)))?;
        }
        for c in &self.components {
            if let Some(grid) = &c.brick_grid {
                grid.validate()?;
            }
        }
        let mut ids: Vec<u32> = Vec::with_capacity(self.annotations.len());
        for a in &self.annotations {
            if a.id == 0 {
                return Err(CrackError::InvalidAnnotation { id: a.id, reason: "id must be positive".into() });
            }
            ids.push(a.id);
            self.ranges_for(a)?
                .validate()
                .map_err(|e| e.in_context(format!("annotation {}", a.id)))?;
            let comp = self
                .components
                .get(a.component)
                .ok_or_else(|| CrackError::InvalidAnnotation {
                    id: a.id,
                    reason: format!("component index {} out of range", a.component),
                })?;
            for (which, p) in [("start", &a.start), ("end", &a.end)] {
                if !p.is_valid(mesh) || !comp.component.contains_face(p.face) {
                    return Err(CrackError::InvalidAnchor {
                        annotation: a.id,
                        reason: format!("{which} anchor is not on component {:?}", comp.component.name),
                    });
                }
            }
            if a.start.position(mesh).distance(a.end.position(mesh)) <= S::zero() {
                return Err(CrackError::InvalidAnnotation {
                    id: a.id,
                    reason: "endpoints coincide".into(),
                });
            }
        }
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CrackError::InvalidAnnotation {
                id: w[0],
                reason: "duplicate annotation id".into(),
            });
        }
        Ok(())
    }
}
