use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::crack::{
    AnnotationGroup, CrackParamRanges, DamageScene, MetaAnnotation, ParamRange, ParamSource, SceneComponent,
    SpallingConfig,
};
use crate::geometry::{
    load_mesh, retexture_component, select_component, Aabb, BrickGrid, Material, Selector, SurfaceProjector,
    Texture, TriangleMesh, Vec3,
};
use crate::label::DEFAULT_MERGE_DISTANCE;
use crate::render::{CameraPath, Keyframe, LightingEnvironment, Resolution};

/// Default limit on how far a configured anchor may sit from its component.
pub const DEFAULT_ANCHOR_MAX_DISTANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub seed: u64,
    /// Relative paths resolve against the scene file's directory.
    pub output_dir: PathBuf,
    pub mesh: PathBuf,
    /// Damage levels to render; defaults to every level up to the highest enable order.
    #[serde(default)]
    pub levels: Option<Vec<u32>>,
    #[serde(default = "default_merge_distance")]
    pub merge_distance: u32,
    #[serde(default)]
    pub overlays: bool,
    #[serde(default = "default_anchor_distance")]
    pub anchor_max_distance: f64,
    #[serde(default)]
    pub spalling: Option<SpallingSpec>,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub groups: Vec<GroupSpec>,
    pub annotations: Vec<AnnotationSpec>,
    pub flights: Vec<FlightSpec>,
    /// Directory of the scene file, set by [`parse_scene`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_merge_distance() -> u32 {
    DEFAULT_MERGE_DISTANCE
}

fn default_anchor_distance() -> f64 {
    DEFAULT_ANCHOR_MAX_DISTANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpallingSpec {
    pub site_spacing: f64,
    pub radius_factor: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub name: String,
    /// Exactly one of `faces`, `box` and `region` selects the faces.
    #[serde(default)]
    pub faces: Option<Vec<u32>>,
    #[serde(default, rename = "box")]
    pub bounds: Option<BoxSpec>,
    /// Group or object name from the mesh file.
    #[serde(default)]
    pub region: Option<String>,
    #[serde(default)]
    pub material: Option<String>,
    /// Image file replacing the component's texture.
    #[serde(default)]
    pub texture: Option<PathBuf>,
    /// Solid colour replacing the component's texture.
    #[serde(default)]
    pub color: Option<[u8; 3]>,
    #[serde(default)]
    pub brick_grid: Option<BrickGridSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickGridSpec {
    pub origin: [f64; 3],
    pub u_axis: [f64; 3],
    pub v_axis: [f64; 3],
    pub brick_width: f64,
    pub brick_height: f64,
    pub mortar_width: f64,
    pub columns: u32,
    pub rows: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub length_fraction: [f64; 2],
    pub roughness_low: [f64; 2],
    pub roughness_high: [f64; 2],
    pub thickness: [f64; 2],
    pub depth: [f64; 2],
    pub appearance_probability: f64,
    pub spalling_probability: f64,
}

impl ParamsSpec {
    pub fn to_ranges(&self) -> CrackParamRanges<f64> {
        let r = |v: [f64; 2]| ParamRange::new(v[0], v[1]);
        CrackParamRanges {
            length_fraction: r(self.length_fraction),
            roughness_low: r(self.roughness_low),
            roughness_high: r(self.roughness_high),
            thickness: r(self.thickness),
            depth: r(self.depth),
            appearance_probability: self.appearance_probability,
            spalling_probability: self.spalling_probability,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub id: String,
    pub enable_order: u32,
    pub params: ParamsSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationSpec {
    pub id: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub component: String,
    pub start: [f64; 3],
    pub end: [f64; 3],
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightingSpec {
    pub latitude: f64,
    pub longitude: f64,
    pub time: DateTime<Utc>,
    #[serde(default = "default_ambient")]
    pub ambient: f64,
    #[serde(default)]
    pub overcast: f64,
}

fn default_ambient() -> f64 {
    0.35
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyframeSpec {
    pub time: f64,
    pub position: [f64; 3],
    pub target: [f64; 3],
    pub fov: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightSpec {
    pub name: String,
    pub fps: f64,
    pub frames: usize,
    pub resolution: [u32; 2],
    pub lighting: LightingSpec,
    pub keyframes: Vec<KeyframeSpec>,
}

impl FlightSpec {
    pub fn camera_path(&self) -> Result<CameraPath<f64>, crate::render::RenderError> {
        let keys = self
            .keyframes
            .iter()
            .map(|k| Keyframe {
                position: Vec3::from_f64(k.position),
                target: Vec3::from_f64(k.target),
                fov_deg: k.fov,
                time: k.time,
            })
            .collect();
        CameraPath::new(keys, self.fps, self.frames)
    }

    pub fn lighting(&self) -> LightingEnvironment {
        LightingEnvironment {
            latitude: self.lighting.latitude,
            longitude: self.lighting.longitude,
            time: self.lighting.time,
            ambient: self.lighting.ambient,
            overcast: self.lighting.overcast,
        }
    }

    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.resolution[0], self.resolution[1])
    }
}

/// One flight ready to render.
#[derive(Clone, Debug)]
pub struct Flight {
    pub name: String,
    pub path: CameraPath<f64>,
    pub lighting: LightingEnvironment,
    pub resolution: Resolution,
}

/// Loaded mesh and everything derived from the configuration.
#[derive(Clone, Debug)]
pub struct Scene {
    pub mesh: TriangleMesh<f64>,
    pub damage: DamageScene<f64>,
    pub flights: Vec<Flight>,
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> PipelineError {
    PipelineError::Config {
        key: key.into(),
        message: message.into(),
    }
}

/// Reads and validates a scene file.
pub fn parse_scene(path: &Path) -> Result<SceneConfig, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scene_str(&text, &base)
}

/// Parses a scene document whose relative paths resolve against `base_dir`.
pub fn parse_scene_str(text: &str, base_dir: &Path) -> Result<SceneConfig, PipelineError> {
    let mut cfg: SceneConfig = toml::from_str(text).map_err(|e| PipelineError::Toml(e.to_string()))?;
    cfg.base_dir = base_dir.to_path_buf();
    cfg.validate()?;
    Ok(cfg)
}

impl SceneConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn mesh_path(&self) -> PathBuf {
        self.resolve(&self.mesh)
    }

    pub fn spalling_config(&self) -> SpallingConfig<f64> {
        match &self.spalling {
            Some(s) => SpallingConfig {
                site_spacing: s.site_spacing,
                radius_factor_min: s.radius_factor[0],
                radius_factor_max: s.radius_factor[1],
            },
            None => SpallingConfig::default(),
        }
    }

    /// Checks every invariant that does not need the mesh loaded.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !self.mesh_path().is_file() {
            return Err(invalid("mesh", format!("file {} does not exist", self.mesh_path().display())));
        }
        if !(self.anchor_max_distance > 0.0) {
            return Err(invalid("anchor_max_distance", "must be positive"));
        }
        if let Some(s) = &self.spalling {
            if !(s.site_spacing > 0.0) {
                return Err(invalid("spalling.site_spacing", "must be positive"));
            }
            if !(s.radius_factor[0] > 0.0 && s.radius_factor[0] <= s.radius_factor[1]) {
                return Err(invalid("spalling.radius_factor", "need 0 < min <= max"));
            }
        }
        if self.components.is_empty() {
            return Err(invalid("components", "at least one component is required"));
        }
        let mut names = BTreeSet::new();
        for (i, c) in self.components.iter().enumerate() {
            let key = format!("components[{i}] ({})", c.name);
            if !names.insert(c.name.as_str()) {
                return Err(invalid(key, "duplicate component name"));
            }
            let selectors = [c.faces.is_some(), c.bounds.is_some(), c.region.is_some()];
            if selectors.iter().filter(|s| **s).count() != 1 {
                return Err(invalid(key, "exactly one of faces, box or region is required"));
            }
            if let Some(m) = &c.material {
                if Material::parse(m).is_none() {
                    return Err(invalid(format!("{key}.material"), format!("unknown material {m:?}")));
                }
            }
            if c.texture.is_some() && c.color.is_some() {
                return Err(invalid(key, "texture and color are mutually exclusive"));
            }
            if let Some(t) = &c.texture {
                if !self.resolve(t).is_file() {
                    return Err(invalid(format!("{key}.texture"), format!("file {} does not exist", t.display())));
                }
            }
            if let Some(g) = &c.brick_grid {
                brick_grid(g).validate().map_err(|e| invalid(format!("{key}.brick_grid"), e.to_string()))?;
            }
        }
        let mut group_ids = BTreeSet::new();
        let mut orders = BTreeMap::new();
        for (i, g) in self.groups.iter().enumerate() {
            let key = format!("groups[{i}] ({})", g.id);
            if !group_ids.insert(g.id.as_str()) {
                return Err(invalid(key, "duplicate group id"));
            }
            if let Some(other) = orders.insert(g.enable_order, g.id.as_str()) {
                return Err(invalid(
                    format!("{key}.enable_order"),
                    format!("enable order {} already used by group {other:?}", g.enable_order),
                ));
            }
            g.params
                .to_ranges()
                .validate()
                .map_err(|e| invalid(format!("{key}.params"), e.to_string()))?;
        }
        if self.annotations.is_empty() {
            return Err(invalid("annotations", "at least one annotation is required"));
        }
        let mut ids = BTreeSet::new();
        for (i, a) in self.annotations.iter().enumerate() {
            let key = format!("annotations[{i}] (id {})", a.id);
            if a.id == 0 || a.id > u16::MAX as u32 {
                return Err(invalid(format!("{key}.id"), "must be in 1..=65535"));
            }
            if !ids.insert(a.id) {
                return Err(invalid(format!("{key}.id"), "duplicate annotation id"));
            }
            if !names.contains(a.component.as_str()) {
                return Err(invalid(format!("{key}.component"), format!("unknown component {:?}", a.component)));
            }
            if a.start == a.end {
                return Err(invalid(key, "start and end coincide"));
            }
            match (&a.group, &a.params) {
                (Some(g), None) => {
                    if !group_ids.contains(g.as_str()) {
                        return Err(invalid(format!("{key}.group"), format!("undefined group {g:?}")));
                    }
                }
                (None, Some(p)) => p
                    .to_ranges()
                    .validate()
                    .map_err(|e| invalid(format!("{key}.params"), e.to_string()))?,
                _ => return Err(invalid(key, "exactly one of group or params is required")),
            }
        }
        if self.flights.is_empty() {
            return Err(invalid("flights", "at least one flight is required"));
        }
        let mut flight_names = BTreeSet::new();
        for (i, f) in self.flights.iter().enumerate() {
            let key = format!("flights[{i}] ({})", f.name);
            let safe = !f.name.is_empty() && f.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_".contains(c));
            if !safe {
                return Err(invalid(format!("{key}.name"), "use letters, digits, '-' or '_'"));
            }
            if !flight_names.insert(f.name.as_str()) {
                return Err(invalid(key, "duplicate flight name"));
            }
            if f.frames == 0 {
                return Err(invalid(format!("{key}.frames"), "must be at least 1"));
            }
            if f.resolution[0] == 0 || f.resolution[1] == 0 {
                return Err(invalid(format!("{key}.resolution"), "must be non-zero"));
            }
            f.camera_path().map_err(|e| invalid(format!("{key}.keyframes"), e.to_string()))?;
            f.lighting().validate().map_err(|e| invalid(format!("{key}.lighting"), e.to_string()))?;
        }
        Ok(())
    }

    /// Loads the mesh, applies component textures and projects anchors.
    pub fn build(&self) -> Result<Scene, PipelineError> {
        let mut mesh: TriangleMesh<f64> = load_mesh(&self.mesh_path())?;
        let mut components = Vec::with_capacity(self.components.len());
        for (i, c) in self.components.iter().enumerate() {
            let key = format!("components[{i}] ({})", c.name);
            let selector = if let Some(f) = &c.faces {
                Selector::Faces(f.clone())
            } else if let Some(b) = &c.bounds {
                Selector::Box(Aabb::new(Vec3::from_f64(b.min), Vec3::from_f64(b.max)))
            } else {
                let region = c.region.as_deref().unwrap_or_default();
                Selector::Faces(
                    (0..mesh.face_count())
                        .filter(|&f| mesh.face_region(f) == Some(region))
                        .map(|f| f as u32)
                        .collect(),
                )
            };
            let mut comp = select_component(&mesh, &c.name, &selector).map_err(|e| invalid(key.clone(), e.to_string()))?;
            let texture = match (&c.texture, c.color) {
                (Some(t), _) => Some(Texture::load(&self.resolve(t))?),
                (None, Some(rgb)) => Some(Texture::Solid(rgb)),
                (None, None) => None,
            };
            let material = c.material.as_deref().and_then(Material::parse);
            match (texture, material) {
                (Some(t), m) => {
                    let m = m.unwrap_or(Material::Generic);
                    retexture_component(&mut mesh, &mut comp, t, m)?;
                }
                (None, Some(m)) => {
                    for &f in comp.faces() {
                        let mut attr = mesh.face_attrs()[f as usize];
                        attr.material = m;
                        mesh.set_face_attr(f as usize, attr);
                    }
                    comp.material = Some(m);
                }
                (None, None) => {}
            }
            components.push(SceneComponent {
                component: comp,
                brick_grid: c.brick_grid.as_ref().map(brick_grid),
            });
        }

        let index: BTreeMap<&str, usize> = self.components.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
        let mut annotations = Vec::with_capacity(self.annotations.len());
        for (i, a) in self.annotations.iter().enumerate() {
            let key = format!("annotations[{i}] (id {})", a.id);
            let ci = index[a.component.as_str()];
            let projector = SurfaceProjector::new(&mesh, &components[ci].component);
            let anchor = |which: &str, p: [f64; 3]| {
                let (_, sp, dist) = projector.project(Vec3::from_f64(p));
                if dist > self.anchor_max_distance {
                    return Err(invalid(
                        format!("{key}.{which}"),
                        format!("point is {dist:.4} m from component {:?} (limit {})", a.component, self.anchor_max_distance),
                    ));
                }
                Ok(sp)
            };
            let start = anchor("start", a.start)?;
            let end = anchor("end", a.end)?;
            let params = match (&a.group, &a.params) {
                (Some(g), _) => ParamSource::Group(g.clone()),
                (None, Some(p)) => ParamSource::Own(p.to_ranges()),
                (None, None) => unreachable!("validated"),
            };
            annotations.push(MetaAnnotation {
                id: a.id,
                name: a.name.clone().unwrap_or_else(|| format!("annotation-{}", a.id)),
                component: ci,
                start,
                end,
                params,
            });
        }
        let groups = self
            .groups
            .iter()
            .map(|g| AnnotationGroup {
                id: g.id.clone(),
                ranges: g.params.to_ranges(),
                enable_order: g.enable_order,
            })
            .collect();
        let damage = DamageScene {
            components,
            annotations,
            groups,
            spalling: self.spalling_config(),
        };
        damage.validate(&mesh)?;
        let flights = self
            .flights
            .iter()
            .map(|f| {
                Ok(Flight {
                    name: f.name.clone(),
                    path: f.camera_path()?,
                    lighting: f.lighting(),
                    resolution: f.resolution(),
                })
            })
            .collect::<Result<_, crate::render::RenderError>>()?;
        Ok(Scene { mesh, damage, flights })
    }

    /// Levels to render: the configured list, else `0..=max enable order`.
    pub fn render_levels(&self) -> Vec<u32> {
        let mut levels = match &self.levels {
            Some(l) => l.clone(),
            None => {
                let max = self.groups.iter().map(|g| g.enable_order).max().unwrap_or(0);
                (0..=max).collect()
            }
        };
        levels.sort_unstable();
        levels.dedup();
        levels
    }
}

fn brick_grid(g: &BrickGridSpec) -> BrickGrid<f64> {
    BrickGrid {
        origin: Vec3::from_f64(g.origin),
        u_axis: Vec3::from_f64(g.u_axis),
        v_axis: Vec3::from_f64(g.v_axis),
        brick_width: g.brick_width,
        brick_height: g.brick_height,
        mortar_width: g.mortar_width,
        columns: g.columns,
        rows: g.rows,
    }
}
