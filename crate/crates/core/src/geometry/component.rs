use std::borrow::Cow;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mesh::{Material, Texture, TriangleMesh};
use super::vector::{closest_point_on_triangle, Vec3};
use super::MeshError;
use crate::scalar::Real;

/// Axis-aligned box, half-open: contains `p` iff `min <= p < max` on every axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<S> {
    pub min: Vec3<S>,
    pub max: Vec3<S>,
}

impl<S: Real> Aabb<S> {
    pub fn new(min: Vec3<S>, max: Vec3<S>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec3<S>) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] < self.max[k])
    }
}

/// How faces are picked for a [`Component`].
#[derive(Clone, Debug, PartialEq)]
pub enum Selector<S> {
    Faces(Vec<u32>),
    /// Faces whose centroid lies in the box.
    Box(Aabb<S>),
}

/// Subset of a mesh's faces that can receive damage.
///
/// Holds face indices only; the parent mesh is passed to every operation and
/// must be the one the component was selected from.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub name: String,
    faces: Vec<u32>,
    pub material: Option<Material>,
}

impl Component {
    pub fn faces(&self) -> &[u32] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains_face(&self, face: u32) -> bool {
        self.faces.binary_search(&face).is_ok()
    }

    /// Effective material of a face in this component: the override if set,
    /// otherwise the mesh tag.
    pub fn material_of<S: Real>(&self, mesh: &TriangleMesh<S>, face: u32) -> Material {
        self.material.unwrap_or_else(|| mesh.face_material(face as usize))
    }
}

/// Selects a component by explicit face list or by face centroid in a box.
pub fn select_component<S: Real>(
    mesh: &TriangleMesh<S>,
    name: &str,
    selector: &Selector<S>,
) -> Result<Component, MeshError> {
    let mut faces: Vec<u32> = match selector {
        Selector::Faces(list) => {
            for &f in list {
                if f as usize >= mesh.face_count() {
                    return Err(MeshError::FaceOutOfRange {
                        face: f as usize,
                        face_count: mesh.face_count(),
                    });
                }
            }
            list.clone()
        }
        Selector::Box(b) => (0..mesh.face_count())
            .filter(|&f| b.contains(mesh.face_centroid(f)))
            .map(|f| f as u32)
            .collect(),
    };
    faces.sort_unstable();
    faces.dedup();
    if faces.is_empty() {
        return Err(MeshError::EmptySelection(name.to_string()));
    }
    Ok(Component {
        name: name.to_string(),
        faces,
        material: None,
    })
}

/// Points the component's faces at `texture` and retags them with `material`.
pub fn retexture_component<S: Real>(
    mesh: &mut TriangleMesh<S>,
    component: &mut Component,
    texture: Texture,
    material: Material,
) -> Result<(), MeshError> {
    if let Some(&f) = component.faces.iter().find(|&&f| f as usize >= mesh.face_count()) {
        return Err(MeshError::FaceOutOfRange {
            face: f as usize,
            face_count: mesh.face_count(),
        });
    }
    let tex = mesh.add_texture(texture);
    for &f in &component.faces {
        let mut attr = mesh.face_attrs()[f as usize];
        attr.texture = tex;
        attr.material = material;
        mesh.set_face_attr(f as usize, attr);
    }
    component.material = None;
    Ok(())
}

/// [`retexture_component`] with the texture read from an image file.
pub fn retexture_component_from_file<S: Real>(
    mesh: &mut TriangleMesh<S>,
    component: &mut Component,
    texture_path: &Path,
    material: Material,
) -> Result<(), MeshError> {
    let texture = Texture::load(texture_path)?;
    retexture_component(mesh, component, texture, material)
}

/// A point on a mesh face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint<S> {
    pub face: u32,
    pub bary: [S; 3],
}

impl<S: Real> SurfacePoint<S> {
    pub fn position(&self, mesh: &TriangleMesh<S>) -> Vec3<S> {
        let [a, b, c] = mesh.face_vertices(self.face as usize);
        a * self.bary[0] + b * self.bary[1] + c * self.bary[2]
    }

    pub fn is_valid(&self, mesh: &TriangleMesh<S>) -> bool {
        let eps = S::lit(1e-6);
        (self.face as usize) < mesh.face_count()
            && self.bary.iter().all(|b| b.is_finite() && *b >= -eps)
            && ((self.bary[0] + self.bary[1] + self.bary[2]) - S::one()).abs() <= eps
    }
}

/// Nearest-point queries restricted to a component's faces.
pub struct SurfaceProjector<'a, S> {
    mesh: &'a TriangleMesh<S>,
    faces: Cow<'a, [u32]>,
}

impl<'a, S: Real> SurfaceProjector<'a, S> {
    pub fn new(mesh: &'a TriangleMesh<S>, component: &'a Component) -> Self {
        Self {
            mesh,
            faces: Cow::Borrowed(component.faces()),
        }
    }

    /// Restricts the candidates to component faces whose bounding box meets
    /// `[lo - margin, hi + margin]`. Falls back to all faces if none do.
    pub fn near(mesh: &'a TriangleMesh<S>, component: &'a Component, lo: Vec3<S>, hi: Vec3<S>, margin: S) -> Self {
        let m = Vec3::new(margin, margin, margin);
        let (lo, hi) = (lo - m, hi + m);
        let faces: Vec<u32> = component
            .faces()
            .iter()
            .copied()
            .filter(|&f| {
                let [a, b, c] = mesh.face_vertices(f as usize);
                let fmin = a.min_by_component(b).min_by_component(c);
                let fmax = a.max_by_component(b).max_by_component(c);
                fmin.x <= hi.x && fmin.y <= hi.y && fmin.z <= hi.z && fmax.x >= lo.x && fmax.y >= lo.y && fmax.z >= lo.z
            })
            .collect();
        if faces.is_empty() {
            return Self::new(mesh, component);
        }
        Self {
            mesh,
            faces: Cow::Owned(faces),
        }
    }

    /// Closest point on the component, its face, and the distance to `p`.
    pub fn project(&self, p: Vec3<S>) -> (Vec3<S>, SurfacePoint<S>, S) {
        let mut best = (Vec3::zero(), SurfacePoint { face: 0, bary: [S::zero(); 3] }, S::infinity());
        for &f in self.faces.iter() {
            let [a, b, c] = self.mesh.face_vertices(f as usize);
            let (q, bary) = closest_point_on_triangle(p, a, b, c);
            let d = (q - p).norm();
            if d < best.2 {
                best = (q, SurfacePoint { face: f, bary }, d);
            }
        }
        best
    }

    /// Geometric normal of a face, falling back to the vertex normal average.
    pub fn face_normal(&self, face: u32) -> Vec3<S> {
        self.mesh.face_normal(face as usize).unwrap_or_else(|| {
            let [a, b, c] = self.mesh.faces()[face as usize];
            let n = self.mesh.normals();
            (n[a as usize] + n[b as usize] + n[c as usize])
                .normalize_or(Vec3::new(S::zero(), S::zero(), S::one()))
        })
    }
}

/// Regular (stack-bond) brick layout on a planar component.
///
/// Mortar centerlines run along `v = j * pitch_v` and `u = i * pitch_u` for
/// `i in 0..=columns`, `j in 0..=rows`, where the pitch is brick size plus
/// mortar width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickGrid<S> {
    pub origin: Vec3<S>,
    pub u_axis: Vec3<S>,
    pub v_axis: Vec3<S>,
    pub brick_width: S,
    pub brick_height: S,
    pub mortar_width: S,
    pub columns: u32,
    pub rows: u32,
}

impl<S: Real> BrickGrid<S> {
    pub fn validate(&self) -> Result<(), MeshError> {
        let bad = |reason: &str| Err(MeshError::InvalidBrickGrid(reason.to_string()));
        if !(self.mortar_width > S::zero()) {
            return bad("mortar width must be positive");
        }
        if !(self.brick_width > self.mortar_width && self.brick_height > self.mortar_width) {
            return bad("brick width and height must exceed the mortar width");
        }
        if self.columns == 0 || self.rows == 0 {
            return bad("grid needs at least one row and one column");
        }
        let (u, v) = (self.u_axis, self.v_axis);
        let tol = S::lit(1e-6);
        if (u.norm() - S::one()).abs() > tol || (v.norm() - S::one()).abs() > tol {
            return bad("grid axes must be unit vectors");
        }
        if u.dot(v).abs() > tol {
            return bad("grid axes must be orthogonal");
        }
        if !self.origin.is_finite() {
            return bad("grid origin must be finite");
        }
        Ok(())
    }

    pub fn pitch_u(&self) -> S {
        self.brick_width + self.mortar_width
    }

    pub fn pitch_v(&self) -> S {
        self.brick_height + self.mortar_width
    }

    /// In-plane coordinates of `p`.
    pub fn to_local(&self, p: Vec3<S>) -> (S, S) {
        let d = p - self.origin;
        (d.dot(self.u_axis), d.dot(self.v_axis))
    }

    pub fn to_world(&self, u: S, v: S) -> Vec3<S> {
        self.origin + self.u_axis * u + self.v_axis * v
    }

    pub fn node(&self, i: u32, j: u32) -> Vec3<S> {
        self.to_world(
            self.pitch_u() * S::from_usize_lossy(i as usize),
            self.pitch_v() * S::from_usize_lossy(j as usize),
        )
    }

    pub fn extent(&self) -> (S, S) {
        (
            self.pitch_u() * S::from_usize_lossy(self.columns as usize),
            self.pitch_v() * S::from_usize_lossy(self.rows as usize),
        )
    }

    /// Distance from `p` (projected into the grid plane) to the nearest mortar centerline.
    pub fn distance_to_mortar(&self, p: Vec3<S>) -> S {
        let (u, v) = self.to_local(p);
        let du = |x: S, pitch: S| {
            let r = x / pitch;
            ((r - r.round()) * pitch).abs()
        };
        du(u, self.pitch_u()).min(du(v, self.pitch_v()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::io::parse_obj;

    fn cube() -> TriangleMesh<f64> {
        let src = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
                   f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\nf 1 2 6\nf 1 6 5\n\
                   f 2 3 7\nf 2 7 6\nf 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8\n";
        parse_obj(src).unwrap()
    }

    #[test]
    fn box_selection_total_and_empty() {
        let m = cube();
        let all = Aabb::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(2.0, 2.0, 2.0));
        assert_eq!(select_component(&m, "all", &Selector::Box(all)).unwrap().len(), 12);
        let none = Aabb::new(Vec3::new(5.0, 5.0, 5.0), Vec3::new(6.0, 6.0, 6.0));
        assert!(matches!(
            select_component(&m, "none", &Selector::Box(none)),
            Err(MeshError::EmptySelection(_))
        ));
    }

    #[test]
    fn half_space_selection_matches_brute_force() {
        let m = cube();
        let left = Aabb::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(0.5, 2.0, 2.0));
        let right = Aabb::new(Vec3::new(0.5, -1.0, -1.0), Vec3::new(2.0, 2.0, 2.0));
        let l = select_component(&m, "l", &Selector::Box(left)).unwrap();
        let r = select_component(&m, "r", &Selector::Box(right)).unwrap();
        let expected: Vec<u32> = (0..12u32)
            .filter(|&f| {
                let [a, b, c] = m.face_vertices(f as usize);
                (a.x + b.x + c.x) / 3.0 < 0.5
            })
            .collect();
        assert_eq!(l.faces(), expected.as_slice());
        // partition
        let mut union: Vec<u32> = l.faces().iter().chain(r.faces()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, (0..12).collect::<Vec<_>>());
        assert!(l.faces().iter().all(|f| !r.contains_face(*f)));
    }

    #[test]
    fn face_list_out_of_range() {
        let m = cube();
        assert!(select_component(&m, "x", &Selector::Faces(vec![12])).is_err());
        assert!(select_component(&m, "x", &Selector::Faces(vec![])).is_err());
    }

    #[test]
    fn retexture_updates_material_and_is_idempotent() {
        let mut m = cube();
        let mut c = select_component(&m, "c", &Selector::Faces(vec![0, 1])).unwrap();
        let tex = Texture::Solid([10, 20, 30]);
        retexture_component(&mut m, &mut c, tex.clone(), Material::Masonry).unwrap();
        assert_eq!(m.face_material(0), Material::Masonry);
        assert_eq!(m.face_material(2), Material::Generic);
        assert_eq!(m.face_texture(1), &tex);
        let snapshot = m.clone();
        retexture_component(&mut m, &mut c, tex, Material::Masonry).unwrap();
        assert_eq!(m, snapshot);
    }

    #[test]
    fn unreadable_texture() {
        let mut m = cube();
        let mut c = select_component(&m, "c", &Selector::Faces(vec![0])).unwrap();
        let err = retexture_component_from_file(&mut m, &mut c, Path::new("/nonexistent.png"), Material::Masonry);
        assert!(matches!(err, Err(MeshError::Texture { .. })));
    }

    #[test]
    fn projector_finds_nearest_face() {
        let m = cube();
        let c = select_component(&m, "bottom", &Selector::Faces(vec![0, 1])).unwrap();
        let proj = SurfaceProjector::new(&m, &c);
        let (q, sp, d) = proj.project(Vec3::new(0.3, 0.6, 0.2));
        assert!((q - Vec3::new(0.3, 0.6, 0.0)).norm() < 1e-12);
        assert!((d - 0.2).abs() < 1e-12);
        assert!(sp.is_valid(&m));
        assert!((sp.position(&m) - q).norm() < 1e-12);
    }

    #[test]
    fn brick_grid_validation_and_distance() {
        let g: BrickGrid<f64> = BrickGrid {
            origin: Vec3::zero(),
            u_axis: Vec3::new(1.0, 0.0, 0.0),
            v_axis: Vec3::new(0.0, 0.0, 1.0),
            brick_width: 0.25,
            brick_height: 0.065,
            mortar_width: 0.01,
            columns: 4,
            rows: 10,
        };
        g.validate().unwrap();
        assert!((g.distance_to_mortar(Vec3::new(0.26, 0.0, 0.03)) - 0.0).abs() < 1e-12);
        assert!((g.distance_to_mortar(Vec3::new(0.1, 0.0, 0.03)) - 0.03).abs() < 1e-12);
        let bad = BrickGrid { mortar_width: 0.3, ..g };
        assert!(bad.validate().is_err());
    }
}
