use std::path::Path;
use std::sync::Arc;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::vector::{triangle_area, Vec2, Vec3};
use super::MeshError;
use crate::scalar::Real;

/// Surface material of a face. Drives crack pathing and the inner-layer
/// texture exposed by spalling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Material {
    Plaster,
    Masonry,
    Concrete,
    #[default]
    Generic,
}

impl Material {
    pub fn as_str(self) -> &'static str {
        match self {
            Material::Plaster => "plaster",
            Material::Masonry => "masonry",
            Material::Concrete => "concrete",
            Material::Generic => "generic",
        }
    }

    /// Parses a material name; unknown names map to `None`.
    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "plaster" => Some(Material::Plaster),
            "masonry" => Some(Material::Masonry),
            "concrete" => Some(Material::Concrete),
            "generic" => Some(Material::Generic),
            _ => None,
        }
    }

    /// Flat colour of the layer exposed under the surface when it spalls.
    pub fn inner_layer_color(self) -> [u8; 3] {
        match self {
            // plaster comes off to reveal brickwork
            Material::Plaster => [150, 82, 60],
            Material::Masonry => [122, 62, 46],
            Material::Concrete => [112, 110, 104],
            Material::Generic => [96, 92, 88],
        }
    }
}

/// Colour source sampled by the rasterizer.
#[derive(Clone, Debug, PartialEq)]
pub enum Texture {
    Solid([u8; 3]),
    Image(Arc<RgbImage>),
}

impl Default for Texture {
    fn default() -> Self {
        Texture::Solid([178, 174, 166])
    }
}

impl Texture {
    /// Loads an 8-bit RGB texture from a PNG (or any format the `image` crate reads).
    pub fn load(path: &Path) -> Result<Self, MeshError> {
        let img = image::open(path).map_err(|source| MeshError::Texture {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Texture::Image(Arc::new(img.to_rgb8())))
    }

    /// Nearest-texel lookup with wrap-around addressing. `v = 0` is the bottom row.
    pub fn sample<S: Real>(&self, uv: Vec2<S>) -> [u8; 3] {
        match self {
            Texture::Solid(c) => *c,
            Texture::Image(img) => {
                let (w, h) = img.dimensions();
                let u = uv.x - uv.x.floor();
                let v = uv.y - uv.y.floor();
                let x = (u * S::from_usize_lossy(w as usize))
                    .floor()
                    .to_usize()
                    .unwrap_or(0)
                    .min(w as usize - 1);
                let y = ((S::one() - v) * S::from_usize_lossy(h as usize))
                    .floor()
                    .to_usize()
                    .unwrap_or(0)
                    .min(h as usize - 1);
                img.get_pixel(x as u32, y as u32).0
            }
        }
    }
}

/// Per-face attributes carried alongside the connectivity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FaceAttr {
    /// Index into [`TriangleMesh::textures`].
    pub texture: u32,
    pub material: Material,
    /// Region label index + 1; 0 means unlabelled.
    pub region: u32,
    /// Crack id carved into this face; 0 means intact surface.
    pub crack: u32,
}

/// Counts of faces removed by [`TriangleMesh::repair`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RepairReport {
    pub degenerate: usize,
    pub duplicate: usize,
}

/// Indexed, textured triangle mesh.
///
/// Every face index is in range, every coordinate is finite and every normal
/// is unit length. Those hold for every value reachable through the public API.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh<S> {
    positions: Vec<Vec3<S>>,
    normals: Vec<Vec3<S>>,
    uvs: Vec<Vec2<S>>,
    faces: Vec<[u32; 3]>,
    attrs: Vec<FaceAttr>,
    textures: Vec<Texture>,
    regions: Vec<String>,
}

pub(crate) const NORMAL_TOLERANCE: f64 = 1e-6;

impl<S: Real> TriangleMesh<S> {
    /// Builds a mesh from positions and triangles, computing area-weighted
    /// normals and planar-projected texture coordinates.
    pub fn new(positions: Vec<Vec3<S>>, faces: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        Self::from_parts(positions, None, None, faces)
    }

    /// Builds a mesh, filling in whichever of normals / texture coordinates are absent.
    pub fn from_parts(
        positions: Vec<Vec3<S>>,
        normals: Option<Vec<Vec3<S>>>,
        uvs: Option<Vec<Vec2<S>>>,
        faces: Vec<[u32; 3]>,
    ) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::NoFaces);
        }
        check_faces(&faces, positions.len())?;
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFiniteVertex { vertex: i });
        }
        let normals = match normals {
            Some(n) => {
                if n.len() != positions.len() {
                    return Err(MeshError::AttributeCount {
                        attribute: "normals",
                        expected: positions.len(),
                        found: n.len(),
                    });
                }
                // accept slightly denormalised input, reject garbage
                let mut out = Vec::with_capacity(n.len());
                for (i, v) in n.into_iter().enumerate() {
                    match v.try_normalize() {
                        Some(u) if v.is_finite() => out.push(u),
                        _ => return Err(MeshError::InvalidNormal { vertex: i }),
                    }
                }
                out
            }
            None => area_weighted_normals(&positions, &faces),
        };
        let uvs = match uvs {
            Some(t) => {
                if t.len() != positions.len() {
                    return Err(MeshError::AttributeCount {
                        attribute: "texture coordinates",
                        expected: positions.len(),
                        found: t.len(),
                    });
                }
                if let Some(i) = t.iter().position(|t| !t.is_finite()) {
                    return Err(MeshError::NonFiniteVertex { vertex: i });
                }
                t
            }
            None => planar_uvs(&positions, &faces),
        };
        let attrs = vec![FaceAttr::default(); faces.len()];
        Ok(Self {
            positions,
            normals,
            uvs,
            faces,
            attrs,
            textures: vec![Texture::default()],
            regions: Vec::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn positions(&self) -> &[Vec3<S>] {
        &self.positions
    }

    pub fn normals(&self) -> &[Vec3<S>] {
        &self.normals
    }

    pub fn uvs(&self) -> &[Vec2<S>] {
        &self.uvs
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn face_attrs(&self) -> &[FaceAttr] {
        &self.attrs
    }

    pub fn textures(&self) -> &[Texture] {
        &self.textures
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn face_material(&self, face: usize) -> Material {
        self.attrs[face].material
    }

    pub fn face_crack(&self, face: usize) -> u32 {
        self.attrs[face].crack
    }

    pub fn face_texture(&self, face: usize) -> &Texture {
        &self.textures[self.attrs[face].texture as usize]
    }

    /// Region label of a face, if any.
    pub fn face_region(&self, face: usize) -> Option<&str> {
        match self.attrs[face].region {
            0 => None,
            r => self.regions.get(r as usize - 1).map(String::as_str),
        }
    }

    pub fn face_vertices(&self, face: usize) -> [Vec3<S>; 3] {
        let [a, b, c] = self.faces[face];
        [
            self.positions[a as usize],
            self.positions[b as usize],
            self.positions[c as usize],
        ]
    }

    pub fn face_centroid(&self, face: usize) -> Vec3<S> {
        let [a, b, c] = self.face_vertices(face);
        (a + b + c) / S::lit(3.0)
    }

    pub fn face_area(&self, face: usize) -> S {
        let [a, b, c] = self.face_vertices(face);
        triangle_area(a, b, c)
    }

    /// Geometric normal following the winding order; `None` for degenerate faces.
    pub fn face_normal(&self, face: usize) -> Option<Vec3<S>> {
        let [a, b, c] = self.face_vertices(face);
        (b - a).cross(c - a).try_normalize()
    }

    /// Axis-aligned bounds `(min, max)` of all vertices.
    pub fn bounds(&self) -> (Vec3<S>, Vec3<S>) {
        let mut lo = Vec3::new(S::infinity(), S::infinity(), S::infinity());
        let mut hi = -lo;
        for &p in &self.positions {
            lo = lo.min_by_component(p);
            hi = hi.max_by_component(p);
        }
        (lo, hi)
    }

    /// Sets every face to the given material.
    pub fn set_material(&mut self, material: Material) {
        for a in &mut self.attrs {
            a.material = material;
        }
    }

    /// Replaces the base texture used by all faces that still reference it.
    pub fn set_base_texture(&mut self, texture: Texture) {
        self.textures[0] = texture;
    }

    /// Registers a texture (reusing an identical one) and returns its index.
    pub fn add_texture(&mut self, texture: Texture) -> u32 {
        if let Some(i) = self.textures.iter().position(|t| *t == texture) {
            return i as u32;
        }
        self.textures.push(texture);
        (self.textures.len() - 1) as u32
    }

    pub(crate) fn set_face_attr(&mut self, face: usize, attr: FaceAttr) {
        self.attrs[face] = attr;
    }

    /// Assigns region labels by name; `labels` has one entry per face.
    pub fn set_regions(&mut self, labels: &[Option<String>]) -> Result<(), MeshError> {
        if labels.len() != self.faces.len() {
            return Err(MeshError::AttributeCount {
                attribute: "region labels",
                expected: self.faces.len(),
                found: labels.len(),
            });
        }
        self.regions.clear();
        for (attr, label) in self.attrs.iter_mut().zip(labels) {
            attr.region = match label {
                None => 0,
                Some(name) => {
                    let idx = match self.regions.iter().position(|r| r == name) {
                        Some(i) => i,
                        None => {
                            self.regions.push(name.clone());
                            self.regions.len() - 1
                        }
                    };
                    idx as u32 + 1
                }
            };
        }
        Ok(())
    }

    /// Appends a vertex and returns its index. The normal is normalised.
    pub(crate) fn push_vertex(&mut self, p: Vec3<S>, n: Vec3<S>, uv: Vec2<S>) -> u32 {
        debug_assert!(p.is_finite());
        self.positions.push(p);
        self.normals
            .push(n.normalize_or(Vec3::new(S::zero(), S::zero(), S::one())));
        self.uvs.push(uv);
        (self.positions.len() - 1) as u32
    }

    pub(crate) fn push_face(&mut self, face: [u32; 3], attr: FaceAttr) {
        debug_assert!(face.iter().all(|&i| (i as usize) < self.positions.len()));
        self.faces.push(face);
        self.attrs.push(attr);
    }

    /// Keeps faces for which `keep` is true. Vertices are left in place.
    pub(crate) fn retain_faces(&mut self, keep: &[bool]) {
        let mut i = 0;
        self.faces.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        let mut i = 0;
        self.attrs.retain(|_| {
            i += 1;
            keep[i - 1]
        });
    }

    /// Drops zero-area faces and repeated faces (same vertex set, any order).
    /// Refuses to remove the last face.
    pub fn repair(&mut self) -> Result<RepairReport, MeshError> {
        let mut report = RepairReport::default();
        let mut keep = vec![true; self.faces.len()];
        let mut seen = std::collections::HashSet::new();
        for (i, f) in self.faces.iter().enumerate() {
            let [a, b, c] = *f;
            if a == b || b == c || a == c || self.face_area(i) <= S::zero() {
                keep[i] = false;
                report.degenerate += 1;
                continue;
            }
            let mut key = *f;
            key.sort_unstable();
            if !seen.insert(key) {
                keep[i] = false;
                report.duplicate += 1;
            }
        }
        if !keep.iter().any(|&k| k) {
            return Err(MeshError::NoFaces);
        }
        self.retain_faces(&keep);
        Ok(report)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.faces.is_empty() {
            return Err(MeshError::NoFaces);
        }
        check_faces(&self.faces, self.positions.len())?;
        if let Some(i) = self.positions.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFiniteVertex { vertex: i });
        }
        let tol = S::lit(NORMAL_TOLERANCE);
        if let Some(i) = self
            .normals
            .iter()
            .position(|n| !((n.norm() - S::one()).abs() <= tol))
        {
            return Err(MeshError::InvalidNormal { vertex: i });
        }
        Ok(())
    }

    /// Converts the scalar type, e.g. to render an `f64` scene in `f32`.
    pub fn cast<T: Real>(&self) -> TriangleMesh<T> {
        let c3 = |v: &Vec3<S>| Vec3::from_f64(v.to_f64());
        TriangleMesh {
            positions: self.positions.iter().map(c3).collect(),
            normals: self
                .normals
                .iter()
                .map(|n| c3(n).normalize_or(Vec3::new(T::zero(), T::zero(), T::one())))
                .collect(),
            uvs: self
                .uvs
                .iter()
                .map(|t| Vec2::new(T::lit(t.x.to_f64_lossy()), T::lit(t.y.to_f64_lossy())))
                .collect(),
            faces: self.faces.clone(),
            attrs: self.attrs.clone(),
            textures: self.textures.clone(),
            regions: self.regions.clone(),
        }
    }
}

fn check_faces(faces: &[[u32; 3]], vertex_count: usize) -> Result<(), MeshError> {
    for (fi, f) in faces.iter().enumerate() {
        for &i in f {
            if i as usize >= vertex_count {
                return Err(MeshError::FaceIndexOutOfRange {
                    face: fi,
                    index: i as usize,
                    vertex_count,
                });
            }
        }
    }
    Ok(())
}

/// Vertex normals as the normalised sum of adjacent face cross products
/// (each weighted by twice the face area). Isolated vertices get +Z.
pub fn area_weighted_normals<S: Real>(positions: &[Vec3<S>], faces: &[[u32; 3]]) -> Vec<Vec3<S>> {
    let mut acc = vec![Vec3::zero(); positions.len()];
    for f in faces {
        let [a, b, c] = f.map(|i| positions[i as usize]);
        let n = (b - a).cross(c - a);
        for &i in f {
            acc[i as usize] += n;
        }
    }
    let up = Vec3::new(S::zero(), S::zero(), S::one());
    acc.into_iter().map(|n| n.normalize_or(up)).collect()
}

/// Projects vertices onto the plane best aligned with the mesh (area-weighted
/// mean normal) and rescales into `[0, 1]`.
pub fn planar_uvs<S: Real>(positions: &[Vec3<S>], faces: &[[u32; 3]]) -> Vec<Vec2<S>> {
    let mut mean = Vec3::zero();
    for f in faces {
        let [a, b, c] = f.map(|i| positions[i as usize]);
        let n = (b - a).cross(c - a);
        // orientation-insensitive accumulation
        mean += Vec3::new(n.x.abs(), n.y.abs(), n.z.abs());
    }
    let (u_axis, v_axis) = if mean.z >= mean.x && mean.z >= mean.y {
        (0, 1)
    } else if mean.y >= mean.x {
        (0, 2)
    } else {
        (1, 2)
    };
    let mut lo = [S::infinity(); 2];
    let mut hi = [S::neg_infinity(); 2];
    for p in positions {
        for (k, axis) in [u_axis, v_axis].into_iter().enumerate() {
            lo[k] = lo[k].min(p[axis]);
            hi[k] = hi[k].max(p[axis]);
        }
    }
    let span = |k: usize| {
        let s = hi[k] - lo[k];
        if s > S::zero() {
            s
        } else {
            S::one()
        }
    };
    let (su, sv) = (span(0), span(1));
    positions
        .iter()
        .map(|p| Vec2::new((p[u_axis] - lo[0]) / su, (p[v_axis] - lo[1]) / sv))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> TriangleMesh<f64> {
        TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn computed_normals_are_unit_and_follow_winding() {
        let m = quad();
        for n in m.normals() {
            assert!((n.norm() - 1.0).abs() < 1e-12);
            assert!((n.z - 1.0).abs() < 1e-12);
        }
        let flipped = TriangleMesh::new(m.positions().to_vec(), vec![[0, 2, 1], [0, 3, 2]]).unwrap();
        for (a, b) in m.normals().iter().zip(flipped.normals()) {
            assert!((*a + *b).norm() < 1e-12);
        }
    }

    #[test]
    fn planar_uvs_span_unit_square() {
        let m = quad();
        assert_eq!(m.uvs()[0], Vec2::new(0.0, 0.0));
        assert_eq!(m.uvs()[2], Vec2::new(1.0, 1.0));
    }

    #[test]
    fn rejects_out_of_range_and_empty() {
        let pts = vec![Vec3::new(0.0, 0.0, 0.0); 3];
        assert!(matches!(
            TriangleMesh::new(pts.clone(), vec![[0, 1, 5]]),
            Err(MeshError::FaceIndexOutOfRange { index: 5, .. })
        ));
        assert!(matches!(TriangleMesh::<f64>::new(pts, vec![]), Err(MeshError::NoFaces)));
    }

    #[test]
    fn rejects_nan_vertex() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(f64::NAN, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        assert!(matches!(
            TriangleMesh::new(pts, vec![[0, 1, 2]]),
            Err(MeshError::NonFiniteVertex { vertex: 1 })
        ));
    }

    #[test]
    fn repair_drops_degenerate_and_duplicates() {
        let mut m = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(2.0, 0.0, 0.0),
            ],
            vec![[0, 1, 2], [2, 0, 1], [0, 1, 3], [1, 1, 2]],
        )
        .unwrap();
        let r = m.repair().unwrap();
        assert_eq!(r, RepairReport { degenerate: 2, duplicate: 1 });
        assert_eq!(m.face_count(), 1);
        m.validate().unwrap();
    }

    #[test]
    fn solid_and_image_sampling() {
        let mut img = RgbImage::new(2, 2);
        img.put_pixel(0, 1, image::Rgb([1, 2, 3]));
        img.put_pixel(1, 0, image::Rgb([9, 9, 9]));
        let t = Texture::Image(Arc::new(img));
        // v = 0 is the bottom row
        assert_eq!(t.sample(Vec2::new(0.1, 0.1)), [1, 2, 3]);
        assert_eq!(t.sample(Vec2::new(0.9, 0.9)), [9, 9, 9]);
        assert_eq!(t.sample(Vec2::new(1.1, 1.1)), [1, 2, 3]);
        assert_eq!(Texture::Solid([4, 5, 6]).sample(Vec2::new(0.3f32, 0.3)), [4, 5, 6]);
    }

    #[test]
    fn cast_round_trips_through_f32() {
        let m = quad();
        let m32: TriangleMesh<f32> = m.cast();
        m32.validate().unwrap();
        assert_eq!(m32.faces(), m.faces());
    }
}
