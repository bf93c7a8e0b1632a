use chrono::{DateTime, Utc};
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::camera::CameraPose;
use super::solar::{sun_direction, SolarPosition};
use super::RenderError;
use crate::geometry::{TriangleMesh, Vec2, Vec3};
use crate::label::IdBuffer;
use crate::scalar::{clamp, Real};

/// Colour of pixels that see no geometry.
pub const BACKGROUND: [u8; 3] = [150, 180, 210];
/// Irradiance from a fully overcast sky, relative to direct sun.
pub const SKY_DIFFUSE: f64 = 0.7;
/// Camera-space near clipping distance in metres.
pub const NEAR_PLANE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub width: u32,
    pub height: u32,
}

impl Resolution {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }
}

/// Sun and sky for a flight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightingEnvironment {
    pub latitude: f64,
    pub longitude: f64,
    pub time: DateTime<Utc>,
    /// Constant light added everywhere, in `[0, 1]`.
    pub ambient: f64,
    /// 0 for a clear sun, 1 for fully diffuse light.
    pub overcast: f64,
}

impl LightingEnvironment {
    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: String| Err(RenderError::InvalidLighting(m));
        if !(-90.0..=90.0).contains(&self.latitude) {
            return bad(format!("latitude {} outside [-90, 90]", self.latitude));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return bad(format!("longitude {} outside [-180, 180]", self.longitude));
        }
        if !(0.0..=1.0).contains(&self.ambient) {
            return bad(format!("ambient {} outside [0, 1]", self.ambient));
        }
        if !(0.0..=1.0).contains(&self.overcast) {
            return bad(format!("overcast {} outside [0, 1]", self.overcast));
        }
        Ok(())
    }

    pub fn sun(&self) -> SolarPosition {
        sun_direction(self.latitude, self.longitude, &self.time)
    }
}

/// Colour image and crack-id buffer from one visibility pass.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedFrame<S> {
    pub color: RgbImage,
    pub ids: IdBuffer,
    pub pose: CameraPose<S>,
    pub frame_index: usize,
}

/// Shading intensity in `[0, 1]` for a unit normal facing the viewer.
pub fn shade<S: Real>(normal: Vec3<S>, sun: Vec3<S>, sun_up: bool, ambient: S, overcast: S) -> S {
    let direct = if sun_up { normal.dot(sun).max(S::zero()) } else { S::zero() };
    clamp(
        ambient + direct * (S::one() - overcast) + overcast * S::lit(SKY_DIFFUSE),
        S::zero(),
        S::one(),
    )
}

#[derive(Clone, Copy)]
struct ClipVertex<S> {
    cam: Vec3<S>,
    bary: [S; 3],
}

fn clip_near<S: Real>(tri: [ClipVertex<S>; 3], near: S) -> Vec<ClipVertex<S>> {
    let mut out = Vec::with_capacity(4);
    for i in 0..3 {
        let p = tri[i];
        let q = tri[(i + 1) % 3];
        let (dp, dq) = (p.cam.z - near, q.cam.z - near);
        if dp >= S::zero() {
            out.push(p);
        }
        if (dp > S::zero() && dq < S::zero()) || (dp < S::zero() && dq > S::zero()) {
            let t = dp / (dp - dq);
            let mut bary = [S::zero(); 3];
            for k in 0..3 {
                bary[k] = p.bary[k] + (q.bary[k] - p.bary[k]) * t;
            }
            let mut cam = p.cam.lerp(q.cam, t);
            cam.z = near;
            out.push(ClipVertex { cam, bary });
        }
    }
    out
}

/// Rasterizes `mesh` from `pose`: depth-buffered, perspective-correct,
/// two-sided Lambert plus ambient and sky light, nearest texture lookup.
/// Pixels whose nearest surface is tagged with a crack get that id.
pub fn render_frame<S: Real>(
    mesh: &TriangleMesh<S>,
    pose: &CameraPose<S>,
    lighting: &LightingEnvironment,
    resolution: Resolution,
) -> Result<RenderedFrame<S>, RenderError> {
    render_indexed(mesh, pose, lighting, resolution, 0)
}

pub(crate) fn render_indexed<S: Real>(
    mesh: &TriangleMesh<S>,
    pose: &CameraPose<S>,
    lighting: &LightingEnvironment,
    resolution: Resolution,
    frame_index: usize,
) -> Result<RenderedFrame<S>, RenderError> {
    let Resolution { width, height } = resolution;
    if width == 0 || height == 0 {
        return Err(RenderError::ZeroViewport);
    }
    lighting.validate()?;
    let (w, h) = (S::from_usize_lossy(width as usize), S::from_usize_lossy(height as usize));
    let focal = h * S::half() / (pose.fov_deg.to_radians() * S::half()).tan();
    let (cx, cy) = (w * S::half(), h * S::half());
    let near = S::lit(NEAR_PLANE);
    let n_px = width as usize * height as usize;
    let mut inv_depth = vec![S::zero(); n_px];
    let mut face_at = vec![u32::MAX; n_px];
    let mut bary_at = vec![[S::zero(); 3]; n_px];

    let to_cam = |p: Vec3<S>| {
        let d = p - pose.position;
        Vec3::new(d.dot(pose.right), d.dot(pose.up), d.dot(pose.forward))
    };
    let identity = [
        [S::one(), S::zero(), S::zero()],
        [S::zero(), S::one(), S::zero()],
        [S::zero(), S::zero(), S::one()],
    ];

    for f in 0..mesh.face_count() {
        let v = mesh.face_vertices(f);
        let tri = [0, 1, 2].map(|k| ClipVertex { cam: to_cam(v[k]), bary: identity[k] });
        if tri.iter().all(|c| c.cam.z < near) {
            continue;
        }
        let poly = if tri.iter().all(|c| c.cam.z >= near) { tri.to_vec() } else { clip_near(tri, near) };
        for k in 1..poly.len().saturating_sub(1) {
            let sub = [poly[0], poly[k], poly[k + 1]];
            let iz = sub.map(|c| S::one() / c.cam.z);
            let sp = [0, 1, 2].map(|i| Vec2::new(cx + focal * sub[i].cam.x * iz[i], cy - focal * sub[i].cam.y * iz[i]));
            let area = edge(sp[0], sp[1], sp[2]);
            if area == S::zero() || !area.is_finite() {
                continue;
            }
            let (minx, maxx) = (sp[0].x.min(sp[1].x).min(sp[2].x), sp[0].x.max(sp[1].x).max(sp[2].x));
            let (miny, maxy) = (sp[0].y.min(sp[1].y).min(sp[2].y), sp[0].y.max(sp[1].y).max(sp[2].y));
            let Some((x0, x1)) = pixel_span(minx, maxx, width) else { continue };
            let Some((y0, y1)) = pixel_span(miny, maxy, height) else { continue };
            let sign = area.signum();
            let inv_area = S::one() / area.abs();
            for py in y0..=y1 {
                let yc = S::from_usize_lossy(py) + S::half();
                for px in x0..=x1 {
                    let p = Vec2::new(S::from_usize_lossy(px) + S::half(), yc);
                    let l0 = edge(sp[1], sp[2], p) * sign;
                    let l1 = edge(sp[2], sp[0], p) * sign;
                    let l2 = edge(sp[0], sp[1], p) * sign;
                    if l0 < S::zero() || l1 < S::zero() || l2 < S::zero() {
                        continue;
                    }
                    let l = [l0 * inv_area, l1 * inv_area, l2 * inv_area];
                    let z = l[0] * iz[0] + l[1] * iz[1] + l[2] * iz[2];
                    let idx = py * width as usize + px;
                    if !(z > inv_depth[idx]) {
                        continue;
                    }
                    inv_depth[idx] = z;
                    face_at[idx] = f as u32;
                    let mut b = [S::zero(); 3];
                    for (j, lj) in l.iter().enumerate() {
                        let wgt = *lj * iz[j] / z;
                        for (bk, sk) in b.iter_mut().zip(sub[j].bary) {
                            *bk += wgt * sk;
                        }
                    }
                    bary_at[idx] = b;
                }
            }
        }
    }

    let sun = lighting.sun();
    let sun_dir = {
        let d = sun.direction();
        Vec3::new(S::lit(d.x), S::lit(d.y), S::lit(d.z))
    };
    let ambient = S::lit(lighting.ambient);
    let overcast = S::lit(lighting.overcast);
    let mut color = RgbImage::from_pixel(width, height, Rgb(BACKGROUND));
    let mut ids = IdBuffer::new(width, height);
    let normals = mesh.normals();
    let uvs = mesh.uvs();
    for py in 0..height as usize {
        for px in 0..width as usize {
            let idx = py * width as usize + px;
            let f = face_at[idx];
            if f == u32::MAX {
                continue;
            }
            let fi = f as usize;
            let [a, b, c] = mesh.faces()[fi].map(|i| i as usize);
            let l = bary_at[idx];
            let ray = pose.forward + pose.right * ((S::from_usize_lossy(px) + S::half() - cx) / focal)
                - pose.up * ((S::from_usize_lossy(py) + S::half() - cy) / focal);
            let geo = mesh.face_normal(fi).unwrap_or(normals[a]);
            let mut n = (normals[a] * l[0] + normals[b] * l[1] + normals[c] * l[2]).normalize_or(geo);
            if geo.dot(ray) > S::zero() {
                n = -n;
            }
            let uv = uvs[a] * l[0] + uvs[b] * l[1] + uvs[c] * l[2];
            let texel = mesh.face_texture(fi).sample(uv);
            let k = shade(n, sun_dir, sun.is_above_horizon(), ambient, overcast);
            let px_rgb = texel.map(|t| {
                (S::lit(t as f64) * k).round().to_u8().unwrap_or(255)
            });
            color.put_pixel(px as u32, py as u32, Rgb(px_rgb));
            ids.set(px as u32, py as u32, mesh.face_crack(fi));
        }
    }
    Ok(RenderedFrame {
        color,
        ids,
        pose: *pose,
        frame_index,
    })
}

fn edge<S: Real>(a: Vec2<S>, b: Vec2<S>, p: Vec2<S>) -> S {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Pixel indices whose centres can fall in `[lo, hi]`.
fn pixel_span<S: Real>(lo: S, hi: S, size: u32) -> Option<(usize, usize)> {
    let max = S::from_usize_lossy(size as usize - 1);
    let a = (lo - S::half()).ceil().max(S::zero());
    let b = (hi - S::half()).floor().min(max);
    if !(a <= b) {
        return None;
    }
    Some((a.to_usize()?, b.to_usize()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn shading_is_bounded(
            n in prop::array::uniform3(-1.0f64..1.0),
            s in prop::array::uniform3(-1.0f64..1.0),
            up: bool,
            ambient in 0.0f64..=1.0,
            overcast in 0.0f64..=1.0,
        ) {
            let n = Vec3::new(n[0], n[1], n[2]).normalize_or(Vec3::new(0.0, 0.0, 1.0));
            let s = Vec3::new(s[0], s[1], s[2]).normalize_or(Vec3::new(0.0, 0.0, 1.0));
            let k = shade(n, s, up, ambient, overcast);
            prop_assert!((0.0..=1.0).contains(&k));
        }
    }

    #[test]
    fn pixel_span_clamps() {
        assert_eq!(pixel_span(-3.0f64, 2.2, 10), Some((0, 1)));
        assert_eq!(pixel_span(0.6f64, 0.7, 10), None);
        assert_eq!(pixel_span(8.0f64, 30.0, 10), Some((8, 9)));
    }
}
