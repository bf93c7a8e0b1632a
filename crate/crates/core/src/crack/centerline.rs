use rand::Rng;

use super::params::{rng_for, SampledParams};
use super::CrackError;
use crate::geometry::{Component, SurfacePoint, SurfaceProjector, TriangleMesh, Vec3};
use crate::scalar::{clamp, Real};

/// Segments of the generated centerline before any masonry snapping.
pub const FINE_SEGMENTS: usize = 64;

/// Polyline on the surface with the face normal under each vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Centerline<S> {
    pub points: Vec<Vec3<S>>,
    pub normals: Vec<Vec3<S>>,
}

/// Lateral offsets sampled along the fine parameterisation.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementProfile<S> {
    /// Start of the crack as a fraction of the annotation line.
    pub start: S,
    /// Midpoint-displacement levels of the coarse band.
    pub levels: u32,
    /// Coarse band, `FINE_SEGMENTS + 1` values, zero at both ends.
    pub low: Vec<S>,
    /// Fine jitter, `FINE_SEGMENTS + 1` values, zero at both ends.
    pub high: Vec<S>,
}

impl<S: Real> DisplacementProfile<S> {
    pub fn total(&self, k: usize) -> S {
        self.low[k] + self.high[k]
    }
}

/// Draws the two-band lateral profile. Every `|low| <= roughness_low` and
/// every `|high| <= roughness_high`.
pub fn sample_displacement<S: Real>(params: &SampledParams<S>, seed: u64) -> DisplacementProfile<S> {
    let mut rng = rng_for(seed);
    let lf = clamp(params.length_fraction, S::zero(), S::one());
    let start = (S::one() - lf) * S::lit(rng.gen::<f64>());
    let levels: u32 = rng.gen_range(2..=4);

    let n = 1usize << levels;
    let mut raw = vec![0.0f64; n + 1];
    let mut amp = 1.0;
    let mut bound = 0.0;
    let mut step = n;
    for _ in 0..levels {
        let half = step / 2;
        let mut i = half;
        while i < n {
            raw[i] = 0.5 * (raw[i - half] + raw[i + half]) + amp * rng.gen_range(-1.0..1.0);
            i += step;
        }
        bound += amp;
        amp *= 0.5;
        step = half;
    }

    let rl = params.roughness_low;
    let rh = params.roughness_high;
    let mut low = Vec::with_capacity(FINE_SEGMENTS + 1);
    let mut high = Vec::with_capacity(FINE_SEGMENTS + 1);
    for k in 0..=FINE_SEGMENTS {
        let x = (k * n) as f64 / FINE_SEGMENTS as f64;
        let i = (x.floor() as usize).min(n - 1);
        let f = x - i as f64;
        let v = (raw[i] * (1.0 - f) + raw[i + 1] * f) / bound;
        low.push(clamp(rl * S::lit(v), -rl, rl));
        let j = S::lit(rng.gen_range(-1.0..1.0));
        high.push(if k == 0 || k == FINE_SEGMENTS { S::zero() } else { clamp(rh * j, -rh, rh) });
    }
    DisplacementProfile { start, levels, low, high }
}

/// Lateral direction for an annotation: surface normal cross line direction.
pub(crate) fn lateral_axis<S: Real>(n: Vec3<S>, dir: Vec3<S>) -> Vec3<S> {
    n.cross(dir).try_normalize().unwrap_or_else(|| dir.any_perpendicular())
}

/// Noisy centerline between two anchors, re-projected onto the component.
pub fn generate_centerline<S: Real>(
    mesh: &TriangleMesh<S>,
    component: &Component,
    start: &SurfacePoint<S>,
    end: &SurfacePoint<S>,
    params: &SampledParams<S>,
    seed: u64,
) -> Result<Centerline<S>, CrackError> {
    let p0 = start.position(mesh);
    let p1 = end.position(mesh);
    let chord = p1 - p0;
    let len = chord.norm();
    if !(len > S::zero()) {
        return Err(CrackError::DegenerateAnnotation);
    }
    let dir = chord / len;
    let projector = {
        let reach = params.roughness_low + params.roughness_high + len * S::lit(0.25);
        SurfaceProjector::near(mesh, component, p0.min_by_component(p1), p0.max_by_component(p1), reach)
    };
    let n0 = projector.face_normal(start.face);
    let n1 = projector.face_normal(end.face);
    let lateral = lateral_axis((n0 + n1).normalize_or(n0), dir);

    let profile = sample_displacement(params, seed);
    let lf = clamp(params.length_fraction, S::zero(), S::one());
    let mut points = Vec::with_capacity(FINE_SEGMENTS + 1);
    let mut normals = Vec::with_capacity(FINE_SEGMENTS + 1);
    for k in 0..=FINE_SEGMENTS {
        let t = profile.start + lf * S::from_usize_lossy(k) / S::from_usize_lossy(FINE_SEGMENTS);
        let q = p0 + chord * t + lateral * profile.total(k);
        let (on, sp, _) = projector.project(q);
        points.push(on);
        normals.push(projector.face_normal(sp.face));
    }
    Ok(Centerline { points, normals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{select_component, Selector};

    fn params(lf: f64, rl: f64, rh: f64) -> SampledParams<f64> {
        SampledParams {
            length_fraction: lf,
            roughness_low: rl,
            roughness_high: rh,
            thickness: 0.004,
            depth: 0.01,
            appears: true,
        }
    }

    fn wall() -> (TriangleMesh<f64>, Component) {
        let m = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(4.0, 0.0, 0.0),
                Vec3::new(4.0, 0.0, 3.0),
                Vec3::new(0.0, 0.0, 3.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let c = select_component(&m, "wall", &Selector::Faces(vec![0, 1])).unwrap();
        (m, c)
    }

    fn anchor(m: &TriangleMesh<f64>, c: &Component, p: Vec3<f64>) -> SurfacePoint<f64> {
        SurfaceProjector::new(m, c).project(p).1
    }

    #[test]
    fn displacement_bounds_hold() {
        for seed in 0..300 {
            let p = params(0.7, 0.05, 0.01);
            let d = sample_displacement(&p, seed);
            assert!((2..=4).contains(&d.levels));
            assert!(d.low.iter().all(|v| v.abs() <= 0.05));
            assert!(d.high.iter().all(|v| v.abs() <= 0.01));
            assert_eq!(d.low[0], 0.0);
            assert_eq!(d.total(FINE_SEGMENTS), 0.0);
            assert!(d.start >= 0.0 && d.start + 0.7 <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn zero_roughness_full_length_is_straight() {
        let (m, c) = wall();
        let a = anchor(&m, &c, Vec3::new(0.5, 0.0, 0.5));
        let b = anchor(&m, &c, Vec3::new(3.5, 0.0, 2.5));
        let line = generate_centerline(&m, &c, &a, &b, &params(1.0, 0.0, 0.0), 5).unwrap();
        let (p0, p1) = (a.position(&m), b.position(&m));
        assert!(line.points[0].distance(p0) < 1e-12);
        assert!(line.points[FINE_SEGMENTS].distance(p1) < 1e-12);
        let dir = (p1 - p0).normalize_or(Vec3::zero());
        for p in &line.points {
            let off = p0 + dir * (*p - p0).dot(dir);
            assert!(off.distance(*p) < 1e-12);
        }
        for n in &line.normals {
            assert!((n.y.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_polyline() {
        let (m, c) = wall();
        let a = anchor(&m, &c, Vec3::new(0.5, 0.0, 0.5));
        let b = anchor(&m, &c, Vec3::new(3.5, 0.0, 2.5));
        let p = params(0.8, 0.1, 0.01);
        let x = generate_centerline(&m, &c, &a, &b, &p, 11).unwrap();
        let y = generate_centerline(&m, &c, &a, &b, &p, 11).unwrap();
        assert_eq!(x, y);
        let z = generate_centerline(&m, &c, &a, &b, &p, 12).unwrap();
        assert_ne!(x, z);
    }

    #[test]
    fn extent_along_line_and_offsets_bounded() {
        let (m, c) = wall();
        let a = anchor(&m, &c, Vec3::new(0.2, 0.0, 1.5));
        let b = anchor(&m, &c, Vec3::new(3.8, 0.0, 1.5));
        for seed in 0..50 {
            let p = params(0.6, 0.2, 0.02);
            let line = generate_centerline(&m, &c, &a, &b, &p, seed).unwrap();
            let along = (line.points[FINE_SEGMENTS].x - line.points[0].x).abs();
            assert!(along <= 3.6 * 0.6 + 1e-9);
            for q in &line.points {
                assert!((q.z - 1.5).abs() <= 0.22 + 1e-12);
                assert!(q.x >= 0.2 - 1e-12 && q.x <= 3.8 + 1e-12);
            }
        }
    }
}
