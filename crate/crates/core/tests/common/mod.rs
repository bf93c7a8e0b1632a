#![allow(dead_code)]

use crackforge::crack::{build_profile, CrackInstance, SampledParams};
use crackforge::geometry::{Material, TriangleMesh, Vec3};

/// Flat wall in the plane y = 0 spanning `[0, w] x [0, h]` in x/z, split into
/// `n x m` quads. Vertex normals point to -Y.
pub fn wall(w: f64, h: f64, n: usize, m: usize) -> TriangleMesh<f64> {
    let mut pos = Vec::new();
    for j in 0..=m {
        for i in 0..=n {
            pos.push(Vec3::new(w * i as f64 / n as f64, 0.0, h * j as f64 / m as f64));
        }
    }
    let mut faces = Vec::new();
    let idx = |i: usize, j: usize| (j * (n + 1) + i) as u32;
    for j in 0..m {
        for i in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh::new(pos, faces).unwrap()
}

/// Straight crack on the `wall` with the usual tip taper.
pub fn straight(id: u32, a: Vec3<f64>, b: Vec3<f64>, thickness: f64, depth: f64) -> CrackInstance<f64> {
    let points: Vec<_> = (0..=32).map(|k| a.lerp(b, k as f64 / 32.0)).collect();
    let prof = build_profile(&points, thickness, depth);
    CrackInstance {
        id,
        name: format!("c{id}"),
        seed: 0,
        material: Material::Concrete,
        masonry: false,
        params: SampledParams {
            length_fraction: 1.0,
            roughness_low: 0.0,
            roughness_high: 0.0,
            thickness,
            depth,
            appears: true,
        },
        normals: vec![Vec3::new(0.0, -1.0, 0.0); points.len()],
        points,
        widths: prof.widths,
        depths: prof.depths,
        spalling: vec![],
    }
}

/// Same as [`straight`] with constant width and depth.
pub fn uniform(id: u32, a: Vec3<f64>, b: Vec3<f64>, width: f64, depth: f64) -> CrackInstance<f64> {
    let mut c = straight(id, a, b, width, depth);
    c.widths.iter_mut().for_each(|w| *w = width);
    c.depths.iter_mut().for_each(|d| *d = depth);
    c
}
