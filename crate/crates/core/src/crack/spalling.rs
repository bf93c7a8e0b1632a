use rand::Rng;
use serde::{Deserialize, Serialize};

use super::annotation::SpallingConfig;
use super::masonry::locate;
use super::params::rng_for;
use super::profile::arc_lengths;
use crate::geometry::Vec3;
use crate::scalar::{lerp, Real};

/// Shallow dish where the surface layer has flaked off around a crack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpallPatch<S> {
    pub center: Vec3<S>,
    pub normal: Vec3<S>,
    pub radius: S,
    pub depth: S,
    /// Arc length along the centerline at the patch center.
    pub arc_position: S,
}

/// Number of candidate sites on a centerline of length `len`.
pub fn spalling_site_count<S: Real>(len: S, spacing: S) -> usize {
    (len / spacing + S::lit(1e-9)).floor().to_usize().unwrap_or(0)
}

/// One Bernoulli trial per stratified site; successful sites become patches
/// whose radius is a uniform multiple of the local width.
pub fn generate_spalling<S: Real>(
    points: &[Vec3<S>],
    normals: &[Vec3<S>],
    widths: &[S],
    depths: &[S],
    probability: S,
    config: &SpallingConfig<S>,
    seed: u64,
) -> Vec<SpallPatch<S>> {
    let cum = arc_lengths(points);
    let len = *cum.last().unwrap_or(&S::zero());
    let sites = spalling_site_count(len, config.site_spacing);
    let mut rng = rng_for(seed);
    let mut out = Vec::new();
    for k in 0..sites {
        let u_pos: f64 = rng.gen();
        let u_hit: f64 = rng.gen();
        let u_rad: f64 = rng.gen();
        if !(S::lit(u_hit) < probability) {
            continue;
        }
        let s = (S::from_usize_lossy(k) + S::lit(u_pos)) * config.site_spacing;
        let s = s.min(len);
        let (i, t) = locate(&cum, s);
        let j = (i + 1).min(points.len() - 1);
        let width = lerp(widths[i], widths[j], t);
        let factor = lerp(config.radius_factor_min, config.radius_factor_max, S::lit(u_rad));
        out.push(SpallPatch {
            center: points[i].lerp(points[j], t),
            normal: normals[i].lerp(normals[j], t).normalize_or(normals[i]),
            radius: width * factor,
            depth: lerp(depths[i], depths[j], t),
            arc_position: s,
        });
    }
    out
}
