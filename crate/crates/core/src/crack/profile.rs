use crate::geometry::Vec3;
use crate::scalar::Real;

/// Share of the crack length over which each end tapers.
pub const TAPER_ZONE: f64 = 0.1;
/// Width and depth factor at the very tips.
pub const TAPER_RESIDUAL: f64 = 0.2;

/// Cumulative arc length at each vertex, starting at zero.
pub fn arc_lengths<S: Real>(points: &[Vec3<S>]) -> Vec<S> {
    let mut acc = S::zero();
    let mut out = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += p.distance(points[i - 1]);
        }
        out.push(acc);
    }
    out
}

pub fn polyline_length<S: Real>(points: &[Vec3<S>]) -> S {
    points.windows(2).fold(S::zero(), |acc, w| acc + w[0].distance(w[1]))
}

/// Taper factor in `[TAPER_RESIDUAL, 1]` at arc length `s` of a crack of length `len`.
pub fn taper<S: Real>(s: S, len: S) -> S {
    let residual = S::lit(TAPER_RESIDUAL);
    if !(len > S::zero()) {
        return residual;
    }
    let zone = len * S::lit(TAPER_ZONE);
    let edge = s.min(len - s).max(S::zero());
    residual + (S::one() - residual) * (edge / zone).min(S::one())
}

/// Per-vertex opening width and depth.
#[derive(Clone, Debug, PartialEq)]
pub struct CrackProfile<S> {
    pub widths: Vec<S>,
    pub depths: Vec<S>,
}

/// Width and depth along the centerline, tapering towards both tips.
pub fn build_profile<S: Real>(points: &[Vec3<S>], thickness: S, depth: S) -> CrackProfile<S> {
    let cum = arc_lengths(points);
    let len = *cum.last().unwrap_or(&S::zero());
    let factors = cum.iter().map(|&s| taper(s, len));
    let (widths, depths) = factors.map(|f| (thickness * f, depth * f)).unzip();
    CrackProfile { widths, depths }
}

/// Splits every segment into equal pieces no longer than `max_len`.
pub fn densify<S: Real>(points: &[Vec3<S>], max_len: S) -> Vec<Vec3<S>> {
    let mut out = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        if i > 0 {
            let q = points[i - 1];
            let pieces = (q.distance(p) / max_len).ceil().to_usize().unwrap_or(1).max(1);
            for k in 1..pieces {
                out.push(q.lerp(p, S::from_usize_lossy(k) / S::from_usize_lossy(pieces)));
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn taper_shape() {
        assert_eq!(taper(0.0, 1.0), 0.2);
        assert_eq!(taper(1.0, 1.0), 0.2);
        assert!((taper(0.05f64, 1.0) - 0.6).abs() < 1e-12);
        assert_eq!(taper(0.5, 1.0), 1.0);
        assert_eq!(taper(0.0, 0.0), 0.2);
    }

    #[test]
    fn densify_preserves_vertices() {
        let pts: [Vec3<f64>; 3] = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.25, 0.0)];
        let d = densify(&pts, 0.3);
        assert_eq!(d.len(), 1 + 4 + 1);
        assert_eq!(d[4], pts[1]);
        assert!(d.windows(2).all(|w| w[0].distance(w[1]) <= 0.3 + 1e-12));
        assert!((polyline_length::<f64>(&d) - 1.25).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn profile_never_exceeds_sampled_values(
            xs in prop::collection::vec(-1.0f64..1.0, 2..40),
            thickness in 1e-4f64..0.02,
            depth in 0.0f64..0.05,
        ) {
            let pts: Vec<_> = xs.iter().enumerate().map(|(i, &y)| Vec3::new(i as f64 * 0.1, y, 0.0)).collect();
            let p = build_profile(&pts, thickness, depth);
            for (w, d) in p.widths.iter().zip(&p.depths) {
                prop_assert!(*w <= thickness && *w >= 0.2 * thickness - 1e-15);
                prop_assert!(*d <= depth && *d >= 0.0);
            }
        }
    }
}
