use super::damage::CrackInstance;
use super::spalling::SpallPatch;
use super::CrackError;
use crate::geometry::{orient2d, FaceAttr, Texture, TriangleMesh, Vec2, Vec3};
use crate::scalar::Real;

/// Colour of groove walls.
pub const GROOVE_COLOR: [u8; 3] = [38, 34, 31];
/// Vertices on the rim of a spalling patch.
pub const SPALL_SECTORS: usize = 16;
const SPALL_RINGS: usize = 3;

/// What a carve changed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CarveStats {
    /// Surface faces replaced by their uncovered remainder.
    pub cut_faces: usize,
    /// Faces making up those remainders.
    pub remainder_faces: usize,
    /// New faces tagged with the crack id.
    pub crack_faces: usize,
}

struct Station<S> {
    c: Vec3<S>,
    n: Vec3<S>,
    w: S,
    d: S,
}

/// Cross-section corners along the centerline: surface edges and groove bottom.
struct Ribbon<S> {
    stations: Vec<Station<S>>,
    left: Vec<Vec3<S>>,
    right: Vec<Vec3<S>>,
    bottom: Vec<Vec3<S>>,
}

/// Convex polygon on the surface that the crack removes.
struct Footprint<S> {
    pts: Vec<Vec3<S>>,
    normal: Vec3<S>,
    lo: Vec3<S>,
    hi: Vec3<S>,
}

impl<S: Real> Footprint<S> {
    fn new(pts: Vec<Vec3<S>>, normal: Vec3<S>) -> Self {
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = lo.min_by_component(*p);
            hi = hi.max_by_component(*p);
        }
        Self { pts, normal, lo, hi }
    }
}

/// Cuts the crack into `mesh`: surface faces lose the ribbon and spalling
/// footprints, and a V-groove plus spalling dishes tagged with the crack id
/// fill the hole. A crack with zero depth leaves the mesh unchanged. On
/// error the mesh is untouched.
pub fn carve_crack<S: Real>(mesh: &mut TriangleMesh<S>, crack: &CrackInstance<S>) -> Result<CarveStats, CrackError> {
    let deep = crack.depths.iter().any(|&d| d > S::zero()) || crack.spalling.iter().any(|p| p.depth > S::zero());
    if !deep {
        return Ok(CarveStats::default());
    }
    let ribbon = match build_ribbon(crack)? {
        Some(r) => r,
        None => return Ok(CarveStats::default()),
    };
    let patches: Vec<&SpallPatch<S>> = crack
        .spalling
        .iter()
        .filter(|p| p.depth > S::zero() && p.radius > S::zero())
        .collect();

    let mut footprints = ribbon_footprints(&ribbon);
    for p in &patches {
        footprints.push(Footprint::new(spall_rim(p), p.normal));
    }
    let max_w = ribbon.stations.iter().fold(S::zero(), |m, s| m.max(s.w));
    let plane_tol = max_w * S::two() + S::lit(1e-9);

    let mut stats = CarveStats::default();
    let face_count = mesh.face_count();
    let mut keep = vec![true; face_count];
    for f in 0..face_count {
        if mesh.face_attrs()[f].crack != 0 {
            continue;
        }
        let Some(nf) = mesh.face_normal(f) else { continue };
        let [a, b, c] = mesh.face_vertices(f);
        let flo = a.min_by_component(b).min_by_component(c);
        let fhi = a.max_by_component(b).max_by_component(c);
        let e1 = (b - a).normalize_or(nf.any_perpendicular());
        let e2 = nf.cross(e1);
        let to2d = |p: Vec3<S>| Vec2::new((p - a).dot(e1), (p - a).dot(e2));

        let mut clips: Vec<Vec<Vec2<S>>> = Vec::new();
        for fp in &footprints {
            if !boxes_overlap(flo, fhi, fp.lo, fp.hi, plane_tol) || nf.dot(fp.normal) < S::half() {
                continue;
            }
            if fp.pts.iter().any(|p| (*p - a).dot(nf).abs() > plane_tol) {
                continue;
            }
            let mut poly: Vec<Vec2<S>> = fp.pts.iter().map(|p| to2d(*p)).collect();
            let area = polygon_area(&poly);
            if area.abs() <= S::zero() {
                continue;
            }
            if area < S::zero() {
                poly.reverse();
            }
            clips.push(poly);
        }
        if clips.is_empty() {
            continue;
        }
        let tri = [to2d(a), to2d(b), to2d(c)];
        let eps = polygon_area(&tri).abs() * S::lit(1e-9);
        let Some(pieces) = subtract_convex(tri.to_vec(), &clips, eps) else { continue };

        keep[f] = false;
        stats.cut_faces += 1;
        let attr = mesh.face_attrs()[f];
        let [ia, ib, ic] = mesh.faces()[f];
        let (na, nb, nc) = (mesh.normals()[ia as usize], mesh.normals()[ib as usize], mesh.normals()[ic as usize]);
        let (ta, tb, tc) = (mesh.uvs()[ia as usize], mesh.uvs()[ib as usize], mesh.uvs()[ic as usize]);
        let denom = orient2d(tri[0], tri[1], tri[2]);
        for piece in pieces {
            for t in fan(&piece, eps) {
                let mut idx = [0u32; 3];
                for (k, p) in t.iter().enumerate() {
                    let lb = orient2d(tri[0], *p, tri[2]) / denom;
                    let lc = orient2d(tri[0], tri[1], *p) / denom;
                    let la = S::one() - lb - lc;
                    let pos = a + e1 * p.x + e2 * p.y;
                    let n = na * la + nb * lb + nc * lc;
                    let uv = ta * la + tb * lb + tc * lc;
                    idx[k] = mesh.push_vertex(pos, n.normalize_or(nf), uv);
                }
                mesh.push_face(idx, attr);
                stats.remainder_faces += 1;
            }
        }
    }
    keep.resize(mesh.face_count(), true);
    mesh.retain_faces(&keep);

    let before = mesh.face_count();
    let groove = FaceAttr {
        texture: mesh.add_texture(Texture::Solid(GROOVE_COLOR)),
        material: crack.material,
        region: 0,
        crack: crack.id,
    };
    add_groove(mesh, &ribbon, groove);
    let inner = FaceAttr {
        texture: mesh.add_texture(Texture::Solid(crack.material.inner_layer_color())),
        ..groove
    };
    for p in patches {
        add_spall_dish(mesh, p, inner);
    }
    stats.crack_faces = mesh.face_count() - before;
    Ok(stats)
}

fn build_ribbon<S: Real>(crack: &CrackInstance<S>) -> Result<Option<Ribbon<S>>, CrackError> {
    let max_w = crack.widths.iter().fold(S::zero(), |m, &w| m.max(w));
    let eps = max_w * S::lit(1e-3);
    let mut stations: Vec<Station<S>> = Vec::with_capacity(crack.points.len());
    for i in 0..crack.points.len() {
        let s = Station {
            c: crack.points[i],
            n: crack.normals[i].normalize_or(Vec3::new(S::zero(), S::zero(), S::one())),
            w: crack.widths[i],
            d: crack.depths[i],
        };
        match stations.last() {
            Some(prev) if prev.c.distance(s.c) <= eps => {}
            _ => stations.push(s),
        }
    }
    if stations.len() < 2 {
        return Ok(None);
    }
    let n = stations.len();
    let dirs: Vec<Vec3<S>> = stations
        .windows(2)
        .map(|w| (w[1].c - w[0].c).normalize_or(Vec3::zero()))
        .collect();
    let (mut left, mut right, mut bottom) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (i, st) in stations.iter().enumerate() {
        let t = match i {
            0 => dirs[0],
            i if i == n - 1 => dirs[n - 2],
            i => (dirs[i - 1] + dirs[i]).try_normalize().ok_or(CrackError::SelfIntersection {
                crack: crack.id,
                first: i - 1,
                second: i,
            })?,
        };
        let lat = st.n.cross(t).try_normalize().ok_or(CrackError::SelfIntersection {
            crack: crack.id,
            first: i.saturating_sub(1),
            second: i,
        })?;
        let h = st.w * S::half();
        left.push(st.c + lat * h);
        right.push(st.c - lat * h);
        bottom.push(st.c - st.n * st.d);
    }
    for i in 0..n - 1 {
        let seg = stations[i + 1].c - stations[i].c;
        if (left[i + 1] - left[i]).dot(seg) <= S::zero() || (right[i + 1] - right[i]).dot(seg) <= S::zero() {
            return Err(CrackError::Bowtie { crack: crack.id, segment: i });
        }
    }
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            let limit = stations[i].w.min(stations[j].w) * S::lit(0.25);
            let d = segment_distance(stations[i].c, stations[i + 1].c, stations[j].c, stations[j + 1].c);
            if d < limit {
                return Err(CrackError::SelfIntersection { crack: crack.id, first: i, second: j });
            }
        }
    }
    Ok(Some(Ribbon { stations, left, right, bottom }))
}

fn ribbon_footprints<S: Real>(r: &Ribbon<S>) -> Vec<Footprint<S>> {
    let mut out = Vec::with_capacity(2 * r.stations.len());
    for i in 0..r.stations.len() - 1 {
        let nq = (r.stations[i].n + r.stations[i + 1].n).normalize_or(r.stations[i].n);
        let (l0, l1, r1, r0) = (r.left[i], r.left[i + 1], r.right[i + 1], r.right[i]);
        let side = |p: Vec3<S>, q: Vec3<S>, s: Vec3<S>| (q - p).cross(s - p).dot(nq);
        // Split along the diagonal that keeps both halves consistently oriented.
        let a_ok = side(l0, l1, r1).signum() == side(l0, r1, r0).signum();
        let (t1, t2) = if a_ok { ([l0, l1, r1], [l0, r1, r0]) } else { ([l0, l1, r0], [l1, r1, r0]) };
        out.push(Footprint::new(t1.to_vec(), nq));
        out.push(Footprint::new(t2.to_vec(), nq));
    }
    out
}

fn patch_frame<S: Real>(p: &SpallPatch<S>) -> (Vec3<S>, Vec3<S>) {
    let e1 = p.normal.any_perpendicular();
    (e1, p.normal.cross(e1))
}

fn ring_point<S: Real>(p: &SpallPatch<S>, e1: Vec3<S>, e2: Vec3<S>, rho: S, k: usize) -> Vec3<S> {
    let theta = S::TAU() * S::from_usize_lossy(k) / S::from_usize_lossy(SPALL_SECTORS);
    let depth = p.depth * (S::one() - (rho / p.radius).powi(2));
    p.center + (e1 * theta.cos() + e2 * theta.sin()) * rho - p.normal * depth
}

/// Rim of a spalling patch, on the tangent plane.
fn spall_rim<S: Real>(p: &SpallPatch<S>) -> Vec<Vec3<S>> {
    let (e1, e2) = patch_frame(p);
    (0..SPALL_SECTORS).map(|k| ring_point(p, e1, e2, p.radius, k)).collect()
}

fn add_groove<S: Real>(mesh: &mut TriangleMesh<S>, r: &Ribbon<S>, attr: FaceAttr) {
    let n = r.stations.len();
    for i in 0..n - 1 {
        let open = r.stations[i].c.lerp(r.stations[i + 1].c, S::half());
        let (l0, l1, r0, r1, b0, b1) = (r.left[i], r.left[i + 1], r.right[i], r.right[i + 1], r.bottom[i], r.bottom[i + 1]);
        for tri in [[l0, l1, b1], [l0, b1, b0], [r0, b0, b1], [r0, b1, r1]] {
            let centroid = (tri[0] + tri[1] + tri[2]) / S::lit(3.0);
            push_facing(mesh, tri, open - centroid, attr);
        }
    }
    let start = [r.left[0], r.right[0], r.bottom[0]];
    push_facing(mesh, start, r.stations[1].c - r.stations[0].c, attr);
    let end = [r.left[n - 1], r.right[n - 1], r.bottom[n - 1]];
    push_facing(mesh, end, r.stations[n - 2].c - r.stations[n - 1].c, attr);
}

fn add_spall_dish<S: Real>(mesh: &mut TriangleMesh<S>, p: &SpallPatch<S>, attr: FaceAttr) {
    let (e1, e2) = patch_frame(p);
    let rho = |ring: usize| p.radius * S::from_usize_lossy(ring) / S::from_usize_lossy(SPALL_RINGS);
    let center = p.center - p.normal * p.depth;
    for k in 0..SPALL_SECTORS {
        let k1 = (k + 1) % SPALL_SECTORS;
        push_facing(mesh, [center, ring_point(p, e1, e2, rho(1), k), ring_point(p, e1, e2, rho(1), k1)], p.normal, attr);
        for ring in 1..SPALL_RINGS {
            let (a0, a1) = (ring_point(p, e1, e2, rho(ring), k), ring_point(p, e1, e2, rho(ring), k1));
            let (b0, b1) = (ring_point(p, e1, e2, rho(ring + 1), k), ring_point(p, e1, e2, rho(ring + 1), k1));
            push_facing(mesh, [a0, b0, b1], p.normal, attr);
            push_facing(mesh, [a0, b1, a1], p.normal, attr);
        }
    }
}

/// Adds a flat-shaded triangle wound so its normal points along `facing`.
fn push_facing<S: Real>(mesh: &mut TriangleMesh<S>, mut tri: [Vec3<S>; 3], facing: Vec3<S>, attr: FaceAttr) {
    let mut n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    if n.dot(facing) < S::zero() {
        tri.swap(1, 2);
        n = -n;
    }
    let Some(n) = n.try_normalize() else { return };
    let idx = tri.map(|p| mesh.push_vertex(p, n, Vec2::zero()));
    mesh.push_face(idx, attr);
}

fn boxes_overlap<S: Real>(alo: Vec3<S>, ahi: Vec3<S>, blo: Vec3<S>, bhi: Vec3<S>, tol: S) -> bool {
    alo.x <= bhi.x + tol
        && blo.x <= ahi.x + tol
        && alo.y <= bhi.y + tol
        && blo.y <= ahi.y + tol
        && alo.z <= bhi.z + tol
        && blo.z <= ahi.z + tol
}

/// Signed area, positive for counter-clockwise polygons.
pub(crate) fn polygon_area<S: Real>(poly: &[Vec2<S>]) -> S {
    let mut acc = S::zero();
    for i in 0..poly.len() {
        acc += poly[i].perp_dot(poly[(i + 1) % poly.len()]);
    }
    acc * S::half()
}

/// Sutherland-Hodgman against the line `a -> b`, keeping the left side
/// (or the right side when `left` is false).
fn clip_half_plane<S: Real>(poly: &[Vec2<S>], a: Vec2<S>, b: Vec2<S>, left: bool) -> Vec<Vec2<S>> {
    let side = |p: Vec2<S>| {
        let s = orient2d(a, b, p);
        if left {
            s
        } else {
            -s
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp >= S::zero() {
            out.push(p);
        }
        if (sp > S::zero() && sq < S::zero()) || (sp < S::zero() && sq > S::zero()) {
            out.push(p.lerp(q, sp / (sp - sq)));
        }
    }
    out
}

/// `subject` minus the union of counter-clockwise convex `clips`, as convex
/// pieces. `None` when nothing of area above `eps` was removed.
pub(crate) fn subtract_convex<S: Real>(subject: Vec<Vec2<S>>, clips: &[Vec<Vec2<S>>], eps: S) -> Option<Vec<Vec<Vec2<S>>>> {
    let mut pieces = vec![subject];
    let mut removed = false;
    for clip in clips {
        let (clo, chi) = bbox2(clip);
        let mut next = Vec::with_capacity(pieces.len() + 4);
        for piece in pieces {
            let (plo, phi) = bbox2(&piece);
            if plo.x >= chi.x || clo.x >= phi.x || plo.y >= chi.y || clo.y >= phi.y {
                next.push(piece);
                continue;
            }
            let mut rest = piece;
            let mut outside = Vec::new();
            for i in 0..clip.len() {
                let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
                let out = clip_half_plane(&rest, a, b, false);
                if polygon_area(&out) > eps {
                    outside.push(out);
                }
                rest = clip_half_plane(&rest, a, b, true);
                if polygon_area(&rest) <= eps {
                    rest.clear();
                    break;
                }
            }
            if !rest.is_empty() {
                removed = true;
            }
            next.extend(outside);
        }
        pieces = next;
    }
    removed.then_some(pieces)
}

fn bbox2<S: Real>(poly: &[Vec2<S>]) -> (Vec2<S>, Vec2<S>) {
    let mut lo = poly[0];
    let mut hi = poly[0];
    for p in poly {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Fan triangulation of a convex polygon, dropping slivers.
fn fan<S: Real>(poly: &[Vec2<S>], eps: S) -> Vec<[Vec2<S>; 3]> {
    let mut out = Vec::with_capacity(poly.len().saturating_sub(2));
    for i in 1..poly.len().saturating_sub(1) {
        let t = [poly[0], poly[i], poly[i + 1]];
        if orient2d(t[0], t[1], t[2]) * S::half() > eps {
            out.push(t);
        }
    }
    out
}

/// Shortest distance between segments `p1q1` and `p2q2`.
pub(crate) fn segment_distance<S: Real>(p1: Vec3<S>, q1: Vec3<S>, p2: Vec3<S>, q2: Vec3<S>) -> S {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let unit = |x: S| x.max(S::zero()).min(S::one());
    let (s, t) = if a <= S::zero() && e <= S::zero() {
        (S::zero(), S::zero())
    } else if a <= S::zero() {
        (S::zero(), unit(f / e))
    } else {
        let c = d1.dot(r);
        if e <= S::zero() {
            (unit(-c / a), S::zero())
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s = if denom > S::zero() { unit((b * f - c * e) / denom) } else { S::zero() };
            let mut t = (b * s + f) / e;
            if t < S::zero() {
                t = S::zero();
                s = unit(-c / a);
            } else if t > S::one() {
                t = S::one();
                s = unit((b - c) / a);
            }
            (s, t)
        }
    };
    (p1 + d1 * s).distance(p2 + d2 * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square(x0: f64, y0: f64, s: f64) -> Vec<Vec2<f64>> {
        vec![Vec2::new(x0, y0), Vec2::new(x0 + s, y0), Vec2::new(x0 + s, y0 + s), Vec2::new(x0, y0 + s)]
    }

    fn total(p: &[Vec<Vec2<f64>>]) -> f64 {
        p.iter().map(|q| polygon_area(q)).sum()
    }

    #[test]
    fn square_minus_inner_square() {
        let pieces = subtract_convex(square(0.0, 0.0, 4.0), &[square(1.0, 1.0, 1.0)], 1e-12).unwrap();
        assert!((total(&pieces) - 15.0).abs() < 1e-12);
        assert!(pieces.iter().all(|p| polygon_area(p) > 0.0));
    }

    #[test]
    fn disjoint_clip_removes_nothing() {
        assert!(subtract_convex(square(0.0, 0.0, 1.0), &[square(2.0, 2.0, 1.0)], 1e-12).is_none());
        assert!(subtract_convex(square(0.0, 0.0, 1.0), &[square(1.0, 0.0, 1.0)], 1e-12).is_none());
    }

    #[test]
    fn covering_clip_removes_everything() {
        let pieces = subtract_convex(square(0.0, 0.0, 1.0), &[square(-1.0, -1.0, 3.0)], 1e-12).unwrap();
        assert!(total(&pieces).abs() < 1e-12);
    }

    proptest! {
        // Area removed by overlapping axis-aligned clips equals the union area,
        // computed independently on a fine grid of exact cells.
        #[test]
        fn removed_area_matches_cell_count(
            rects in prop::collection::vec((0u32..8, 0u32..8, 1u32..5, 1u32..5), 1..5)
        ) {
            let clips: Vec<_> = rects.iter().map(|&(x, y, w, h)| {
                let (x, y, w, h) = (x as f64, y as f64, w as f64, h as f64);
                vec![Vec2::new(x, y), Vec2::new(x + w, y), Vec2::new(x + w, y + h), Vec2::new(x, y + h)]
            }).collect();
            let mut covered = 0usize;
            for cx in 0..10 {
                for cy in 0..10 {
                    if rects.iter().any(|&(x, y, w, h)| cx >= x && cx < x + w && cy >= y && cy < y + h) {
                        covered += 1;
                    }
                }
            }
            let left = subtract_convex(square(0.0, 0.0, 10.0), &clips, 1e-12).map(|p| total(&p)).unwrap_or(100.0);
            prop_assert!((left - (100 - covered) as f64).abs() < 1e-9);
        }

        #[test]
        fn segment_distance_not_above_sampled(
            c in prop::array::uniform12(-2.0f64..2.0)
        ) {
            let p1 = Vec3::new(c[0], c[1], c[2]);
            let q1 = Vec3::new(c[3], c[4], c[5]);
            let p2 = Vec3::new(c[6], c[7], c[8]);
            let q2 = Vec3::new(c[9], c[10], c[11]);
            let d = segment_distance(p1, q1, p2, q2);
            let mut best = f64::INFINITY;
            for i in 0..=60 {
                for j in 0..=60 {
                    let a = p1.lerp(q1, i as f64 / 60.0);
                    let b = p2.lerp(q2, j as f64 / 60.0);
                    best = best.min(a.distance(b));
                }
            }
            prop_assert!(d <= best + 1e-9);
            // grid spacing bounds how far the sampled minimum can sit above the true one
            let slack = ((q1 - p1).norm() + (q2 - p2).norm()) / 60.0;
            prop_assert!(best <= d + slack + 1e-9);
        }
    }
}
