use super::profile::arc_lengths;
use super::CrackError;
use crate::geometry::{BrickGrid, Vec3};
use crate::scalar::Real;

/// Lattice node of a brick grid: `(column line, row line)`.
pub type GridNode = (u32, u32);

/// Nearest mortar-line intersection to `p`, or an error if `p` lies outside the grid.
pub fn nearest_node<S: Real>(grid: &BrickGrid<S>, p: Vec3<S>) -> Result<GridNode, CrackError> {
    let (u, v) = grid.to_local(p);
    let (eu, ev) = grid.extent();
    let tol = grid.mortar_width;
    if !(u >= -tol && v >= -tol && u <= eu + tol && v <= ev + tol) {
        return Err(CrackError::OutsideBrickGrid {
            u: u.to_f64_lossy(),
            v: v.to_f64_lossy(),
        });
    }
    let snap = |x: S, pitch: S, max: u32| -> u32 {
        let r = (x / pitch).round().max(S::zero()).to_u32().unwrap_or(0);
        r.min(max)
    };
    Ok((snap(u, grid.pitch_u(), grid.columns), snap(v, grid.pitch_v(), grid.rows)))
}

/// Monotone staircase of lattice steps between the nodes nearest to the
/// polyline's ends. Each step moves one pitch along `u` or `v` towards the
/// end node, choosing the node closer to the input polyline at the same
/// fraction of progress (ties go to `u`). The node count is always
/// `|di| + |dj| + 1`, the lattice shortest path length.
pub fn snap_path<S: Real>(points: &[Vec3<S>], grid: &BrickGrid<S>) -> Result<Vec<GridNode>, CrackError> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(CrackError::DegenerateAnnotation),
    };
    let start = nearest_node(grid, first)?;
    let end = nearest_node(grid, last)?;
    let total = start.0.abs_diff(end.0) + start.1.abs_diff(end.1);
    let cum = arc_lengths(points);
    let len = *cum.last().unwrap_or(&S::zero());

    let mut path = vec![start];
    let mut cur = start;
    for step in 1..=total {
        let reference = point_at(points, &cum, len * S::from_usize_lossy(step as usize) / S::from_usize_lossy(total as usize));
        let toward = |a: u32, b: u32| if b > a { a + 1 } else { a - 1 };
        let du = (cur.0 != end.0).then(|| (toward(cur.0, end.0), cur.1));
        let dv = (cur.1 != end.1).then(|| (cur.0, toward(cur.1, end.1)));
        cur = match (du, dv) {
            (Some(a), Some(b)) => {
                let da = grid.node(a.0, a.1).distance(reference);
                let db = grid.node(b.0, b.1).distance(reference);
                if db < da {
                    b
                } else {
                    a
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("step count exceeds lattice distance"),
        };
        path.push(cur);
    }
    Ok(path)
}

/// [`snap_path`] as world-space node positions.
pub fn snap_to_masonry<S: Real>(points: &[Vec3<S>], grid: &BrickGrid<S>) -> Result<Vec<Vec3<S>>, CrackError> {
    Ok(snap_path(points, grid)?
        .into_iter()
        .map(|(i, j)| grid.node(i, j))
        .collect())
}

/// Point at arc length `s` along a polyline with cumulative lengths `cum`.
pub(crate) fn point_at<S: Real>(points: &[Vec3<S>], cum: &[S], s: S) -> Vec3<S> {
    let (i, t) = locate(cum, s);
    if i + 1 >= points.len() {
        return points[points.len() - 1];
    }
    points[i].lerp(points[i + 1], t)
}

/// Segment index and local parameter for arc length `s`.
pub(crate) fn locate<S: Real>(cum: &[S], s: S) -> (usize, S) {
    if cum.len() < 2 {
        return (0, S::zero());
    }
    let i = match cum.iter().position(|&c| c > s) {
        Some(0) => return (0, S::zero()),
        Some(i) => i - 1,
        None => return (cum.len() - 2, S::one()),
    };
    let seg = cum[i + 1] - cum[i];
    let t = if seg > S::zero() { (s - cum[i]) / seg } else { S::zero() };
    (i, t.max(S::zero()).min(S::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn grid() -> BrickGrid<f64> {
        BrickGrid {
            origin: Vec3::new(0.0, 0.0, 0.0),
            u_axis: Vec3::new(1.0, 0.0, 0.0),
            v_axis: Vec3::new(0.0, 0.0, 1.0),
            brick_width: 0.24,
            brick_height: 0.065,
            mortar_width: 0.01,
            columns: 12,
            rows: 30,
        }
    }

    fn bfs(start: GridNode, end: GridNode, cols: u32, rows: u32) -> usize {
        let mut dist = HashMap::new();
        let mut q = VecDeque::from([start]);
        dist.insert(start, 0usize);
        while let Some(n) = q.pop_front() {
            if n == end {
                return dist[&n];
            }
            let d = dist[&n];
            let mut nbrs = vec![];
            if n.0 > 0 { nbrs.push((n.0 - 1, n.1)); }
            if n.0 < cols { nbrs.push((n.0 + 1, n.1)); }
            if n.1 > 0 { nbrs.push((n.0, n.1 - 1)); }
            if n.1 < rows { nbrs.push((n.0, n.1 + 1)); }
            for m in nbrs {
                dist.entry(m).or_insert_with(|| {
                    q.push_back(m);
                    d + 1
                });
            }
        }
        unreachable!()
    }

    #[test]
    fn path_is_lattice_shortest_and_on_mortar() {
        let g = grid();
        let cases = [
            (Vec3::new(0.1, 0.0, 0.2), Vec3::new(2.9, 0.0, 1.7)),
            (Vec3::new(2.5, 0.0, 2.0), Vec3::new(0.3, 0.0, 0.1)),
            (Vec3::new(1.0, 0.0, 1.0), Vec3::new(1.01, 0.0, 1.01)),
        ];
        for (a, b) in cases {
            let pts: Vec<_> = (0..=20).map(|k| a.lerp(b, k as f64 / 20.0) + Vec3::new(0.0, 0.0, (k as f64).sin() * 0.05)).collect();
            let path = snap_path(&pts, &g).unwrap();
            let s = nearest_node(&g, pts[0]).unwrap();
            let e = nearest_node(&g, pts[20]).unwrap();
            assert_eq!(path.len() - 1, bfs(s, e, g.columns, g.rows));
            for w in path.windows(2) {
                assert_eq!(w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1), 1);
            }
            for p in snap_to_masonry(&pts, &g).unwrap() {
                assert!(g.distance_to_mortar(p) <= g.mortar_width / 2.0);
            }
        }
    }

    #[test]
    fn staircase_follows_diagonal() {
        let g = grid();
        let a = g.node(0, 0);
        let b = g.node(4, 16);
        let path = snap_path(&[a, b], &g).unwrap();
        // every node stays close to the straight diagonal
        for &(i, j) in &path {
            let p = g.node(i, j);
            let t = ((p - a).dot(b - a) / (b - a).norm_squared()).clamp(0.0, 1.0);
            assert!(p.distance(a.lerp(b, t)) < g.pitch_u());
        }
    }

    #[test]
    fn endpoint_outside_grid_errors() {
        let g = grid();
        let r = snap_to_masonry(&[Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 1.0)], &g);
        assert!(matches!(r, Err(CrackError::OutsideBrickGrid { .. })));
    }

    #[test]
    fn locate_handles_ends() {
        let cum = [0.0, 1.0, 3.0];
        assert_eq!(locate(&cum, -1.0), (0, 0.0));
        assert_eq!(locate(&cum, 2.0), (1, 0.5));
        assert_eq!(locate(&cum, 5.0), (1, 1.0));
    }
}
