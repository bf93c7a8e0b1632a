use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::geometry::Vec3;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyframe<S> {
    pub position: Vec3<S>,
    pub target: Vec3<S>,
    /// Vertical field of view in degrees.
    pub fov_deg: S,
    /// Seconds from the start of the flight.
    pub time: S,
}

/// Keyframed flight sampled at a fixed frame rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraPath<S> {
    keyframes: Vec<Keyframe<S>>,
    fps: S,
    frame_count: usize,
}

impl<S: Real> CameraPath<S> {
    pub fn new(keyframes: Vec<Keyframe<S>>, fps: S, frame_count: usize) -> Result<Self, RenderError> {
        let bad = |m: String| Err(RenderError::InvalidCameraPath(m));
        if keyframes.is_empty() {
            return bad("at least one keyframe is required".into());
        }
        if !(fps > S::zero() && fps.is_finite()) {
            return bad(format!("fps must be positive, got {fps}"));
        }
        for (i, k) in keyframes.iter().enumerate() {
            if !(k.fov_deg > S::zero() && k.fov_deg < S::lit(180.0)) {
                return bad(format!("keyframe {i}: fov {} outside (0, 180)", k.fov_deg));
            }
            if !(k.position.is_finite() && k.target.is_finite() && k.time.is_finite()) {
                return bad(format!("keyframe {i}: non-finite value"));
            }
            if k.position == k.target {
                return bad(format!("keyframe {i}: position equals target"));
            }
            if i > 0 && !(k.time > keyframes[i - 1].time) {
                return bad(format!("keyframe {i}: timestamps must increase strictly"));
            }
        }
        Ok(Self {
            keyframes,
            fps,
            frame_count,
        })
    }

    pub fn keyframes(&self) -> &[Keyframe<S>] {
        &self.keyframes
    }

    pub fn fps(&self) -> S {
        self.fps
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    /// Timestamp of frame `index`.
    pub fn frame_time(&self, index: usize) -> S {
        self.keyframes[0].time + S::from_usize_lossy(index) / self.fps
    }
}

/// Camera position with an orthonormal right/up/forward basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraPose<S> {
    pub position: Vec3<S>,
    pub target: Vec3<S>,
    pub fov_deg: S,
    pub forward: Vec3<S>,
    pub right: Vec3<S>,
    pub up: Vec3<S>,
}

impl<S: Real> CameraPose<S> {
    /// Looks from `position` at `target` with +Z as world up.
    pub fn look_at(position: Vec3<S>, target: Vec3<S>, fov_deg: S) -> Self {
        let z = Vec3::new(S::zero(), S::zero(), S::one());
        let forward = (target - position).normalize_or(Vec3::new(S::zero(), S::one(), S::zero()));
        let right = forward
            .cross(z)
            .try_normalize()
            .unwrap_or_else(|| forward.cross(Vec3::new(S::zero(), S::one(), S::zero())).normalize_or(Vec3::new(S::one(), S::zero(), S::zero())));
        let up = right.cross(forward);
        Self {
            position,
            target,
            fov_deg,
            forward,
            right,
            up,
        }
    }
}

/// Pose of frame `index`: linear in position, target and fov between the
/// keyframes bracketing its timestamp, held at the last keyframe afterwards.
pub fn interpolate_camera<S: Real>(path: &CameraPath<S>, index: usize) -> Result<CameraPose<S>, RenderError> {
    if index >= path.frame_count {
        return Err(RenderError::FrameOutOfRange {
            index,
            count: path.frame_count,
        });
    }
    let t = path.frame_time(index);
    let ks = &path.keyframes;
    let i = ks.iter().rposition(|k| k.time <= t).unwrap_or(0);
    let a = &ks[i];
    if i + 1 == ks.len() || t == a.time {
        return Ok(CameraPose::look_at(a.position, a.target, a.fov_deg));
    }
    let b = &ks[i + 1];
    let alpha = (t - a.time) / (b.time - a.time);
    Ok(CameraPose::look_at(
        a.position.lerp(b.position, alpha),
        a.target.lerp(b.target, alpha),
        a.fov_deg + (b.fov_deg - a.fov_deg) * alpha,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kf(x: f64, t: f64, fov: f64) -> Keyframe<f64> {
        Keyframe {
            position: Vec3::new(x, -5.0, 1.5),
            target: Vec3::new(x, 0.0, 1.5),
            fov_deg: fov,
            time: t,
        }
    }

    #[test]
    fn single_keyframe_is_constant() {
        let p = CameraPath::new(vec![kf(1.0, 0.0, 50.0)], 10.0, 7).unwrap();
        for i in 0..7 {
            let pose = interpolate_camera(&p, i).unwrap();
            assert_eq!(pose.position, Vec3::new(1.0, -5.0, 1.5));
            assert_eq!(pose.fov_deg, 50.0);
        }
        assert!(matches!(interpolate_camera(&p, 7), Err(RenderError::FrameOutOfRange { .. })));
    }

    #[test]
    fn midpoint_is_mean_and_keyframes_exact() {
        let p = CameraPath::new(vec![kf(0.0, 0.0, 40.0), kf(2.0, 1.0, 60.0), kf(3.0, 2.0, 60.0)], 4.0, 12).unwrap();
        let mid = interpolate_camera(&p, 2).unwrap();
        assert!((mid.position.x - 1.0).abs() < 1e-12);
        assert!((mid.fov_deg - 50.0).abs() < 1e-12);
        let at = interpolate_camera(&p, 4).unwrap();
        assert_eq!(at.position, kf(2.0, 1.0, 60.0).position);
        assert_eq!(at.target, kf(2.0, 1.0, 60.0).target);
        // past the last keyframe the camera holds
        assert_eq!(interpolate_camera(&p, 11).unwrap().position.x, 3.0);
    }

    #[test]
    fn invalid_paths() {
        assert!(CameraPath::<f64>::new(vec![], 10.0, 1).is_err());
        assert!(CameraPath::new(vec![kf(0.0, 0.0, 180.0)], 10.0, 1).is_err());
        assert!(CameraPath::new(vec![kf(0.0, 1.0, 50.0), kf(1.0, 1.0, 50.0)], 10.0, 1).is_err());
        assert!(CameraPath::new(vec![kf(0.0, 0.0, 50.0)], 0.0, 1).is_err());
    }

    #[test]
    fn vertical_view_has_basis() {
        let pose: CameraPose<f64> = CameraPose::look_at(Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, 0.0), 60.0);
        assert!((pose.right.norm() - 1.0).abs() < 1e-12);
        assert!(pose.right.dot(pose.forward).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn basis_is_orthonormal(p in prop::array::uniform3(-10.0f64..10.0), q in prop::array::uniform3(-10.0f64..10.0)) {
            let (p, q) = (Vec3::new(p[0], p[1], p[2]), Vec3::new(q[0], q[1], q[2]));
            prop_assume!(p.distance(q) > 1e-3);
            let c = CameraPose::look_at(p, q, 45.0);
            for v in [c.forward, c.right, c.up] {
                prop_assert!((v.norm() - 1.0).abs() < 1e-9);
            }
            prop_assert!(c.forward.dot(c.right).abs() < 1e-9);
            prop_assert!(c.forward.dot(c.up).abs() < 1e-9);
            prop_assert!(c.up.z >= -1e-9);
        }
    }
}
