//! 2D workspace geometry: poses, shapes, robot kinematics, and the exact /
//! swept collision predicates behind edge labeling and path execution.
//!
//! The workspace is a vertical plane (x across, y up); objects rest on a
//! static support and the robot approaches from free space above. All
//! predicates are pure functions over immutable values and safe to call
//! from any number of worker threads.
//!
//! Collision is strict penetration: tangent contact does not count. This
//! keeps grasp configurations that touch an object's top surface free.

mod robot;
mod shapes;

pub use robot::{GraspParams, RobotModel, WorkspaceSpec, DEFAULT_RESOLUTION, INJECT_CLEARANCE};
pub use shapes::{shapes_collide, PlacedShape, Shape};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into the canonical interval (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % std::f64::consts::TAU;
    if r <= -std::f64::consts::PI {
        r += std::f64::consts::TAU;
    } else if r > std::f64::consts::PI {
        r -= std::f64::consts::TAU;
    }
    r
}

/// Signed shortest-arc difference `a - b`, wrapped into (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// A planar pose: position plus orientation, theta wrapped to (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPose2")]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
struct RawPose2 {
    x: f64,
    y: f64,
    theta: f64,
}

impl From<RawPose2> for Pose2 {
    fn from(r: RawPose2) -> Self {
        Pose2::new(r.x, r.y, r.theta)
    }
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    /// Applies this pose to a local point: rotate by theta, then translate.
    pub fn transform(&self, px: f64, py: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (self.x + c * px - s * py, self.y + s * px + c * py)
    }

    pub fn position_distance(&self, other: &Pose2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn rotation_distance(&self, other: &Pose2) -> f64 {
        angle_diff(self.theta, other.theta).abs()
    }
}

/// A robot configuration: (x, y) for the disc robot, joint angles for the arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<f64>);

impl Configuration {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-dimension sampling ranges for roadmap construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidArgument(
                "bounds lo/hi length mismatch".into(),
            ));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Err(Error::InvalidArgument(
                "bounds must satisfy lo < hi in every dimension".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, q: &Configuration) -> bool {
        q.dim() == self.dim()
            && q.0
                .iter()
                .enumerate()
                .all(|(i, v)| *v >= self.lo[i] && *v <= self.hi[i])
    }
}
