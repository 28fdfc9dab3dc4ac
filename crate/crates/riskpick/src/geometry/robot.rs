//! Robot models, forward kinematics, configuration-space metrics, and the
//! swept-segment collision check used for edge labeling and path execution.

use serde::{Deserialize, Serialize};

use super::{angle_diff, wrap_angle, Bounds, Configuration, PlacedShape, Pose2, Shape};
use crate::error::{Error, Result};

/// Default configuration-space step for swept collision checks.
pub const DEFAULT_RESOLUTION: f64 = 0.05;

/// Clearance added above a grasp frame when injecting exact goal
/// configurations, so the end effector rests tangent, not in contact.
pub const INJECT_CLEARANCE: f64 = 1e-2;

/// The robot: either a free-flying disc or a planar revolute arm whose links
/// are rectangles of a common width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobotModel {
    DiscRobot {
        radius: f64,
    },
    PlanarArm {
        base: [f64; 2],
        link_lengths: Vec<f64>,
        link_width: f64,
    },
}

impl RobotModel {
    pub fn disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidRobot(format!(
                "disc robot radius must be positive, got {radius}"
            )));
        }
        Ok(RobotModel::DiscRobot { radius })
    }

    pub fn planar_arm(base: [f64; 2], link_lengths: Vec<f64>, link_width: f64) -> Result<Self> {
        if link_lengths.is_empty() {
            return Err(Error::InvalidRobot("arm needs at least one link".into()));
        }
        if link_lengths.iter().any(|l| !(*l > 0.0)) || !(link_width > 0.0) {
            return Err(Error::InvalidRobot(
                "link lengths and width must be positive".into(),
            ));
        }
        Ok(RobotModel::PlanarArm {
            base,
            link_lengths,
            link_width,
        })
    }

    /// Configuration-space dimension: 2 for the disc, one per link for the arm.
    pub fn dof(&self) -> usize {
        match self {
            RobotModel::DiscRobot { .. } => 2,
            RobotModel::PlanarArm { link_lengths, .. } => link_lengths.len(),
        }
    }

    /// Whether the end-effector frame carries a meaningful orientation.
    ///
    /// The disc robot is rotationally symmetric, so grasp checks against it
    /// compare positions only.
    pub fn oriented_end_effector(&self) -> bool {
        matches!(self, RobotModel::PlanarArm { .. })
    }

    fn check_dim(&self, q: &Configuration) -> Result<()> {
        if q.dim() != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: q.dim(),
            });
        }
        Ok(())
    }

    /// Indices of configuration components that live on the circle.
    fn is_angular(&self, _component: usize) -> bool {
        matches!(self, RobotModel::PlanarArm { .. })
    }

    /// Wraps angular components into (-pi, pi].
    pub fn canonicalize(&self, q: &Configuration) -> Configuration {
        Configuration(
            q.0.iter()
                .enumerate()
                .map(|(i, v)| {
                    if self.is_angular(i) {
                        wrap_angle(*v)
                    } else {
                        *v
                    }
                })
                .collect(),
        )
    }

    /// World-frame body shapes plus the end-effector frame.
    ///
    /// For the arm the end effector is the tip of the last link with the
    /// accumulated link orientation; for the disc it is the disc center.
    pub fn forward_kinematics(&self, q: &Configuration) -> Result<(Vec<PlacedShape>, Pose2)> {
        self.check_dim(q)?;
        match self {
            RobotModel::DiscRobot { radius } => {
                let pose = Pose2::new(q.0[0], q.0[1], 0.0);
                Ok((
                    vec![PlacedShape::new(Shape::Disc { radius: *radius }, pose)],
                    pose,
                ))
            }
            RobotModel::PlanarArm {
                base,
                link_lengths,
                link_width,
            } => {
                let mut bodies = Vec::with_capacity(link_lengths.len());
                let (mut px, mut py) = (base[0], base[1]);
                let mut theta = 0.0;
                for (len, joint) in link_lengths.iter().zip(&q.0) {
                    theta = wrap_angle(theta + joint);
                    let (s, c) = theta.sin_cos();
                    let (nx, ny) = (px + c * len, py + s * len);
                    bodies.push(link_rectangle(px, py, nx, ny, *link_width));
                    px = nx;
                    py = ny;
                }
                Ok((bodies, Pose2::new(px, py, theta)))
            }
        }
    }

    /// End-effector frame only.
    pub fn end_effector(&self, q: &Configuration) -> Result<Pose2> {
        Ok(self.forward_kinematics(q)?.1)
    }

    /// True iff any robot body penetrates the placed obstacle at `q`.
    pub fn collides_at(&self, q: &Configuration, obstacle: &PlacedShape) -> Result<bool> {
        let (bodies, _) = self.forward_kinematics(q)?;
        Ok(bodies.iter().any(|b| super::shapes_collide(b, obstacle)))
    }

    /// Configuration-space distance: Euclidean, angular components on the
    /// shortest arc.
    pub fn config_distance(&self, q1: &Configuration, q2: &Configuration) -> Result<f64> {
        self.check_dim(q1)?;
        self.check_dim(q2)?;
        let mut sum = 0.0;
        for (i, (a, b)) in q1.0.iter().zip(&q2.0).enumerate() {
            let d = if self.is_angular(i) {
                angle_diff(*a, *b)
            } else {
                a - b
            };
            sum += d * d;
        }
        Ok(sum.sqrt())
    }

    /// Point at parameter `t` in [0,1] along the straight configuration-space
    /// segment, angular components following the shortest arc.
    pub fn interpolate(&self, q1: &Configuration, q2: &Configuration, t: f64) -> Configuration {
        Configuration(
            q1.0.iter()
                .zip(&q2.0)
                .enumerate()
                .map(|(i, (a, b))| {
                    if self.is_angular(i) {
                        wrap_angle(a + t * angle_diff(*b, *a))
                    } else {
                        a + t * (b - a)
                    }
                })
                .collect(),
        )
    }

    /// Swept collision check along q1 -> q2, endpoints included.
    ///
    /// The segment is subdivided into 2^k equal steps with step length at
    /// most `resolution`, so a finer resolution always samples a superset of
    /// a coarser one and a collision found coarse is never lost by refining.
    pub fn segment_collides(
        &self,
        q1: &Configuration,
        q2: &Configuration,
        obstacle: &PlacedShape,
        resolution: f64,
    ) -> Result<bool> {
        if !(resolution > 0.0) {
            return Err(Error::InvalidArgument(
                "segment resolution must be positive".into(),
            ));
        }
        let dist = self.config_distance(q1, q2)?;
        if self.sweep_clear_of(q1, q2, obstacle)? {
            return Ok(false);
        }
        let steps = pow2_steps(dist, resolution);
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            if self.collides_at(&self.interpolate(q1, q2, t), obstacle)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Conservative separation bound: true only when no configuration on
    /// the segment can touch the obstacle, by bounding-disc containment.
    fn sweep_clear_of(
        &self,
        q1: &Configuration,
        q2: &Configuration,
        obstacle: &PlacedShape,
    ) -> Result<bool> {
        let bound = obstacle.outer_radius();
        let (ox, oy) = (obstacle.pose.x, obstacle.pose.y);
        match self {
            RobotModel::DiscRobot { radius } => {
                self.check_dim(q1)?;
                self.check_dim(q2)?;
                let d = segment_point_distance(q1.0[0], q1.0[1], q2.0[0], q2.0[1], ox, oy);
                Ok(d >= radius + bound)
            }
            RobotModel::PlanarArm {
                base,
                link_lengths,
                link_width,
            } => {
                // Every body stays inside the reach disc around the base.
                let reach: f64 = link_lengths.iter().sum::<f64>() + link_width / 2.0;
                let d = (base[0] - ox).hypot(base[1] - oy);
                Ok(d >= reach + bound)
            }
        }
    }
}

fn segment_point_distance(x1: f64, y1: f64, x2: f64, y2: f64, px: f64, py: f64) -> f64 {
    let (dx, dy) = (x2 - x1, y2 - y1);
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq > 0.0 {
        (((px - x1) * dx + (py - y1) * dy) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (px - (x1 + t * dx)).hypot(py - (y1 + t * dy))
}

/// Smallest power of two with `dist / steps <= resolution`.
fn pow2_steps(dist: f64, resolution: f64) -> u64 {
    let needed = (dist / resolution).max(1.0);
    let mut steps: u64 = 1;
    while (steps as f64) < needed && steps < (1 << 30) {
        steps <<= 1;
    }
    steps
}

/// Rectangle along the segment (x1,y1)-(x2,y2) with the given width,
/// expressed as a CCW convex polygon in world coordinates.
fn link_rectangle(x1: f64, y1: f64, x2: f64, y2: f64, width: f64) -> PlacedShape {
    let (dx, dy) = (x2 - x1, y2 - y1);
    let len = dx.hypot(dy).max(1e-12);
    let (nx, ny) = (-dy / len * width / 2.0, dx / len * width / 2.0);
    let vertices = vec![
        [x1 - nx, y1 - ny],
        [x2 - nx, y2 - ny],
        [x2 + nx, y2 + ny],
        [x1 + nx, y1 + ny],
    ];
    PlacedShape::new(Shape::ConvexPolygon { vertices }, Pose2::new(0.0, 0.0, 0.0))
}

/// Grasp model: the end effector must come within `position_tolerance` of a
/// grasp frame (and within `orientation_tolerance` for oriented robots).
/// The frame sits `standoff` above the object's top.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspParams {
    pub position_tolerance: f64,
    /// Radians; only applied to robots with an oriented end effector.
    pub orientation_tolerance: f64,
    /// Vertical clearance between the object top and the grasp frame.
    pub standoff: f64,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            position_tolerance: 0.1,
            orientation_tolerance: 30.0_f64.to_radians(),
            standoff: 0.0,
        }
    }
}

impl GraspParams {
    /// Grasp frame for a placed object: top-center lifted by the standoff.
    pub fn grasp_frame(&self, object: &PlacedShape) -> Pose2 {
        Pose2::new(
            object.pose.x,
            object.top_y() + self.standoff,
            object.pose.theta,
        )
    }

    /// Whether a configuration's end effector reaches the grasp frame.
    pub fn reaches(&self, robot: &RobotModel, q: &Configuration, frame: &Pose2) -> Result<bool> {
        let ee = robot.end_effector(q)?;
        let pos_ok = ee.position_distance(frame) <= self.position_tolerance;
        if !robot.oriented_end_effector() {
            return Ok(pos_ok);
        }
        Ok(pos_ok && ee.rotation_distance(frame) <= self.orientation_tolerance)
    }

    /// Exact grasp configuration for the disc robot: the end effector rests
    /// just above the frame, tangent to the object below.
    pub fn grasp_configuration(&self, robot: &RobotModel, frame: &Pose2) -> Result<Configuration> {
        match robot {
            RobotModel::DiscRobot { radius } => Ok(Configuration(vec![
                frame.x,
                frame.y + radius + INJECT_CLEARANCE,
            ])),
            RobotModel::PlanarArm { .. } => Err(Error::InvalidArgument(
                "goal injection is only implemented for the disc robot".into(),
            )),
        }
    }
}

/// Workspace context shared by scenes, roadmaps, and execution: the robot,
/// its sampling bounds, the start configuration, and the grasp model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceSpec {
    pub robot: RobotModel,
    pub bounds: Bounds,
    pub start: Configuration,
    pub grasp: GraspParams,
}

impl WorkspaceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bounds.dim() != self.robot.dof() {
            return Err(Error::InvalidArgument(format!(
                "bounds dimension {} does not match robot dof {}",
                self.bounds.dim(),
                self.robot.dof()
            )));
        }
        if self.start.dim() != self.robot.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.robot.dof(),
                got: self.start.dim(),
            });
        }
        Ok(())
    }
}
