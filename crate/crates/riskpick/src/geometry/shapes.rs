//! Planar shapes and exact collision predicates (disc-disc, disc-polygon,
//! polygon-polygon via separating axes). Overlap is strict: two bodies that
//! merely touch are not in collision.

use serde::{Deserialize, Serialize};

use super::Pose2;
use crate::error::{Error, Result};

/// A planar collision shape expressed in its own local frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Disc {
        radius: f64,
    },
    /// Convex polygon, vertices counter-clockwise in the local frame.
    ConvexPolygon {
        vertices: Vec<[f64; 2]>,
    },
}

impl Shape {
    pub fn disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidShape(format!(
                "disc radius must be positive, got {radius}"
            )));
        }
        Ok(Shape::Disc { radius })
    }

    pub fn convex_polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidShape(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross < -1e-9 {
                return Err(Error::InvalidShape(
                    "polygon must be convex and counter-clockwise".into(),
                ));
            }
            area2 += a[0] * b[1] - b[0] * a[1];
        }
        if area2 <= 0.0 {
            return Err(Error::InvalidShape("polygon has non-positive area".into()));
        }
        Ok(Shape::ConvexPolygon { vertices })
    }

    /// Axis-aligned box centered on the local origin; convenience constructor.
    pub fn rect(width: f64, height: f64) -> Result<Self> {
        let (hw, hh) = (width / 2.0, height / 2.0);
        Self::convex_polygon(vec![[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Disc { radius } => {
                Shape::disc(*radius)?;
            }
            Shape::ConvexPolygon { vertices } => {
                Shape::convex_polygon(vertices.clone())?;
            }
        }
        Ok(())
    }

    /// Radius of the smallest origin-centered disc containing the shape.
    pub fn outer_radius(&self) -> f64 {
        match self {
            Shape::Disc { radius } => *radius,
            Shape::ConvexPolygon { vertices } => vertices
                .iter()
                .map(|v| v[0].hypot(v[1]))
                .fold(0.0, f64::max),
        }
    }
}

/// A shape placed at a world pose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedShape {
    pub shape: Shape,
    pub pose: Pose2,
}

impl PlacedShape {
    pub fn new(shape: Shape, pose: Pose2) -> Self {
        Self { shape, pose }
    }

    /// World-frame vertices for polygons; discs have none.
    fn world_vertices(&self) -> Option<Vec<(f64, f64)>> {
        match &self.shape {
            Shape::Disc { .. } => None,
            Shape::ConvexPolygon { vertices } => Some(
                vertices
                    .iter()
                    .map(|v| self.pose.transform(v[0], v[1]))
                    .collect(),
            ),
        }
    }

    /// Radius of the smallest disc around the pose origin containing the
    /// shape; rotation-invariant.
    pub fn outer_radius(&self) -> f64 {
        self.shape.outer_radius()
    }

    /// Highest world y coordinate reached by the placed shape.
    pub fn top_y(&self) -> f64 {
        match &self.shape {
            Shape::Disc { radius } => self.pose.y + radius,
            Shape::ConvexPolygon { .. } => self
                .world_vertices()
                .unwrap()
                .iter()
                .map(|v| v.1)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Strict-penetration collision test between two placed shapes.
///
/// Symmetric in its arguments; tangent contact reports false.
pub fn shapes_collide(a: &PlacedShape, b: &PlacedShape) -> bool {
    match (&a.shape, &b.shape) {
        (Shape::Disc { radius: ra }, Shape::Disc { radius: rb }) => {
            let dx = a.pose.x - b.pose.x;
            let dy = a.pose.y - b.pose.y;
            dx * dx + dy * dy < (ra + rb) * (ra + rb)
        }
        (Shape::Disc { radius }, Shape::ConvexPolygon { .. }) => {
            disc_polygon(a.pose.x, a.pose.y, *radius, &b.world_vertices().unwrap())
        }
        (Shape::ConvexPolygon { .. }, Shape::Disc { radius }) => {
            disc_polygon(b.pose.x, b.pose.y, *radius, &a.world_vertices().unwrap())
        }
        (Shape::ConvexPolygon { .. }, Shape::ConvexPolygon { .. }) => {
            polygons_overlap_sat(&a.world_vertices().unwrap(), &b.world_vertices().unwrap())
        }
    }
}

/// Squared distance from a point to a convex polygon (zero inside).
fn point_polygon_dist_sq(px: f64, py: f64, poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        let (ex, ey) = (x2 - x1, y2 - y1);
        // CCW polygon: interior is to the left of every edge.
        if ex * (py - y1) - ey * (px - x1) < 0.0 {
            inside = false;
        }
        let len_sq = ex * ex + ey * ey;
        let t = if len_sq > 0.0 {
            (((px - x1) * ex + (py - y1) * ey) / len_sq).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (cx, cy) = (x1 + t * ex, y1 + t * ey);
        let d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        best = best.min(d);
    }
    if inside {
        0.0
    } else {
        best
    }
}

fn disc_polygon(cx: f64, cy: f64, r: f64, poly: &[(f64, f64)]) -> bool {
    point_polygon_dist_sq(cx, cy, poly) < r * r
}

/// Separating axis test over the edge normals of both polygons.
fn polygons_overlap_sat(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    fn axes(poly: &[(f64, f64)]) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..poly.len()).map(move |i| {
            let (x1, y1) = poly[i];
            let (x2, y2) = poly[(i + 1) % poly.len()];
            (y2 - y1, x1 - x2)
        })
    }
    fn project(poly: &[(f64, f64)], axis: (f64, f64)) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(x, y) in poly {
            let d = x * axis.0 + y * axis.1;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }
    for axis in axes(a).chain(axes(b)) {
        let (lo_a, hi_a) = project(a, axis);
        let (lo_b, hi_b) = project(b, axis);
        // Touching intervals count as separated (strict penetration only).
        if hi_a <= lo_b || hi_b <= lo_a {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn placed(shape: Shape, x: f64, y: f64, theta: f64) -> PlacedShape {
        PlacedShape::new(shape, Pose2::new(x, y, theta))
    }

    #[test]
    fn disc_disc_gap_and_overlap() {
        let a = placed(Shape::disc(1.0).unwrap(), 0.0, 0.0, 0.0);
        // Gap of 1 between boundaries.
        assert!(!shapes_collide(
            &a,
            &placed(Shape::disc(1.0).unwrap(), 3.0, 0.0, 0.0)
        ));
        // Center distance 1.5 < 2.
        assert!(shapes_collide(
            &a,
            &placed(Shape::disc(1.0).unwrap(), 1.5, 0.0, 0.0)
        ));
        // Exactly tangent: strict test says free.
        assert!(!shapes_collide(
            &a,
            &placed(Shape::disc(1.0).unwrap(), 2.0, 0.0, 0.0)
        ));
    }

    #[test]
    fn unit_squares_offset_half_overlap() {
        // Separating-axis oracle: axis-aligned unit squares; on both the x and
        // y axes the projections [−0.5,0.5] and [0,1] overlap, so SAT reports
        // a collision.
        let a = placed(Shape::rect(1.0, 1.0).unwrap(), 0.0, 0.0, 0.0);
        let b = placed(Shape::rect(1.0, 1.0).unwrap(), 0.5, 0.5, 0.0);
        assert!(shapes_collide(&a, &b));
        // Touching edge-to-edge is free.
        let c = placed(Shape::rect(1.0, 1.0).unwrap(), 1.0, 0.0, 0.0);
        assert!(!shapes_collide(&a, &c));
        // Clearly separated.
        let d = placed(Shape::rect(1.0, 1.0).unwrap(), 3.0, 3.0, 0.0);
        assert!(!shapes_collide(&a, &d));
    }

    #[test]
    fn disc_polygon_inside_and_near() {
        let sq = placed(Shape::rect(2.0, 2.0).unwrap(), 0.0, 0.0, 0.0);
        assert!(shapes_collide(
            &placed(Shape::disc(0.1).unwrap(), 0.0, 0.0, 0.0),
            &sq
        ));
        assert!(shapes_collide(
            &placed(Shape::disc(0.5).unwrap(), 1.3, 0.0, 0.0),
            &sq
        ));
        assert!(!shapes_collide(
            &placed(Shape::disc(0.5).unwrap(), 1.6, 0.0, 0.0),
            &sq
        ));
        // Tangent to the face.
        assert!(!shapes_collide(
            &placed(Shape::disc(0.5).unwrap(), 1.5, 0.0, 0.0),
            &sq
        ));
    }

    #[test]
    fn rotated_polygon_overlap() {
        let a = placed(Shape::rect(2.0, 2.0).unwrap(), 0.0, 0.0, 0.0);
        let b = placed(
            Shape::rect(2.0, 2.0).unwrap(),
            2.2,
            0.0,
            std::f64::consts::FRAC_PI_4,
        );
        // Rotated square's corner reaches sqrt(2) from its center: 2.2 - 1.414 < 1.
        assert!(shapes_collide(&a, &b));
        let c = placed(
            Shape::rect(2.0, 2.0).unwrap(),
            2.5,
            0.0,
            std::f64::consts::FRAC_PI_4,
        );
        assert!(!shapes_collide(&a, &c));
    }

    #[test]
    fn polygon_validation_rejects_bad_input() {
        assert!(Shape::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        // Clockwise square.
        assert!(
            Shape::convex_polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err()
        );
        // Non-convex chevron.
        assert!(Shape::convex_polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [1.0, 0.5],
            [2.0, 2.0],
            [0.0, 2.0]
        ])
        .is_err());
        assert!(Shape::disc(0.0).is_err());
        assert!(Shape::disc(-1.0).is_err());
    }

    #[test]
    fn top_y_accounts_for_rotation() {
        let flat = placed(Shape::rect(4.0, 2.0).unwrap(), 0.0, 0.0, 0.0);
        assert!((flat.top_y() - 1.0).abs() < 1e-12);
        let tilted = placed(
            Shape::rect(4.0, 2.0).unwrap(),
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_2,
        );
        assert!((tilted.top_y() - 2.0).abs() < 1e-12);
        let d = placed(Shape::disc(0.7).unwrap(), 1.0, 2.0, 0.3);
        assert!((d.top_y() - 2.7).abs() < 1e-12);
    }
}
