//! Bundled 2D benchmark scenes, viewed in elevation: x runs across the
//! desk, y points up, a static slab is the support surface, and the disc
//! robot approaches from the free space above. The target sits in a narrow
//! passage, in clutter, or beside an overhanging pair.
//!
//! Lengths are centimeter-scale: objects span 4 to 26 units while pose
//! noise tops out at ±3.5, so neighboring pose hypotheses of an object
//! overlap each other the way real perception candidates do.

use crate::error::{Error, Result};
use crate::geometry::{
    Bounds, Configuration, GraspParams, PlacedShape, Pose2, RobotModel, Shape, WorkspaceSpec,
};
use crate::scene::{GroundTruthScene, Placement};

pub const NAMES: [&str; 3] = ["narrow-passage", "clutter", "arch"];

fn workspace(start: [f64; 2]) -> WorkspaceSpec {
    WorkspaceSpec {
        robot: RobotModel::disc(1.2).expect("static radius"),
        bounds: Bounds::new(vec![1.0, 2.8], vec![59.0, 35.0]).expect("static bounds"),
        start: Configuration(vec![start[0], start[1]]),
        grasp: GraspParams {
            position_tolerance: 3.5,
            orientation_tolerance: 30.0_f64.to_radians(),
            standoff: 1.0,
        },
    }
}

fn table() -> PlacedShape {
    PlacedShape::new(
        Shape::rect(60.0, 1.5).expect("static shape"),
        Pose2::new(30.0, 0.75, 0.0),
    )
}

fn boxp(id: u32, w: f64, h: f64, x: f64, y: f64) -> Placement {
    Placement {
        id,
        shape: Shape::rect(w, h).expect("static shape"),
        pose: Pose2::new(x, y, 0.0),
    }
}

fn discp(id: u32, r: f64, x: f64, y: f64) -> Placement {
    Placement {
        id,
        shape: Shape::disc(r).expect("static shape"),
        pose: Pose2::new(x, y, 0.0),
    }
}

/// Target box at the bottom of a corridor between two tall walls; with
/// loose pose beliefs the walls' hypotheses squeeze the corridor shut.
fn narrow_passage() -> GroundTruthScene {
    GroundTruthScene {
        workspace: workspace([12.0, 30.0]),
        static_obstacles: vec![table()],
        placements: vec![
            boxp(0, 6.0, 6.0, 30.0, 4.5),
            boxp(1, 7.0, 16.0, 21.5, 9.5),
            boxp(2, 7.0, 16.0, 38.5, 9.5),
            discp(3, 2.5, 12.0, 4.0),
            discp(4, 2.5, 48.0, 4.0),
        ],
        target_id: 0,
    }
}

/// Target box hemmed in: tall boxes on both sides, discs beyond them,
/// leaving only a pocket from above.
fn clutter() -> GroundTruthScene {
    GroundTruthScene {
        workspace: workspace([48.0, 30.0]),
        static_obstacles: vec![table()],
        placements: vec![
            boxp(0, 6.0, 6.0, 30.0, 4.5),
            boxp(1, 5.0, 14.0, 22.5, 8.5),
            boxp(2, 5.0, 14.0, 37.5, 8.5),
            discp(3, 2.5, 15.5, 4.0),
            discp(4, 2.5, 44.5, 4.0),
            discp(5, 2.0, 52.5, 3.5),
        ],
        target_id: 0,
    }
}

/// Two pillars carrying a beam; the target sits just beyond the beam's
/// overhang, which pose noise can push over the grasp corridor.
fn arch() -> GroundTruthScene {
    GroundTruthScene {
        workspace: workspace([15.0, 30.0]),
        static_obstacles: vec![table()],
        placements: vec![
            boxp(0, 6.0, 6.0, 51.5, 4.5),
            boxp(1, 5.0, 10.0, 25.5, 6.5),
            boxp(2, 5.0, 10.0, 40.5, 6.5),
            boxp(3, 26.0, 4.0, 33.0, 13.5),
            discp(4, 2.0, 58.0, 3.5),
        ],
        target_id: 0,
    }
}

/// Looks up a bundled scene by name.
pub fn by_name(name: &str) -> Result<GroundTruthScene> {
    let gt = match name {
        "narrow-passage" => narrow_passage(),
        "clutter" => clutter(),
        "arch" => arch(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown scenario '{other}'; bundled scenarios: {}",
                NAMES.join(", ")
            )))
        }
    };
    gt.validate()?;
    Ok(gt)
}
