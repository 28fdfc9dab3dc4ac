//! Ground-truth execution, Monte-Carlo validation of the analytic success
//! probability, benchmark orchestration, and the count-based-search
//! equivalence harness.

pub mod bench;
pub mod reduction;
pub mod scenarios;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::planner::PlanResult;
use crate::scene::{sample_ground_truth, BeliefScene, GroundTruthScene};
use crate::util::{wilson_interval, Z_99};

/// Execution knobs. `count_target_collisions` only affects the reported
/// collision ids and count; whether the run *succeeds* always accounts for
/// hitting the true target.
#[derive(Clone, Copy, Debug)]
pub struct ExecOptions {
    pub resolution: f64,
    pub count_target_collisions: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self {
            resolution: crate::geometry::DEFAULT_RESOLUTION,
            count_target_collisions: true,
        }
    }
}

/// What happened when a planned path was driven through a real scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    /// Ids of truly placed objects the swept path penetrated, ascending.
    pub collided_object_ids: Vec<u32>,
    pub num_collided: usize,
    pub reached_target: bool,
    /// Reached the true target with zero collisions (target included).
    pub success: bool,
    pub path_cost: f64,
}

/// Sweeps every path segment against every truly placed object and checks
/// whether the final configuration grasps the true target.
pub fn execute_path(
    path: &[Configuration],
    gt: &GroundTruthScene,
    options: &ExecOptions,
) -> Result<ExecutionOutcome> {
    if path.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot execute an empty path".into(),
        ));
    }
    let robot = &gt.workspace.robot;
    let mut collided = Vec::new();
    let mut hit_target = false;
    for placement in &gt.placements {
        let placed = crate::geometry::PlacedShape::new(placement.shape.clone(), placement.pose);
        let mut hit = if path.len() == 1 {
            robot.collides_at(&path[0], &placed)?
        } else {
            false
        };
        if !hit {
            for pair in path.windows(2) {
                if robot.segment_collides(&pair[0], &pair[1], &placed, options.resolution)? {
                    hit = true;
                    break;
                }
            }
        }
        if hit {
            if placement.id == gt.target_id {
                hit_target = true;
                if options.count_target_collisions {
                    collided.push(placement.id);
                }
            } else {
                collided.push(placement.id);
            }
        }
    }
    collided.sort_unstable();

    let target = gt.target().expect("validated ground truth");
    let frame = gt
        .workspace
        .grasp
        .grasp_frame(&crate::geometry::PlacedShape::new(
            target.shape.clone(),
            target.pose,
        ));
    let reached_target = gt
        .workspace
        .grasp
        .reaches(robot, path.last().unwrap(), &frame)?;

    let mut path_cost = 0.0;
    for pair in path.windows(2) {
        path_cost += robot.config_distance(&pair[0], &pair[1])?;
    }

    Ok(ExecutionOutcome {
        num_collided: collided.len(),
        success: reached_target && collided.is_empty() && !hit_target,
        collided_object_ids: collided,
        reached_target,
        path_cost,
    })
}

/// Empirical validation of a plan's analytic success probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub successes: u64,
    pub empirical_success: f64,
    /// 99% binomial (Wilson) confidence interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_succ: f64,
    pub analytic_inside_ci: bool,
}

/// Samples ground truths from the belief, executes the plan against each,
/// and compares the empirical success fraction with the analytic value.
pub fn monte_carlo_success(
    plan: &PlanResult,
    scene: &BeliefScene,
    trials: u64,
    seed: u64,
    options: &ExecOptions,
) -> Result<MonteCarloReport> {
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let gt = sample_ground_truth(scene, crate::util::derive_seed(seed, "mc-trial", t));
            execute_path(&plan.path_configs, &gt, options).map(|o| u64::from(o.success))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (ci_low, ci_high) = wilson_interval(successes, trials, Z_99);
    let empirical = successes as f64 / trials as f64;
    Ok(MonteCarloReport {
        trials,
        successes,
        empirical_success: empirical,
        ci_low,
        ci_high,
        analytic_succ: plan.succ,
        analytic_inside_ci: plan.succ >= ci_low && plan.succ <= ci_high,
    })
}
