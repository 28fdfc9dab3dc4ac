//! The search family over labeled roadmaps, and the probability model it
//! maximizes.
//!
//! A path that carries label (i, j) collides with object i if that object
//! really sits at hypothesis j. Hypotheses of one object are mutually
//! exclusive, so the path survives object i with probability one minus the
//! sum of the carried weights of i's hypotheses, and survives the scene
//! with the product over objects. Carried target labels instead shrink the
//! set of target hypotheses the path can still pick, and with it the
//! probability that the final grasp reaches the true target. The planning
//! objective is the product of the two: survive everything and pick right.
//!
//! Planners:
//! - `max-success-exact`: best-first on that product, storing per node an
//!   antichain of pairwise subset-incomparable label sets (a path whose
//!   label set is a superset of a stored one can never do better).
//! - `max-success-greedy`: same search, one record per node and goal flag.
//! - `mcr-exact` / `mcr-greedy`: minimize the number of distinct pose
//!   labels crossed, ignoring probabilities; any goal node is acceptable.
//! - `mcr-mlc`: as `mcr-exact` after reducing every object to its single
//!   most likely hypothesis.
//! - `osp`: shortest path by length, ignoring the uncertain objects.

mod baselines;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::roadmap::{GoalSpec, LabelSet, LabeledRoadmap};
use crate::scene::{BeliefScene, PROB_TOLERANCE};

/// Slack for floating-point monotonicity checks during search.
pub(crate) const SUCC_EPS: f64 = 1e-12;

/// Prevalidated, flat view of a scene's probabilities, aligned with a
/// roadmap's dense label indices.
#[derive(Clone, Debug)]
pub struct SceneView {
    weights: Vec<f64>,
    object_of: Vec<u32>,
    target_start: usize,
    target_len: usize,
    target_total: f64,
}

impl SceneView {
    pub fn new(rm: &LabeledRoadmap, scene: &BeliefScene) -> Result<Self> {
        rm.validate_against(scene)?;
        let table = &rm.labels;
        if table.target_hypothesis_count() == 0 {
            return Err(Error::InvalidScene(
                "scene target has no pose hypotheses".into(),
            ));
        }
        let mut weights = Vec::with_capacity(table.len());
        let mut object_of = Vec::with_capacity(table.len());
        for e in table.entries() {
            if !(e.weight > 0.0) {
                return Err(Error::InvariantViolation(format!(
                    "label ({}, {}) has non-positive weight {}",
                    e.object_id, e.hyp_index, e.weight
                )));
            }
            weights.push(e.weight);
            object_of.push(e.object_id);
        }
        for (id, start, count) in table.object_ranges() {
            let sum: f64 = weights[*start..start + count].iter().sum();
            if sum > 1.0 + PROB_TOLERANCE {
                return Err(Error::InvariantViolation(format!(
                    "object {id}: hypothesis weights sum to {sum} > 1"
                )));
            }
        }
        let mut target_start = 0;
        let mut target_len = 0;
        for (i, e) in table.entries().iter().enumerate() {
            if e.is_target {
                if target_len == 0 {
                    target_start = i;
                }
                target_len += 1;
            }
        }
        let target_total = weights[target_start..target_start + target_len]
            .iter()
            .sum();
        Ok(Self {
            weights,
            object_of,
            target_start,
            target_len,
            target_total,
        })
    }

    #[inline]
    fn is_target_dense(&self, dense: usize) -> bool {
        dense >= self.target_start && dense < self.target_start + self.target_len
    }

    pub fn target_hypothesis_count(&self) -> usize {
        self.target_len
    }

    /// Total probability mass over target hypotheses (the target's X).
    pub fn target_total(&self) -> f64 {
        self.target_total
    }

    /// Probability that a path carrying these labels collides with nothing:
    /// the product over objects of one minus the summed carried weights.
    /// Target labels are excluded; they act through reachability instead.
    pub fn survivability(&self, labels: &LabelSet) -> f64 {
        let mut product: f64 = 1.0;
        let mut run_object = u32::MAX;
        let mut run_sum: f64 = 0.0;
        for dense in labels.iter() {
            if self.is_target_dense(dense) {
                continue;
            }
            let object = self.object_of[dense];
            if object != run_object {
                product *= (1.0 - run_sum).max(0.0);
                run_object = object;
                run_sum = 0.0;
            }
            run_sum += self.weights[dense];
        }
        product * (1.0 - run_sum).max(0.0)
    }

    /// Probability mass of target hypotheses the path has not intersected.
    /// Clamped to [0,1]: normalization leaves sums exact only to rounding.
    pub fn reach_nongoal(&self, labels: &LabelSet) -> f64 {
        let mut reach = self.target_total;
        for dense in self.target_start..self.target_start + self.target_len {
            if labels.contains(dense) {
                reach -= self.weights[dense];
            }
        }
        reach.clamp(0.0, 1.0)
    }

    /// Probability mass of the goal's pickable hypotheses that the path has
    /// not intersected.
    pub fn reach_goal(&self, labels: &LabelSet, goal: &GoalSpec) -> f64 {
        let mut reach = 0.0;
        for &j in &goal.j {
            let dense = self.target_start + j as usize;
            debug_assert!(dense < self.target_start + self.target_len);
            if !labels.contains(dense) {
                reach += self.weights[dense];
            }
        }
        reach.clamp(0.0, 1.0)
    }

    /// Target hypothesis indices a path carrying these labels can still
    /// reach.
    pub fn remaining_targets(&self, labels: &LabelSet) -> Vec<u32> {
        (0..self.target_len)
            .filter(|j| !labels.contains(self.target_start + j))
            .map(|j| j as u32)
            .collect()
    }
}

/// Survivability of a label set against a scene view.
pub fn survivability(labels: &LabelSet, view: &SceneView) -> f64 {
    view.survivability(labels)
}

/// Probability the path still leads to the true target: summed over the
/// goal's uncarried pickable hypotheses when a goal is given, over all
/// uncarried target hypotheses otherwise.
pub fn reach_probability(labels: &LabelSet, view: &SceneView, goal: Option<&GoalSpec>) -> f64 {
    match goal {
        Some(g) => view.reach_goal(labels, g),
        None => view.reach_nongoal(labels),
    }
}

/// Planner selection by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Planner {
    MaxSuccessExact,
    MaxSuccessGreedy,
    McrExact,
    McrGreedy,
    McrMlc,
    Osp,
}

impl Planner {
    pub const ALL: [Planner; 6] = [
        Planner::MaxSuccessExact,
        Planner::MaxSuccessGreedy,
        Planner::McrExact,
        Planner::McrGreedy,
        Planner::McrMlc,
        Planner::Osp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Planner::MaxSuccessExact => "max-success-exact",
            Planner::MaxSuccessGreedy => "max-success-greedy",
            Planner::McrExact => "mcr-exact",
            Planner::McrGreedy => "mcr-greedy",
            Planner::McrMlc => "mcr-mlc",
            Planner::Osp => "osp",
        }
    }
}

impl std::fmt::Display for Planner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Planner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Planner::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown planner '{s}'; expected one of {}",
                    Planner::ALL.map(|p| p.name()).join(" | ")
                ))
            })
    }
}

/// How stored label sets prune new arrivals at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominanceMode {
    /// Discard an arrival whose label set is a superset of (or equal to) a
    /// stored one; storing a set evicts its stored strict supersets.
    Superset,
    /// Diagnostic mode: only exact duplicates are discarded.
    ExactDuplicate,
}

/// Search tuning knobs.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub dominance: DominanceMode,
    /// Verify bounds and monotonicity of every record while searching.
    pub check_invariants: bool,
    /// Abort with an error beyond this many stored records.
    pub max_records: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            dominance: DominanceMode::Superset,
            check_invariants: false,
            max_records: 10_000_000,
        }
    }
}

/// Search effort counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: u64,
    pub records_stored: u64,
    pub wall_time_s: f64,
}

/// A finished plan with its full success decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub planner: Planner,
    /// Node indices from start to goal.
    pub path: Vec<u32>,
    /// The same path as configurations, so a plan file stands alone.
    pub path_configs: Vec<Configuration>,
    /// Carried labels as canonical (object id, hypothesis index) pairs.
    pub labels: Vec<(u32, u32)>,
    pub survivability: f64,
    pub reach: f64,
    pub succ: f64,
    pub cost: f64,
    pub stats: SearchStats,
}

/// Runs the named planner.
pub fn plan(
    planner: Planner,
    rm: &LabeledRoadmap,
    scene: &BeliefScene,
    options: &SearchOptions,
) -> Result<PlanResult> {
    if rm.goals.is_empty() {
        return Err(Error::NoGoals);
    }
    let view = SceneView::new(rm, scene)?;
    match planner {
        Planner::MaxSuccessExact => search::max_success(rm, &view, options, true),
        Planner::MaxSuccessGreedy => search::max_success(rm, &view, options, false),
        Planner::McrExact => baselines::mcr(rm, &view, options, true, None),
        Planner::McrGreedy => baselines::mcr(rm, &view, options, false, None),
        Planner::McrMlc => baselines::mcr_most_likely(rm, &view, options),
        Planner::Osp => baselines::osp(rm, &view),
    }
}

/// Union of edge labels, total length, and the edges of a node path.
pub(crate) fn walk_path(rm: &LabeledRoadmap, path: &[u32]) -> Result<(LabelSet, f64)> {
    let mut labels = LabelSet::EMPTY;
    let mut cost = 0.0;
    for pair in path.windows(2) {
        let edge = rm
            .adjacency(pair[0])
            .iter()
            .map(|&e| &rm.edges[e as usize])
            .find(|e| e.a == pair[1] || e.b == pair[1])
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "path nodes {} and {} are not adjacent",
                    pair[0], pair[1]
                ))
            })?;
        labels = labels.union(&edge.labels);
        cost += edge.length;
    }
    Ok((labels, cost))
}

/// Builds a `PlanResult` for a finished node path by re-deriving the full
/// decomposition from the roadmap's labels, using the goal spec of the
/// final node.
pub(crate) fn finish_plan(
    planner: Planner,
    rm: &LabeledRoadmap,
    view: &SceneView,
    path: Vec<u32>,
    stats: SearchStats,
) -> Result<PlanResult> {
    let (labels, cost) = walk_path(rm, &path)?;
    let last = *path.last().expect("non-empty path");
    let goal = rm
        .goal_spec(last)
        .ok_or_else(|| Error::InvalidArgument("path does not end at a goal".into()))?;
    let s = view.survivability(&labels);
    let reach = view.reach_goal(&labels, goal);
    let path_configs = path.iter().map(|&n| rm.nodes[n as usize].clone()).collect();
    Ok(PlanResult {
        planner,
        labels: rm.labels.pairs(&labels),
        path,
        path_configs,
        survivability: s,
        reach,
        succ: s * reach,
        cost,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bounds, GraspParams, Pose2, RobotModel, Shape, WorkspaceSpec};
    use crate::roadmap::{LabelTable, LabeledEdge};
    use crate::scene::{Hypothesis, ObjectBelief};

    #[test]
    fn planner_names_round_trip() {
        for p in Planner::ALL {
            assert_eq!(p.name().parse::<Planner>().unwrap(), p);
        }
        assert!("dijkstra".parse::<Planner>().is_err());
        assert_eq!(Planner::McrMlc.to_string(), "mcr-mlc");
        assert_eq!(
            serde_json::to_string(&Planner::MaxSuccessExact).unwrap(),
            "\"max-success-exact\""
        );
    }

    /// Abstract two-node roadmap whose geometry never matters; only label
    /// weights and target probabilities do.
    fn view_for(objects: Vec<(u32, Vec<f64>)>, target: u32) -> (LabeledRoadmap, BeliefScene) {
        let workspace = WorkspaceSpec {
            robot: RobotModel::disc(0.1).unwrap(),
            bounds: Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            start: Configuration(vec![0.5, 0.5]),
            grasp: GraspParams::default(),
        };
        let beliefs = objects
            .into_iter()
            .map(|(id, probs)| ObjectBelief {
                id,
                shape: Shape::Disc { radius: 0.1 },
                existence_prob: probs.iter().sum(),
                hypotheses: probs
                    .iter()
                    .enumerate()
                    .map(|(j, p)| Hypothesis {
                        pose: Pose2::new(f64::from(id) * 100.0 + j as f64, 0.0, 0.0),
                        prob: *p,
                    })
                    .collect(),
            })
            .collect();
        let scene = BeliefScene::new_relaxed_target(workspace, vec![], beliefs, target).unwrap();
        let table = LabelTable::from_scene(&scene).unwrap();
        let rm = LabeledRoadmap::assemble(
            vec![Configuration(vec![0.0, 0.0]), Configuration(vec![1.0, 1.0])],
            vec![LabeledEdge {
                a: 0,
                b: 1,
                length: 1.0,
                labels: LabelSet::EMPTY,
            }],
            0,
            vec![GoalSpec {
                node: 1,
                j: vec![0],
            }],
            table,
        )
        .unwrap();
        (rm, scene)
    }

    fn labels(rm: &LabeledRoadmap, pairs: &[(u32, u32)]) -> LabelSet {
        let mut set = LabelSet::EMPTY;
        for (object, hyp) in pairs {
            set.insert(rm.labels.dense_index(*object, *hyp).unwrap());
        }
        set
    }

    #[test]
    fn survivability_examples() {
        // Target is object 0 with a single certain pose; objects 1 and 2
        // carry the weights under test.
        let (rm, scene) = view_for(vec![(0, vec![1.0]), (1, vec![0.3, 0.3]), (2, vec![0.4])], 0);
        let view = SceneView::new(&rm, &scene).unwrap();
        assert_eq!(view.survivability(&LabelSet::EMPTY), 1.0);
        // Two hypotheses of one object: complements add up, 1 - 0.6.
        let same_object = labels(&rm, &[(1, 0), (1, 1)]);
        assert!((view.survivability(&same_object) - 0.4).abs() <= 1e-12);
        // One hypothesis of each object: factors multiply, 0.6 * 0.7.
        let two_objects = labels(&rm, &[(2, 0), (1, 1)]);
        assert!((view.survivability(&two_objects) - 0.42).abs() <= 1e-12);
        // Target labels never enter survivability.
        let with_target = two_objects.union(&labels(&rm, &[(0, 0)]));
        assert_eq!(
            view.survivability(&with_target),
            view.survivability(&two_objects)
        );
    }

    #[test]
    fn overweight_object_is_rejected_upstream() {
        // An object whose hypothesis weights sum past 1 never survives scene
        // construction, the layer below the probability model.
        let result =
            std::panic::catch_unwind(|| view_for(vec![(0, vec![1.0]), (1, vec![0.7, 0.7])], 0));
        assert!(result.is_err());
    }

    #[test]
    fn reach_probability_examples() {
        let (rm, scene) = view_for(vec![(0, vec![0.5, 0.3, 0.2]), (1, vec![0.4])], 0);
        let view = SceneView::new(&rm, &scene).unwrap();
        // No target labels carried: the full target mass.
        assert!((reach_probability(&LabelSet::EMPTY, &view, None) - 1.0).abs() <= 1e-12);
        // Carrying the first target hypothesis leaves 0.3 + 0.2.
        let crossed_first = labels(&rm, &[(0, 0)]);
        assert!((reach_probability(&crossed_first, &view, None) - 0.5).abs() <= 1e-12);
        assert_eq!(view.remaining_targets(&crossed_first), vec![1, 2]);
        // A goal that can only pick the crossed hypothesis is invalid.
        let goal = GoalSpec {
            node: 1,
            j: vec![0],
        };
        assert_eq!(reach_probability(&crossed_first, &view, Some(&goal)), 0.0);
        // Obstacle labels do not affect reach.
        let with_obstacle = crossed_first.union(&labels(&rm, &[(1, 0)]));
        assert_eq!(
            reach_probability(&with_obstacle, &view, None),
            reach_probability(&crossed_first, &view, None)
        );
    }

    #[test]
    fn trivial_single_edge_instance() {
        // One label-free edge to a goal picking the only target pose.
        let (rm, scene) = view_for(vec![(0, vec![1.0]), (1, vec![0.4])], 0);
        let result = plan(
            Planner::MaxSuccessExact,
            &rm,
            &scene,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.path, vec![0, 1]);
        assert_eq!(result.succ, 1.0);
        assert_eq!(result.survivability, 1.0);
        assert_eq!(result.reach, 1.0);
        assert_eq!(result.cost, 1.0);
        assert!(result.labels.is_empty());
    }
}
