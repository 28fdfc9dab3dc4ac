//! Executable equivalence check between plain constraint-count
//! minimization and the probabilistic search.
//!
//! A count-minimization instance (one deterministic pose per object, one of
//! them the target) maps to a stochastic instance by giving every pose the
//! same probability xi and the goal exactly that single target pose. The
//! probabilistic optimum then satisfies succ = (1 - xi)^m * xi, where m is
//! the number of poses the returned path intersects, so m must equal the
//! count-minimal answer; and the stochastic instance is unsolvable exactly
//! when every path to the goal crosses the target's pose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    Bounds, Configuration, GraspParams, Pose2, RobotModel, Shape, WorkspaceSpec,
};
use crate::planner::{plan, Planner, SearchOptions};
use crate::roadmap::{GoalSpec, LabelSet, LabelTable, LabeledEdge, LabeledRoadmap};
use crate::scene::{BeliefScene, Hypothesis, ObjectBelief};

/// A constraint-count minimization instance over an abstract graph: each
/// object occupies one deterministic pose; edges list the objects whose
/// pose they cross; one object is the pick target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McrInstance {
    pub num_nodes: usize,
    pub edges: Vec<McrEdge>,
    pub start: u32,
    pub goal: u32,
    pub target_object: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McrEdge {
    pub a: u32,
    pub b: u32,
    pub length: f64,
    pub objects: Vec<u32>,
}

impl McrInstance {
    pub fn validate(&self) -> Result<()> {
        if self.num_nodes == 0 {
            return Err(Error::InvalidArgument("instance has no nodes".into()));
        }
        let n = self.num_nodes as u32;
        if self.start >= n || self.goal >= n {
            return Err(Error::InvalidArgument(
                "start or goal out of node range".into(),
            ));
        }
        for e in &self.edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(Error::InvalidArgument("bad edge endpoints".into()));
            }
            if !(e.length > 0.0) {
                return Err(Error::InvalidArgument(
                    "edge lengths must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// All object ids: those on edges plus the target.
    pub fn object_ids(&self) -> Vec<u32> {
        let mut ids: std::collections::BTreeSet<u32> = self
            .edges
            .iter()
            .flat_map(|e| e.objects.iter().copied())
            .collect();
        ids.insert(self.target_object);
        ids.into_iter().collect()
    }
}

/// The stochastic counterpart of an instance under pose probability xi.
pub fn stochastic_instance(
    instance: &McrInstance,
    xi: f64,
) -> Result<(LabeledRoadmap, BeliefScene)> {
    instance.validate()?;
    if !(0.0 < xi && xi <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pose probability must be in (0, 1], got {xi}"
        )));
    }

    // Geometry is irrelevant for abstract instances; park each object's
    // single pose at a distinct spot.
    let workspace = WorkspaceSpec {
        robot: RobotModel::disc(0.1)?,
        bounds: Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0])?,
        start: Configuration(vec![0.5, 0.5]),
        grasp: GraspParams::default(),
    };
    let objects: Vec<ObjectBelief> = instance
        .object_ids()
        .iter()
        .map(|&id| ObjectBelief {
            id,
            shape: Shape::Disc { radius: 0.1 },
            existence_prob: xi,
            hypotheses: vec![Hypothesis {
                pose: Pose2::new(f64::from(id), 0.0, 0.0),
                prob: xi,
            }],
        })
        .collect();
    let scene =
        BeliefScene::new_relaxed_target(workspace, vec![], objects, instance.target_object)?;
    let table = LabelTable::from_scene(&scene)?;

    let nodes: Vec<Configuration> = (0..instance.num_nodes)
        .map(|i| Configuration(vec![i as f64, 0.0]))
        .collect();
    let edges: Vec<LabeledEdge> = instance
        .edges
        .iter()
        .map(|e| {
            let mut labels = LabelSet::EMPTY;
            for &obj in &e.objects {
                let dense = table
                    .dense_index(obj, 0)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown object {obj}")))?;
                labels.insert(dense);
            }
            Ok(LabeledEdge {
                a: e.a,
                b: e.b,
                length: e.length,
                labels,
            })
        })
        .collect::<Result<_>>()?;
    let goals = vec![GoalSpec {
        node: instance.goal,
        j: vec![0],
    }];
    let rm = LabeledRoadmap::assemble(nodes, edges, instance.start, goals, table)?;
    Ok((rm, scene))
}

/// Count-minimal answer by exhaustive enumeration of simple paths: the
/// fewest distinct object poses crossed by any start-to-goal path that
/// avoids the target's pose, or None when no such path exists.
pub fn brute_force_minimum(instance: &McrInstance) -> Option<usize> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); instance.num_nodes];
    for (i, e) in instance.edges.iter().enumerate() {
        adjacency[e.a as usize].push(i);
        adjacency[e.b as usize].push(i);
    }
    let mut best: Option<usize> = None;
    let mut visited = vec![false; instance.num_nodes];
    visited[instance.start as usize] = true;
    let mut crossed: std::collections::BTreeSet<u32> = std::collections::BTreeSet::new();
    dfs(
        instance,
        &adjacency,
        instance.start,
        &mut visited,
        &mut crossed,
        &mut best,
    );
    best
}

fn dfs(
    instance: &McrInstance,
    adjacency: &[Vec<usize>],
    node: u32,
    visited: &mut Vec<bool>,
    crossed: &mut std::collections::BTreeSet<u32>,
    best: &mut Option<usize>,
) {
    if node == instance.goal {
        let count = crossed.len();
        if best.map_or(true, |b| count < b) {
            *best = Some(count);
        }
        return;
    }
    for &edge_idx in &adjacency[node as usize] {
        let e = &instance.edges[edge_idx];
        let next = if e.a == node { e.b } else { e.a };
        if visited[next as usize] {
            continue;
        }
        if e.objects.contains(&instance.target_object) {
            continue;
        }
        let added: Vec<u32> = e
            .objects
            .iter()
            .copied()
            .filter(|o| crossed.insert(*o))
            .collect();
        if best.map_or(true, |b| crossed.len() < b) {
            visited[next as usize] = true;
            dfs(instance, adjacency, next, visited, crossed, best);
            visited[next as usize] = false;
        }
        for o in added {
            crossed.remove(&o);
        }
    }
}

/// Outcome of one equivalence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub xi: f64,
    pub search_solvable: bool,
    pub brute_solvable: bool,
    /// Poses intersected by the probabilistic optimum.
    pub m_search: Option<usize>,
    /// Count-minimal answer by enumeration.
    pub m_brute: Option<usize>,
    pub succ: Option<f64>,
    /// (1 - xi)^m * xi for the brute-force m.
    pub expected_succ: Option<f64>,
    pub equivalent: bool,
}

/// Tolerance for the succ = (1 - xi)^m * xi identity.
pub const REDUCTION_TOLERANCE: f64 = 1e-12;

/// Builds the stochastic instance, solves it exactly, and compares against
/// the enumeration answer.
pub fn reduction_check(instance: &McrInstance, xi: f64) -> Result<ReductionReport> {
    let (rm, scene) = stochastic_instance(instance, xi)?;
    let solved = match plan(
        Planner::MaxSuccessExact,
        &rm,
        &scene,
        &SearchOptions::default(),
    ) {
        Ok(result) => Some(result),
        Err(Error::NoSolution) => None,
        Err(e) => return Err(e),
    };
    let m_brute = brute_force_minimum(instance);

    let (m_search, succ) = match &solved {
        Some(result) => {
            debug_assert!(result
                .labels
                .iter()
                .all(|(object, _)| *object != instance.target_object));
            (Some(result.labels.len()), Some(result.succ))
        }
        None => (None, None),
    };
    let expected_succ = m_brute.map(|m| (1.0 - xi).powi(m as i32) * xi);

    let equivalent = match (m_search, m_brute) {
        (None, None) => true,
        (Some(ms), Some(mb)) => {
            ms == mb && (succ.unwrap() - expected_succ.unwrap()).abs() <= REDUCTION_TOLERANCE
        }
        _ => false,
    };
    Ok(ReductionReport {
        xi,
        search_solvable: m_search.is_some(),
        brute_solvable: m_brute.is_some(),
        m_search,
        m_brute,
        succ,
        expected_succ,
        equivalent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(a: u32, b: u32, objects: &[u32]) -> McrEdge {
        McrEdge {
            a,
            b,
            length: 1.0,
            objects: objects.to_vec(),
        }
    }

    #[test]
    fn label_free_path_gives_succ_xi() {
        // Two routes: a clean one and one crossing object 1.
        let instance = McrInstance {
            num_nodes: 4,
            edges: vec![
                edge(0, 1, &[]),
                edge(1, 3, &[]),
                edge(0, 2, &[1]),
                edge(2, 3, &[]),
            ],
            start: 0,
            goal: 3,
            target_object: 2,
        };
        for xi in [0.2, 0.5] {
            let report = reduction_check(&instance, xi).unwrap();
            assert!(report.equivalent, "{report:?}");
            assert_eq!(report.m_search, Some(0));
            assert!((report.succ.unwrap() - xi).abs() <= REDUCTION_TOLERANCE);
        }
    }

    #[test]
    fn forced_crossings_are_counted() {
        // Every route crosses object 1; one also crosses object 3.
        let instance = McrInstance {
            num_nodes: 3,
            edges: vec![edge(0, 1, &[1]), edge(1, 2, &[]), edge(0, 2, &[1, 3])],
            start: 0,
            goal: 2,
            target_object: 5,
        };
        let report = reduction_check(&instance, 0.5).unwrap();
        assert!(report.equivalent, "{report:?}");
        assert_eq!(report.m_search, Some(1));
        assert!((report.succ.unwrap() - 0.25).abs() <= REDUCTION_TOLERANCE);
    }

    #[test]
    fn target_blocking_every_path_is_unsolvable_both_ways() {
        let instance = McrInstance {
            num_nodes: 3,
            edges: vec![edge(0, 1, &[7]), edge(1, 2, &[1])],
            start: 0,
            goal: 2,
            target_object: 7,
        };
        let report = reduction_check(&instance, 0.2).unwrap();
        assert!(report.equivalent);
        assert!(!report.search_solvable);
        assert!(!report.brute_solvable);
    }

    #[test]
    fn brute_force_counts_distinct_objects() {
        let instance = McrInstance {
            num_nodes: 4,
            edges: vec![
                edge(0, 1, &[1, 2]),
                edge(1, 3, &[1]),
                edge(0, 2, &[3]),
                edge(2, 3, &[4]),
            ],
            start: 0,
            goal: 3,
            target_object: 9,
        };
        // Route via node 1 crosses {1,2}; via node 2 crosses {3,4}; both 2.
        assert_eq!(brute_force_minimum(&instance), Some(2));
    }
}
