//! Labeled roadmaps: PRM*-style construction over the static world, edge
//! labeling against pose hypotheses, and goal-set computation.
//!
//! Static obstacles are certain, so edges that sweep through them are
//! removed outright. Pose hypotheses are uncertain, so edges that sweep
//! through hypothesis j of object i keep a label (i, j) instead; the label's
//! weight is that hypothesis's probability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Bounds, Configuration, PlacedShape, RobotModel};
use crate::scene::BeliefScene;
use crate::util::rng_for;
use rand::Rng;

/// Hard cap on distinct (object, hypothesis) labels per scene.
pub const MAX_LABELS: usize = 256;

const LABEL_WORDS: usize = MAX_LABELS / 64;

/// A set of edge labels as a fixed-width bitset over the scene's dense
/// label indices. Copyable and cheap to union and compare.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet {
    bits: [u64; LABEL_WORDS],
}

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet {
        bits: [0; LABEL_WORDS],
    };

    pub fn insert(&mut self, index: usize) {
        debug_assert!(index < MAX_LABELS);
        self.bits[index / 64] |= 1u64 << (index % 64);
    }

    pub fn contains(&self, index: usize) -> bool {
        index < MAX_LABELS && self.bits[index / 64] & (1u64 << (index % 64)) != 0
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        let mut out = *self;
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        out
    }

    pub fn is_subset_of(&self, other: &LabelSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_superset_of(&self, other: &LabelSet) -> bool {
        other.is_subset_of(self)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set bits in ascending dense-index order (canonical label order).
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..LABEL_WORDS).flat_map(move |w| {
            let mut word = self.bits[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * 64 + bit)
                }
            })
        })
    }

    pub fn intersect(&self, other: &LabelSet) -> LabelSet {
        let mut out = *self;
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w &= o;
        }
        out
    }
}

impl std::fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One dense label: which object, which hypothesis, what weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub object_id: u32,
    pub hyp_index: u32,
    pub weight: f64,
    pub is_target: bool,
}

/// Dense index for every (object, hypothesis) pair of a scene, in canonical
/// (object id, hypothesis index) order. An object's labels are contiguous.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LabelTable {
    entries: Vec<LabelEntry>,
    /// (object id, first dense index, count) per object, ids ascending.
    object_ranges: Vec<(u32, usize, usize)>,
    target_range: (usize, usize),
}

impl LabelTable {
    pub fn from_scene(scene: &BeliefScene) -> Result<Self> {
        let total: usize = scene.objects.iter().map(|o| o.hypotheses.len()).sum();
        if total > MAX_LABELS {
            return Err(Error::LabelCapacity {
                got: total,
                max: MAX_LABELS,
            });
        }
        let mut ids: Vec<u32> = scene.objects.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        let mut entries = Vec::with_capacity(total);
        let mut object_ranges = Vec::with_capacity(ids.len());
        let mut target_range = (0, 0);
        for id in ids {
            let object = scene.object(id).expect("validated scene");
            let start = entries.len();
            for (j, h) in object.hypotheses.iter().enumerate() {
                entries.push(LabelEntry {
                    object_id: id,
                    hyp_index: j as u32,
                    weight: h.prob,
                    is_target: id == scene.target_id,
                });
            }
            object_ranges.push((id, start, object.hypotheses.len()));
            if id == scene.target_id {
                target_range = (start, object.hypotheses.len());
            }
        }
        Ok(Self {
            entries,
            object_ranges,
            target_range,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, dense: usize) -> &LabelEntry {
        &self.entries[dense]
    }

    pub fn entries(&self) -> &[LabelEntry] {
        &self.entries
    }

    pub fn object_ranges(&self) -> &[(u32, usize, usize)] {
        &self.object_ranges
    }

    /// Dense index of (object, hypothesis), if present.
    pub fn dense_index(&self, object_id: u32, hyp_index: u32) -> Option<usize> {
        let (_, start, count) = self
            .object_ranges
            .iter()
            .find(|(id, _, _)| *id == object_id)?;
        let j = hyp_index as usize;
        (j < *count).then_some(start + j)
    }

    /// Dense index of target hypothesis j.
    pub fn target_dense(&self, hyp_index: usize) -> Option<usize> {
        let (start, count) = self.target_range;
        (hyp_index < count).then_some(start + hyp_index)
    }

    pub fn target_hypothesis_count(&self) -> usize {
        self.target_range.1
    }

    /// Converts a bitset to canonical (object id, hypothesis) pairs.
    pub fn pairs(&self, set: &LabelSet) -> Vec<(u32, u32)> {
        set.iter()
            .map(|d| {
                let e = &self.entries[d];
                (e.object_id, e.hyp_index)
            })
            .collect()
    }
}

/// An unlabeled roadmap skeleton: collision-free samples joined to their
/// nearest neighbors, all edges validated against the static world.
#[derive(Clone, Debug)]
pub struct Graph {
    pub nodes: Vec<Configuration>,
    /// (a, b, length) with a < b; deduplicated.
    pub edges: Vec<(u32, u32, f64)>,
    /// Neighbors requested per node during construction.
    pub k_requested: usize,
}

/// Connection count for asymptotic-optimality-style roadmaps:
/// ceil(e * (1 + 1/d) * ln n).
pub fn k_star(dimension: usize, n: usize) -> usize {
    assert!(dimension >= 1 && n >= 2);
    let k = std::f64::consts::E * (1.0 + 1.0 / dimension as f64) * (n as f64).ln();
    k.ceil() as usize
}

/// Budget multiplier for rejection sampling before reporting failure.
const SAMPLE_ATTEMPT_FACTOR: usize = 200;

/// Parameters for roadmap construction.
#[derive(Clone, Debug)]
pub struct RoadmapParams {
    pub samples: usize,
    pub seed: u64,
    pub resolution: f64,
    /// Add one exact grasp configuration per target hypothesis so every
    /// hypothesis has at least one candidate goal (disc robot only).
    pub inject_goal_configs: bool,
}

impl Default for RoadmapParams {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            resolution: crate::geometry::DEFAULT_RESOLUTION,
            inject_goal_configs: true,
        }
    }
}

/// Samples `n` statically collision-free configurations and joins each to
/// its k* nearest neighbors, keeping only edges whose sweep stays clear of
/// every static obstacle. Deterministic under the seed.
pub fn build_roadmap(
    robot: &RobotModel,
    static_obstacles: &[PlacedShape],
    bounds: &Bounds,
    n: usize,
    seed: u64,
    resolution: f64,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "roadmap needs at least 2 samples".into(),
        ));
    }
    if bounds.dim() != robot.dof() {
        return Err(Error::InvalidArgument(format!(
            "bounds dimension {} does not match robot dof {}",
            bounds.dim(),
            robot.dof()
        )));
    }

    let mut rng = rng_for(seed, "roadmap-samples", 0);
    let mut nodes: Vec<Configuration> = Vec::with_capacity(n);
    let budget = n * SAMPLE_ATTEMPT_FACTOR;
    let mut attempts = 0;
    while nodes.len() < n {
        if attempts >= budget {
            return Err(Error::SamplingFailed {
                attempts,
                accepted: nodes.len(),
            });
        }
        attempts += 1;
        let q = Configuration(
            (0..bounds.dim())
                .map(|i| rng.gen_range(bounds.lo[i]..=bounds.hi[i]))
                .collect(),
        );
        let q = robot.canonicalize(&q);
        let free = static_obstacles.iter().try_fold(true, |acc, s| {
            Ok::<_, Error>(acc && !robot.collides_at(&q, s)?)
        })?;
        if free {
            nodes.push(q);
        }
    }

    let k = k_star(robot.dof(), n);
    let edges = connect_k_nearest(
        robot,
        static_obstacles,
        &nodes,
        &(0..n).collect::<Vec<_>>(),
        k,
        resolution,
    )?;

    Ok(Graph {
        nodes,
        edges,
        k_requested: k,
    })
}

/// For each listed node, proposes edges to its k nearest neighbors among all
/// nodes, then drops statically colliding sweeps. Returns deduplicated
/// (a, b, length) edges with a < b, sorted.
fn connect_k_nearest(
    robot: &RobotModel,
    static_obstacles: &[PlacedShape],
    nodes: &[Configuration],
    sources: &[usize],
    k: usize,
    resolution: f64,
) -> Result<Vec<(u32, u32, f64)>> {
    let mut candidate_set = std::collections::BTreeSet::new();
    for &i in sources {
        let mut dists: Vec<(f64, usize)> = Vec::with_capacity(nodes.len() - 1);
        for (j, q) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            dists.push((robot.config_distance(&nodes[i], q)?, j));
        }
        let keep = k.min(dists.len());
        dists.select_nth_unstable_by(keep.saturating_sub(1), |a, b| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        });
        for &(_, j) in &dists[..keep] {
            candidate_set.insert((i.min(j) as u32, i.max(j) as u32));
        }
    }

    let candidates: Vec<(u32, u32)> = candidate_set.into_iter().collect();
    let checked: Vec<Option<(u32, u32, f64)>> = candidates
        .par_iter()
        .map(|&(a, b)| {
            let qa = &nodes[a as usize];
            let qb = &nodes[b as usize];
            for s in static_obstacles {
                if robot
                    .segment_collides(qa, qb, s, resolution)
                    .unwrap_or(true)
                {
                    return None;
                }
            }
            let len = robot.config_distance(qa, qb).unwrap_or(f64::INFINITY);
            Some((a, b, len))
        })
        .collect();
    Ok(checked.into_iter().flatten().collect())
}

/// One goal configuration and the target hypotheses it can pick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub node: u32,
    /// Ascending, non-empty hypothesis indices.
    pub j: Vec<u32>,
}

/// Which target hypotheses ended up with at least one goal.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GoalCoverage {
    pub goals_per_hypothesis: Vec<usize>,
    pub unreachable_hypotheses: Vec<u32>,
}

/// An edge of the labeled roadmap.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledEdge {
    pub a: u32,
    pub b: u32,
    pub length: f64,
    pub labels: LabelSet,
}

/// A roadmap whose edges carry the pose hypotheses they sweep through.
#[derive(Clone, Debug)]
pub struct LabeledRoadmap {
    pub nodes: Vec<Configuration>,
    pub edges: Vec<LabeledEdge>,
    pub start: u32,
    pub goals: Vec<GoalSpec>,
    pub labels: LabelTable,
    /// Edge indices incident to each node.
    adjacency: Vec<Vec<u32>>,
}

impl LabeledRoadmap {
    pub fn assemble(
        nodes: Vec<Configuration>,
        edges: Vec<LabeledEdge>,
        start: u32,
        goals: Vec<GoalSpec>,
        labels: LabelTable,
    ) -> Result<Self> {
        if start as usize >= nodes.len() {
            return Err(Error::InvalidArgument("start node out of range".into()));
        }
        let mut goal_nodes = std::collections::BTreeSet::new();
        for g in &goals {
            if g.node as usize >= nodes.len() {
                return Err(Error::InvalidArgument("goal node out of range".into()));
            }
            if g.j.is_empty() {
                return Err(Error::InvalidArgument(
                    "goal with empty hypothesis set".into(),
                ));
            }
            if !goal_nodes.insert(g.node) {
                return Err(Error::InvalidArgument(format!(
                    "node {} appears in the goal table twice",
                    g.node
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (idx, e) in edges.iter().enumerate() {
            if e.a as usize >= nodes.len() || e.b as usize >= nodes.len() || e.a == e.b {
                return Err(Error::InvalidArgument("edge endpoint out of range".into()));
            }
            adjacency[e.a as usize].push(idx as u32);
            adjacency[e.b as usize].push(idx as u32);
        }
        Ok(Self {
            nodes,
            edges,
            start,
            goals,
            labels,
            adjacency,
        })
    }

    pub fn adjacency(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn goal_spec(&self, node: u32) -> Option<&GoalSpec> {
        self.goals.iter().find(|g| g.node == node)
    }

    /// Checks that every label weight matches the scene's probabilities.
    pub fn validate_against(&self, scene: &BeliefScene) -> Result<()> {
        let fresh = LabelTable::from_scene(scene)?;
        if fresh.entries() != self.labels.entries() {
            return Err(Error::SceneMismatch(
                "label table differs from the scene's hypotheses".into(),
            ));
        }
        Ok(())
    }
}

/// Attaches to every edge the labels of all hypotheses (target included)
/// its sweep penetrates. Edge lengths, start, and goals are untouched.
pub fn label_edges(
    graph_edges: &[(u32, u32, f64)],
    nodes: &[Configuration],
    robot: &RobotModel,
    scene: &BeliefScene,
    table: &LabelTable,
    resolution: f64,
) -> Result<Vec<LabeledEdge>> {
    let placed: Vec<(usize, PlacedShape)> = table
        .entries()
        .iter()
        .enumerate()
        .map(|(dense, entry)| {
            let object = scene.object(entry.object_id).expect("validated scene");
            (dense, object.placed_hypothesis(entry.hyp_index as usize))
        })
        .collect();

    graph_edges
        .par_iter()
        .map(|&(a, b, length)| {
            let qa = &nodes[a as usize];
            let qb = &nodes[b as usize];
            let mut labels = LabelSet::EMPTY;
            for (dense, shape) in &placed {
                if robot.segment_collides(qa, qb, shape, resolution)? {
                    labels.insert(*dense);
                }
            }
            Ok(LabeledEdge {
                a,
                b,
                length,
                labels,
            })
        })
        .collect()
}

/// Finds every node whose end effector reaches the grasp frame of at least
/// one target hypothesis. Errors when no node reaches any hypothesis.
pub fn compute_goals(
    nodes: &[Configuration],
    robot: &RobotModel,
    scene: &BeliefScene,
) -> Result<(Vec<GoalSpec>, GoalCoverage)> {
    let target = scene
        .target()
        .ok_or_else(|| Error::InvalidScene("scene has no target".into()))?;
    let frames: Vec<_> = (0..target.hypotheses.len())
        .map(|j| {
            scene
                .workspace
                .grasp
                .grasp_frame(&target.placed_hypothesis(j))
        })
        .collect();

    let mut goals = Vec::new();
    let mut per_hyp = vec![0usize; frames.len()];
    for (idx, q) in nodes.iter().enumerate() {
        let mut j_set = Vec::new();
        for (j, frame) in frames.iter().enumerate() {
            if scene.workspace.grasp.reaches(robot, q, frame)? {
                j_set.push(j as u32);
                per_hyp[j] += 1;
            }
        }
        if !j_set.is_empty() {
            goals.push(GoalSpec {
                node: idx as u32,
                j: j_set,
            });
        }
    }
    if goals.is_empty() {
        return Err(Error::NoGoals);
    }
    let unreachable = per_hyp
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == 0)
        .map(|(j, _)| j as u32)
        .collect();
    Ok((
        goals,
        GoalCoverage {
            goals_per_hypothesis: per_hyp,
            unreachable_hypotheses: unreachable,
        },
    ))
}

/// Full pipeline: skeleton, start connection, optional goal injection,
/// labeling, goal computation.
pub fn build_labeled_roadmap(
    scene: &BeliefScene,
    params: &RoadmapParams,
) -> Result<(LabeledRoadmap, GoalCoverage)> {
    for o in &scene.objects {
        o.validate()?;
    }
    scene.workspace.validate()?;
    let ws = &scene.workspace;
    let robot = &ws.robot;
    let graph = build_roadmap(
        robot,
        &scene.static_obstacles,
        &ws.bounds,
        params.samples,
        params.seed,
        params.resolution,
    )?;

    let mut nodes = graph.nodes;
    let mut extra_sources: Vec<usize> = Vec::new();

    let start_idx = nodes.len();
    nodes.push(robot.canonicalize(&ws.start));
    extra_sources.push(start_idx);

    if params.inject_goal_configs {
        let target = scene
            .target()
            .ok_or_else(|| Error::InvalidScene("scene has no target".into()))?;
        for j in 0..target.hypotheses.len() {
            let frame = ws.grasp.grasp_frame(&target.placed_hypothesis(j));
            let q = ws.grasp.grasp_configuration(robot, &frame)?;
            let statically_free = scene.static_obstacles.iter().try_fold(true, |acc, s| {
                Ok::<_, Error>(acc && !robot.collides_at(&q, s)?)
            })?;
            if statically_free {
                extra_sources.push(nodes.len());
                nodes.push(q);
            }
        }
    }

    let k = graph.k_requested;
    let mut edges = graph.edges;
    let extra_edges = connect_k_nearest(
        robot,
        &scene.static_obstacles,
        &nodes,
        &extra_sources,
        k,
        params.resolution,
    )?;
    edges.extend(extra_edges);
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    edges.dedup_by_key(|e| (e.0, e.1));

    let table = LabelTable::from_scene(scene)?;
    let labeled = label_edges(&edges, &nodes, robot, scene, &table, params.resolution)?;
    let (goals, coverage) = compute_goals(&nodes, robot, scene)?;
    let roadmap = LabeledRoadmap::assemble(nodes, labeled, start_idx as u32, goals, table)?;
    Ok((roadmap, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GraspParams, Pose2, Shape};
    use crate::scene::{Hypothesis, ObjectBelief};

    #[test]
    fn k_star_matches_formula() {
        // ceil(e * (8/7) * ln 5000) = 27 and ceil(e * 1.5 * ln 100) = 19.
        assert_eq!(k_star(7, 5000), 27);
        assert_eq!(k_star(2, 100), 19);
    }

    #[test]
    fn label_set_operations() {
        let mut a = LabelSet::EMPTY;
        a.insert(3);
        a.insert(70);
        let mut b = a;
        b.insert(200);
        assert!(a.is_subset_of(&b));
        assert!(b.is_superset_of(&a));
        assert!(!b.is_subset_of(&a));
        assert!(a.is_subset_of(&a));
        assert_eq!(b.len(), 3);
        assert_eq!(a.union(&b), b);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![3, 70, 200]);
        assert!(LabelSet::EMPTY.is_empty());
    }

    fn ws() -> crate::geometry::WorkspaceSpec {
        crate::geometry::WorkspaceSpec {
            robot: RobotModel::disc(0.3).unwrap(),
            bounds: Bounds::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap(),
            start: Configuration(vec![5.0, 9.0]),
            grasp: GraspParams {
                position_tolerance: 1.0,
                orientation_tolerance: 0.5,
                standoff: 0.2,
            },
        }
    }

    fn one_object_scene(hyps: Vec<Hypothesis>, target_hyps: Vec<Hypothesis>) -> BeliefScene {
        BeliefScene::new(
            ws(),
            vec![],
            vec![
                ObjectBelief {
                    id: 1,
                    shape: Shape::disc(0.6).unwrap(),
                    existence_prob: hyps.iter().map(|h| h.prob).sum(),
                    hypotheses: hyps,
                },
                ObjectBelief {
                    id: 0,
                    shape: Shape::disc(0.5).unwrap(),
                    existence_prob: 1.0,
                    hypotheses: target_hyps,
                },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn label_table_canonical_order() {
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(2.0, 2.0, 0.0),
                prob: 0.5,
            }],
            vec![
                Hypothesis {
                    pose: Pose2::new(8.0, 2.0, 0.0),
                    prob: 0.6,
                },
                Hypothesis {
                    pose: Pose2::new(7.0, 2.0, 0.0),
                    prob: 0.4,
                },
            ],
        );
        let table = LabelTable::from_scene(&scene).unwrap();
        // Object ids ascending: target (0) first, then object 1.
        assert_eq!(table.len(), 3);
        assert_eq!(table.entry(0).object_id, 0);
        assert!(table.entry(0).is_target);
        assert_eq!(table.entry(2).object_id, 1);
        assert_eq!(table.dense_index(1, 0), Some(2));
        assert_eq!(table.dense_index(1, 1), None);
        assert_eq!(table.target_dense(1), Some(1));
        assert_eq!(table.target_hypothesis_count(), 2);
    }

    #[test]
    fn label_table_is_order_independent() {
        let scene_a = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(2.0, 2.0, 0.0),
                prob: 0.5,
            }],
            vec![Hypothesis {
                pose: Pose2::new(8.0, 2.0, 0.0),
                prob: 1.0,
            }],
        );
        let mut scene_b = scene_a.clone();
        scene_b.objects.reverse();
        let ta = LabelTable::from_scene(&scene_a).unwrap();
        let tb = LabelTable::from_scene(&scene_b).unwrap();
        assert_eq!(ta.entries(), tb.entries());
    }

    #[test]
    fn build_roadmap_empty_world_keeps_all_nodes() {
        let robot = RobotModel::disc(0.3).unwrap();
        let bounds = Bounds::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let g = build_roadmap(&robot, &[], &bounds, 50, 7, 0.05).unwrap();
        assert_eq!(g.nodes.len(), 50);
        assert_eq!(g.k_requested, k_star(2, 50));
        assert!(!g.edges.is_empty());
        // Deterministic under the seed.
        let g2 = build_roadmap(&robot, &[], &bounds, 50, 7, 0.05).unwrap();
        assert_eq!(g.nodes, g2.nodes);
        assert_eq!(g.edges, g2.edges);
    }

    #[test]
    fn build_roadmap_edges_avoid_statics() {
        let robot = RobotModel::disc(0.3).unwrap();
        let bounds = Bounds::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let wall = PlacedShape::new(Shape::rect(0.5, 6.0).unwrap(), Pose2::new(5.0, 3.0, 0.0));
        let g = build_roadmap(&robot, std::slice::from_ref(&wall), &bounds, 60, 3, 0.05).unwrap();
        for &(a, b, _) in &g.edges {
            assert!(!robot
                .segment_collides(&g.nodes[a as usize], &g.nodes[b as usize], &wall, 0.05)
                .unwrap());
        }
    }

    #[test]
    fn sampling_failure_is_reported() {
        let robot = RobotModel::disc(0.3).unwrap();
        let bounds = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        // A block covering the whole sampling box.
        let block = PlacedShape::new(Shape::rect(4.0, 4.0).unwrap(), Pose2::new(0.5, 0.5, 0.0));
        match build_roadmap(&robot, &[block], &bounds, 10, 1, 0.05) {
            Err(Error::SamplingFailed { accepted, .. }) => assert_eq!(accepted, 0),
            other => panic!("expected sampling failure, got {other:?}"),
        }
    }

    #[test]
    fn labeling_empty_scene_gives_empty_sets() {
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(50.0, 50.0, 0.0),
                prob: 1.0,
            }],
            vec![Hypothesis {
                pose: Pose2::new(60.0, 60.0, 0.0),
                prob: 1.0,
            }],
        );
        // All hypotheses far outside the sampled box: no labels anywhere.
        let robot = &scene.workspace.robot;
        let g = build_roadmap(robot, &[], &scene.workspace.bounds, 40, 5, 0.05).unwrap();
        let table = LabelTable::from_scene(&scene).unwrap();
        let labeled = label_edges(&g.edges, &g.nodes, robot, &scene, &table, 0.05).unwrap();
        assert!(labeled.iter().all(|e| e.labels.is_empty()));
    }

    #[test]
    fn labeling_attaches_expected_hypotheses() {
        // A two-node segment passing straight through the only hypothesis of
        // object 1 and through both hypotheses of the target.
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(5.0, 5.0, 0.0),
                prob: 0.5,
            }],
            vec![
                Hypothesis {
                    pose: Pose2::new(4.0, 5.0, 0.0),
                    prob: 0.6,
                },
                Hypothesis {
                    pose: Pose2::new(6.0, 5.0, 0.0),
                    prob: 0.4,
                },
            ],
        );
        let robot = &scene.workspace.robot;
        let nodes = vec![Configuration(vec![1.0, 5.0]), Configuration(vec![9.0, 5.0])];
        let edges = vec![(0u32, 1u32, 8.0)];
        let table = LabelTable::from_scene(&scene).unwrap();
        let labeled = label_edges(&edges, &nodes, robot, &scene, &table, 0.05).unwrap();
        assert_eq!(labeled[0].labels.len(), 3);
        let pairs = table.pairs(&labeled[0].labels);
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0)]);
        assert_eq!(labeled[0].length, 8.0);
    }

    #[test]
    fn goals_collect_hypotheses_within_tolerance() {
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(2.0, 2.0, 0.0),
                prob: 0.5,
            }],
            vec![
                Hypothesis {
                    pose: Pose2::new(6.0, 2.0, 0.0),
                    prob: 0.5,
                },
                Hypothesis {
                    pose: Pose2::new(8.5, 2.0, 0.0),
                    prob: 0.3,
                },
                Hypothesis {
                    pose: Pose2::new(6.2, 2.0, 0.0),
                    prob: 0.2,
                },
            ],
        );
        // Target disc radius 0.5, standoff 0.2: frames at y = 2.7. Node near
        // hypotheses 0 and 2 but not 1.
        let nodes = vec![Configuration(vec![6.1, 2.8]), Configuration(vec![1.0, 9.0])];
        let (goals, coverage) = compute_goals(&nodes, &scene.workspace.robot, &scene).unwrap();
        assert_eq!(goals.len(), 1);
        assert_eq!(goals[0].node, 0);
        assert_eq!(goals[0].j, vec![0, 2]);
        assert_eq!(coverage.unreachable_hypotheses, vec![1]);
    }

    #[test]
    fn no_goal_anywhere_is_an_error() {
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(2.0, 2.0, 0.0),
                prob: 0.5,
            }],
            vec![Hypothesis {
                pose: Pose2::new(6.0, 2.0, 0.0),
                prob: 1.0,
            }],
        );
        let nodes = vec![Configuration(vec![0.0, 9.0])];
        assert!(matches!(
            compute_goals(&nodes, &scene.workspace.robot, &scene),
            Err(Error::NoGoals)
        ));
    }

    #[test]
    fn pipeline_injects_goals_and_labels() {
        let scene = one_object_scene(
            vec![Hypothesis {
                pose: Pose2::new(3.0, 2.0, 0.0),
                prob: 0.5,
            }],
            vec![
                Hypothesis {
                    pose: Pose2::new(6.0, 2.0, 0.0),
                    prob: 0.7,
                },
                Hypothesis {
                    pose: Pose2::new(7.5, 2.0, 0.0),
                    prob: 0.3,
                },
            ],
        );
        let params = RoadmapParams {
            samples: 120,
            seed: 9,
            resolution: 0.05,
            inject_goal_configs: true,
        };
        let (rm, coverage) = build_labeled_roadmap(&scene, &params).unwrap();
        assert!(coverage.unreachable_hypotheses.is_empty());
        assert!(rm.goals.len() >= 2);
        assert_eq!(rm.start as usize, 120);
        // Start node is the canonicalized workspace start.
        assert_eq!(rm.nodes[rm.start as usize], Configuration(vec![5.0, 9.0]));
        rm.validate_against(&scene).unwrap();
        // Label weights resolve to the scene's probabilities.
        for e in &rm.edges {
            for dense in e.labels.iter() {
                let entry = rm.labels.entry(dense);
                let object = scene.object(entry.object_id).unwrap();
                assert_eq!(
                    object.hypotheses[entry.hyp_index as usize].prob,
                    entry.weight
                );
            }
        }
    }
}
