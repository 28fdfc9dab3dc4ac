//! Shared fixtures: abstract labeled-roadmap instances with hand-placed
//! labels, seeded random instance generators, and exhaustive oracles the
//! searches are checked against.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riskpick::geometry::{
    Bounds, Configuration, GraspParams, Pose2, RobotModel, Shape, WorkspaceSpec,
};
use riskpick::roadmap::{GoalSpec, LabelSet, LabelTable, LabeledEdge, LabeledRoadmap};
use riskpick::scene::{BeliefScene, Hypothesis, ObjectBelief};

pub struct AbstractInstance {
    pub rm: LabeledRoadmap,
    pub scene: BeliefScene,
}

/// Builds a roadmap over abstract nodes: geometry is a placeholder, labels
/// and probabilities are what count.
pub fn abstract_instance(
    node_count: usize,
    start: u32,
    objects: &[(u32, &[f64])],
    target: u32,
    edges: &[(u32, u32, f64, &[(u32, u32)])],
    goals: &[(u32, &[u32])],
) -> AbstractInstance {
    let workspace = WorkspaceSpec {
        robot: RobotModel::disc(0.1).unwrap(),
        bounds: Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        start: Configuration(vec![0.5, 0.5]),
        grasp: GraspParams::default(),
    };
    let beliefs: Vec<ObjectBelief> = objects
        .iter()
        .map(|(id, probs)| ObjectBelief {
            id: *id,
            shape: Shape::Disc { radius: 0.1 },
            existence_prob: probs.iter().sum(),
            hypotheses: probs
                .iter()
                .enumerate()
                .map(|(j, p)| Hypothesis {
                    pose: Pose2::new(f64::from(*id) * 100.0 + j as f64, 0.0, 0.0),
                    prob: *p,
                })
                .collect(),
        })
        .collect();
    let scene = BeliefScene::new_relaxed_target(workspace, vec![], beliefs, target).unwrap();
    let table = LabelTable::from_scene(&scene).unwrap();
    let labeled: Vec<LabeledEdge> = edges
        .iter()
        .map(|(a, b, length, pairs)| {
            let mut labels = LabelSet::EMPTY;
            for (object, hyp) in *pairs {
                labels.insert(table.dense_index(*object, *hyp).unwrap());
            }
            LabeledEdge {
                a: *a,
                b: *b,
                length: *length,
                labels,
            }
        })
        .collect();
    let goal_specs = goals
        .iter()
        .map(|(node, j)| GoalSpec {
            node: *node,
            j: j.to_vec(),
        })
        .collect();
    let nodes = (0..node_count)
        .map(|i| Configuration(vec![i as f64, 0.0]))
        .collect();
    let rm = LabeledRoadmap::assemble(nodes, labeled, start, goal_specs, table).unwrap();
    AbstractInstance { rm, scene }
}

/// Graph behind the lack-of-optimal-substructure examples: a diamond from
/// the start through `a` or `b` to a merge node, then one edge to the goal.
/// Pose 1 sits on the a-leg, pose 2 on the b-leg and on the merge-goal
/// edge. With `two_objects` the poses belong to different objects.
pub fn diamond_left(two_objects: bool) -> AbstractInstance {
    let objects: Vec<(u32, &[f64])> = if two_objects {
        vec![(9, &[1.0][..]), (1, &[0.3][..]), (2, &[0.4][..])]
    } else {
        vec![(9, &[1.0][..]), (1, &[0.3, 0.4][..])]
    };
    let p1 = (1, 0);
    let p2 = if two_objects { (2, 0) } else { (1, 1) };
    abstract_instance(
        5,
        0,
        &objects,
        9,
        &[
            (0, 1, 1.0, &[]),
            (0, 2, 1.0, &[]),
            (1, 3, 1.0, &[p1]),
            (2, 3, 1.0, &[p2]),
            (3, 4, 1.0, &[p2]),
        ],
        &[(4, &[0])],
    )
}

/// As `diamond_left`, but the a-leg and the merge-goal edge carry two
/// hypotheses of one object (0.3 each) while the b-leg carries the single
/// hypothesis (0.4) of another.
pub fn diamond_right() -> AbstractInstance {
    abstract_instance(
        5,
        0,
        &[(9, &[1.0][..]), (1, &[0.3, 0.3][..]), (2, &[0.4][..])],
        9,
        &[
            (0, 1, 1.0, &[]),
            (0, 2, 1.0, &[]),
            (1, 3, 1.0, &[(1, 0)]),
            (2, 3, 1.0, &[(2, 0)]),
            (3, 4, 1.0, &[(1, 1)]),
        ],
        &[(4, &[0])],
    )
}

/// Independent success computation for a completed path: group the carried
/// label pairs by object directly from the scene's probabilities.
pub fn oracle_succ(inst: &AbstractInstance, labels: &LabelSet, goal: &GoalSpec) -> f64 {
    let pairs = inst.rm.labels.pairs(labels);
    let mut s = 1.0;
    for object in &inst.scene.objects {
        if object.id == inst.scene.target_id {
            continue;
        }
        let crossed: f64 = pairs
            .iter()
            .filter(|(i, _)| *i == object.id)
            .map(|(_, j)| object.hypotheses[*j as usize].prob)
            .sum();
        s *= 1.0 - crossed;
    }
    let target = inst.scene.target().unwrap();
    let reach: f64 = goal
        .j
        .iter()
        .filter(|j| !pairs.contains(&(inst.scene.target_id, **j)))
        .map(|j| target.hypotheses[*j as usize].prob)
        .sum();
    s * reach
}

/// Exhaustive maximum of succ over all simple start-to-goal paths, or None
/// when no path has positive succ.
pub fn brute_force_best_succ(inst: &AbstractInstance) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut visited = vec![false; inst.rm.nodes.len()];
    visited[inst.rm.start as usize] = true;
    let mut labels = LabelSet::EMPTY;
    dfs_succ(inst, inst.rm.start, &mut visited, &mut labels, &mut best);
    best.filter(|b| *b > 0.0)
}

fn dfs_succ(
    inst: &AbstractInstance,
    node: u32,
    visited: &mut Vec<bool>,
    labels: &mut LabelSet,
    best: &mut Option<f64>,
) {
    if let Some(goal) = inst.rm.goal_spec(node) {
        let succ = oracle_succ(inst, labels, goal);
        if best.map_or(true, |b| succ > b) {
            *best = Some(succ);
        }
    }
    for &edge_idx in inst.rm.adjacency(node) {
        let edge = &inst.rm.edges[edge_idx as usize];
        let next = if edge.a == node { edge.b } else { edge.a };
        if visited[next as usize] {
            continue;
        }
        let saved = *labels;
        *labels = labels.union(&edge.labels);
        visited[next as usize] = true;
        dfs_succ(inst, next, visited, labels, best);
        visited[next as usize] = false;
        *labels = saved;
    }
}

/// Exhaustive minimum of the distinct-label count over all simple paths to
/// any goal node (target labels count like any other).
pub fn brute_force_min_labels(inst: &AbstractInstance) -> Option<usize> {
    let mut best: Option<usize> = None;
    let mut visited = vec![false; inst.rm.nodes.len()];
    visited[inst.rm.start as usize] = true;
    let mut labels = LabelSet::EMPTY;
    dfs_labels(inst, inst.rm.start, &mut visited, &mut labels, &mut best);
    best
}

fn dfs_labels(
    inst: &AbstractInstance,
    node: u32,
    visited: &mut Vec<bool>,
    labels: &mut LabelSet,
    best: &mut Option<usize>,
) {
    if inst.rm.goal_spec(node).is_some() {
        let count = labels.len();
        if best.map_or(true, |b| count < b) {
            *best = Some(count);
        }
    }
    for &edge_idx in inst.rm.adjacency(node) {
        let edge = &inst.rm.edges[edge_idx as usize];
        let next = if edge.a == node { edge.b } else { edge.a };
        if visited[next as usize] {
            continue;
        }
        let saved = *labels;
        *labels = labels.union(&edge.labels);
        if best.map_or(true, |b| {
            labels.len() < b || inst.rm.goal_spec(next).is_some()
        }) {
            visited[next as usize] = true;
            dfs_labels(inst, next, visited, labels, best);
            visited[next as usize] = false;
        }
        *labels = saved;
    }
}

/// Seeded random sparse instance for exactness checks.
pub fn random_instance(
    seed: u64,
    max_nodes: usize,
    max_objects: usize,
    max_k: usize,
) -> AbstractInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=max_nodes);

    // Target is object 0 with mass 1; obstacles get random masses.
    let num_obstacles = rng.gen_range(1..=max_objects);
    let mut objects: Vec<(u32, Vec<f64>)> = Vec::new();
    let k_t = rng.gen_range(1..=max_k);
    objects.push((0, normalized(&mut rng, k_t, 1.0)));
    for id in 1..=num_obstacles {
        let k = rng.gen_range(1..=max_k);
        let mass = rng.gen_range(0.2..=1.0);
        objects.push((id as u32, normalized(&mut rng, k, mass)));
    }

    // Sparse connected-ish graph: a random spanning chain plus extras.
    let mut edge_set = std::collections::BTreeSet::new();
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for w in order.windows(2) {
        edge_set.insert((w[0].min(w[1]), w[0].max(w[1])));
    }
    let extras = rng.gen_range(0..=n);
    for _ in 0..extras {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b {
            edge_set.insert((a.min(b), a.max(b)));
        }
    }

    let all_labels: Vec<(u32, u32)> = objects
        .iter()
        .flat_map(|(id, probs)| (0..probs.len() as u32).map(move |j| (*id, j)))
        .collect();
    let edges: Vec<(u32, u32, f64, Vec<(u32, u32)>)> = edge_set
        .into_iter()
        .map(|(a, b)| {
            let length = rng.gen_range(0.5..=2.0);
            let labels: Vec<(u32, u32)> = all_labels
                .iter()
                .copied()
                .filter(|_| rng.gen_range(0.0..1.0) < 0.22)
                .collect();
            (a, b, length, labels)
        })
        .collect();

    // Up to three goal nodes away from the start, random pickable sets.
    let num_goals = rng.gen_range(1..=3usize);
    let mut goal_nodes = std::collections::BTreeSet::new();
    for _ in 0..num_goals {
        let g = rng.gen_range(1..n as u32);
        goal_nodes.insert(g);
    }
    let goals: Vec<(u32, Vec<u32>)> = goal_nodes
        .into_iter()
        .map(|g| {
            let mut j: Vec<u32> = (0..k_t as u32)
                .filter(|_| rng.gen_range(0.0..1.0) < 0.6)
                .collect();
            if j.is_empty() {
                j.push(rng.gen_range(0..k_t as u32));
            }
            (g, j)
        })
        .collect();

    let objects_ref: Vec<(u32, &[f64])> =
        objects.iter().map(|(id, p)| (*id, p.as_slice())).collect();
    let edges_ref: Vec<(u32, u32, f64, &[(u32, u32)])> = edges
        .iter()
        .map(|(a, b, l, pairs)| (*a, *b, *l, pairs.as_slice()))
        .collect();
    let goals_ref: Vec<(u32, &[u32])> = goals.iter().map(|(g, j)| (*g, j.as_slice())).collect();
    abstract_instance(n, 0, &objects_ref, 0, &edges_ref, &goals_ref)
}

fn normalized(rng: &mut ChaCha8Rng, k: usize, mass: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total * mass).collect()
}

/// Seeded random count-minimization instance for the equivalence harness.
pub fn random_mcr_instance(seed: u64) -> riskpick::eval::reduction::McrInstance {
    use riskpick::eval::reduction::{McrEdge, McrInstance};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=10usize);
    let num_objects = rng.gen_range(1..=5u32);
    let target_object = rng.gen_range(1..=num_objects);

    let mut edge_set = std::collections::BTreeSet::new();
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for w in order.windows(2) {
        edge_set.insert((w[0].min(w[1]), w[0].max(w[1])));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b {
            edge_set.insert((a.min(b), a.max(b)));
        }
    }
    let block_goal = rng.gen_range(0.0..1.0) < 0.15;
    let goal = (n - 1) as u32;
    let edges: Vec<McrEdge> = edge_set
        .into_iter()
        .map(|(a, b)| {
            let mut objects: Vec<u32> = (1..=num_objects)
                .filter(|_| rng.gen_range(0.0..1.0) < 0.3)
                .collect();
            // Sometimes wall off the goal with the target's own pose to
            // exercise the unsolvable case.
            if block_goal && (a == goal || b == goal) && !objects.contains(&target_object) {
                objects.push(target_object);
            }
            McrEdge {
                a,
                b,
                length: rng.gen_range(0.5..=2.0),
                objects,
            }
        })
        .collect();
    McrInstance {
        num_nodes: n,
        edges,
        start: 0,
        goal,
        target_object,
    }
}
