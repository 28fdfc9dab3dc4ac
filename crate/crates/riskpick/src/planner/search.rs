//! Best-first search maximizing the success probability of a path.
//!
//! A record is one candidate path compressed to (node, label set, goal
//! flag). Non-goal records score their success with the full remaining
//! target mass, which upper-bounds every completion, so the first
//! goal-flagged record popped is optimal. Each arrival at a goal node is
//! enqueued twice: once as an ordinary node (the goal may be a waypoint to
//! a better goal) and once as a terminal goal, the latter only while the
//! path still leaves the goal something to pick.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{
    finish_plan, DominanceMode, PlanResult, Planner, SceneView, SearchOptions, SearchStats,
    SUCC_EPS,
};
use crate::error::{Error, Result};
use crate::roadmap::{LabelSet, LabeledRoadmap};

const NO_PARENT: u32 = u32::MAX;

pub(crate) struct Record {
    pub node: u32,
    pub labels: LabelSet,
    pub parent: u32,
    pub succ: f64,
    pub cost: f64,
    pub is_goal: bool,
    pub alive: bool,
}

/// Heap key: maximize succ, then prefer fewer labels, lower cost, lower
/// node id, earlier creation. Deterministic total order.
struct Key {
    succ: f64,
    nlabels: u16,
    cost: f64,
    node: u32,
    idx: u32,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.succ
            .total_cmp(&other.succ)
            .then_with(|| other.nlabels.cmp(&self.nlabels))
            .then_with(|| other.cost.total_cmp(&self.cost))
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Stored label set at a node plus the records carrying it.
struct Stored {
    labels: LabelSet,
    records: Vec<u32>,
}

pub(crate) fn max_success(
    rm: &LabeledRoadmap,
    view: &SceneView,
    options: &SearchOptions,
    exact: bool,
) -> Result<PlanResult> {
    let started = Instant::now();
    let planner = if exact {
        Planner::MaxSuccessExact
    } else {
        Planner::MaxSuccessGreedy
    };

    let mut goal_of: Vec<Option<usize>> = vec![None; rm.nodes.len()];
    for (i, g) in rm.goals.iter().enumerate() {
        goal_of[g.node as usize] = Some(i);
    }

    let mut arena: Vec<Record> = Vec::new();
    let mut heap: BinaryHeap<Key> = BinaryHeap::new();
    // Exact: antichain of label sets per node. Greedy: best record per
    // (node, goal flag).
    let mut stored: Vec<Vec<Stored>> = std::iter::repeat_with(Vec::new)
        .take(rm.nodes.len())
        .collect();
    let mut slots: Vec<[Option<u32>; 2]> = vec![[None, None]; rm.nodes.len()];
    let mut expansions: u64 = 0;

    let push = |arena: &mut Vec<Record>, heap: &mut BinaryHeap<Key>, rec: Record| -> u32 {
        let idx = arena.len() as u32;
        heap.push(Key {
            succ: rec.succ,
            nlabels: rec.labels.len() as u16,
            cost: rec.cost,
            node: rec.node,
            idx,
        });
        arena.push(rec);
        idx
    };

    // Seed the start; the empty path is also a candidate when the start is
    // itself a goal.
    let start_labels = LabelSet::EMPTY;
    let start_succ = view.survivability(&start_labels) * view.reach_nongoal(&start_labels);
    let root = push(
        &mut arena,
        &mut heap,
        Record {
            node: rm.start,
            labels: start_labels,
            parent: NO_PARENT,
            succ: start_succ,
            cost: 0.0,
            is_goal: false,
            alive: true,
        },
    );
    if exact {
        stored[rm.start as usize].push(Stored {
            labels: start_labels,
            records: vec![root],
        });
    } else {
        slots[rm.start as usize][0] = Some(root);
    }
    if let Some(gi) = goal_of[rm.start as usize] {
        let reach = view.reach_goal(&start_labels, &rm.goals[gi]);
        if reach > 0.0 {
            let idx = push(
                &mut arena,
                &mut heap,
                Record {
                    node: rm.start,
                    labels: start_labels,
                    parent: NO_PARENT,
                    succ: view.survivability(&start_labels) * reach,
                    cost: 0.0,
                    is_goal: true,
                    alive: true,
                },
            );
            if exact {
                stored[rm.start as usize][0].records.push(idx);
            } else {
                slots[rm.start as usize][1] = Some(idx);
            }
        }
    }

    while let Some(key) = heap.pop() {
        let idx = key.idx;
        if !arena[idx as usize].alive {
            continue;
        }
        if arena[idx as usize].is_goal {
            let stats = SearchStats {
                expansions,
                records_stored: arena.len() as u64,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            return finish_plan(planner, rm, view, reconstruct(&arena, idx), stats);
        }
        expansions += 1;

        let (node, parent_labels, parent_succ, parent_cost) = {
            let r = &arena[idx as usize];
            (r.node, r.labels, r.succ, r.cost)
        };
        let parent_s = if options.check_invariants {
            view.survivability(&parent_labels)
        } else {
            1.0
        };
        for &edge_idx in rm.adjacency(node) {
            let edge = &rm.edges[edge_idx as usize];
            let neighbor = if edge.a == node { edge.b } else { edge.a };
            let labels = parent_labels.union(&edge.labels);
            let s = view.survivability(&labels);
            let reach = view.reach_nongoal(&labels);
            let succ = s * reach;
            // A zero-probability plan is a failure; drop it outright.
            if succ <= 0.0 {
                continue;
            }
            let cost = parent_cost + edge.length;
            if options.check_invariants {
                check_record(s, reach, succ, parent_s, parent_succ)?;
            }

            let goal_reach = goal_of[neighbor as usize]
                .map(|gi| view.reach_goal(&labels, &rm.goals[gi]))
                .filter(|r| *r > 0.0);

            if exact {
                let store = &mut stored[neighbor as usize];
                let dominated = match options.dominance {
                    DominanceMode::Superset => {
                        store.iter().any(|st| st.labels.is_subset_of(&labels))
                    }
                    DominanceMode::ExactDuplicate => store.iter().any(|st| st.labels == labels),
                };
                if dominated {
                    continue;
                }
                if options.dominance == DominanceMode::Superset {
                    // Keep the antichain: stored strict supersets die.
                    store.retain(|st| {
                        if labels.is_subset_of(&st.labels) {
                            for &r in &st.records {
                                arena[r as usize].alive = false;
                            }
                            false
                        } else {
                            true
                        }
                    });
                }
                let mut records = Vec::with_capacity(2);
                records.push(push(
                    &mut arena,
                    &mut heap,
                    Record {
                        node: neighbor,
                        labels,
                        parent: idx,
                        succ,
                        cost,
                        is_goal: false,
                        alive: true,
                    },
                ));
                if let Some(reach_g) = goal_reach {
                    records.push(push(
                        &mut arena,
                        &mut heap,
                        Record {
                            node: neighbor,
                            labels,
                            parent: idx,
                            succ: s * reach_g,
                            cost,
                            is_goal: true,
                            alive: true,
                        },
                    ));
                }
                let store = &mut stored[neighbor as usize];
                store.push(Stored { labels, records });
                if options.check_invariants {
                    check_antichain(store)?;
                }
            } else {
                // Greedy: one best record per (node, goal flag), replaced
                // only by a strictly higher succ.
                let improves = |slot: Option<u32>, cand: f64, arena: &[Record]| match slot {
                    None => true,
                    Some(old) => cand > arena[old as usize].succ,
                };
                if improves(slots[neighbor as usize][0], succ, &arena) {
                    if let Some(old) = slots[neighbor as usize][0] {
                        arena[old as usize].alive = false;
                    }
                    let new = push(
                        &mut arena,
                        &mut heap,
                        Record {
                            node: neighbor,
                            labels,
                            parent: idx,
                            succ,
                            cost,
                            is_goal: false,
                            alive: true,
                        },
                    );
                    slots[neighbor as usize][0] = Some(new);
                }
                if let Some(reach_g) = goal_reach {
                    let succ_g = s * reach_g;
                    if improves(slots[neighbor as usize][1], succ_g, &arena) {
                        if let Some(old) = slots[neighbor as usize][1] {
                            arena[old as usize].alive = false;
                        }
                        let new = push(
                            &mut arena,
                            &mut heap,
                            Record {
                                node: neighbor,
                                labels,
                                parent: idx,
                                succ: succ_g,
                                cost,
                                is_goal: true,
                                alive: true,
                            },
                        );
                        slots[neighbor as usize][1] = Some(new);
                    }
                }
            }
        }
        if arena.len() > options.max_records {
            return Err(Error::SearchCap(options.max_records));
        }
    }
    Err(Error::NoSolution)
}

fn check_record(s: f64, reach: f64, succ: f64, parent_s: f64, parent_succ: f64) -> Result<()> {
    if !(0.0..=1.0 + SUCC_EPS).contains(&s) || !(0.0..=1.0 + SUCC_EPS).contains(&reach) {
        return Err(Error::InvariantViolation(format!(
            "record probabilities out of range: s={s}, reach={reach}"
        )));
    }
    if s > parent_s + SUCC_EPS {
        return Err(Error::InvariantViolation(format!(
            "survivability increased along a path: {s} > parent {parent_s}"
        )));
    }
    if succ > parent_succ + SUCC_EPS {
        return Err(Error::InvariantViolation(format!(
            "success increased along a path: {succ} > parent {parent_succ}"
        )));
    }
    Ok(())
}

fn check_antichain(store: &[Stored]) -> Result<()> {
    for (i, a) in store.iter().enumerate() {
        for b in store.iter().skip(i + 1) {
            if a.labels.is_subset_of(&b.labels) || b.labels.is_subset_of(&a.labels) {
                return Err(Error::InvariantViolation(
                    "stored label sets at a node are not an antichain".into(),
                ));
            }
        }
    }
    Ok(())
}

pub(crate) fn reconstruct(arena: &[Record], mut idx: u32) -> Vec<u32> {
    let mut path = Vec::new();
    loop {
        path.push(arena[idx as usize].node);
        if arena[idx as usize].parent == NO_PARENT {
            break;
        }
        idx = arena[idx as usize].parent;
    }
    path.reverse();
    path
}
