//! Comparison planners: constraint-count minimization (exact, greedy, and
//! most-likely-candidate) and the optimistic shortest path.
//!
//! These deliberately ignore what the success-maximizing search reasons
//! about: the count-based searches treat every pose label alike (target
//! labels included) and accept any goal node; the shortest path ignores the
//! uncertain objects entirely. Their returned plans still carry the full
//! success decomposition, computed after the fact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::search::{reconstruct, Record};
use super::{
    finish_plan, DominanceMode, PlanResult, Planner, SceneView, SearchOptions, SearchStats,
};
use crate::error::{Error, Result};
use crate::roadmap::{LabelSet, LabeledRoadmap};

const NO_PARENT: u32 = u32::MAX;

/// Heap key minimizing (label count, cost); deterministic total order.
struct McrKey {
    nlabels: u16,
    cost: f64,
    node: u32,
    idx: u32,
}

impl PartialEq for McrKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for McrKey {}
impl PartialOrd for McrKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for McrKey {
    // BinaryHeap is a max-heap; invert so the smallest key pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .nlabels
            .cmp(&self.nlabels)
            .then_with(|| other.cost.total_cmp(&self.cost))
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

struct StoredMcr {
    labels: LabelSet,
    cost: f64,
    records: Vec<u32>,
}

/// Minimum-constraint search: fewest distinct pose labels crossed, ties by
/// path cost; any goal node terminates. `mask` restricts which labels are
/// visible to the search (all, when `None`).
pub(crate) fn mcr(
    rm: &LabeledRoadmap,
    view: &SceneView,
    options: &SearchOptions,
    exact: bool,
    restricted: Option<(LabelSet, Vec<bool>)>,
) -> Result<PlanResult> {
    let started = Instant::now();
    let planner = match (exact, restricted.is_some()) {
        (_, true) => Planner::McrMlc,
        (true, false) => Planner::McrExact,
        (false, false) => Planner::McrGreedy,
    };
    let (mask, is_goal_node) = match restricted {
        Some((mask, goals)) => (Some(mask), goals),
        None => {
            let mut goals = vec![false; rm.nodes.len()];
            for g in &rm.goals {
                goals[g.node as usize] = true;
            }
            (None, goals)
        }
    };
    if !is_goal_node.iter().any(|g| *g) {
        return Err(Error::NoSolution);
    }

    let mut arena: Vec<Record> = Vec::new();
    let mut heap: BinaryHeap<McrKey> = BinaryHeap::new();
    let mut stored: Vec<Vec<StoredMcr>> = std::iter::repeat_with(Vec::new)
        .take(rm.nodes.len())
        .collect();
    // Greedy slot: best (label count, cost) seen per node.
    let mut slots: Vec<Option<u32>> = vec![None; rm.nodes.len()];
    let mut expansions: u64 = 0;

    let push = |arena: &mut Vec<Record>, heap: &mut BinaryHeap<McrKey>, rec: Record| -> u32 {
        let idx = arena.len() as u32;
        heap.push(McrKey {
            nlabels: rec.labels.len() as u16,
            cost: rec.cost,
            node: rec.node,
            idx,
        });
        arena.push(rec);
        idx
    };

    let root = push(
        &mut arena,
        &mut heap,
        Record {
            node: rm.start,
            labels: LabelSet::EMPTY,
            parent: NO_PARENT,
            succ: 0.0,
            cost: 0.0,
            is_goal: false,
            alive: true,
        },
    );
    if exact {
        stored[rm.start as usize].push(StoredMcr {
            labels: LabelSet::EMPTY,
            cost: 0.0,
            records: vec![root],
        });
    } else {
        slots[rm.start as usize] = Some(root);
    }

    while let Some(key) = heap.pop() {
        let idx = key.idx;
        if !arena[idx as usize].alive {
            continue;
        }
        let node = arena[idx as usize].node;
        if is_goal_node[node as usize] {
            let stats = SearchStats {
                expansions,
                records_stored: arena.len() as u64,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            return finish_plan(planner, rm, view, reconstruct(&arena, idx), stats);
        }
        expansions += 1;

        let (parent_labels, parent_cost) = {
            let r = &arena[idx as usize];
            (r.labels, r.cost)
        };
        for &edge_idx in rm.adjacency(node) {
            let edge = &rm.edges[edge_idx as usize];
            let neighbor = if edge.a == node { edge.b } else { edge.a };
            let edge_labels = match &mask {
                Some(m) => edge.labels.intersect(m),
                None => edge.labels,
            };
            let labels = parent_labels.union(&edge_labels);
            let cost = parent_cost + edge.length;

            if exact {
                let store = &mut stored[neighbor as usize];
                let dominated = store.iter().any(|st| match options.dominance {
                    DominanceMode::Superset => {
                        st.labels.is_subset_of(&labels) && (st.labels != labels || st.cost <= cost)
                    }
                    DominanceMode::ExactDuplicate => st.labels == labels && st.cost <= cost,
                });
                if dominated {
                    continue;
                }
                store.retain(|st| {
                    let evict = match options.dominance {
                        // Equal sets with a worse cost also leave.
                        DominanceMode::Superset => {
                            labels.is_subset_of(&st.labels)
                                && (st.labels != labels || st.cost > cost)
                        }
                        DominanceMode::ExactDuplicate => st.labels == labels && st.cost > cost,
                    };
                    if evict {
                        for &r in &st.records {
                            arena[r as usize].alive = false;
                        }
                    }
                    !evict
                });
                let rec = push(
                    &mut arena,
                    &mut heap,
                    Record {
                        node: neighbor,
                        labels,
                        parent: idx,
                        succ: 0.0,
                        cost,
                        is_goal: false,
                        alive: true,
                    },
                );
                stored[neighbor as usize].push(StoredMcr {
                    labels,
                    cost,
                    records: vec![rec],
                });
            } else {
                let improves = match slots[neighbor as usize] {
                    None => true,
                    Some(old) => {
                        let o = &arena[old as usize];
                        (labels.len(), cost) < (o.labels.len(), o.cost)
                    }
                };
                if improves {
                    if let Some(old) = slots[neighbor as usize] {
                        arena[old as usize].alive = false;
                    }
                    let rec = push(
                        &mut arena,
                        &mut heap,
                        Record {
                            node: neighbor,
                            labels,
                            parent: idx,
                            succ: 0.0,
                            cost,
                            is_goal: false,
                            alive: true,
                        },
                    );
                    slots[neighbor as usize] = Some(rec);
                }
            }
        }
        if arena.len() > options.max_records {
            return Err(Error::SearchCap(options.max_records));
        }
    }
    Err(Error::NoSolution)
}

/// Constraint-count search over each object's single most likely hypothesis
/// (ties to the lowest index). Only goals that can pick the target's most
/// likely hypothesis count.
pub(crate) fn mcr_most_likely(
    rm: &LabeledRoadmap,
    view: &SceneView,
    options: &SearchOptions,
) -> Result<PlanResult> {
    let table = &rm.labels;
    let mut mask = LabelSet::EMPTY;
    let mut target_mlc: Option<u32> = None;
    for (_id, start, count) in table.object_ranges() {
        let mut best = *start;
        for dense in *start..start + count {
            if table.entry(dense).weight > table.entry(best).weight {
                best = dense;
            }
        }
        mask.insert(best);
        if table.entry(best).is_target {
            target_mlc = Some(table.entry(best).hyp_index);
        }
    }
    let target_mlc =
        target_mlc.ok_or_else(|| Error::InvalidScene("scene target has no hypotheses".into()))?;

    let mut goals = vec![false; rm.nodes.len()];
    let mut any = false;
    for g in &rm.goals {
        if g.j.contains(&target_mlc) {
            goals[g.node as usize] = true;
            any = true;
        }
    }
    if !any {
        return Err(Error::NoSolution);
    }
    mcr(rm, view, options, true, Some((mask, goals)))
}

/// Dijkstra key: lowest cost first.
struct OspKey {
    cost: f64,
    node: u32,
    idx: u32,
}

impl PartialEq for OspKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OspKey {}
impl PartialOrd for OspKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OspKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Shortest path by edge length to the nearest goal node, blind to the
/// uncertain objects.
pub(crate) fn osp(rm: &LabeledRoadmap, view: &SceneView) -> Result<PlanResult> {
    let started = Instant::now();
    let mut goal_node = vec![false; rm.nodes.len()];
    for g in &rm.goals {
        goal_node[g.node as usize] = true;
    }

    let mut arena: Vec<Record> = Vec::new();
    let mut heap: BinaryHeap<OspKey> = BinaryHeap::new();
    let mut settled = vec![false; rm.nodes.len()];
    let mut expansions: u64 = 0;

    arena.push(Record {
        node: rm.start,
        labels: LabelSet::EMPTY,
        parent: NO_PARENT,
        succ: 0.0,
        cost: 0.0,
        is_goal: false,
        alive: true,
    });
    heap.push(OspKey {
        cost: 0.0,
        node: rm.start,
        idx: 0,
    });

    while let Some(key) = heap.pop() {
        let node = key.node as usize;
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if goal_node[node] {
            let stats = SearchStats {
                expansions,
                records_stored: arena.len() as u64,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            return finish_plan(Planner::Osp, rm, view, reconstruct(&arena, key.idx), stats);
        }
        expansions += 1;
        let parent_cost = arena[key.idx as usize].cost;
        for &edge_idx in rm.adjacency(key.node) {
            let edge = &rm.edges[edge_idx as usize];
            let neighbor = if edge.a == key.node { edge.b } else { edge.a };
            if settled[neighbor as usize] {
                continue;
            }
            let cost = parent_cost + edge.length;
            let idx = arena.len() as u32;
            arena.push(Record {
                node: neighbor,
                labels: LabelSet::EMPTY,
                parent: key.idx,
                succ: 0.0,
                cost,
                is_goal: false,
                alive: true,
            });
            heap.push(OspKey {
                cost,
                node: neighbor,
                idx,
            });
        }
    }
    Err(Error::NoSolution)
}
