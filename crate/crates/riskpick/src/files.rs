//! On-disk formats. Scenes, ground truths, plans, and equivalence instances
//! are JSON documents that round-trip losslessly; the roadmap document
//! stores labels as (object id, hypothesis index) pairs and is rebuilt
//! against its scene on load; the benchmark configuration is a flat
//! key = value text file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::bench::BenchmarkConfig;
use crate::eval::reduction::McrInstance;
use crate::planner::{PlanResult, Planner};
use crate::roadmap::{GoalSpec, LabelSet, LabelTable, LabeledEdge, LabeledRoadmap};
use crate::scene::{BeliefScene, GroundTruthScene};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn save_scene(path: &Path, scene: &BeliefScene) -> Result<()> {
    write(path, &serde_json::to_string_pretty(scene)?)
}

pub fn load_scene(path: &Path) -> Result<BeliefScene> {
    let scene: BeliefScene = serde_json::from_str(&read(path)?)?;
    scene.validate()?;
    Ok(scene)
}

pub fn save_ground_truth(path: &Path, gt: &GroundTruthScene) -> Result<()> {
    write(path, &serde_json::to_string_pretty(gt)?)
}

pub fn load_ground_truth(path: &Path) -> Result<GroundTruthScene> {
    let gt: GroundTruthScene = serde_json::from_str(&read(path)?)?;
    gt.validate()?;
    Ok(gt)
}

pub fn save_plan(path: &Path, plan: &PlanResult) -> Result<()> {
    write(path, &serde_json::to_string_pretty(plan)?)
}

pub fn load_plan(path: &Path) -> Result<PlanResult> {
    Ok(serde_json::from_str(&read(path)?)?)
}

pub fn save_mcr_instance(path: &Path, instance: &McrInstance) -> Result<()> {
    write(path, &serde_json::to_string_pretty(instance)?)
}

pub fn load_mcr_instance(path: &Path) -> Result<McrInstance> {
    let instance: McrInstance = serde_json::from_str(&read(path)?)?;
    instance.validate()?;
    Ok(instance)
}

/// Serialized roadmap: node table, edge table with label pairs, start, and
/// goal table.
#[derive(Serialize, Deserialize)]
struct RoadmapDoc {
    nodes: Vec<Vec<f64>>,
    edges: Vec<EdgeDoc>,
    start: u32,
    goals: Vec<GoalSpec>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: u32,
    b: u32,
    length: f64,
    labels: Vec<(u32, u32)>,
}

pub fn save_roadmap(path: &Path, rm: &LabeledRoadmap) -> Result<()> {
    let doc = RoadmapDoc {
        nodes: rm.nodes.iter().map(|c| c.0.clone()).collect(),
        edges: rm
            .edges
            .iter()
            .map(|e| EdgeDoc {
                a: e.a,
                b: e.b,
                length: e.length,
                labels: rm.labels.pairs(&e.labels),
            })
            .collect(),
        start: rm.start,
        goals: rm.goals.clone(),
    };
    write(path, &serde_json::to_string(&doc)?)
}

/// Loads a roadmap document, resolving its label pairs against the scene.
pub fn load_roadmap(path: &Path, scene: &BeliefScene) -> Result<LabeledRoadmap> {
    let doc: RoadmapDoc = serde_json::from_str(&read(path)?)?;
    let table = LabelTable::from_scene(scene)?;
    let edges = doc
        .edges
        .into_iter()
        .map(|e| {
            let mut labels = LabelSet::EMPTY;
            for (object, hyp) in e.labels {
                let dense = table.dense_index(object, hyp).ok_or_else(|| {
                    Error::SceneMismatch(format!(
                        "roadmap label ({object}, {hyp}) not present in the scene"
                    ))
                })?;
                labels.insert(dense);
            }
            Ok(LabeledEdge {
                a: e.a,
                b: e.b,
                length: e.length,
                labels,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledRoadmap::assemble(
        doc.nodes
            .into_iter()
            .map(crate::geometry::Configuration)
            .collect(),
        edges,
        doc.start,
        doc.goals,
        table,
    )
}

/// Parses a flat `key = value` benchmark configuration. Unknown keys are
/// rejected; omitted keys keep their defaults. Lists are comma-separated.
pub fn parse_bench_config(text: &str) -> Result<BenchmarkConfig> {
    let mut cfg = BenchmarkConfig::default();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| Error::Parse(format!("line {}: {e}", lineno + 1));
        match key {
            "scenarios" => cfg.scenarios = list(value).map(str::to_string).collect(),
            "k" => cfg.k_values = parse_list(value).map_err(bad)?,
            "levels" => cfg.levels = parse_list(value).map_err(bad)?,
            "roadmaps_per_gt" => {
                cfg.roadmaps_per_gt = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "samples" => cfg.samples = value.parse().map_err(|e| bad(format!("{e}")))?,
            "seed" => cfg.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "resolution" => cfg.resolution = value.parse().map_err(|e| bad(format!("{e}")))?,
            "planners" => {
                cfg.planners = list(value)
                    .map(|p| p.parse::<Planner>())
                    .collect::<Result<_>>()?;
            }
            "jobs" => cfg.jobs = value.parse().map_err(|e| bad(format!("{e}")))?,
            "measure_time" => cfg.measure_time = parse_bool(value).map_err(bad)?,
            "nontarget_existence" => {
                cfg.nontarget_existence = value.parse().map_err(|e| bad(format!("{e}")))?;
            }
            "inject_goals" => cfg.inject_goals = parse_bool(value).map_err(bad)?,
            "check_invariants" => cfg.check_invariants = parse_bool(value).map_err(bad)?,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_bench_config(path: &Path) -> Result<BenchmarkConfig> {
    parse_bench_config(&read(path)?)
}

/// Renders a configuration back to the flat text format.
pub fn render_bench_config(cfg: &BenchmarkConfig) -> String {
    format!(
        "scenarios = {}\nk = {}\nlevels = {}\nroadmaps_per_gt = {}\nsamples = {}\nseed = {}\nresolution = {}\nplanners = {}\njobs = {}\nmeasure_time = {}\nnontarget_existence = {}\ninject_goals = {}\ncheck_invariants = {}\n",
        cfg.scenarios.join(","),
        join(&cfg.k_values),
        join(&cfg.levels),
        cfg.roadmaps_per_gt,
        cfg.samples,
        cfg.seed,
        cfg.resolution,
        cfg.planners.iter().map(|p| p.name()).collect::<Vec<_>>().join(","),
        cfg.jobs,
        cfg.measure_time,
        cfg.nontarget_existence,
        cfg.inject_goals,
        cfg.check_invariants,
    )
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    list(value)
        .map(|s| s.parse::<T>().map_err(|e| format!("bad value '{s}': {e}")))
        .collect()
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_config_round_trips_through_text() {
        let cfg = BenchmarkConfig {
            roadmaps_per_gt: 5,
            seed: 42,
            measure_time: false,
            ..BenchmarkConfig::default()
        };
        let text = render_bench_config(&cfg);
        let parsed = parse_bench_config(&text).unwrap();
        assert_eq!(cfg, parsed);
    }

    #[test]
    fn bench_config_rejects_unknown_keys_and_bad_values() {
        assert!(parse_bench_config("flux_capacitor = 3").is_err());
        assert!(parse_bench_config("k = 0").is_err());
        assert!(parse_bench_config("levels = 9").is_err());
        assert!(parse_bench_config("planners = warp-drive").is_err());
        assert!(parse_bench_config("measure_time = yes").is_err());
    }

    #[test]
    fn bench_config_parses_comments_and_spacing() {
        let cfg = parse_bench_config(
            "# sweep\nscenarios = clutter\n k = 1, 4 \nlevels=4 # mid\nseed = 7\n\n",
        )
        .unwrap();
        assert_eq!(cfg.scenarios, vec!["clutter".to_string()]);
        assert_eq!(cfg.k_values, vec![1, 4]);
        assert_eq!(cfg.levels, vec![4]);
        assert_eq!(cfg.seed, 7);
    }
}
