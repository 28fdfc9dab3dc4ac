//! Benchmark orchestration: sweep scenarios, hypothesis counts, and
//! uncertainty levels; plan with every requested planner; execute against
//! the true scene; aggregate per-cell metrics.
//!
//! All randomness derives from the one master seed keyed by cell values, so
//! editing unrelated parts of a configuration leaves other cells' draws
//! unchanged, and two runs of the same configuration agree byte for byte
//! (with timing capture disabled, since wall time is the one quantity the
//! seeds cannot pin down).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{execute_path, scenarios, ExecOptions};
use crate::error::{Error, Result};
use crate::planner::{plan, Planner, SearchOptions};
use crate::roadmap::{build_labeled_roadmap, RoadmapParams};
use crate::scene::{generate_hypotheses, GenerateOptions, WeightMode, PROB_TOLERANCE};
use crate::util::{derive_seed, mean, variance};

/// One full sweep description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub scenarios: Vec<String>,
    pub k_values: Vec<usize>,
    pub levels: Vec<u32>,
    pub roadmaps_per_gt: usize,
    pub samples: usize,
    pub seed: u64,
    pub resolution: f64,
    pub planners: Vec<Planner>,
    /// Worker threads for cells; 0 uses the global default.
    pub jobs: usize,
    /// Record wall-clock planning time. Leave off for byte-reproducible
    /// output.
    pub measure_time: bool,
    pub nontarget_existence: f64,
    pub inject_goals: bool,
    /// Verify the probability invariants of every search record.
    pub check_invariants: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            scenarios: scenarios::NAMES.iter().map(|s| s.to_string()).collect(),
            k_values: vec![1, 4, 7],
            levels: vec![1, 4, 7],
            roadmaps_per_gt: 35,
            samples: 1000,
            seed: 0,
            resolution: crate::geometry::DEFAULT_RESOLUTION,
            planners: Planner::ALL.to_vec(),
            jobs: 0,
            measure_time: true,
            nontarget_existence: 1.0,
            inject_goals: true,
            check_invariants: true,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.k_values.is_empty() || self.levels.is_empty() {
            return Err(Error::InvalidArgument(
                "benchmark needs at least one scenario, K, and level".into(),
            ));
        }
        if self.k_values.iter().any(|k| !(1..=7).contains(k)) {
            return Err(Error::InvalidArgument("K values must be in 1..=7".into()));
        }
        if self.levels.iter().any(|l| !(1..=7).contains(l)) {
            return Err(Error::InvalidArgument("levels must be in 1..=7".into()));
        }
        if self.roadmaps_per_gt < 1 {
            return Err(Error::InvalidArgument(
                "roadmaps_per_gt must be at least 1".into(),
            ));
        }
        if self.planners.is_empty() {
            return Err(Error::InvalidArgument(
                "benchmark needs at least one planner".into(),
            ));
        }
        for s in &self.scenarios {
            scenarios::by_name(s)?;
        }
        Ok(())
    }
}

/// One (scenario, K, level, roadmap, planner) trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub k: usize,
    pub level: u32,
    pub roadmap_index: usize,
    pub planner: Planner,
    pub solved: bool,
    /// None when the planner found no plan.
    pub collisions: Option<usize>,
    pub success: bool,
    pub cost: Option<f64>,
    pub plan_time_s: f64,
    pub analytic_survivability: Option<f64>,
    pub analytic_reach: Option<f64>,
    pub analytic_succ: Option<f64>,
}

/// Aggregated metrics for one (planner, scenario, K, level) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub planner: Planner,
    pub scenario: String,
    pub k: usize,
    pub level: u32,
    /// Over solved trials; None when the planner never solved the cell.
    pub mean_collisions: Option<f64>,
    pub var_collisions: Option<f64>,
    /// Over all trials; planner failures count as non-success.
    pub success_rate: f64,
    pub mean_cost: Option<f64>,
    pub mean_plan_time_s: f64,
    pub trials: usize,
    pub failures: usize,
}

/// Everything a sweep produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub rows: Vec<MetricsRow>,
    pub raw: Vec<TrialRecord>,
    /// Largest |sum of hypothesis probabilities - existence| observed.
    pub max_normalization_residual: f64,
}

pub const METRICS_HEADER: &str =
    "planner,scenario,K,level,mean_collisions,var_collisions,success_rate,mean_cost,mean_plan_time_s";

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.6}"),
        None => "na".to_string(),
    }
}

/// Renders the pinned comma-separated metrics table.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.6},{},{:.6}\n",
            r.planner,
            r.scenario,
            r.k,
            r.level,
            fmt_opt(r.mean_collisions),
            fmt_opt(r.var_collisions),
            r.success_rate,
            fmt_opt(r.mean_cost),
            r.mean_plan_time_s,
        ));
    }
    out
}

/// Renders the per-trial companion report, one JSON object per line.
pub fn raw_report(raw: &[TrialRecord]) -> String {
    let mut out = String::new();
    for t in raw {
        out.push_str(&serde_json::to_string(t).expect("trial serializes"));
        out.push('\n');
    }
    out
}

struct CellOutput {
    trials: Vec<TrialRecord>,
    max_residual: f64,
}

/// Runs the full sweep. Per-cell planner failures are recorded, not fatal;
/// anything that indicates a broken model (invariant violations, invalid
/// configuration) aborts.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchRun> {
    cfg.validate()?;

    let mut cells = Vec::new();
    for scenario in &cfg.scenarios {
        for &k in &cfg.k_values {
            for &level in &cfg.levels {
                for r in 0..cfg.roadmaps_per_gt {
                    cells.push((scenario.clone(), k, level, r));
                }
            }
        }
    }

    let run_cells = |cells: &[(String, usize, u32, usize)]| -> Result<Vec<CellOutput>> {
        cells
            .par_iter()
            .map(|(scenario, k, level, r)| run_cell(cfg, scenario, *k, *level, *r))
            .collect()
    };

    let outputs = if cfg.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| run_cells(&cells))?
    } else {
        run_cells(&cells)?
    };

    let mut raw: Vec<TrialRecord> = Vec::new();
    let mut max_residual: f64 = 0.0;
    for out in outputs {
        raw.extend(out.trials);
        max_residual = max_residual.max(out.max_residual);
    }
    raw.sort_by(|a, b| {
        (&a.scenario, a.k, a.level, a.roadmap_index, a.planner.name()).cmp(&(
            &b.scenario,
            b.k,
            b.level,
            b.roadmap_index,
            b.planner.name(),
        ))
    });

    let rows = aggregate(cfg, &raw);
    Ok(BenchRun {
        rows,
        raw,
        max_normalization_residual: max_residual,
    })
}

fn cell_tag(scenario: &str, k: usize, level: u32, r: usize, stage: &str) -> String {
    format!("{stage}/{scenario}/k{k}/l{level}/r{r}")
}

fn run_cell(
    cfg: &BenchmarkConfig,
    scenario: &str,
    k: usize,
    level: u32,
    r: usize,
) -> Result<CellOutput> {
    let gt = scenarios::by_name(scenario)?;
    let scene_seed = derive_seed(cfg.seed, &cell_tag(scenario, k, level, r, "scene"), 0);
    let options = GenerateOptions {
        nontarget_existence: cfg.nontarget_existence,
        weight_mode: WeightMode::Distance,
    };
    let scene = generate_hypotheses(&gt, k, level, scene_seed, &options)?;

    let mut max_residual: f64 = 0.0;
    for object in &scene.objects {
        let sum: f64 = object.hypotheses.iter().map(|h| h.prob).sum();
        let residual = (sum - object.existence_prob).abs();
        max_residual = max_residual.max(residual);
        if residual > PROB_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "generated belief for object {} off by {residual}",
                object.id
            )));
        }
    }

    let roadmap_seed = derive_seed(cfg.seed, &cell_tag(scenario, k, level, r, "roadmap"), 0);
    let params = RoadmapParams {
        samples: cfg.samples,
        seed: roadmap_seed,
        resolution: cfg.resolution,
        inject_goal_configs: cfg.inject_goals,
    };
    let rm = match build_labeled_roadmap(&scene, &params) {
        Ok((rm, _coverage)) => rm,
        // No configuration can grasp any believed target pose (for example
        // every hypothesis sunk into the support at high uncertainty): the
        // instance is unsolvable for every planner, which is a benchmark
        // observation, not a harness error.
        Err(Error::NoGoals) => {
            let trials = cfg
                .planners
                .iter()
                .map(|&planner| TrialRecord {
                    scenario: scenario.to_string(),
                    k,
                    level,
                    roadmap_index: r,
                    planner,
                    solved: false,
                    collisions: None,
                    success: false,
                    cost: None,
                    plan_time_s: 0.0,
                    analytic_survivability: None,
                    analytic_reach: None,
                    analytic_succ: None,
                })
                .collect();
            return Ok(CellOutput {
                trials,
                max_residual,
            });
        }
        Err(e) => return Err(e),
    };

    let search = SearchOptions {
        check_invariants: cfg.check_invariants,
        ..SearchOptions::default()
    };
    let exec = ExecOptions {
        resolution: cfg.resolution,
        count_target_collisions: true,
    };

    let mut trials = Vec::with_capacity(cfg.planners.len());
    for &planner in &cfg.planners {
        let started = std::time::Instant::now();
        let outcome = plan(planner, &rm, &scene, &search);
        let plan_time_s = if cfg.measure_time {
            started.elapsed().as_secs_f64()
        } else {
            0.0
        };
        let trial = match outcome {
            Ok(result) => {
                let executed = execute_path(&result.path_configs, &gt, &exec)?;
                TrialRecord {
                    scenario: scenario.to_string(),
                    k,
                    level,
                    roadmap_index: r,
                    planner,
                    solved: true,
                    collisions: Some(executed.num_collided),
                    success: executed.success,
                    cost: Some(executed.path_cost),
                    plan_time_s,
                    analytic_survivability: Some(result.survivability),
                    analytic_reach: Some(result.reach),
                    analytic_succ: Some(result.succ),
                }
            }
            // A planner that cannot solve a cell is an observation, not an
            // error of the harness.
            Err(Error::NoSolution) | Err(Error::NoGoals) | Err(Error::SearchCap(_)) => {
                TrialRecord {
                    scenario: scenario.to_string(),
                    k,
                    level,
                    roadmap_index: r,
                    planner,
                    solved: false,
                    collisions: None,
                    success: false,
                    cost: None,
                    plan_time_s,
                    analytic_survivability: None,
                    analytic_reach: None,
                    analytic_succ: None,
                }
            }
            Err(e) => return Err(e),
        };
        trials.push(trial);
    }
    Ok(CellOutput {
        trials,
        max_residual,
    })
}

fn aggregate(cfg: &BenchmarkConfig, raw: &[TrialRecord]) -> Vec<MetricsRow> {
    let mut rows = Vec::new();
    for scenario in &cfg.scenarios {
        for &k in &cfg.k_values {
            for &level in &cfg.levels {
                for &planner in &cfg.planners {
                    let cell: Vec<&TrialRecord> = raw
                        .iter()
                        .filter(|t| {
                            t.scenario == *scenario
                                && t.k == k
                                && t.level == level
                                && t.planner == planner
                        })
                        .collect();
                    if cell.is_empty() {
                        continue;
                    }
                    let solved: Vec<&&TrialRecord> = cell.iter().filter(|t| t.solved).collect();
                    let collisions: Vec<f64> = solved
                        .iter()
                        .filter_map(|t| t.collisions.map(|c| c as f64))
                        .collect();
                    let costs: Vec<f64> = solved.iter().filter_map(|t| t.cost).collect();
                    let times: Vec<f64> = solved.iter().map(|t| t.plan_time_s).collect();
                    let successes = cell.iter().filter(|t| t.success).count();
                    rows.push(MetricsRow {
                        planner,
                        scenario: scenario.clone(),
                        k,
                        level,
                        mean_collisions: (!collisions.is_empty()).then(|| mean(&collisions)),
                        var_collisions: (!collisions.is_empty()).then(|| variance(&collisions)),
                        success_rate: successes as f64 / cell.len() as f64,
                        mean_cost: (!costs.is_empty()).then(|| mean(&costs)),
                        mean_plan_time_s: if times.is_empty() { 0.0 } else { mean(&times) },
                        trials: cell.len(),
                        failures: cell.len() - solved.len(),
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.scenario, a.k, a.level, a.planner.name()).cmp(&(
            &b.scenario,
            b.k,
            b.level,
            b.planner.name(),
        ))
    });
    rows
}
