//! Command-line front end: scene generation, roadmap construction,
//! planning, execution, Monte-Carlo validation, benchmark sweeps, and the
//! count-search equivalence check.
//!
//! Exit codes: 0 success, 1 planner found no solution (or an equivalence
//! check failed), 2 bad input or usage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riskpick::error::Error;
use riskpick::eval::bench::{metrics_csv, raw_report, run_benchmark};
use riskpick::eval::reduction::{reduction_check, ReductionReport};
use riskpick::eval::{execute_path, monte_carlo_success, scenarios, ExecOptions};
use riskpick::files;
use riskpick::geometry::DEFAULT_RESOLUTION;
use riskpick::planner::{plan, PlanResult, Planner, SearchOptions};
use riskpick::roadmap::{build_labeled_roadmap, RoadmapParams};
use riskpick::scene::{generate_hypotheses, GenerateOptions, WeightMode};

#[derive(Parser)]
#[command(
    name = "riskpick",
    about = "Risk-aware picking under discrete pose uncertainty",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate perception: turn a ground-truth scene into a belief scene.
    GenScene(GenSceneArgs),
    /// Sample and label a roadmap for a belief scene.
    BuildRoadmap(BuildRoadmapArgs),
    /// Run a planner on a labeled roadmap.
    Plan(PlanArgs),
    /// Execute a plan against a ground-truth scene.
    Exec(ExecArgs),
    /// Monte-Carlo validation of a plan's success probability.
    Validate(ValidateArgs),
    /// Run a benchmark sweep from a config file.
    Bench(BenchArgs),
    /// Equivalence check between count-minimal and probabilistic search.
    ReduceCheck(ReduceCheckArgs),
}

#[derive(Args)]
struct GenSceneArgs {
    /// Ground-truth scene file.
    #[arg(
        long,
        conflicts_with = "scenario",
        required_unless_present = "scenario"
    )]
    gt: Option<PathBuf>,
    /// Bundled scenario name (narrow-passage | clutter | arch).
    #[arg(long)]
    scenario: Option<String>,
    /// Write the ground truth used (handy with --scenario).
    #[arg(long)]
    gt_out: Option<PathBuf>,
    /// Pose hypotheses per object.
    #[arg(long = "k", default_value_t = 4)]
    k: usize,
    /// Uncertainty level, 1 (tight) to 7 (loose).
    #[arg(long, default_value_t = 4)]
    level: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Existence probability assigned to non-target objects.
    #[arg(long, default_value_t = 1.0)]
    nontarget_existence: f64,
    /// Weight sampled hypotheses equally instead of by distance from truth.
    #[arg(long)]
    uniform_weights: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildRoadmapArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Roadmap sample count.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Configuration-space step for swept collision checks.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    /// Skip injecting one exact grasp configuration per target hypothesis.
    #[arg(long)]
    no_inject_goals: bool,
    /// Override the scene's grasp position tolerance.
    #[arg(long)]
    grasp_tol: Option<f64>,
    /// Override the scene's grasp orientation tolerance (degrees).
    #[arg(long)]
    grasp_rot_tol: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    roadmap: PathBuf,
    #[arg(long)]
    scene: PathBuf,
    /// max-success-exact | max-success-greedy | mcr-exact | mcr-greedy |
    /// mcr-mlc | osp
    #[arg(long)]
    planner: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verify probability invariants of every search record.
    #[arg(long)]
    check_invariants: bool,
}

#[derive(Args)]
struct ExecArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    /// Leave the target out of the reported collision count.
    #[arg(long)]
    exclude_target_collisions: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    scene: PathBuf,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Flat key = value sweep description.
    #[arg(long)]
    config: PathBuf,
    /// Directory for metrics.csv and trials.jsonl.
    #[arg(long)]
    out_dir: PathBuf,
    /// Parallel benchmark cells (overrides the config).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReduceCheckArgs {
    /// Count-minimization instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated pose probabilities to check.
    #[arg(long, default_value = "0.2,0.5")]
    xi: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoSolution | Error::NoGoals => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::GenScene(args) => gen_scene(args),
        Command::BuildRoadmap(args) => build_roadmap_cmd(args),
        Command::Plan(args) => plan_cmd(args),
        Command::Exec(args) => exec_cmd(args),
        Command::Validate(args) => validate_cmd(args),
        Command::Bench(args) => bench_cmd(args),
        Command::ReduceCheck(args) => reduce_check_cmd(args),
    }
}

fn gen_scene(args: GenSceneArgs) -> Result<(), Error> {
    let gt = match (&args.gt, &args.scenario) {
        (Some(path), None) => files::load_ground_truth(path)?,
        (None, Some(name)) => scenarios::by_name(name)?,
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --gt or --scenario".into(),
            ))
        }
    };
    let options = GenerateOptions {
        nontarget_existence: args.nontarget_existence,
        weight_mode: if args.uniform_weights {
            WeightMode::Uniform
        } else {
            WeightMode::Distance
        },
    };
    let scene = generate_hypotheses(&gt, args.k, args.level, args.seed, &options)?;
    if let Some(path) = &args.gt_out {
        files::save_ground_truth(path, &gt)?;
    }
    files::save_scene(&args.out, &scene)?;
    println!(
        "scene: {} objects, {} hypotheses each, level {} -> {}",
        scene.objects.len(),
        args.k,
        args.level,
        args.out.display()
    );
    Ok(())
}

fn build_roadmap_cmd(args: BuildRoadmapArgs) -> Result<(), Error> {
    let mut scene = files::load_scene(&args.scene)?;
    if let Some(tol) = args.grasp_tol {
        scene.workspace.grasp.position_tolerance = tol;
    }
    if let Some(deg) = args.grasp_rot_tol {
        scene.workspace.grasp.orientation_tolerance = deg.to_radians();
    }
    let params = RoadmapParams {
        samples: args.samples,
        seed: args.seed,
        resolution: args.resolution,
        inject_goal_configs: !args.no_inject_goals,
    };
    let (rm, coverage) = build_labeled_roadmap(&scene, &params)?;
    files::save_roadmap(&args.out, &rm)?;
    let labeled = rm.edges.iter().filter(|e| !e.labels.is_empty()).count();
    println!(
        "roadmap: {} nodes, {} edges ({} labeled), {} goal nodes -> {}",
        rm.nodes.len(),
        rm.edges.len(),
        labeled,
        rm.goals.len(),
        args.out.display()
    );
    if !coverage.unreachable_hypotheses.is_empty() {
        println!(
            "note: no goal reaches target hypotheses {:?}",
            coverage.unreachable_hypotheses
        );
    }
    Ok(())
}

fn plan_cmd(args: PlanArgs) -> Result<(), Error> {
    let scene = files::load_scene(&args.scene)?;
    let rm = files::load_roadmap(&args.roadmap, &scene)?;
    let planner: Planner = args.planner.parse()?;
    let options = SearchOptions {
        check_invariants: args.check_invariants,
        ..SearchOptions::default()
    };
    let result = plan(planner, &rm, &scene, &options)?;
    print_plan(&result);
    if let Some(path) = &args.out {
        files::save_plan(path, &result)?;
        println!("plan -> {}", path.display());
    }
    Ok(())
}

fn print_plan(result: &PlanResult) {
    println!("planner:       {}", result.planner);
    println!(
        "path:          {} nodes, cost {:.6}",
        result.path.len(),
        result.cost
    );
    println!("survivability: {:.6}", result.survivability);
    println!("reach:         {:.6}", result.reach);
    println!("succ:          {:.6} (survivability x reach)", result.succ);
    let labels = result
        .labels
        .iter()
        .map(|(i, j)| format!("({i},{j})"))
        .collect::<Vec<_>>()
        .join(" ");
    println!(
        "labels:        [{}]{}",
        labels,
        if result.labels.is_empty() {
            " none"
        } else {
            ""
        }
    );
    println!(
        "search:        {} expansions, {} records, {:.4} s",
        result.stats.expansions, result.stats.records_stored, result.stats.wall_time_s
    );
}

fn exec_cmd(args: ExecArgs) -> Result<(), Error> {
    let result = files::load_plan(&args.plan)?;
    let gt = files::load_ground_truth(&args.gt)?;
    let options = ExecOptions {
        resolution: args.resolution,
        count_target_collisions: !args.exclude_target_collisions,
    };
    let outcome = execute_path(&result.path_configs, &gt, &options)?;
    println!(
        "executed: {} collisions {:?}, reached={}, success={}, cost {:.6}",
        outcome.num_collided,
        outcome.collided_object_ids,
        outcome.reached_target,
        outcome.success,
        outcome.path_cost
    );
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&outcome)?)?;
    }
    Ok(())
}

fn validate_cmd(args: ValidateArgs) -> Result<(), Error> {
    let result = files::load_plan(&args.plan)?;
    let scene = files::load_scene(&args.scene)?;
    let options = ExecOptions {
        resolution: args.resolution,
        count_target_collisions: true,
    };
    let report = monte_carlo_success(&result, &scene, args.samples, args.seed, &options)?;
    println!(
        "analytic succ {:.6}; empirical {:.6} over {} trials; 99% CI [{:.6}, {:.6}]; {}",
        report.analytic_succ,
        report.empirical_success,
        report.trials,
        report.ci_low,
        report.ci_high,
        if report.analytic_inside_ci {
            "analytic inside CI"
        } else {
            "ANALYTIC OUTSIDE CI"
        }
    );
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<(), Error> {
    let mut cfg = files::load_bench_config(&args.config)?;
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    let run = run_benchmark(&cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let metrics_path = args.out_dir.join("metrics.csv");
    let trials_path = args.out_dir.join("trials.jsonl");
    std::fs::write(&metrics_path, metrics_csv(&run.rows))?;
    std::fs::write(&trials_path, raw_report(&run.raw))?;
    println!(
        "bench: {} trials over {} cells -> {} and {}",
        run.raw.len(),
        run.rows.len(),
        metrics_path.display(),
        trials_path.display()
    );
    Ok(())
}

fn reduce_check_cmd(args: ReduceCheckArgs) -> Result<(), Error> {
    let instance = files::load_mcr_instance(&args.instance)?;
    let mut reports: Vec<ReductionReport> = Vec::new();
    for xi_str in args.xi.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let xi: f64 = xi_str
            .parse()
            .map_err(|e| Error::Parse(format!("bad xi '{xi_str}': {e}")))?;
        let report = reduction_check(&instance, xi)?;
        println!(
            "xi={:.3}: search m={:?} succ={:?}; enumeration m={:?} expected succ={:?} -> {}",
            report.xi,
            report.m_search,
            report.succ,
            report.m_brute,
            report.expected_succ,
            if report.equivalent {
                "equivalent"
            } else {
                "MISMATCH"
            }
        );
        reports.push(report);
    }
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&reports)?)?;
    }
    if reports.iter().all(|r| r.equivalent) {
        Ok(())
    } else {
        Err(Error::InvariantViolation(
            "count-search equivalence check failed; see the mismatch lines above".into(),
        ))
    }
}
