//! Discrete pose-hypothesis beliefs: per-object existence probabilities,
//! weighted pose hypotheses, greedy clustering of scored candidates, and
//! simulated hypothesis generation around a ground-truth placement.
//!
//! The normalization invariant enforced everywhere: an object's hypothesis
//! probabilities are positive and sum to its existence probability X_i
//! (within 1e-9), and X_i <= 1.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PlacedShape, Pose2, Shape, WorkspaceSpec};
use crate::util::rng_for;

/// Tolerance for the sum-of-hypothesis-probabilities invariant.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Objects whose reported existence probability is at or below this
/// threshold are dropped when ingesting externally scored hypotheses.
pub const EXISTENCE_THRESHOLD: f64 = 0.3;

/// Default pose-clustering thresholds: merge candidates within both.
pub const CLUSTER_TRANS_THRESHOLD: f64 = 2.5;
pub const CLUSTER_ROT_THRESHOLD: f64 = 15.0 * std::f64::consts::PI / 180.0;

/// One weighted pose hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    #[serde(flatten)]
    pub pose: Pose2,
    pub prob: f64,
}

/// One raw scored pose candidate, before clustering.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredHypothesis {
    pub object_id: u32,
    pub pose: Pose2,
    pub score: f64,
}

/// An object's belief: shape, existence probability, and pose hypotheses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectBelief {
    pub id: u32,
    pub shape: Shape,
    pub existence_prob: f64,
    pub hypotheses: Vec<Hypothesis>,
}

impl ObjectBelief {
    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if !(0.0..=1.0 + PROB_TOLERANCE).contains(&self.existence_prob) {
            return Err(Error::InvariantViolation(format!(
                "object {}: existence probability {} outside [0,1]",
                self.id, self.existence_prob
            )));
        }
        if self.hypotheses.is_empty() {
            return Err(Error::InvalidScene(format!(
                "object {} has no pose hypotheses",
                self.id
            )));
        }
        let mut sum = 0.0;
        for h in &self.hypotheses {
            if !(h.prob > 0.0) {
                return Err(Error::InvariantViolation(format!(
                    "object {}: hypothesis probability {} must be positive",
                    self.id, h.prob
                )));
            }
            sum += h.prob;
        }
        if (sum - self.existence_prob).abs() > PROB_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "object {}: hypothesis probabilities sum to {sum}, existence is {}",
                self.id, self.existence_prob
            )));
        }
        Ok(())
    }

    pub fn placed_hypothesis(&self, j: usize) -> PlacedShape {
        PlacedShape::new(self.shape.clone(), self.hypotheses[j].pose)
    }
}

/// A full belief over a scene: certain static obstacles, uncertain objects,
/// and one designated target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefScene {
    pub workspace: WorkspaceSpec,
    pub static_obstacles: Vec<PlacedShape>,
    pub objects: Vec<ObjectBelief>,
    pub target_id: u32,
}

impl BeliefScene {
    /// Builds and validates a scene; the target must exist with X_t = 1.
    pub fn new(
        workspace: WorkspaceSpec,
        static_obstacles: Vec<PlacedShape>,
        objects: Vec<ObjectBelief>,
        target_id: u32,
    ) -> Result<Self> {
        let scene = Self {
            workspace,
            static_obstacles,
            objects,
            target_id,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// As `new`, but permits a target existence probability below one.
    ///
    /// Synthetic equivalence instances assign the single target pose the
    /// same probability as every obstacle pose, so the usual X_t = 1 rule
    /// does not apply to them.
    pub fn new_relaxed_target(
        workspace: WorkspaceSpec,
        static_obstacles: Vec<PlacedShape>,
        objects: Vec<ObjectBelief>,
        target_id: u32,
    ) -> Result<Self> {
        let scene = Self {
            workspace,
            static_obstacles,
            objects,
            target_id,
        };
        scene.validate_inner(false)?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inner(true)
    }

    fn validate_inner(&self, require_certain_target: bool) -> Result<()> {
        self.workspace.validate()?;
        let mut seen = std::collections::BTreeSet::new();
        for o in &self.objects {
            o.validate()?;
            if !seen.insert(o.id) {
                return Err(Error::InvalidScene(format!("duplicate object id {}", o.id)));
            }
        }
        let target = self.target().ok_or_else(|| {
            Error::InvalidScene(format!("target id {} not found", self.target_id))
        })?;
        if require_certain_target && (target.existence_prob - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "target existence probability must be 1, got {}",
                target.existence_prob
            )));
        }
        Ok(())
    }

    pub fn target(&self) -> Option<&ObjectBelief> {
        self.objects.iter().find(|o| o.id == self.target_id)
    }

    pub fn object(&self, id: u32) -> Option<&ObjectBelief> {
        self.objects.iter().find(|o| o.id == id)
    }
}

/// One object actually placed in a ground-truth scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub id: u32,
    pub shape: Shape,
    pub pose: Pose2,
}

/// A fully determined scene: what is really where.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthScene {
    pub workspace: WorkspaceSpec,
    pub static_obstacles: Vec<PlacedShape>,
    pub placements: Vec<Placement>,
    pub target_id: u32,
}

impl GroundTruthScene {
    pub fn validate(&self) -> Result<()> {
        self.workspace.validate()?;
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.placements {
            p.shape.validate()?;
            if !seen.insert(p.id) {
                return Err(Error::InvalidScene(format!("duplicate object id {}", p.id)));
            }
        }
        if self.target().is_none() {
            return Err(Error::InvalidScene(format!(
                "target id {} not placed in ground truth",
                self.target_id
            )));
        }
        Ok(())
    }

    pub fn target(&self) -> Option<&Placement> {
        self.placements.iter().find(|p| p.id == self.target_id)
    }
}

/// Greedy clustering of scored pose candidates.
///
/// Candidates are visited in order of descending score (ties by input
/// order). A candidate within both thresholds of an already retained
/// representative merges into the first such representative, adding its
/// score to the cluster. The top-K clusters by accumulated score survive
/// and are normalized to sum to `existence_prob`.
pub fn cluster_hypotheses(
    object_id: u32,
    shape: Shape,
    raw: &[ScoredHypothesis],
    k: usize,
    existence_prob: f64,
    trans_threshold: f64,
    rot_threshold: f64,
) -> Result<ObjectBelief> {
    if raw.is_empty() {
        return Err(Error::InvalidArgument(
            "cluster_hypotheses needs at least one candidate".into(),
        ));
    }
    if k < 1 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if !(trans_threshold > 0.0) || !(rot_threshold > 0.0) {
        return Err(Error::InvalidArgument(
            "clustering thresholds must be positive".into(),
        ));
    }

    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[b].score.total_cmp(&raw[a].score).then(a.cmp(&b)));

    // (pose, cluster score, rank of the representative).
    let mut clusters: Vec<(Pose2, f64, usize)> = Vec::new();
    for (rank, &i) in order.iter().enumerate() {
        let cand = &raw[i];
        let merged = clusters.iter_mut().find(|(pose, _, _)| {
            pose.position_distance(&cand.pose) <= trans_threshold
                && pose.rotation_distance(&cand.pose) <= rot_threshold
        });
        match merged {
            Some((_, score, _)) => *score += cand.score,
            None => clusters.push((cand.pose, cand.score, rank)),
        }
    }

    clusters.sort_by(|a, b| a.1.total_cmp(&b.1).reverse().then(a.2.cmp(&b.2)));
    clusters.truncate(k);

    let total: f64 = clusters.iter().map(|c| c.1).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(
            "candidate scores must have a positive sum".into(),
        ));
    }
    let hypotheses = clusters
        .into_iter()
        .map(|(pose, score, _)| Hypothesis {
            pose,
            prob: score / total * existence_prob,
        })
        .collect();

    let belief = ObjectBelief {
        id: object_id,
        shape,
        existence_prob,
        hypotheses,
    };
    belief.validate()?;
    Ok(belief)
}

/// Ingests externally scored hypotheses for several objects, dropping any
/// object whose existence probability does not exceed the threshold.
pub fn ingest_scored_objects(
    objects: Vec<(u32, Shape, f64, Vec<ScoredHypothesis>)>,
    k: usize,
    trans_threshold: f64,
    rot_threshold: f64,
    existence_threshold: f64,
) -> Result<Vec<ObjectBelief>> {
    let mut out = Vec::new();
    for (id, shape, x_i, raw) in objects {
        if x_i <= existence_threshold {
            continue;
        }
        out.push(cluster_hypotheses(
            id,
            shape,
            &raw,
            k,
            x_i,
            trans_threshold,
            rot_threshold,
        )?);
    }
    Ok(out)
}

/// How raw hypothesis weights are assigned inside the sampling bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Weight 1 / (1 + d), d the bound-normalized distance from truth.
    Distance,
    /// All sampled hypotheses weighted equally.
    Uniform,
}

/// Options for simulated hypothesis generation.
#[derive(Clone, Copy, Debug)]
pub struct GenerateOptions {
    /// Existence probability assigned to non-target objects.
    pub nontarget_existence: f64,
    pub weight_mode: WeightMode,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            nontarget_existence: 1.0,
            weight_mode: WeightMode::Distance,
        }
    }
}

/// Per-level noise bounds: level 1 is ±0.5 translation and ±5 degrees,
/// level 7 is ±3.5 and ±35 degrees, linear in between.
pub fn level_bounds(level: u32) -> Result<(f64, f64)> {
    if !(1..=7).contains(&level) {
        return Err(Error::InvalidArgument(format!(
            "uncertainty level must be in 1..=7, got {level}"
        )));
    }
    let t = 0.5 * level as f64;
    let r = (5.0 * level as f64).to_radians();
    Ok((t, r))
}

/// Simulates perception output: per present object, K pose hypotheses drawn
/// uniformly inside the level's noise box around the true pose, weighted by
/// distance from truth and normalized to the object's existence probability.
pub fn generate_hypotheses(
    gt: &GroundTruthScene,
    k: usize,
    level: u32,
    seed: u64,
    options: &GenerateOptions,
) -> Result<BeliefScene> {
    if k < 1 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&options.nontarget_existence) {
        return Err(Error::InvalidArgument(
            "non-target existence probability must be in [0,1]".into(),
        ));
    }
    gt.validate()?;
    let (t_bound, r_bound) = level_bounds(level)?;

    let mut objects = Vec::with_capacity(gt.placements.len());
    for placement in &gt.placements {
        let is_target = placement.id == gt.target_id;
        let existence = if is_target {
            1.0
        } else {
            options.nontarget_existence
        };
        if existence == 0.0 {
            continue;
        }
        let mut rng = rng_for(seed, "hypotheses", u64::from(placement.id));
        let mut raw: Vec<(Pose2, f64)> = Vec::with_capacity(k);
        for _ in 0..k {
            let dx = rng.gen_range(-t_bound..=t_bound);
            let dy = rng.gen_range(-t_bound..=t_bound);
            let dr = rng.gen_range(-r_bound..=r_bound);
            let pose = Pose2::new(
                placement.pose.x + dx,
                placement.pose.y + dy,
                placement.pose.theta + dr,
            );
            let weight = match options.weight_mode {
                WeightMode::Uniform => 1.0,
                WeightMode::Distance => {
                    let d_norm = (dx.hypot(dy) / t_bound).max(dr.abs() / r_bound);
                    1.0 / (1.0 + d_norm)
                }
            };
            raw.push((pose, weight));
        }
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        let hypotheses = raw
            .into_iter()
            .map(|(pose, w)| Hypothesis {
                pose,
                prob: w / total * existence,
            })
            .collect();
        objects.push(ObjectBelief {
            id: placement.id,
            shape: placement.shape.clone(),
            existence_prob: existence,
            hypotheses,
        });
    }

    BeliefScene::new(
        gt.workspace.clone(),
        gt.static_obstacles.clone(),
        objects,
        gt.target_id,
    )
}

/// Draws one ground truth from a belief: each object is present with its
/// existence probability and, when present, takes exactly one hypothesis
/// pose (hypotheses of an object are mutually exclusive).
pub fn sample_ground_truth(scene: &BeliefScene, seed: u64) -> GroundTruthScene {
    let mut placements = Vec::new();
    for (i, object) in scene.objects.iter().enumerate() {
        let mut rng = rng_for(seed, "truth", i as u64);
        let present = rng.gen_range(0.0..1.0) < object.existence_prob;
        if !present {
            continue;
        }
        // Conditional on presence: hypothesis j with probability prob_j / X_i.
        let mut u = rng.gen_range(0.0..1.0) * object.existence_prob;
        let mut chosen = object.hypotheses.len() - 1;
        for (j, h) in object.hypotheses.iter().enumerate() {
            if u < h.prob {
                chosen = j;
                break;
            }
            u -= h.prob;
        }
        placements.push(Placement {
            id: object.id,
            shape: object.shape.clone(),
            pose: object.hypotheses[chosen].pose,
        });
    }
    GroundTruthScene {
        workspace: scene.workspace.clone(),
        static_obstacles: scene.static_obstacles.clone(),
        placements,
        target_id: scene.target_id,
    }
}
