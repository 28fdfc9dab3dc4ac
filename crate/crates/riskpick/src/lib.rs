//! Risk-aware picking under discrete pose uncertainty.
//!
//! Perception gives each object in a cluttered scene a small set of
//! weighted pose hypotheses rather than one estimate. This crate builds
//! labeled roadmaps over such beliefs, searches them for paths that jointly
//! maximize the probability of avoiding every obstacle hypothesis and of
//! grasping the target at its true pose, and benchmarks the search against
//! count-based and optimistic baselines in a simulated 2D workspace.
//!
//! Modules:
//! - [`geometry`]: poses, shapes, robots, collision predicates.
//! - [`scene`]: pose-hypothesis beliefs, clustering, simulated generation.
//! - [`roadmap`]: roadmap construction, edge labeling, goal sets.
//! - [`planner`]: the success-maximizing searches and the baselines.
//! - [`eval`]: ground-truth execution, Monte-Carlo validation, benchmarks.
//! - [`files`]: on-disk formats for scenes, roadmaps, plans, and reports.

pub mod error;
pub mod eval;
pub mod files;
pub mod geometry;
pub mod planner;
pub mod roadmap;
pub mod scene;
pub mod util;

pub use error::{Error, Result};
