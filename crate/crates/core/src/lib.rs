//! Learned vertex-selection policies for best-first search on occupancy
//! grids.
//!
//! A policy picks which open vertex to expand next. Learned policies regress
//! the clairvoyant cost-to-go of a vertex from features of the partial search
//! state, and are trained by iterative dataset aggregation against a backward
//! breadth-first oracle. Classical heuristics and three other learners serve
//! as baselines.

pub mod bench;
pub mod error;
pub mod exec;
pub mod features;
pub mod gridworld;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod search;
pub mod trainers;

pub use error::{Error, Result};
pub use exec::Exec;
