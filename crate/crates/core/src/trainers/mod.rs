//! Learners: imitation of the clairvoyant oracle with dataset aggregation
//! (SaIL), behavior cloning (SL), episodic Q-learning (QL) and the
//! cross-entropy method (CEM), plus shared evaluation.

mod cem;
mod collect;
mod dataset;
mod eval;
mod ql;
mod sail;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use cem::{cem_generation, cem_train, CemGeneration};
pub use collect::{collect_episode, mixture_select, CollectedEpisode, MixturePolicy};
pub use dataset::{read_dataset, write_dataset, Datapoint, Dataset, QDatapoint};
pub use eval::{evaluate_policy, EpisodeEval, EvalSummary, PolicySpec};
pub use ql::{ql_train, QlPolicy};
pub use sail::{sail_train, sl_train};

use crate::model::{FitConfig, Mlp};
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings { epochs: 3, batch_size: 64, learning_rate: 0.01 }
    }
}

impl FitSettings {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig { epochs: self.epochs, batch_size: self.batch_size }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QlConfig {
    pub samples_per_episode: usize,
    pub eps0: f64,
    /// Multiplicative epsilon decay per iteration.
    pub eps_decay: f64,
}

impl Default for QlConfig {
    fn default() -> Self {
        QlConfig { samples_per_episode: 100, eps0: 0.9, eps_decay: 0.7 }
    }
}

impl QlConfig {
    /// Epsilon for 1-based iteration `i`: `eps0 * decay^(i-1)`.
    pub fn epsilon(&self, i: usize) -> f64 {
        self.eps0 * self.eps_decay.powi(i as i32 - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CemConfig {
    pub population: usize,
    pub elite_fraction: f64,
    pub rollouts_per_candidate: usize,
    pub init_std: f64,
    pub std_floor: f64,
}

impl Default for CemConfig {
    fn default() -> Self {
        CemConfig { population: 40, elite_fraction: 0.2, rollouts_per_candidate: 5, init_std: 1.0, std_floor: 1e-3 }
    }
}

impl CemConfig {
    pub fn elite_count(&self) -> usize {
        ((self.population as f64 * self.elite_fraction).round() as usize).clamp(1, self.population)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// N: learner iterations (CEM generations).
    pub iterations: usize,
    /// m: episodes collected per iteration.
    pub episodes_per_iteration: usize,
    /// k: sampled timesteps per episode.
    pub samples_per_episode: usize,
    /// Mixing schedule `beta_i = beta0^i`.
    pub beta0: f64,
    /// Rollout horizon for data collection and validation.
    pub t_train: usize,
    pub t_test: usize,
    /// Behavior-cloning episode count.
    pub sl_episodes: usize,
    /// Execute the random probe action at sampled timesteps instead of only
    /// labelling it.
    pub execute_probes: bool,
    pub seed: u64,
    pub fit: FitSettings,
    pub ql: QlConfig,
    pub cem: CemConfig,
    pub exec: Exec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 15,
            episodes_per_iteration: 40,
            samples_per_episode: 50,
            beta0: 0.7,
            t_train: 1100,
            t_test: 20000,
            sl_episodes: 600,
            execute_probes: false,
            seed: 0,
            fit: FitSettings::default(),
            ql: QlConfig::default(),
            cem: CemConfig::default(),
            exec: Exec::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.beta0) {
            return bad("beta0 must lie in [0, 1]");
        }
        if self.iterations == 0 || self.episodes_per_iteration == 0 || self.samples_per_episode == 0 {
            return bad("iterations, episodes_per_iteration and samples_per_episode must be at least 1");
        }
        if self.t_train == 0 || self.t_test == 0 || self.sl_episodes == 0 {
            return bad("horizons and sl_episodes must be at least 1");
        }
        if self.samples_per_episode > self.t_train || self.ql.samples_per_episode > self.t_train {
            return bad("samples per episode cannot exceed t_train");
        }
        if !(0.0..=1.0).contains(&self.ql.eps0) || !(0.0..=1.0).contains(&self.ql.eps_decay) {
            return bad("QL epsilon settings must lie in [0, 1]");
        }
        if self.cem.population == 0 || self.cem.rollouts_per_candidate == 0 || self.cem.init_std <= 0.0 {
            return bad("CEM population, rollouts and init_std must be positive");
        }
        if self.fit.batch_size == 0 || self.fit.learning_rate <= 0.0 {
            return bad("batch_size and learning_rate must be positive");
        }
        Ok(())
    }

    /// `beta0^i` for 1-based iteration `i`.
    pub fn beta(&self, i: usize) -> f64 {
        self.beta0.powi(i as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Mixing probability (SaIL), epsilon (QL), or unused.
    pub mix: f64,
    pub dataset_size: usize,
    pub added: usize,
    pub oracle_calls: usize,
    pub train_loss: f64,
    pub val_mean_cost: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    /// Parameters with the lowest mean validation cost.
    pub params: Mlp,
    /// 1-based iteration that produced `params`.
    pub best_iteration: usize,
    pub history: Vec<IterationRecord>,
    /// Aggregated supervised data (SaIL and SL only).
    pub dataset: Dataset,
}

/// Writes the training curve as CSV.
pub fn write_history_csv(history: &[IterationRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "iteration,train_loss,val_mean_cost,mix,dataset_size,added,oracle_calls")?;
    for r in history {
        writeln!(
            out,
            "{},{:.6},{:.3},{:.6},{},{},{}",
            r.iteration, r.train_loss, r.val_mean_cost, r.mix, r.dataset_size, r.added, r.oracle_calls
        )?;
    }
    Ok(())
}

/// Index of the first minimum, 1-based.
pub(crate) fn first_min(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0 + 1
}
