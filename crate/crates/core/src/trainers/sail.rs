//! Imitation of the oracle with aggregated data, and its behavior-cloning
//! special case.

use rand::Rng as _;

use super::{collect_episode, evaluate_policy, first_min, Datapoint, Dataset, IterationRecord, PolicySpec, TrainConfig, TrainOutput};
use crate::features::FeatureVector;
use crate::gridworld::EpisodeSpec;
use crate::model::{fit, Mlp, RmsProp, DEFAULT_LAYERS};
use crate::rng::{derive_seed, rng_for};
use crate::{Error, Result};

const TAG_INIT: u64 = 0x5A11;
const TAG_COLLECT: u64 = 0xC011;
const TAG_FIT: u64 = 0xF17;

/// Regression targets are cost-to-go divided by this, which puts them on the
/// same scale as the features.
pub(crate) fn label_scale(train: &[EpisodeSpec]) -> f64 {
    train.iter().map(|s| s.dims().diagonal()).fold(1.0, f64::max)
}

pub(crate) fn check_splits(train: &[EpisodeSpec], val: &[EpisodeSpec]) -> Result<()> {
    if train.is_empty() || val.is_empty() {
        return Err(Error::Config("training and validation splits must be non-empty".into()));
    }
    Ok(())
}

/// Collects `m` episodes for iteration `iter`. Episode `j` uses a stream
/// derived from `(seed, iter, j)` for both world choice and rollout.
fn collect_round(
    cfg: &TrainConfig,
    train: &[EpisodeSpec],
    iter: usize,
    beta: f64,
    k: usize,
    m: usize,
    learner: Option<&Mlp>,
) -> Result<(Vec<Datapoint>, usize)> {
    let episodes = cfg.exec.map(m, |j| {
        let mut rng = rng_for(cfg.seed, &[TAG_COLLECT, iter as u64, j as u64]);
        let spec = &train[rng.random_range(0..train.len())];
        collect_episode(spec, learner, beta, k, cfg.t_train, cfg.execute_probes, rng)
    });
    let mut points = Vec::new();
    let mut calls = 0;
    for ep in episodes {
        let ep = ep?;
        points.extend(ep.points);
        calls += ep.oracle_calls;
    }
    Ok((points, calls))
}

fn scaled(data: &Dataset, scale: f64) -> Vec<(FeatureVector, f64)> {
    data.points.iter().map(|p| (p.features, p.label / scale)).collect()
}

fn train_round(params: &mut Mlp, opt: &mut RmsProp, data: &Dataset, scale: f64, cfg: &TrainConfig, iter: usize) -> f64 {
    let pairs = scaled(data, scale);
    let mut rng = rng_for(cfg.seed, &[TAG_FIT, iter as u64]);
    let losses = fit(params, opt, &pairs, cfg.fit.fit_config(), &mut rng);
    losses.last().copied().unwrap_or(0.0)
}

fn validate(params: &Mlp, val: &[EpisodeSpec], cfg: &TrainConfig) -> Result<f64> {
    Ok(evaluate_policy(&PolicySpec::Learned(params), val, cfg.t_train, cfg.exec)?.mean_cost())
}

/// Runs `cfg.iterations` rounds of mixture rollouts with `beta_i = beta0^i`,
/// retraining on everything collected so far after each round. Returns the
/// round's parameters with the lowest mean validation cost.
pub fn sail_train(cfg: &TrainConfig, train: &[EpisodeSpec], val: &[EpisodeSpec]) -> Result<TrainOutput> {
    cfg.validate()?;
    check_splits(train, val)?;
    let scale = label_scale(train);
    let mut params = Mlp::init(&DEFAULT_LAYERS, derive_seed(cfg.seed, &[TAG_INIT]));
    let mut opt = RmsProp::for_model(&params, cfg.fit.learning_rate);
    let mut data = Dataset::default();
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut snapshots = Vec::with_capacity(cfg.iterations);

    for i in 1..=cfg.iterations {
        let beta = cfg.beta(i);
        let (points, calls) =
            collect_round(cfg, train, i, beta, cfg.samples_per_episode, cfg.episodes_per_iteration, Some(&params))?;
        let added = points.len();
        data.extend(points);
        let loss = train_round(&mut params, &mut opt, &data, scale, cfg, i);
        let val_cost = validate(&params, val, cfg)?;
        history.push(IterationRecord {
            iteration: i,
            mix: beta,
            dataset_size: data.len(),
            added,
            oracle_calls: calls,
            train_loss: loss,
            val_mean_cost: val_cost,
        });
        snapshots.push(params.clone());
    }
    let best = first_min(history.iter().map(|r| r.val_mean_cost));
    Ok(TrainOutput { params: snapshots.swap_remove(best - 1), best_iteration: best, history, dataset: data })
}

/// Behavior cloning: `sl_episodes` pure oracle rollouts with a sample at
/// every timestep, then one training phase.
pub fn sl_train(cfg: &TrainConfig, train: &[EpisodeSpec], val: &[EpisodeSpec]) -> Result<TrainOutput> {
    cfg.validate()?;
    check_splits(train, val)?;
    let scale = label_scale(train);
    let mut params = Mlp::init(&DEFAULT_LAYERS, derive_seed(cfg.seed, &[TAG_INIT]));
    let mut opt = RmsProp::for_model(&params, cfg.fit.learning_rate);
    let (points, calls) = collect_round(cfg, train, 1, 1.0, cfg.t_train, cfg.sl_episodes, None)?;
    let data = Dataset { points };
    let loss = train_round(&mut params, &mut opt, &data, scale, cfg, 1);
    let val_cost = validate(&params, val, cfg)?;
    let history = vec![IterationRecord {
        iteration: 1,
        mix: 1.0,
        dataset_size: data.len(),
        added: data.len(),
        oracle_calls: calls,
        train_loss: loss,
        val_mean_cost: val_cost,
    }];
    Ok(TrainOutput { params, best_iteration: 1, history, dataset: data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::generate_world;
    use crate::Exec;

    fn specs(seed: u64, n: u64) -> Vec<EpisodeSpec> {
        (0..n)
            .map(|i| EpisodeSpec::corners(generate_world("forest", seed + i, 24, 24).unwrap()).unwrap())
            .collect()
    }

    fn tiny() -> TrainConfig {
        TrainConfig {
            iterations: 2,
            episodes_per_iteration: 4,
            samples_per_episode: 10,
            t_train: 120,
            t_test: 400,
            sl_episodes: 4,
            seed: 11,
            exec: Exec::Sequential,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn sail_records_history_and_one_oracle_call_per_episode() {
        let cfg = tiny();
        let out = sail_train(&cfg, &specs(0, 5), &specs(100, 3)).unwrap();
        assert_eq!(out.history.len(), 2);
        for r in &out.history {
            assert_eq!(r.oracle_calls, cfg.episodes_per_iteration);
            assert!(r.added <= cfg.episodes_per_iteration * cfg.samples_per_episode);
        }
        assert_eq!(out.history[1].dataset_size, out.dataset.len());
        assert!((out.history[1].mix - 0.49).abs() < 1e-12);
    }

    #[test]
    fn sail_with_beta_one_and_full_sampling_is_sl() {
        let mut cfg = tiny();
        cfg.iterations = 1;
        cfg.beta0 = 1.0;
        cfg.samples_per_episode = cfg.t_train;
        cfg.sl_episodes = cfg.episodes_per_iteration;
        let (train, val) = (specs(0, 5), specs(100, 2));
        let a = sail_train(&cfg, &train, &val).unwrap();
        let b = sl_train(&cfg, &train, &val).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn sequential_and_parallel_training_agree() {
        let cfg = tiny();
        let (train, val) = (specs(0, 5), specs(100, 2));
        let a = sail_train(&cfg, &train, &val).unwrap();
        let b = sail_train(&TrainConfig { exec: Exec::Parallel, ..cfg }, &train, &val).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn empty_split_is_a_config_error() {
        assert!(matches!(sail_train(&tiny(), &[], &specs(0, 1)), Err(Error::Config(_))));
    }
}
