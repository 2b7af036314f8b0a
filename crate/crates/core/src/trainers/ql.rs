//! Episodic Q-learning: Q(s, v) estimates the expansions still needed after
//! expanding `v` in state `s`.

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng as _;

use super::sail::{check_splits, label_scale};
use super::{evaluate_policy, first_min, Dataset, IterationRecord, PolicySpec, QDatapoint, TrainConfig, TrainOutput};
use crate::features::{featurize, FeatureVector};
use crate::gridworld::{EpisodeSpec, Vertex};
use crate::model::{fit, Mlp, RmsProp, DEFAULT_LAYERS};
use crate::rng::{derive_seed, rng_for, Rng};
use crate::search::{run_search, FrozenQueue, Outcome, SearchState, SelectPolicy};
use crate::Result;

const TAG_INIT: u64 = 0x0A11;
const TAG_EPISODE: u64 = 0x0E9;
const TAG_FIT: u64 = 0x0F17;

/// Epsilon-greedy over frozen Q-scores, recording transitions at sampled
/// timesteps.
pub struct QlPolicy<'a> {
    params: &'a Mlp,
    eps: f64,
    rng: Rng,
    queue: FrozenQueue,
    features: HashMap<Vertex, FeatureVector>,
    probes: Vec<bool>,
    pending: Option<FeatureVector>,
    pub transitions: Vec<QDatapoint>,
}

impl<'a> QlPolicy<'a> {
    pub fn new(params: &'a Mlp, eps: f64, k: usize, horizon: usize, mut rng: Rng) -> Self {
        let mut probes = vec![false; horizon];
        for i in index::sample(&mut rng, horizon, k.min(horizon)) {
            probes[i] = true;
        }
        QlPolicy {
            params,
            eps,
            rng,
            queue: FrozenQueue::new(),
            features: HashMap::new(),
            probes,
            pending: None,
            transitions: Vec::new(),
        }
    }

    fn least_q(&mut self, state: &SearchState) -> Option<FeatureVector> {
        self.queue.peek_open(state).map(|(v, _)| self.features[&v])
    }

    /// Closes the transition left open by the final expansion.
    pub fn finish(&mut self, outcome: Outcome, state: &SearchState) {
        if let Some(f) = self.pending.take() {
            let next = match outcome {
                Outcome::HorizonExhausted => self.least_q(state),
                _ => None,
            };
            // Revealing the goal is free; a dead frontier is a bootstrapped failure.
            let cost = match outcome {
                Outcome::Solved => 0.0,
                Outcome::FrontierExhausted => f64::INFINITY,
                Outcome::HorizonExhausted => 1.0,
            };
            self.transitions.push(QDatapoint { features: f, cost, next });
        }
    }
}

impl SelectPolicy for QlPolicy<'_> {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        let f = featurize(v, state, spec);
        let q = self.params.forward_unchecked(&f);
        let q = if q.is_finite() { q } else { f64::INFINITY };
        self.queue.push(v, q, state.insertion_seq(v));
        self.features.insert(v, f);
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        if let Some(f) = self.pending.take() {
            let next = self.least_q(state);
            self.transitions.push(QDatapoint { features: f, cost: 1.0, next });
        }
        let open = state.open();
        let v = if self.rng.random_bool(self.eps) {
            (!open.is_empty()).then(|| open[self.rng.random_range(0..open.len())])
        } else {
            self.queue.pop_open(state)
        }?;
        let t = state.expansions() + 1;
        if self.probes.get(t - 1).copied().unwrap_or(false) {
            self.pending = Some(self.features[&v]);
        }
        Some(v)
    }
}

/// TD targets under the current parameters, in scaled units. The bootstrap
/// term is clamped to `[0, cap]` before scaling.
pub(crate) fn td_targets(params: &Mlp, data: &[QDatapoint], scale: f64, cap: f64) -> Vec<(FeatureVector, f64)> {
    data.iter()
        .map(|d| {
            let raw = match d.next {
                Some(n) => d.cost + (params.forward_unchecked(&n) * scale).clamp(0.0, cap),
                None if d.cost.is_finite() => d.cost,
                None => cap,
            };
            (d.features, raw.min(cap) / scale)
        })
        .collect()
}

/// Epsilon-greedy rollouts with `eps_i = eps0 * decay^(i-1)`, regressing on
/// all transitions gathered so far after each round.
pub fn ql_train(cfg: &TrainConfig, train: &[EpisodeSpec], val: &[EpisodeSpec]) -> Result<TrainOutput> {
    cfg.validate()?;
    check_splits(train, val)?;
    let scale = label_scale(train);
    let cap = cfg.t_train as f64;
    let mut params = Mlp::init(&DEFAULT_LAYERS, derive_seed(cfg.seed, &[TAG_INIT]));
    let mut opt = RmsProp::for_model(&params, cfg.fit.learning_rate);
    let mut replay: Vec<QDatapoint> = Vec::new();
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut snapshots = Vec::with_capacity(cfg.iterations);

    for i in 1..=cfg.iterations {
        let eps = cfg.ql.epsilon(i);
        let current = &params;
        let episodes = cfg.exec.map(cfg.episodes_per_iteration, |j| -> Result<Vec<QDatapoint>> {
            let mut rng = rng_for(cfg.seed, &[TAG_EPISODE, i as u64, j as u64]);
            let spec = &train[rng.random_range(0..train.len())];
            let mut policy = QlPolicy::new(current, eps, cfg.ql.samples_per_episode, cfg.t_train, rng);
            let r = run_search(spec, &mut policy, cfg.t_train, false)?;
            policy.finish(r.outcome, &r.state);
            Ok(policy.transitions)
        });
        let before = replay.len();
        for ep in episodes {
            replay.extend(ep?);
        }
        let targets = td_targets(&params, &replay, scale, cap);
        let mut rng = rng_for(cfg.seed, &[TAG_FIT, i as u64]);
        let losses = fit(&mut params, &mut opt, &targets, cfg.fit.fit_config(), &mut rng);
        let val_cost = evaluate_policy(&PolicySpec::Learned(&params), val, cfg.t_train, cfg.exec)?.mean_cost();
        history.push(IterationRecord {
            iteration: i,
            mix: eps,
            dataset_size: replay.len(),
            added: replay.len() - before,
            oracle_calls: 0,
            train_loss: losses.last().copied().unwrap_or(0.0),
            val_mean_cost: val_cost,
        });
        snapshots.push(params.clone());
    }
    let best = first_min(history.iter().map(|r| r.val_mean_cost));
    Ok(TrainOutput { params: snapshots.swap_remove(best - 1), best_iteration: best, history, dataset: Dataset::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_DIM;
    use crate::gridworld::{generate_world, World};
    use crate::model::Layer;
    use crate::Exec;

    fn constant(c: f64) -> Mlp {
        let mut m = Mlp::zeros(&[FEATURE_DIM, 1]);
        let l: &mut Layer = &mut m.layers_mut()[0];
        l.biases[0] = c;
        m
    }

    #[test]
    fn targets_bootstrap_and_clamp() {
        let f = [0.0; FEATURE_DIM];
        let data = [
            QDatapoint { features: f, cost: 1.0, next: Some(f) },
            QDatapoint { features: f, cost: 0.0, next: None },
            QDatapoint { features: f, cost: f64::INFINITY, next: None },
        ];
        let t = td_targets(&constant(0.5), &data, 10.0, 100.0);
        assert!((t[0].1 - 0.6).abs() < 1e-12);
        assert_eq!(t[1].1, 0.0);
        assert_eq!(t[2].1, 10.0);
        // Negative bootstraps clamp to zero; huge ones to the cap.
        assert!((td_targets(&constant(-3.0), &data, 10.0, 100.0)[0].1 - 0.1).abs() < 1e-12);
        assert_eq!(td_targets(&constant(1e9), &data, 10.0, 100.0)[0].1, 10.0);
    }

    #[test]
    fn greedy_rollout_records_requested_samples() {
        let spec = EpisodeSpec::corners(World::empty(30, 30)).unwrap();
        let params = constant(0.0);
        let mut p = QlPolicy::new(&params, 0.0, 5, 20, rng_for(3, &[]));
        let r = run_search(&spec, &mut p, 20, false).unwrap();
        p.finish(r.outcome, &r.state);
        assert_eq!(r.outcome, Outcome::HorizonExhausted);
        assert_eq!(p.transitions.len(), 5);
        assert!(p.transitions.iter().all(|d| d.next.is_some() && d.cost == 1.0));
    }

    #[test]
    fn ql_train_runs() {
        let specs: Vec<_> = (0..4)
            .map(|s| EpisodeSpec::corners(generate_world("forest", s, 20, 20).unwrap()).unwrap())
            .collect();
        let cfg = TrainConfig {
            iterations: 2,
            episodes_per_iteration: 3,
            t_train: 100,
            t_test: 300,
            exec: Exec::Sequential,
            ..TrainConfig::default()
        };
        let out = ql_train(&cfg, &specs[..3], &specs[3..]).unwrap();
        assert_eq!(out.history.len(), 2);
        assert!((out.history[1].mix - 0.63).abs() < 1e-12);
        assert!(out.history.iter().all(|r| r.added > 0));
    }
}
