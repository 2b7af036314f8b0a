//! Data collection under the oracle/learner mixture.

use rand::seq::index;
use rand::Rng as _;

use super::Datapoint;
use crate::features::featurize;
use crate::gridworld::{EpisodeSpec, Vertex};
use crate::model::Mlp;
use crate::oracle::{backward_dijkstra, OracleTable};
use crate::rng::Rng;
use crate::search::{make_learned_policy, run_search, FrozenQueue, LearnedPolicy, Outcome, SearchState, SelectPolicy};
use crate::Result;

/// One coin flip per call: with probability `beta` pop from the oracle queue,
/// otherwise from the learner queue. Returns the vertex and whether the
/// oracle chose it.
pub fn mixture_select(
    state: &SearchState,
    oracle: &mut FrozenQueue,
    learner: Option<&mut FrozenQueue>,
    beta: f64,
    rng: &mut Rng,
) -> (Option<Vertex>, bool) {
    let heads = rng.random_bool(beta);
    match (heads, learner) {
        (false, Some(q)) => (q.pop_open(state), false),
        _ => (oracle.pop_open(state), true),
    }
}

/// Rollout policy that records `(features, oracle label)` for a uniformly
/// random open vertex at each sampled timestep.
pub struct MixturePolicy<'a> {
    table: &'a OracleTable,
    oracle: FrozenQueue,
    learner: Option<LearnedPolicy<'a>>,
    beta: f64,
    rng: Rng,
    /// `probes[t - 1]` marks timestep `t` for sampling.
    probes: Vec<bool>,
    label_horizon: usize,
    execute_probes: bool,
    world_seed: u64,
    pub points: Vec<Datapoint>,
    pub oracle_picks: usize,
    pub learner_picks: usize,
}

impl<'a> MixturePolicy<'a> {
    /// Samples `k` distinct timesteps from `1..=horizon` using `rng`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        table: &'a OracleTable,
        learner: Option<&'a Mlp>,
        beta: f64,
        k: usize,
        horizon: usize,
        execute_probes: bool,
        world_seed: u64,
        mut rng: Rng,
    ) -> Self {
        let mut probes = vec![false; horizon];
        for i in index::sample(&mut rng, horizon, k.min(horizon)) {
            probes[i] = true;
        }
        // A learner that is never consulted is never scored.
        let learner = learner.filter(|_| beta < 1.0).map(make_learned_policy);
        MixturePolicy {
            table,
            oracle: FrozenQueue::new(),
            learner,
            beta,
            rng,
            probes,
            label_horizon: horizon,
            execute_probes,
            world_seed,
            points: Vec::with_capacity(k),
            oracle_picks: 0,
            learner_picks: 0,
        }
    }
}

impl SelectPolicy for MixturePolicy<'_> {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        let seq = state.insertion_seq(v);
        self.oracle.push(v, self.table.lookup(v), seq);
        if let Some(l) = self.learner.as_mut() {
            let s = l.score(v, state, spec);
            l.queue_mut().push(v, s, seq);
        }
    }

    fn select(&mut self, state: &SearchState, spec: &EpisodeSpec) -> Option<Vertex> {
        let t = state.expansions() + 1;
        let mut probe = None;
        if self.probes.get(t - 1).copied().unwrap_or(false) {
            let open = state.open();
            let v = open[self.rng.random_range(0..open.len())];
            self.points.push(Datapoint {
                features: featurize(v, state, spec),
                label: self.table.label(v, self.label_horizon),
                world_seed: self.world_seed,
                timestep: t as u64,
            });
            probe = Some(v);
        }
        if let (true, Some(v)) = (self.execute_probes, probe) {
            return Some(v);
        }
        let (v, by_oracle) =
            mixture_select(state, &mut self.oracle, self.learner.as_mut().map(|l| l.queue_mut()), self.beta, &mut self.rng);
        if by_oracle {
            self.oracle_picks += 1;
        } else {
            self.learner_picks += 1;
        }
        v
    }

    fn flagged(&self) -> bool {
        self.learner.as_ref().is_some_and(|l| l.flagged())
    }
}

#[derive(Debug, Clone)]
pub struct CollectedEpisode {
    pub points: Vec<Datapoint>,
    pub outcome: Outcome,
    pub expansions: usize,
    pub oracle_picks: usize,
    pub learner_picks: usize,
    pub oracle_calls: usize,
}

/// Rolls out one episode of at most `horizon` expansions under the mixture
/// and returns the sampled datapoints.
#[allow(clippy::too_many_arguments)]
pub fn collect_episode(
    spec: &EpisodeSpec,
    learner: Option<&Mlp>,
    beta: f64,
    k: usize,
    horizon: usize,
    execute_probes: bool,
    rng: Rng,
) -> Result<CollectedEpisode> {
    let table = backward_dijkstra(&spec.world, spec.goal)?;
    let mut policy = MixturePolicy::new(&table, learner, beta, k, horizon, execute_probes, spec.world.seed, rng);
    let r = run_search(spec, &mut policy, horizon, false)?;
    Ok(CollectedEpisode {
        points: policy.points,
        outcome: r.outcome,
        expansions: r.expansions,
        oracle_picks: policy.oracle_picks,
        learner_picks: policy.learner_picks,
        oracle_calls: 1,
    })
}
