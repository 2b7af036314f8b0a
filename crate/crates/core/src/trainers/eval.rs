//! Policy evaluation over a set of episodes.

use serde::Serialize;

use crate::gridworld::EpisodeSpec;
use crate::model::Mlp;
use crate::oracle::backward_dijkstra;
use crate::rng::rng_for;
use crate::search::{
    make_astar_policy, make_greedy_policy, make_learned_policy, make_oracle_policy, make_random_policy,
    make_round_robin_policy, run_search, Heuristic, Outcome, SearchResult,
};
use crate::{Exec, Result};

/// A selection policy description that can be instantiated per episode.
#[derive(Debug, Clone)]
pub enum PolicySpec<'a> {
    Greedy(Heuristic),
    AStar(Heuristic),
    RoundRobin(Vec<Heuristic>),
    Oracle,
    /// Uniform over the open list; episode `e` draws from a stream derived
    /// from `seed` and `e`.
    Random { seed: u64 },
    Learned(&'a Mlp),
}

impl PolicySpec<'_> {
    pub fn mha() -> Self {
        PolicySpec::RoundRobin(vec![Heuristic::Euclidean, Heuristic::Manhattan, Heuristic::ObstacleDistance])
    }

    pub fn run(&self, spec: &EpisodeSpec, horizon: usize, episode: u64, trace: bool) -> Result<SearchResult> {
        match self {
            PolicySpec::Greedy(h) => run_search(spec, &mut make_greedy_policy(h.clone()), horizon, trace),
            PolicySpec::AStar(h) => run_search(spec, &mut make_astar_policy(h.clone()), horizon, trace),
            PolicySpec::RoundRobin(hs) => run_search(spec, &mut make_round_robin_policy(hs.clone()), horizon, trace),
            PolicySpec::Oracle => {
                let table = backward_dijkstra(&spec.world, spec.goal)?;
                run_search(spec, &mut make_oracle_policy(&table), horizon, trace)
            }
            PolicySpec::Random { seed } => {
                run_search(spec, &mut make_random_policy(rng_for(*seed, &[episode])), horizon, trace)
            }
            PolicySpec::Learned(p) => run_search(spec, &mut make_learned_policy(p), horizon, trace),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeEval {
    pub outcome: Outcome,
    pub expansions: usize,
    /// Expansions if solved, otherwise the horizon.
    pub cost: usize,
    pub path_len: Option<usize>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub horizon: usize,
    pub episodes: Vec<EpisodeEval>,
}

impl EvalSummary {
    pub fn costs(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.cost as f64).collect()
    }

    /// Costs divided by the horizon; a failure counts as 1.
    pub fn normalized(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.cost as f64 / self.horizon as f64).collect()
    }

    pub fn mean_cost(&self) -> f64 {
        mean(&self.costs())
    }

    pub fn median_cost(&self) -> f64 {
        median(&self.costs())
    }

    pub fn mean_normalized(&self) -> f64 {
        mean(&self.normalized())
    }

    pub fn median_normalized(&self) -> f64 {
        median(&self.normalized())
    }

    pub fn success_rate(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().filter(|e| e.outcome == Outcome::Solved).count() as f64 / self.episodes.len() as f64
    }

    pub fn flagged_count(&self) -> usize {
        self.episodes.iter().filter(|e| e.flagged).count()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Middle value; the mean of the two middle values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Runs `policy` on every episode with the given horizon.
pub fn evaluate_policy(policy: &PolicySpec, specs: &[EpisodeSpec], horizon: usize, exec: Exec) -> Result<EvalSummary> {
    let episodes = exec
        .map(specs.len(), |i| {
            let r = policy.run(&specs[i], horizon, i as u64, false)?;
            Ok(EpisodeEval {
                outcome: r.outcome,
                expansions: r.expansions,
                cost: r.cost(horizon),
                path_len: r.path.as_ref().map(|p| p.len() - 1),
                flagged: r.flagged,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary { horizon, episodes })
}
