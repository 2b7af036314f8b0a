//! Vertex-selection policies.
//!
//! Every queue-based policy scores a vertex once, when it enters the open
//! list, and never re-keys it. Ties go to the earlier insertion.

use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use super::{FrozenQueue, SearchState};
use crate::features::featurize;
use crate::gridworld::{EpisodeSpec, Vertex};
use crate::model::Mlp;
use crate::oracle::OracleTable;
use crate::rng::Rng;

/// Chooses which open vertex to expand next.
pub trait SelectPolicy {
    /// Called once for each vertex entering the open list, after the lists
    /// reflect the expansion that produced it.
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec);

    /// Returns a member of the open list, or `None` if it is empty.
    fn select(&mut self, state: &SearchState, spec: &EpisodeSpec) -> Option<Vertex>;

    /// True if the policy hit a non-finite score during the episode.
    fn flagged(&self) -> bool {
        false
    }
}

impl<P: SelectPolicy + ?Sized> SelectPolicy for Box<P> {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        (**self).on_insert(v, state, spec)
    }

    fn select(&mut self, state: &SearchState, spec: &EpisodeSpec) -> Option<Vertex> {
        (**self).select(state, spec)
    }

    fn flagged(&self) -> bool {
        (**self).flagged()
    }
}

/// Heuristic estimates used by the classical baselines.
#[derive(Clone)]
pub enum Heuristic {
    Euclidean,
    Manhattan,
    /// Admissible under unit diagonal cost; used for optimality checks.
    Chebyshev,
    Zero,
    /// Euclidean distance to the nearest discovered obstacle cell, or the
    /// map diagonal when none is known yet.
    ObstacleDistance,
    Custom(Arc<dyn Fn(Vertex, Vertex) -> f64 + Send + Sync>),
}

impl fmt::Debug for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Heuristic::Euclidean => "Euclidean",
            Heuristic::Manhattan => "Manhattan",
            Heuristic::Chebyshev => "Chebyshev",
            Heuristic::Zero => "Zero",
            Heuristic::ObstacleDistance => "ObstacleDistance",
            Heuristic::Custom(_) => "Custom",
        };
        f.write_str(name)
    }
}

pub fn h_euc(v: Vertex, goal: Vertex) -> f64 {
    v.euclidean(goal)
}

pub fn h_man(v: Vertex, goal: Vertex) -> f64 {
    v.manhattan(goal) as f64
}

pub fn d_obs(v: Vertex, state: &SearchState) -> f64 {
    state
        .invalid_cells()
        .iter()
        .map(|&u| v.euclidean(u))
        .fold(None, |best: Option<f64>, d| Some(best.map_or(d, |b| b.min(d))))
        .unwrap_or_else(|| state.dims().diagonal())
}

impl Heuristic {
    pub fn eval(&self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) -> f64 {
        match self {
            Heuristic::Euclidean => h_euc(v, spec.goal),
            Heuristic::Manhattan => h_man(v, spec.goal),
            Heuristic::Chebyshev => v.chebyshev(spec.goal) as f64,
            Heuristic::Zero => 0.0,
            Heuristic::ObstacleDistance => d_obs(v, state),
            Heuristic::Custom(f) => f(v, spec.goal),
        }
    }
}

/// Greedy best-first: argmin of `h`.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    h: Heuristic,
    queue: FrozenQueue,
}

pub fn make_greedy_policy(h: Heuristic) -> GreedyPolicy {
    GreedyPolicy { h, queue: FrozenQueue::new() }
}

impl SelectPolicy for GreedyPolicy {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        self.queue.push(v, self.h.eval(v, state, spec), state.insertion_seq(v));
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        self.queue.pop_open(state)
    }
}

/// A*: argmin of `g + h` with unit edge costs.
#[derive(Debug, Clone)]
pub struct AStarPolicy {
    h: Heuristic,
    queue: FrozenQueue,
}

pub fn make_astar_policy(h: Heuristic) -> AStarPolicy {
    AStarPolicy { h, queue: FrozenQueue::new() }
}

impl SelectPolicy for AStarPolicy {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        let f = state.g(v) as f64 + self.h.eval(v, state, spec);
        self.queue.push(v, f, state.insertion_seq(v));
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        self.queue.pop_open(state)
    }
}

/// One queue per heuristic over a shared open set; step `t` pops from queue
/// `t mod n`.
#[derive(Debug, Clone)]
pub struct RoundRobinPolicy {
    hs: Vec<Heuristic>,
    queues: Vec<FrozenQueue>,
}

pub fn make_round_robin_policy(hs: Vec<Heuristic>) -> RoundRobinPolicy {
    assert!(!hs.is_empty(), "round robin needs at least one heuristic");
    let queues = vec![FrozenQueue::new(); hs.len()];
    RoundRobinPolicy { hs, queues }
}

/// The three-queue configuration `[h_euc, h_man, d_obs]`.
pub fn make_mha_policy() -> RoundRobinPolicy {
    make_round_robin_policy(vec![Heuristic::Euclidean, Heuristic::Manhattan, Heuristic::ObstacleDistance])
}

impl RoundRobinPolicy {
    pub fn queue_for_step(&self, t: usize) -> usize {
        t % self.hs.len()
    }
}

impl SelectPolicy for RoundRobinPolicy {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        let seq = state.insertion_seq(v);
        for (h, q) in self.hs.iter().zip(&mut self.queues) {
            q.push(v, h.eval(v, state, spec), seq);
        }
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        let i = self.queue_for_step(state.expansions());
        self.queues[i].pop_open(state)
    }
}

/// Argmin of the oracle's cost-to-go.
#[derive(Debug, Clone)]
pub struct OraclePolicy<'a> {
    table: &'a OracleTable,
    queue: FrozenQueue,
}

pub fn make_oracle_policy(table: &OracleTable) -> OraclePolicy<'_> {
    OraclePolicy { table, queue: FrozenQueue::new() }
}

impl SelectPolicy for OraclePolicy<'_> {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, _: &EpisodeSpec) {
        self.queue.push(v, self.table.lookup(v), state.insertion_seq(v));
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        self.queue.pop_open(state)
    }
}

/// Scores each inserted vertex with the regressor on its features at that
/// moment, and pops the minimum frozen score.
#[derive(Debug, Clone)]
pub struct LearnedPolicy<'a> {
    params: &'a Mlp,
    queue: FrozenQueue,
    nonfinite: usize,
}

pub fn make_learned_policy(params: &Mlp) -> LearnedPolicy<'_> {
    LearnedPolicy { params, queue: FrozenQueue::new(), nonfinite: 0 }
}

impl LearnedPolicy<'_> {
    /// Score for `v` under the current state. Non-finite outputs become +inf.
    pub fn score(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) -> f64 {
        let f = featurize(v, state, spec);
        match self.params.forward(&f) {
            Ok(y) if y.is_finite() => y,
            _ => {
                self.nonfinite += 1;
                f64::INFINITY
            }
        }
    }

    pub fn nonfinite_count(&self) -> usize {
        self.nonfinite
    }

    pub fn queue_mut(&mut self) -> &mut FrozenQueue {
        &mut self.queue
    }
}

impl SelectPolicy for LearnedPolicy<'_> {
    fn on_insert(&mut self, v: Vertex, state: &SearchState, spec: &EpisodeSpec) {
        let s = self.score(v, state, spec);
        self.queue.push(v, s, state.insertion_seq(v));
    }

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        self.queue.pop_open(state)
    }

    fn flagged(&self) -> bool {
        self.nonfinite > 0
    }
}

/// Uniformly random open vertex.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: Rng,
}

pub fn make_random_policy(rng: Rng) -> RandomPolicy {
    RandomPolicy { rng }
}

impl SelectPolicy for RandomPolicy {
    fn on_insert(&mut self, _: Vertex, _: &SearchState, _: &EpisodeSpec) {}

    fn select(&mut self, state: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
        let open = state.open();
        (!open.is_empty()).then(|| open[self.rng.random_range(0..open.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::World;

    #[test]
    fn heuristic_values() {
        let (v, g) = (Vertex::new(3, 4), Vertex::new(0, 0));
        assert_eq!(h_euc(v, g), 5.0);
        assert_eq!(h_man(v, g), 7.0);
    }

    #[test]
    fn d_obs_sentinel_on_empty_invalid_list() {
        let spec = EpisodeSpec::corners(World::empty(30, 40)).unwrap();
        let st = SearchState::new(&spec);
        assert_eq!(d_obs(Vertex::new(3, 3), &st), 50.0);
    }

    #[test]
    fn greedy_ties_go_to_earlier_insert() {
        // Goal straight east: N and S neighbours of (1,1) tie under h_euc.
        let spec = EpisodeSpec::new(World::empty(5, 3), Vertex::new(1, 1), Vertex::new(4, 1)).unwrap();
        let mut st = SearchState::new(&spec);
        let mut p = make_greedy_policy(Heuristic::Custom(Arc::new(|_, _| 1.0)));
        p.on_insert(spec.start, &st, &spec);
        let v = p.select(&st, &spec).unwrap();
        let exp = st.expand(v, &spec.world).unwrap();
        for &c in &exp.added {
            p.on_insert(c, &st, &spec);
        }
        // constant heuristic: pure FIFO, so the first-inserted child (north)
        assert_eq!(p.select(&st, &spec), Some(exp.added[0]));
        assert_eq!(exp.added[0], Vertex::new(1, 2));
    }

    #[test]
    fn round_robin_schedule() {
        let p = make_round_robin_policy(vec![Heuristic::Euclidean, Heuristic::Manhattan, Heuristic::Zero]);
        let uses_first: Vec<usize> = (0..10).filter(|&t| p.queue_for_step(t) == 0).collect();
        assert_eq!(uses_first, vec![0, 3, 6, 9]);
    }
}
