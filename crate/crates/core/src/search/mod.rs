//! Best-first search over the implicit grid graph with a pluggable
//! selection policy.

mod policy;
mod queue;
mod state;
mod trace;

use serde::{Deserialize, Serialize};

pub use policy::{
    d_obs, h_euc, h_man, make_astar_policy, make_greedy_policy, make_learned_policy, make_mha_policy,
    make_oracle_policy, make_random_policy, make_round_robin_policy, AStarPolicy, GreedyPolicy, Heuristic,
    LearnedPolicy, OraclePolicy, RandomPolicy, RoundRobinPolicy, SelectPolicy,
};
pub use queue::FrozenQueue;
pub use state::{Expansion, SearchState};
pub use trace::{CellStatus, Frame, Trace};

use crate::gridworld::{EpisodeSpec, Vertex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    HorizonExhausted,
    FrontierExhausted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::HorizonExhausted => "horizon_exhausted",
            Outcome::FrontierExhausted => "frontier_exhausted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub expansions: usize,
    /// Start-to-goal path; present iff solved.
    pub path: Option<Vec<Vertex>>,
    pub state: SearchState,
    pub trace: Option<Trace>,
    /// The policy produced non-finite scores at some point.
    pub flagged: bool,
}

impl SearchResult {
    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }

    /// Expansions if solved, otherwise the horizon.
    pub fn cost(&self, horizon: usize) -> usize {
        if self.solved() {
            self.expansions
        } else {
            horizon
        }
    }
}

/// Runs select/expand until the goal enters the open list, `horizon`
/// expansions have been spent, or the open list empties.
///
/// A policy that returns a vertex outside the open list aborts the episode
/// with [`Error::Contract`].
pub fn run_search(
    spec: &EpisodeSpec,
    policy: &mut dyn SelectPolicy,
    horizon: usize,
    trace: bool,
) -> Result<SearchResult> {
    if horizon == 0 {
        return Err(Error::Contract("horizon must be at least 1".into()));
    }
    let mut state = SearchState::new(spec);
    let mut log = trace.then(|| Trace::new(spec.dims(), spec.start));
    policy.on_insert(spec.start, &state, spec);

    let outcome = loop {
        if state.is_open(spec.goal) {
            break Outcome::Solved;
        }
        if state.expansions() >= horizon {
            break Outcome::HorizonExhausted;
        }
        if state.open().is_empty() {
            break Outcome::FrontierExhausted;
        }
        let v = policy
            .select(&state, spec)
            .ok_or_else(|| Error::Contract("policy returned nothing from a non-empty open list".into()))?;
        if !state.dims().contains(v) || !state.is_open(v) {
            return Err(Error::Contract(format!("policy selected {v}, which is not open")));
        }
        let exp = state.expand(v, &spec.world)?;
        for &c in &exp.added {
            policy.on_insert(c, &state, spec);
        }
        if let Some(log) = log.as_mut() {
            log.record(v, &exp);
        }
    };

    let path = match outcome {
        Outcome::Solved => state.path_to(spec.goal),
        _ => None,
    };
    Ok(SearchResult {
        outcome,
        expansions: state.expansions(),
        path,
        flagged: policy.flagged(),
        state,
        trace: log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::World;

    #[test]
    fn adjacent_goal_solves_in_one() {
        let spec = EpisodeSpec::new(World::empty(4, 4), Vertex::new(1, 1), Vertex::new(2, 2)).unwrap();
        let r = run_search(&spec, &mut make_greedy_policy(Heuristic::Zero), 10, false).unwrap();
        assert_eq!(r.outcome, Outcome::Solved);
        assert_eq!(r.expansions, 1);
        assert_eq!(r.path.unwrap(), vec![Vertex::new(1, 1), Vertex::new(2, 2)]);
    }

    #[test]
    fn horizon_caps_expansions() {
        let spec = EpisodeSpec::corners(World::empty(51, 51)).unwrap();
        let r = run_search(&spec, &mut make_astar_policy(Heuristic::Zero), 5, false).unwrap();
        assert_eq!(r.outcome, Outcome::HorizonExhausted);
        assert_eq!(r.expansions, 5);
        assert_eq!(r.cost(5), 5);
        assert!(r.path.is_none());
    }

    #[test]
    fn walled_off_goal_exhausts_frontier() {
        let w = World::from_ascii(&["..#.", "..#.", "###.", "...."]);
        let spec = EpisodeSpec::new(w, Vertex::new(0, 3), Vertex::new(3, 0)).unwrap();
        let r = run_search(&spec, &mut make_greedy_policy(Heuristic::Euclidean), 100, false).unwrap();
        assert_eq!(r.outcome, Outcome::FrontierExhausted);
        assert_eq!(r.expansions, 4);
    }

    struct Rogue;

    impl SelectPolicy for Rogue {
        fn on_insert(&mut self, _: Vertex, _: &SearchState, _: &EpisodeSpec) {}
        fn select(&mut self, _: &SearchState, _: &EpisodeSpec) -> Option<Vertex> {
            Some(Vertex::new(3, 3))
        }
    }

    #[test]
    fn policy_picking_non_open_vertex_aborts() {
        let spec = EpisodeSpec::corners(World::empty(5, 5)).unwrap();
        assert!(matches!(run_search(&spec, &mut Rogue, 10, false), Err(Error::Contract(_))));
    }

    #[test]
    fn astar_on_empty_world_walks_chebyshev() {
        let spec = EpisodeSpec::new(World::empty(20, 12), Vertex::new(2, 1), Vertex::new(17, 9)).unwrap();
        let r = run_search(&spec, &mut make_astar_policy(Heuristic::Euclidean), 10_000, false).unwrap();
        assert_eq!(r.path.unwrap().len() - 1, 15);
    }

    #[test]
    fn single_heuristic_round_robin_matches_greedy() {
        let w = crate::gridworld::generate_world("forest", 3, 30, 30).unwrap();
        let spec = EpisodeSpec::corners(w).unwrap();
        let a = run_search(&spec, &mut make_greedy_policy(Heuristic::Euclidean), 2000, false).unwrap();
        let b = run_search(&spec, &mut make_round_robin_policy(vec![Heuristic::Euclidean]), 2000, false).unwrap();
        assert_eq!(a.state.closed(), b.state.closed());
    }

    #[test]
    fn trace_frames_track_lists() {
        let w = crate::gridworld::generate_world("single_gap_wall", 1, 20, 20).unwrap();
        let spec = EpisodeSpec::corners(w).unwrap();
        let r = run_search(&spec, &mut make_greedy_policy(Heuristic::Euclidean), 1000, true).unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.frame_count(), r.expansions + 1);
        let f0 = trace.frame(0).unwrap();
        assert_eq!(f0.count(CellStatus::Open), 1);
        assert_eq!(f0.count(CellStatus::Unexpanded), 399);
        let last = trace.frame(r.expansions).unwrap();
        assert_eq!(last.count(CellStatus::Closed), r.state.expansions());
        assert_eq!(last.count(CellStatus::Open), r.state.open().len());
        assert_eq!(last.count(CellStatus::Invalid), r.state.invalid_cells().len());
        assert!(trace.frame(r.expansions + 1).is_err());
    }
}
