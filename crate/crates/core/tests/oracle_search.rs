mod common;

use common::{bfs_distance, moves, random_episodes};
use proptest::prelude::*;
use wavefront::features::{index, FEATURE_DIM};
use wavefront::gridworld::{generate_world, EpisodeSpec, Vertex, World};
use wavefront::model::Mlp;
use wavefront::oracle::backward_dijkstra;
use wavefront::rng::rng_for;
use wavefront::search::{
    make_astar_policy, make_greedy_policy, make_learned_policy, make_mha_policy, make_oracle_policy,
    make_random_policy, run_search, Heuristic, SearchResult, SelectPolicy,
};
use wavefront::trainers::{evaluate_policy, PolicySpec};
use wavefront::Exec;

#[test]
fn oracle_table_matches_forward_bfs_everywhere() {
    for spec in random_episodes(100, 20, 20, 1) {
        let table = backward_dijkstra(&spec.world, spec.goal).unwrap();
        for i in 0..spec.dims().cell_count() {
            let v = spec.dims().vertex(i);
            if spec.world.is_obstacle(v) {
                continue;
            }
            assert_eq!(table.steps(v), bfs_distance(&spec.world, v, spec.goal), "{v} in {:?}", spec.world);
        }
    }
}

#[test]
fn oracle_policy_expands_exactly_the_cost_to_go() {
    for spec in random_episodes(100, 20, 20, 2) {
        let table = backward_dijkstra(&spec.world, spec.goal).unwrap();
        let r = run_search(&spec, &mut make_oracle_policy(&table), 10_000, false).unwrap();
        assert!(r.solved());
        assert_eq!(Some(r.expansions as u32), table.steps(spec.start));
    }
}

/// Priorities are frozen at insertion and a vertex keeps the parent that
/// discovered it, so A* paths are never shorter than BFS but can be longer.
#[test]
fn astar_chebyshev_paths_are_near_shortest() {
    let mut longer = 0;
    for spec in random_episodes(100, 20, 20, 3) {
        let r = run_search(&spec, &mut make_astar_policy(Heuristic::Chebyshev), 10_000, false).unwrap();
        let len = r.path.expect("solvable").len() as u32 - 1;
        let best = bfs_distance(&spec.world, spec.start, spec.goal).unwrap();
        assert!(len >= best);
        longer += (len > best) as usize;
    }
    assert!(longer <= 2, "{longer} of 100 A* paths longer than shortest");
}

#[test]
fn astar_zero_heuristic_is_shortest_and_euclidean_is_chebyshev_on_empty() {
    for spec in random_episodes(20, 20, 20, 4) {
        let r = run_search(&spec, &mut make_astar_policy(Heuristic::Zero), 10_000, false).unwrap();
        assert_eq!(Some(r.path.unwrap().len() as u32 - 1), bfs_distance(&spec.world, spec.start, spec.goal));
    }
    let spec = EpisodeSpec::new(World::empty(25, 18), Vertex::new(2, 3), Vertex::new(21, 9)).unwrap();
    let r = run_search(&spec, &mut make_astar_policy(Heuristic::Euclidean), 10_000, false).unwrap();
    assert_eq!(r.path.unwrap().len() as u32 - 1, spec.start.chebyshev(spec.goal));
}

#[test]
fn oracle_mean_cost_is_mean_start_distance() {
    let specs = random_episodes(14, 30, 30, 5);
    let s = evaluate_policy(&PolicySpec::Oracle, &specs, 5000, Exec::default()).unwrap();
    let expected: f64 = specs
        .iter()
        .map(|e| bfs_distance(&e.world, e.start, e.goal).unwrap() as f64)
        .sum::<f64>()
        / specs.len() as f64;
    assert_eq!(s.mean_cost(), expected);
    assert_eq!(s.success_rate(), 1.0);
}

#[test]
fn learned_passthrough_of_h_euc_matches_greedy_euclidean() {
    let mut mlp = Mlp::zeros(&[FEATURE_DIM, 1]);
    mlp.layers_mut()[0].weights[index::H_EUC] = 1.0;
    for spec in random_episodes(14, 24, 24, 6) {
        let a = run_search(&spec, &mut make_learned_policy(&mlp), 2000, false).unwrap();
        let b = run_search(&spec, &mut make_greedy_policy(Heuristic::Euclidean), 2000, false).unwrap();
        assert_eq!(a.state.closed(), b.state.closed());
    }
}

fn check_invariants(spec: &EpisodeSpec, r: &SearchResult) {
    let st = &r.state;
    for &v in st.open() {
        assert!(!st.is_closed(v), "{v} both open and closed");
    }
    let mut seen = std::collections::HashSet::new();
    for &v in st.closed() {
        assert!(seen.insert(v), "{v} expanded twice");
        assert!(spec.world.is_free(v));
    }
    if let Some(path) = &r.path {
        assert_eq!((path[0], *path.last().unwrap()), (spec.start, spec.goal));
        for w in path.windows(2) {
            let legal = moves(&spec.world, w[0].x as i64, w[0].y as i64);
            assert!(legal.contains(&(w[1].x as i64, w[1].y as i64)), "illegal step {} -> {}", w[0], w[1]);
        }
    }
}

fn policy_for(kind: usize, seed: u64, mlp: &Mlp) -> Box<dyn SelectPolicy + '_> {
    match kind {
        0 => Box::new(make_greedy_policy(Heuristic::Euclidean)),
        1 => Box::new(make_greedy_policy(Heuristic::Manhattan)),
        2 => Box::new(make_astar_policy(Heuristic::Euclidean)),
        3 => Box::new(make_mha_policy()),
        4 => Box::new(make_learned_policy(mlp)),
        _ => Box::new(make_random_policy(rng_for(seed, &[]))),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn search_invariants_hold(
        dist in 0usize..7,
        world_seed in any::<u64>(),
        kind in 0usize..6,
        size in 10u32..26,
        horizon in 1usize..400,
    ) {
        let name = wavefront::gridworld::Distribution::ALL[dist].name();
        let spec = EpisodeSpec::corners(generate_world(name, world_seed, size, size).unwrap()).unwrap();
        let mlp = Mlp::init(&wavefront::model::DEFAULT_LAYERS, world_seed);
        let r = run_search(&spec, &mut policy_for(kind, world_seed, &mlp), horizon, false).unwrap();
        check_invariants(&spec, &r);
        prop_assert!(r.expansions <= horizon);
        let again = run_search(&spec, &mut policy_for(kind, world_seed, &mlp), horizon, false).unwrap();
        prop_assert_eq!(r.state.closed(), again.state.closed());
    }
}
