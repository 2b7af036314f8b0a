mod common;

use common::{nearest_cells, reference_forward};
use proptest::prelude::*;
use wavefront::features::{featurize, featurize_raw, index, FEATURE_DIM};
use wavefront::gridworld::{EpisodeSpec, Vertex, World};
use wavefront::model::{fit, mse, FitConfig, Mlp, RmsProp, DEFAULT_LAYERS};
use wavefront::rng::rng_for;
use wavefront::search::SearchState;

use rand::Rng;

/// Expands greedily by insertion order until `n` expansions or exhaustion.
fn state_after(spec: &EpisodeSpec, n: usize) -> SearchState {
    let mut st = SearchState::new(spec);
    for _ in 0..n {
        let Some(&v) = st.open().iter().min_by_key(|&&v| st.insertion_seq(v)) else { break };
        st.expand(v, &spec.world).unwrap();
    }
    st
}

#[test]
fn invalid_cell_example_nearest_is_diagonal_neighbour() {
    let mut world = World::empty(12, 12);
    world.set_obstacle(Vertex::new(2, 2), true);
    world.set_obstacle(Vertex::new(9, 9), true);
    let spec = EpisodeSpec::new(world, Vertex::new(3, 3), Vertex::new(11, 0)).unwrap();
    let mut st = SearchState::new(&spec);
    st.expand(Vertex::new(3, 3), &spec.world).unwrap();
    st.expand(Vertex::new(4, 4), &spec.world).unwrap();
    // Walk the diagonal until (9,9) is revealed.
    let mut at = Vertex::new(4, 4);
    while at != Vertex::new(8, 8) {
        let next = Vertex::new(at.x + 1, at.y + 1);
        if !st.is_open(next) {
            break;
        }
        st.expand(next, &spec.world).unwrap();
        at = next;
    }
    assert_eq!(st.invalid_cells(), &[Vertex::new(2, 2), Vertex::new(9, 9)]);
    let f = featurize_raw(Vertex::new(3, 3), &st, &spec);
    assert_eq!((f[index::OBS], f[index::OBS + 1]), (2.0, 2.0));
    assert_eq!(f[index::OBS + 2], 2f64.sqrt());
}

#[test]
fn environment_features_match_brute_force() {
    let mut rng = rng_for(7, &[]);
    for seed in 0..40 {
        let world = wavefront::gridworld::generate_world("forest", seed, 30, 24).unwrap();
        let spec = EpisodeSpec::corners(world).unwrap();
        let st = state_after(&spec, rng.random_range(1..200));
        let cells = st.invalid_cells().to_vec();
        for &v in st.open().iter().take(20) {
            let f = featurize_raw(v, &st, &spec);
            match nearest_cells(v, &cells) {
                None => {
                    for at in [index::OBS, index::OBS_X, index::OBS_Y] {
                        assert_eq!(&f[at..at + 3], &[v.x as f64, v.y as f64, spec.dims().diagonal()]);
                    }
                }
                Some((a, b, c)) => {
                    for (at, u) in [(index::OBS, a), (index::OBS_X, b), (index::OBS_Y, c)] {
                        assert_eq!(&f[at..at + 3], &[u.x as f64, u.y as f64, v.euclidean(u)]);
                    }
                }
            }
            let n = featurize(v, &st, &spec);
            assert!(n.iter().all(|x| x.is_finite() && (0.0..=2f64.sqrt()).contains(x)));
        }
    }
}

proptest! {
    #[test]
    fn translation_preserves_distances(
        seed in any::<u64>(),
        dx in 0u32..8,
        dy in 0u32..8,
        steps in 1usize..60,
    ) {
        // A 16x16 world embedded in a larger frame at two offsets, walled off
        // so the search never leaves the copy.
        let base = wavefront::gridworld::generate_world("forest", seed, 16, 16).unwrap();
        let embed = |ox: u32, oy: u32| {
            let mut w = World::empty(26, 26);
            for y in 0..26 {
                for x in 0..26 {
                    let inside = x >= ox && y >= oy && x < ox + 16 && y < oy + 16;
                    let blocked = !inside || base.is_obstacle(Vertex::new(x - ox, y - oy));
                    w.set_obstacle(Vertex::new(x, y), blocked);
                }
            }
            EpisodeSpec::new(w, Vertex::new(ox, oy), Vertex::new(ox + 15, oy + 15)).unwrap()
        };
        let (a, b) = (embed(1, 1), embed(1 + dx, 1 + dy));
        let (sa, sb) = (state_after(&a, steps), state_after(&b, steps));
        prop_assert_eq!(sa.closed().len(), sb.closed().len());
        for (&va, &vb) in sa.open().iter().zip(sb.open()) {
            let (fa, fb) = (featurize_raw(va, &sa, &a), featurize_raw(vb, &sb, &b));
            for i in [index::G, index::H_EUC, index::H_MAN, index::DEPTH, index::OBS + 2, index::OBS_X + 2, index::OBS_Y + 2] {
                prop_assert_eq!(fa[i], fb[i], "feature {}", i);
            }
            prop_assert_eq!(fb[index::X] - fa[index::X], dx as f64);
            prop_assert_eq!(fb[index::Y] - fa[index::Y], dy as f64);
        }
    }
}

/// Inputs and targets on the ranges the model sees: normalized features
/// and scaled cost-to-go labels.
fn random_batch(rng: &mut wavefront::rng::Rng, n: usize) -> Vec<([f64; FEATURE_DIM], f64)> {
    (0..n)
        .map(|_| {
            let mut f = [0.0; FEATURE_DIM];
            f.iter_mut().for_each(|x| *x = rng.random_range(0.0..1.0));
            (f, rng.random_range(0.0..1.0))
        })
        .collect()
}

#[test]
fn gradients_match_central_differences() {
    for draw in 0..10u64 {
        let mut rng = rng_for(draw, &[]);
        let mlp = Mlp::init(&[FEATURE_DIM, 12, 7, 1], draw);
        let data = random_batch(&mut rng, 5);
        let batch: Vec<(&[f64], f64)> = data.iter().map(|(f, y)| (&f[..], *y)).collect();
        let (_, grads) = mlp.backward(&batch);
        let analytic = grads.flatten();
        let theta = mlp.flatten();
        let h = 1e-6;
        for i in 0..theta.len() {
            let loss_at = |delta: f64| {
                let mut t = theta.clone();
                t[i] += delta;
                let m = Mlp::unflatten(&mlp.sizes(), &t).unwrap();
                m.backward(&batch).0
            };
            let numeric = (loss_at(h) - loss_at(-h)) / (2.0 * h);
            // Below ~1e-5 the central difference is dominated by roundoff.
            let denom = analytic[i].abs().max(numeric.abs()).max(1e-5);
            assert!(
                (analytic[i] - numeric).abs() / denom < 1e-5,
                "draw {draw} param {i}: {} vs {numeric}",
                analytic[i]
            );
        }
    }
}

#[test]
fn forward_matches_dense_reference() {
    let mut rng = rng_for(3, &[]);
    for seed in 0..20 {
        let mlp = Mlp::init(&DEFAULT_LAYERS, seed);
        for (x, _) in random_batch(&mut rng, 10) {
            let a = mlp.forward(&x).unwrap();
            let b = reference_forward(&mlp, &x);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn passthrough_network_returns_the_feature() {
    let mut mlp = Mlp::zeros(&[FEATURE_DIM, 3, 1]);
    mlp.layers_mut()[0].weights[index::H_EUC] = 1.0;
    mlp.layers_mut()[1].weights[0] = 1.0;
    let mut x = [0.2; FEATURE_DIM];
    x[index::H_EUC] = 0.73;
    assert_eq!(mlp.forward(&x).unwrap(), 0.73);
}

#[test]
fn training_reduces_loss_on_a_fixed_dataset() {
    let mut rng = rng_for(5, &[]);
    let data: Vec<_> = random_batch(&mut rng, 256)
        .into_iter()
        .map(|(f, _)| (f, f[0] * 0.5 - f[3] + 0.3 * f[7] * f[2]))
        .collect();
    let mut mlp = Mlp::init(&DEFAULT_LAYERS, 1);
    let mut opt = RmsProp::for_model(&mlp, 0.01);
    let before = mse(&mlp, &data);
    let losses = fit(&mut mlp, &mut opt, &data, FitConfig { epochs: 11, batch_size: 64 }, &mut rng);
    assert!(losses[10] < 0.5 * losses[0], "{losses:?}");
    assert!(mse(&mlp, &data) < before);
}
