//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavefront::gridworld::{generate_world, Distribution, EpisodeSpec, Vertex, World};
use wavefront::model::Mlp;

/// Moves allowed from `(x, y)` by an independent reading of the movement
/// rules: in bounds, destination free, no squeezing between two obstacles.
pub fn moves(world: &World, x: i64, y: i64) -> Vec<(i64, i64)> {
    let (w, h) = (world.width() as i64, world.height() as i64);
    let blocked = |x: i64, y: i64| world.is_obstacle(Vertex::new(x as u32, y as u32));
    let mut out = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            let (nx, ny) = (x + dx, y + dy);
            if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w || ny >= h || blocked(nx, ny) {
                continue;
            }
            if dx != 0 && dy != 0 && blocked(x + dx, y) && blocked(x, y + dy) {
                continue;
            }
            out.push((nx, ny));
        }
    }
    out
}

/// Forward breadth-first distance from `s` to `g`, in edges.
pub fn bfs_distance(world: &World, s: Vertex, g: Vertex) -> Option<u32> {
    let w = world.width() as usize;
    let mut dist = vec![u32::MAX; w * world.height() as usize];
    let mut q = VecDeque::new();
    dist[s.y as usize * w + s.x as usize] = 0;
    q.push_back((s.x as i64, s.y as i64));
    while let Some((x, y)) = q.pop_front() {
        let d = dist[y as usize * w + x as usize];
        if (x as u32, y as u32) == (g.x, g.y) {
            return Some(d);
        }
        for (nx, ny) in moves(world, x, y) {
            let i = ny as usize * w + nx as usize;
            if dist[i] == u32::MAX {
                dist[i] = d + 1;
                q.push_back((nx, ny));
            }
        }
    }
    None
}

/// `n` episodes cycling through every distribution. Odd-indexed episodes
/// use random free start and goal cells instead of the corners.
pub fn random_episodes(n: usize, w: u32, h: u32, seed: u64) -> Vec<EpisodeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let dist = Distribution::ALL[i % Distribution::ALL.len()];
            let world = generate_world(dist.name(), rng.random(), w, h).unwrap();
            if i % 2 == 0 {
                EpisodeSpec::corners(world).unwrap()
            } else {
                EpisodeSpec::random_free(world, &mut rng).unwrap()
            }
        })
        .collect()
}

/// Forward pass with dense matrices, written against the layer layout only.
pub fn reference_forward(mlp: &Mlp, x: &[f64]) -> f64 {
    let mut a = DVector::from_column_slice(x);
    let n = mlp.layers().len();
    for (i, l) in mlp.layers().iter().enumerate() {
        let w = DMatrix::from_row_slice(l.outputs, l.inputs, &l.weights);
        let b = DVector::from_column_slice(&l.biases);
        a = w * a + b;
        if i + 1 < n {
            a.apply(|v| *v = v.max(0.0));
        }
    }
    a[0]
}

/// Brute-force nearest obstacle cells: (overall by euclidean, by |dx|, by
/// |dy|), earliest entry on ties.
pub fn nearest_cells(v: Vertex, cells: &[Vertex]) -> Option<(Vertex, Vertex, Vertex)> {
    let pick = |key: &dyn Fn(Vertex) -> f64| {
        let best = cells.iter().map(|&u| key(u)).fold(f64::INFINITY, f64::min);
        *cells.iter().find(|&&u| key(u) == best).unwrap()
    };
    if cells.is_empty() {
        return None;
    }
    Some((
        pick(&|u| ((u.x as f64 - v.x as f64).powi(2) + (u.y as f64 - v.y as f64).powi(2)).sqrt()),
        pick(&|u| (u.x as f64 - v.x as f64).abs()),
        pick(&|u| (u.y as f64 - v.y as f64).abs()),
    ))
}
