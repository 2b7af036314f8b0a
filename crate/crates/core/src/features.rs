//! The 17-value feature vector for a `(vertex, search state)` pair.
//!
//! Layout (indices are stable; dataset files depend on them):
//!
//! | idx | feature                                      |
//! |-----|----------------------------------------------|
//! | 0-1 | vertex x, y                                  |
//! | 2   | g (depth from start)                         |
//! | 3   | euclidean distance to goal                   |
//! | 4   | manhattan distance to goal                   |
//! | 5   | depth in the search tree                     |
//! | 6-7 | goal x, y                                    |
//! | 8-10  | nearest known obstacle: x, y, distance     |
//! | 11-13 | nearest known obstacle by \|dx\|: x, y, distance |
//! | 14-16 | nearest known obstacle by \|dy\|: x, y, distance |
//!
//! Known obstacles are the destination cells of invalid edges. Ties keep the
//! earliest-discovered cell. With no known obstacle each triple is the
//! vertex's own coordinates and the map diagonal. Every entry is divided by
//! the map diagonal.

use crate::gridworld::{EpisodeSpec, Vertex};
use crate::search::SearchState;

pub const FEATURE_DIM: usize = 17;

pub type FeatureVector = [f64; FEATURE_DIM];

pub mod index {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const G: usize = 2;
    pub const H_EUC: usize = 3;
    pub const H_MAN: usize = 4;
    pub const DEPTH: usize = 5;
    pub const GOAL_X: usize = 6;
    pub const GOAL_Y: usize = 7;
    pub const OBS: usize = 8;
    pub const OBS_X: usize = 11;
    pub const OBS_Y: usize = 14;
}

/// Features in grid units, before normalization.
pub fn featurize_raw(v: Vertex, state: &SearchState, spec: &EpisodeSpec) -> FeatureVector {
    let goal = spec.goal;
    let depth = state.depth(v) as f64;
    let mut f = [0.0; FEATURE_DIM];
    f[index::X] = v.x as f64;
    f[index::Y] = v.y as f64;
    f[index::G] = depth;
    f[index::H_EUC] = v.euclidean(goal);
    f[index::H_MAN] = v.manhattan(goal) as f64;
    f[index::DEPTH] = depth;
    f[index::GOAL_X] = goal.x as f64;
    f[index::GOAL_Y] = goal.y as f64;

    let sentinel = state.dims().diagonal();
    let mut nearest: Option<(Vertex, f64)> = None;
    let mut by_x: Option<(Vertex, u32)> = None;
    let mut by_y: Option<(Vertex, u32)> = None;
    for &u in state.invalid_cells() {
        let d = v.euclidean(u);
        if nearest.is_none_or(|(_, best)| d < best) {
            nearest = Some((u, d));
        }
        let dx = u.x.abs_diff(v.x);
        if by_x.is_none_or(|(_, best)| dx < best) {
            by_x = Some((u, dx));
        }
        let dy = u.y.abs_diff(v.y);
        if by_y.is_none_or(|(_, best)| dy < best) {
            by_y = Some((u, dy));
        }
    }
    let mut put = |at: usize, hit: Option<Vertex>| {
        let (x, y, d) = match hit {
            Some(u) => (u.x as f64, u.y as f64, v.euclidean(u)),
            None => (v.x as f64, v.y as f64, sentinel),
        };
        f[at] = x;
        f[at + 1] = y;
        f[at + 2] = d;
    };
    put(index::OBS, nearest.map(|n| n.0));
    put(index::OBS_X, by_x.map(|n| n.0));
    put(index::OBS_Y, by_y.map(|n| n.0));
    f
}

pub fn featurize(v: Vertex, state: &SearchState, spec: &EpisodeSpec) -> FeatureVector {
    let scale = state.dims().diagonal().recip();
    featurize_raw(v, state, spec).map(|x| x * scale)
}
