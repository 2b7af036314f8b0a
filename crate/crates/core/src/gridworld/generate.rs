//! Procedural world distributions.
//!
//! Every generator is a function of `(distribution, seed, width, height)` and
//! its [`GenParams`]. Generators clear the start/goal corners and retry with
//! derived seeds until a valid path joins bottom-left to top-right.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Vertex, World};
use crate::rng::{rng_for, Rng};
use crate::{Error, Result};

const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Empty,
    Bugtrap,
    Forest,
    SingleGapWall,
    ShiftedGaps,
    Maze,
    GapsAndForest,
}

impl Distribution {
    pub const ALL: [Distribution; 7] = [
        Distribution::Empty,
        Distribution::Bugtrap,
        Distribution::Forest,
        Distribution::SingleGapWall,
        Distribution::ShiftedGaps,
        Distribution::Maze,
        Distribution::GapsAndForest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Empty => "empty",
            Distribution::Bugtrap => "bugtrap",
            Distribution::Forest => "forest",
            Distribution::SingleGapWall => "single_gap_wall",
            Distribution::ShiftedGaps => "shifted_gaps",
            Distribution::Maze => "maze",
            Distribution::GapsAndForest => "gaps_and_forest",
        }
    }

    fn tag(self) -> u64 {
        Distribution::ALL.iter().position(|&d| d == self).unwrap() as u64
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown distribution `{s}`")))
    }
}

/// Shape parameters for the generators. None of these come from measured
/// data; they are tunable defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    /// Gap size in cells for wall distributions; `None` picks `max(3, h/16)`.
    pub gap_width: Option<u32>,
    pub wall_thickness: u32,
    /// Number of walls in `shifted_gaps` and `gaps_and_forest`.
    pub wall_count: u32,
    /// Vertical band, as fractions of the height, where `shifted_gaps` places
    /// gaps.
    pub gap_band: (f64, f64),
    /// Target fraction of cells covered by forest blobs.
    pub forest_density: f64,
    pub gaps_forest_density: f64,
    pub blob_size: (u32, u32),
    /// Bugtrap side length as a fraction of the shorter map side.
    pub trap_size: (f64, f64),
    /// Fraction of the trap side left open at the mouth.
    pub trap_mouth: f64,
    pub hall_width: u32,
    /// Clearance radius around start and goal corners.
    pub corner_clearance: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            gap_width: None,
            wall_thickness: 1,
            wall_count: 2,
            gap_band: (0.02, 0.35),
            forest_density: 0.15,
            gaps_forest_density: 0.06,
            blob_size: (2, 6),
            trap_size: (0.3, 0.45),
            trap_mouth: 0.4,
            hall_width: 6,
            corner_clearance: 2,
        }
    }
}

pub fn generate_world(distribution: &str, seed: u64, width: u32, height: u32) -> Result<World> {
    let dist: Distribution = distribution.parse()?;
    generate_world_with(dist, seed, width, height, &GenParams::default())
}

pub fn generate_world_with(
    dist: Distribution,
    seed: u64,
    width: u32,
    height: u32,
    params: &GenParams,
) -> Result<World> {
    if width < 10 || height < 10 {
        return Err(Error::Config(format!("world {width}x{height} below the 10x10 minimum")));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_for(seed, &[dist.tag(), width as u64, height as u64, attempt]);
        let mut world = World::empty(width, height);
        match dist {
            Distribution::Empty => {}
            Distribution::Bugtrap => bugtrap(&mut world, &mut rng, params),
            Distribution::Forest => forest(&mut world, &mut rng, params, params.forest_density),
            Distribution::SingleGapWall => single_gap_wall(&mut world, &mut rng, params),
            Distribution::ShiftedGaps => {
                gap_walls(&mut world, &mut rng, params, params.gap_band);
            }
            Distribution::Maze => maze(&mut world, &mut rng, params),
            Distribution::GapsAndForest => {
                let gaps = gap_walls(&mut world, &mut rng, params, (0.0, 1.0));
                forest(&mut world, &mut rng, params, params.gaps_forest_density);
                // Forest blobs must not plug the gaps.
                for (x0, x1, y0, y1) in gaps {
                    fill_rect(&mut world, x0, x1, y0, y1, false);
                }
            }
        }
        clear_corners(&mut world, params.corner_clearance);
        let (start, goal) = (world.bottom_left(), world.top_right());
        if world.connected(start, goal) {
            world.seed = seed;
            world.distribution = dist.name().to_string();
            return Ok(world);
        }
    }
    Err(Error::Generation(format!(
        "{dist} {width}x{height} seed {seed}: no solvable world after {MAX_ATTEMPTS} attempts"
    )))
}

/// Sets cells in the inclusive rectangle, clipped to the grid.
fn fill_rect(world: &mut World, x0: i64, x1: i64, y0: i64, y1: i64, blocked: bool) {
    let (w, h) = (world.width() as i64, world.height() as i64);
    for y in y0.max(0)..=y1.min(h - 1) {
        for x in x0.max(0)..=x1.min(w - 1) {
            world.set_obstacle(Vertex::new(x as u32, y as u32), blocked);
        }
    }
}

fn clear_corners(world: &mut World, r: u32) {
    let (w, h) = (world.width() as i64, world.height() as i64);
    let r = r as i64;
    fill_rect(world, 0, r, 0, r, false);
    fill_rect(world, w - 1 - r, w - 1, h - 1 - r, h - 1, false);
}

fn gap_width(params: &GenParams, height: u32) -> u32 {
    params.gap_width.unwrap_or((height / 16).max(3)).clamp(1, height - 1)
}

/// One full-height vertical wall with a single gap.
fn single_gap_wall(world: &mut World, rng: &mut Rng, params: &GenParams) {
    let (w, h) = (world.width(), world.height());
    let t = params.wall_thickness.max(1);
    let x0 = rng.random_range(w / 4..=(3 * w / 4).saturating_sub(t)) as i64;
    let k = gap_width(params, h);
    let gy = rng.random_range(0..=h - k) as i64;
    fill_rect(world, x0, x0 + t as i64 - 1, 0, h as i64 - 1, true);
    fill_rect(world, x0, x0 + t as i64 - 1, gy, gy + k as i64 - 1, false);
}

/// Evenly spaced full-height walls, each with one gap drawn from `band`.
/// Returns the gap rectangles.
fn gap_walls(
    world: &mut World,
    rng: &mut Rng,
    params: &GenParams,
    band: (f64, f64),
) -> Vec<(i64, i64, i64, i64)> {
    let (w, h) = (world.width() as i64, world.height() as i64);
    let t = params.wall_thickness.max(1) as i64;
    let n = params.wall_count.max(1) as i64;
    let k = gap_width(params, h as u32) as i64;
    let lo = ((band.0 * h as f64).floor() as i64).clamp(0, h - k);
    let hi = ((band.1 * h as f64).ceil() as i64 - k).clamp(lo, h - k);
    let mut gaps = Vec::new();
    for i in 1..=n {
        let x0 = i * w / (n + 1) - t / 2;
        let gy = rng.random_range(lo..=hi);
        fill_rect(world, x0, x0 + t - 1, 0, h - 1, true);
        fill_rect(world, x0, x0 + t - 1, gy, gy + k - 1, false);
        gaps.push((x0, x0 + t - 1, gy, gy + k - 1));
    }
    gaps
}

/// Square blobs placed by dart throwing with a minimum center spacing
/// (Poisson-disc), until the covered fraction reaches `density`.
fn forest(world: &mut World, rng: &mut Rng, params: &GenParams, density: f64) {
    let (w, h) = (world.width() as i64, world.height() as i64);
    let (smin, smax) = (params.blob_size.0.max(1) as i64, params.blob_size.1.max(1) as i64);
    let (smin, smax) = (smin.min(smax), smin.max(smax));
    let mean_area = ((smin + smax) as f64 / 2.0).powi(2);
    let target = (density * (w * h) as f64 / mean_area).round() as usize;
    let spacing = (smax + 1) as f64;
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(target);
    let mut attempts = 0;
    while centers.len() < target && attempts < 30 * target.max(1) {
        attempts += 1;
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        if centers.iter().any(|&(x, y)| (x - cx).hypot(y - cy) < spacing) {
            continue;
        }
        centers.push((cx, cy));
        let s = rng.random_range(smin..=smax);
        let x0 = cx as i64 - s / 2;
        let y0 = cy as i64 - s / 2;
        fill_rect(world, x0, x0 + s - 1, y0, y0 + s - 1, true);
    }
}

/// A square cup straddling the start-goal diagonal. The top and right sides
/// (facing the goal) are solid; the mouth is an L-shaped opening at the
/// bottom-left corner, facing the start.
fn bugtrap(world: &mut World, rng: &mut Rng, params: &GenParams) {
    let (w, h) = (world.width() as f64, world.height() as f64);
    let t = params.wall_thickness.max(1) as i64;
    let side = (rng.random_range(params.trap_size.0..=params.trap_size.1) * w.min(h)).round() as i64;
    let side = side.max(4 * t + 2);
    let frac = rng.random_range(0.4..=0.6);
    let (cx, cy) = (frac * (w - 1.0), frac * (h - 1.0));
    let x0 = (cx - side as f64 / 2.0).round() as i64;
    let y0 = (cy - side as f64 / 2.0).round() as i64;
    let (x1, y1) = (x0 + side - 1, y0 + side - 1);
    let mouth = ((params.trap_mouth * side as f64).round() as i64).clamp(t + 1, side - t - 1);
    // top and right
    fill_rect(world, x0, x1, y1 - t + 1, y1, true);
    fill_rect(world, x1 - t + 1, x1, y0, y1, true);
    // left side down to the mouth, bottom side leftwards to the mouth
    fill_rect(world, x0, x0 + t - 1, y0 + mouth, y1, true);
    fill_rect(world, x0 + mouth, x1, y0, y0 + t - 1, true);
}

/// Recursive division over a lattice of rooms `hall_width` cells wide,
/// separated by one-cell walls with one room-wide door per wall segment.
fn maze(world: &mut World, rng: &mut Rng, params: &GenParams) {
    let (w, h) = (world.width(), world.height());
    let hall = params.hall_width.max(1);
    let pitch = hall + 1;
    let cols = ((w + 1) / pitch).max(1) as usize;
    let rows = ((h + 1) / pitch).max(1) as usize;
    // vwall[j][i]: wall east of room (i, j); hwall[j][i]: wall north of (i, j).
    let mut vwall = vec![vec![false; cols]; rows];
    let mut hwall = vec![vec![false; cols]; rows];

    let mut stack = vec![(0usize, 0usize, cols, rows)];
    while let Some((x, y, cw, ch)) = stack.pop() {
        if cw < 2 && ch < 2 {
            continue;
        }
        let vertical = if cw == 1 {
            false
        } else if ch == 1 {
            true
        } else if cw != ch {
            cw > ch
        } else {
            rng.random_bool(0.5)
        };
        if vertical {
            let k = rng.random_range(1..cw);
            let door = y + rng.random_range(0..ch);
            for (j, row) in vwall.iter_mut().enumerate().skip(y).take(ch) {
                row[x + k - 1] = j != door;
            }
            stack.push((x, y, k, ch));
            stack.push((x + k, y, cw - k, ch));
        } else {
            let k = rng.random_range(1..ch);
            let door = x + rng.random_range(0..cw);
            for (i, cell) in hwall[y + k - 1].iter_mut().enumerate().skip(x).take(cw) {
                *cell = i != door;
            }
            stack.push((x, y, cw, k));
            stack.push((x, y + k, cw, ch - k));
        }
    }

    let span = |i: usize, n: usize, limit: u32| -> (i64, i64) {
        let lo = (i as u32 * pitch) as i64;
        let hi = if i + 1 == n { limit as i64 - 1 } else { lo + hall as i64 - 1 };
        (lo, hi)
    };
    for j in 0..rows {
        let (ylo, yhi) = span(j, rows, h);
        for i in 0..cols {
            let (xlo, xhi) = span(i, cols, w);
            if i + 1 < cols && vwall[j][i] {
                fill_rect(world, xhi + 1, xhi + 1, ylo, yhi, true);
            }
            if j + 1 < rows && hwall[j][i] {
                fill_rect(world, xlo, xhi, yhi + 1, yhi + 1, true);
            }
            // Junction east-north of this room.
            if i + 1 < cols && j + 1 < rows {
                let incident = vwall[j][i] || vwall[j + 1][i] || hwall[j][i] || hwall[j][i + 1];
                if incident {
                    fill_rect(world, xhi + 1, xhi + 1, yhi + 1, yhi + 1, true);
                }
            }
        }
    }
}
