//! Occupancy worlds and the implicit 8-connected grid graph.
//!
//! Coordinates put `(0, 0)` at the bottom-left; `y` grows northwards. Cells
//! are stored row-major from the bottom row up.

mod generate;
pub mod pgm;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use generate::{generate_world, generate_world_with, Distribution, GenParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
}

impl Vertex {
    pub const fn new(x: u32, y: u32) -> Self {
        Vertex { x, y }
    }

    pub fn euclidean(self, other: Vertex) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn manhattan(self, other: Vertex) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn chebyshev(self, other: Vertex) -> u32 {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
}

impl Edge {
    pub fn is_diagonal(&self) -> bool {
        self.from.x != self.to.x && self.from.y != self.to.y
    }
}

/// Width and height of a grid, in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub width: u32,
    pub height: u32,
}

impl Dims {
    pub const fn new(width: u32, height: u32) -> Self {
        Dims { width, height }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v.x < self.width && v.y < self.height
    }

    #[inline]
    pub fn index(&self, v: Vertex) -> usize {
        v.y as usize * self.width as usize + v.x as usize
    }

    #[inline]
    pub fn vertex(&self, index: usize) -> Vertex {
        let w = self.width as usize;
        Vertex::new((index % w) as u32, (index / w) as u32)
    }

    pub fn cell_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Length of the map diagonal, used as the normalization scale.
    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }
}

/// Binary occupancy grid. `true` marks an obstacle.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct World {
    dims: Dims,
    cells: Vec<bool>,
    pub seed: u64,
    pub distribution: String,
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("World")
            .field("dims", &self.dims)
            .field("obstacles", &self.obstacle_count())
            .field("seed", &self.seed)
            .field("distribution", &self.distribution)
            .finish()
    }
}

impl World {
    /// An obstacle-free world.
    pub fn empty(width: u32, height: u32) -> Self {
        assert!(width >= 2 && height >= 2, "world must be at least 2x2");
        let dims = Dims::new(width, height);
        World { dims, cells: vec![false; dims.cell_count()], seed: 0, distribution: "empty".into() }
    }

    pub fn from_cells(width: u32, height: u32, cells: Vec<bool>) -> crate::Result<Self> {
        if width < 2 || height < 2 {
            return Err(crate::Error::Contract(format!("world {width}x{height} smaller than 2x2")));
        }
        let dims = Dims::new(width, height);
        if cells.len() != dims.cell_count() {
            return Err(crate::Error::Contract(format!(
                "expected {} cells, got {}",
                dims.cell_count(),
                cells.len()
            )));
        }
        Ok(World { dims, cells, seed: 0, distribution: "custom".into() })
    }

    /// Builds a world from rows of text, top row first. `#` is an obstacle.
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        let mut world = World::empty(width, height);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len() as u32, width, "ragged ascii world");
            let y = height - 1 - i as u32;
            for (x, ch) in row.bytes().enumerate() {
                world.set_obstacle(Vertex::new(x as u32, y), ch == b'#');
            }
        }
        world
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> u32 {
        self.dims.width
    }

    pub fn height(&self) -> u32 {
        self.dims.height
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn is_obstacle(&self, v: Vertex) -> bool {
        self.cells[self.dims.index(v)]
    }

    #[inline]
    pub fn is_free(&self, v: Vertex) -> bool {
        !self.is_obstacle(v)
    }

    pub fn set_obstacle(&mut self, v: Vertex, blocked: bool) {
        let i = self.dims.index(v);
        self.cells[i] = blocked;
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn bottom_left(&self) -> Vertex {
        Vertex::new(0, 0)
    }

    pub fn top_right(&self) -> Vertex {
        Vertex::new(self.dims.width - 1, self.dims.height - 1)
    }

    /// Cells reachable from `from` under the edge-validity rule, as a mask.
    pub fn reachable_from(&self, from: Vertex) -> Vec<bool> {
        let mut seen = vec![false; self.dims.cell_count()];
        if self.is_obstacle(from) {
            return seen;
        }
        let mut queue = VecDeque::from([from]);
        seen[self.dims.index(from)] = true;
        while let Some(v) = queue.pop_front() {
            for (edge, child) in successors(v, self.dims) {
                let ci = self.dims.index(child);
                if !seen[ci] && evaluate_edge(edge, self) {
                    seen[ci] = true;
                    queue.push_back(child);
                }
            }
        }
        seen
    }

    pub fn connected(&self, a: Vertex, b: Vertex) -> bool {
        self.reachable_from(a)[self.dims.index(b)]
    }
}

/// Neighbor offsets, clockwise from north.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 8] =
    [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)];

/// In-bounds 8-connected neighbors of `v`, clockwise from north. Obstacles
/// are not consulted.
///
/// Panics if `v` lies outside `dims`.
pub fn successors(v: Vertex, dims: Dims) -> impl Iterator<Item = (Edge, Vertex)> {
    assert!(dims.contains(v), "vertex {v} outside {}x{} grid", dims.width, dims.height);
    NEIGHBOR_OFFSETS.iter().filter_map(move |&(dx, dy)| {
        let x = v.x as i64 + dx as i64;
        let y = v.y as i64 + dy as i64;
        if x < 0 || y < 0 || x >= dims.width as i64 || y >= dims.height as i64 {
            return None;
        }
        let to = Vertex::new(x as u32, y as u32);
        Some((Edge { from: v, to }, to))
    })
}

/// An edge is valid when its destination is free and, for a diagonal move,
/// the two orthogonal corner cells are not both obstacles.
pub fn evaluate_edge(e: Edge, world: &World) -> bool {
    let dims = world.dims();
    assert!(dims.contains(e.from) && dims.contains(e.to), "edge endpoint out of bounds");
    if world.is_obstacle(e.to) {
        return false;
    }
    if e.is_diagonal() {
        let c1 = Vertex::new(e.from.x, e.to.y);
        let c2 = Vertex::new(e.to.x, e.from.y);
        if world.is_obstacle(c1) && world.is_obstacle(c2) {
            return false;
        }
    }
    true
}

/// One planning problem: a world and a start/goal pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub world: World,
    pub start: Vertex,
    pub goal: Vertex,
}

impl EpisodeSpec {
    pub fn new(world: World, start: Vertex, goal: Vertex) -> crate::Result<Self> {
        let dims = world.dims();
        if !dims.contains(start) || !dims.contains(goal) {
            return Err(crate::Error::Contract("start or goal out of bounds".into()));
        }
        if start == goal {
            return Err(crate::Error::Contract("start equals goal".into()));
        }
        if world.is_obstacle(start) || world.is_obstacle(goal) {
            return Err(crate::Error::Contract("start or goal inside an obstacle".into()));
        }
        Ok(EpisodeSpec { world, start, goal })
    }

    /// Bottom-left to top-right.
    pub fn corners(world: World) -> crate::Result<Self> {
        let (start, goal) = (world.bottom_left(), world.top_right());
        EpisodeSpec::new(world, start, goal)
    }

    /// Start and goal drawn uniformly from the free cells connected to each
    /// other.
    pub fn random_free(world: World, rng: &mut impl rand::Rng) -> crate::Result<Self> {
        let free: Vec<Vertex> = (0..world.dims().cell_count())
            .map(|i| world.dims().vertex(i))
            .filter(|&v| world.is_free(v))
            .collect();
        for _ in 0..256 {
            let s = free[rng.random_range(0..free.len())];
            let g = free[rng.random_range(0..free.len())];
            if s != g && world.connected(s, g) {
                return EpisodeSpec::new(world, s, g);
            }
        }
        Err(crate::Error::Generation("no connected free start/goal pair found".into()))
    }

    pub fn dims(&self) -> Dims {
        self.world.dims()
    }
}
