//! Clairvoyant cost-to-go: a backward sweep from the goal over the fully
//! known world. With unit edge costs the uniform-cost frontier is a plain
//! FIFO queue.

use std::collections::VecDeque;

use crate::gridworld::{evaluate_edge, successors, Dims, Edge, Vertex, World};
use crate::{Error, Result};

/// Unreachable cells and obstacles.
pub const UNREACHABLE: u32 = u32::MAX;

/// Optimal edge-count cost-to-go for every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    dims: Dims,
    goal: Vertex,
    cost: Vec<u32>,
}

pub fn backward_dijkstra(world: &World, goal: Vertex) -> Result<OracleTable> {
    let dims = world.dims();
    if !dims.contains(goal) || world.is_obstacle(goal) {
        return Err(Error::Contract(format!("oracle goal {goal} is out of bounds or blocked")));
    }
    let mut cost = vec![UNREACHABLE; dims.cell_count()];
    cost[dims.index(goal)] = 0;
    let mut queue = VecDeque::from([goal]);
    while let Some(u) = queue.pop_front() {
        let next = cost[dims.index(u)] + 1;
        // Relax predecessors v with a valid edge v -> u.
        for (_, v) in successors(u, dims) {
            let vi = dims.index(v);
            if cost[vi] != UNREACHABLE || world.is_obstacle(v) {
                continue;
            }
            if evaluate_edge(Edge { from: v, to: u }, world) {
                cost[vi] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(OracleTable { dims, goal, cost })
}

impl OracleTable {
    pub fn goal(&self) -> Vertex {
        self.goal
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Raw edge count, or `None` when unreachable.
    pub fn steps(&self, v: Vertex) -> Option<u32> {
        match self.cost[self.dims.index(v)] {
            UNREACHABLE => None,
            c => Some(c),
        }
    }

    /// Cost-to-go as a float; +inf when unreachable.
    #[inline]
    pub fn lookup(&self, v: Vertex) -> f64 {
        match self.cost[self.dims.index(v)] {
            UNREACHABLE => f64::INFINITY,
            c => c as f64,
        }
    }

    /// Regression target: cost-to-go clamped to `horizon`, with unreachable
    /// cells mapped to `horizon`.
    pub fn label(&self, v: Vertex, horizon: usize) -> f64 {
        self.lookup(v).min(horizon as f64)
    }

    pub fn raw(&self) -> &[u32] {
        &self.cost
    }

    /// Grayscale debug image (P5): reachable cells shade from white at the
    /// goal to dark at the farthest cell, unreachable cells are black.
    pub fn to_pgm(&self) -> Vec<u8> {
        let max = self.cost.iter().copied().filter(|&c| c != UNREACHABLE).max().unwrap_or(0).max(1);
        let (w, h) = (self.dims.width, self.dims.height);
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        for y in (0..h).rev() {
            for x in 0..w {
                let c = self.cost[self.dims.index(Vertex::new(x, y))];
                out.push(if c == UNREACHABLE { 0 } else { 255 - (200 * c / max) as u8 });
            }
        }
        out
    }
}

/// Standalone label lookup.
pub fn lookup_label(table: &OracleTable, v: Vertex) -> f64 {
    table.lookup(v)
}
