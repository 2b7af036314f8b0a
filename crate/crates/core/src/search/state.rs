use crate::gridworld::{evaluate_edge, successors, Dims, Edge, EpisodeSpec, Vertex, World};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum Membership {
    Unseen,
    Open,
    Closed,
}

/// Open, closed and invalid lists plus per-vertex bookkeeping.
///
/// Storage is dense over the grid. The open list is kept as an indexable
/// vector (swap-remove) so uniform sampling from it is O(1).
#[derive(Debug, Clone)]
pub struct SearchState {
    dims: Dims,
    start: Vertex,
    goal: Vertex,
    membership: Vec<Membership>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    seq: Vec<u64>,
    open: Vec<Vertex>,
    open_pos: Vec<u32>,
    closed: Vec<Vertex>,
    invalid: Vec<Edge>,
    invalid_cells: Vec<Vertex>,
    invalid_mask: Vec<bool>,
    next_seq: u64,
    edge_evaluations: u64,
}

/// Result of one expansion: children newly added to open, and the edges
/// found invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expansion {
    pub added: Vec<Vertex>,
    pub invalid: Vec<Edge>,
    /// Obstacle cells seen for the first time in this expansion.
    pub new_invalid_cells: Vec<Vertex>,
}

impl SearchState {
    /// Fresh state with only `start` in the open list.
    pub fn new(spec: &EpisodeSpec) -> Self {
        let dims = spec.dims();
        let n = dims.cell_count();
        let mut state = SearchState {
            dims,
            start: spec.start,
            goal: spec.goal,
            membership: vec![Membership::Unseen; n],
            parent: vec![NONE; n],
            depth: vec![0; n],
            seq: vec![0; n],
            open: Vec::new(),
            open_pos: vec![NONE; n],
            closed: Vec::new(),
            invalid: Vec::new(),
            invalid_cells: Vec::new(),
            invalid_mask: vec![false; n],
            next_seq: 0,
            edge_evaluations: 0,
        };
        state.push_open(spec.start, None);
        state
    }

    fn push_open(&mut self, v: Vertex, parent: Option<Vertex>) {
        let i = self.dims.index(v);
        self.membership[i] = Membership::Open;
        match parent {
            Some(p) => {
                let pi = self.dims.index(p);
                self.parent[i] = pi as u32;
                self.depth[i] = self.depth[pi] + 1;
            }
            None => {
                self.parent[i] = NONE;
                self.depth[i] = 0;
            }
        }
        self.seq[i] = self.next_seq;
        self.next_seq += 1;
        self.open_pos[i] = self.open.len() as u32;
        self.open.push(v);
    }

    fn remove_open(&mut self, v: Vertex) {
        let i = self.dims.index(v);
        let pos = self.open_pos[i] as usize;
        self.open.swap_remove(pos);
        if let Some(&moved) = self.open.get(pos) {
            self.open_pos[self.dims.index(moved)] = pos as u32;
        }
        self.open_pos[i] = NONE;
    }

    /// Moves `v` from open to closed, evaluates each outgoing edge once and
    /// updates all lists.
    pub fn expand(&mut self, v: Vertex, world: &World) -> Result<Expansion> {
        if !self.dims.contains(v) || !self.is_open(v) {
            return Err(Error::Contract(format!("expand({v}): vertex not in open list")));
        }
        self.remove_open(v);
        self.membership[self.dims.index(v)] = Membership::Closed;
        self.closed.push(v);

        let mut out = Expansion::default();
        for (edge, child) in successors(v, self.dims) {
            self.edge_evaluations += 1;
            if evaluate_edge(edge, world) {
                if self.membership[self.dims.index(child)] == Membership::Unseen {
                    self.push_open(child, Some(v));
                    out.added.push(child);
                }
            } else {
                self.invalid.push(edge);
                out.invalid.push(edge);
                let ci = self.dims.index(child);
                // Corner-cut diagonals into free cells reveal no obstacle at
                // the destination; the blocking corners are orthogonal
                // neighbors and get recorded through their own edges.
                if world.is_obstacle(child) && !self.invalid_mask[ci] {
                    self.invalid_mask[ci] = true;
                    self.invalid_cells.push(child);
                    out.new_invalid_cells.push(child);
                }
            }
        }
        Ok(out)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn goal(&self) -> Vertex {
        self.goal
    }

    #[inline]
    pub fn is_open(&self, v: Vertex) -> bool {
        self.membership[self.dims.index(v)] == Membership::Open
    }

    #[inline]
    pub fn is_closed(&self, v: Vertex) -> bool {
        self.membership[self.dims.index(v)] == Membership::Closed
    }

    pub fn is_seen(&self, v: Vertex) -> bool {
        self.membership[self.dims.index(v)] != Membership::Unseen
    }

    /// Open vertices in unspecified (but deterministic) order.
    pub fn open(&self) -> &[Vertex] {
        &self.open
    }

    /// Closed vertices in expansion order.
    pub fn closed(&self) -> &[Vertex] {
        &self.closed
    }

    pub fn invalid_edges(&self) -> &[Edge] {
        &self.invalid
    }

    /// Discovered obstacle cells (destinations of invalid edges), in
    /// discovery order without duplicates.
    pub fn invalid_cells(&self) -> &[Vertex] {
        &self.invalid_cells
    }

    pub fn is_invalid_cell(&self, v: Vertex) -> bool {
        self.invalid_mask[self.dims.index(v)]
    }

    pub fn expansions(&self) -> usize {
        self.closed.len()
    }

    pub fn edge_evaluations(&self) -> u64 {
        self.edge_evaluations
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[self.dims.index(v)] {
            NONE => None,
            p => Some(self.dims.vertex(p as usize)),
        }
    }

    /// Depth in the search tree; equals g under unit edge costs.
    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[self.dims.index(v)]
    }

    pub fn g(&self, v: Vertex) -> u32 {
        self.depth(v)
    }

    /// Insertion order into the open list; used for FIFO tie-breaking.
    pub fn insertion_seq(&self, v: Vertex) -> u64 {
        self.seq[self.dims.index(v)]
    }

    /// Follows parent links from `v` back to the start.
    pub fn path_to(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.is_seen(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
            if path.len() > self.dims.cell_count() {
                return None;
            }
        }
        path.reverse();
        (path[0] == self.start).then_some(path)
    }
}
