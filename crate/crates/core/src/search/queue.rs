use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SearchState;
use crate::gridworld::Vertex;

#[derive(Debug, Clone, Copy)]
struct Entry {
    score: f64,
    seq: u64,
    vertex: Vertex,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap yields the lowest score, then earliest insert.
    fn cmp(&self, other: &Self) -> Ordering {
        other.score.total_cmp(&self.score).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Min-priority queue over open vertices with scores frozen at insertion.
///
/// Several queues may order the same open set; entries for vertices that
/// have since left the open list are discarded lazily.
#[derive(Debug, Clone, Default)]
pub struct FrozenQueue {
    heap: BinaryHeap<Entry>,
}

impl FrozenQueue {
    pub fn new() -> Self {
        FrozenQueue::default()
    }

    /// NaN scores are stored as +inf.
    pub fn push(&mut self, vertex: Vertex, score: f64, seq: u64) {
        let score = if score.is_nan() { f64::INFINITY } else { score };
        self.heap.push(Entry { score, seq, vertex });
    }

    fn drop_stale(&mut self, state: &SearchState) {
        while self.heap.peek().is_some_and(|e| !state.is_open(e.vertex)) {
            self.heap.pop();
        }
    }

    /// Lowest-scored vertex still open, without removing it.
    pub fn peek_open(&mut self, state: &SearchState) -> Option<(Vertex, f64)> {
        self.drop_stale(state);
        self.heap.peek().map(|e| (e.vertex, e.score))
    }

    pub fn pop_open(&mut self, state: &SearchState) -> Option<Vertex> {
        self.drop_stale(state);
        self.heap.pop().map(|e| e.vertex)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
