use std::io::Write;

use serde::Serialize;

use super::Expansion;
use crate::gridworld::{Dims, Vertex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Unexpanded,
    Open,
    Closed,
    Invalid,
}

impl CellStatus {
    pub fn code(self) -> char {
        match self {
            CellStatus::Unexpanded => 'u',
            CellStatus::Open => 'o',
            CellStatus::Closed => 'c',
            CellStatus::Invalid => 'i',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct TraceStep {
    expanded: Vertex,
    added: Vec<Vertex>,
    new_invalid: Vec<Vertex>,
}

/// Expansion log of one episode, replayable into per-step status frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    dims: Dims,
    start: Vertex,
    steps: Vec<TraceStep>,
}

/// Status of every cell after `t` expansions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub t: usize,
    pub dims: Dims,
    pub cells: Vec<CellStatus>,
}

impl Frame {
    pub fn status(&self, v: Vertex) -> CellStatus {
        self.cells[self.dims.index(v)]
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|&&c| c == status).count()
    }

    /// One character per cell, top row first.
    pub fn to_codes(&self) -> String {
        let mut s = String::with_capacity(self.cells.len());
        for y in (0..self.dims.height).rev() {
            for x in 0..self.dims.width {
                s.push(self.status(Vertex::new(x, y)).code());
            }
        }
        s
    }
}

#[derive(Serialize)]
struct FrameRecord<'a> {
    t: usize,
    width: u32,
    height: u32,
    cells: &'a str,
}

impl Trace {
    pub(crate) fn new(dims: Dims, start: Vertex) -> Self {
        Trace { dims, start, steps: Vec::new() }
    }

    pub(crate) fn record(&mut self, expanded: Vertex, exp: &Expansion) {
        self.steps.push(TraceStep {
            expanded,
            added: exp.added.clone(),
            new_invalid: exp.new_invalid_cells.clone(),
        });
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Frames run from 0 (nothing expanded) to the final expansion count.
    pub fn frame_count(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn expanded_at(&self, step: usize) -> Option<Vertex> {
        self.steps.get(step).map(|s| s.expanded)
    }

    fn initial(&self) -> Frame {
        let mut cells = vec![CellStatus::Unexpanded; self.dims.cell_count()];
        cells[self.dims.index(self.start)] = CellStatus::Open;
        Frame { t: 0, dims: self.dims, cells }
    }

    fn apply(&self, frame: &mut Frame, step: &TraceStep) {
        frame.cells[self.dims.index(step.expanded)] = CellStatus::Closed;
        for &v in &step.added {
            frame.cells[self.dims.index(v)] = CellStatus::Open;
        }
        for &v in &step.new_invalid {
            frame.cells[self.dims.index(v)] = CellStatus::Invalid;
        }
        frame.t += 1;
    }

    pub fn frame(&self, t: usize) -> Result<Frame> {
        if t >= self.frame_count() {
            return Err(Error::Contract(format!("frame {t} out of range 0..{}", self.frame_count())));
        }
        let mut frame = self.initial();
        for step in &self.steps[..t] {
            self.apply(&mut frame, step);
        }
        Ok(frame)
    }

    /// Calls `f` on every `every`-th frame and on the final one.
    pub fn for_each_frame(&self, every: usize, mut f: impl FnMut(&Frame) -> Result<()>) -> Result<()> {
        let every = every.max(1);
        let last = self.frame_count() - 1;
        let mut frame = self.initial();
        for t in 0..=last {
            if t > 0 {
                self.apply(&mut frame, &self.steps[t - 1]);
            }
            if t % every == 0 || t == last {
                f(&frame)?;
            }
        }
        Ok(())
    }

    /// Writes frames as JSON lines `{t, width, height, cells}` where `cells`
    /// holds one status code per cell (`u`, `o`, `c`, `i`), top row first.
    pub fn write_jsonl(&self, mut out: impl Write, every: usize) -> Result<()> {
        self.for_each_frame(every, |frame| {
            let codes = frame.to_codes();
            let rec = FrameRecord { t: frame.t, width: self.dims.width, height: self.dims.height, cells: &codes };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
            Ok(())
        })
    }
}
