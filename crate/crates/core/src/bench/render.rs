//! P6 pixmap snapshots of a search frame.

use std::fs;
use std::path::{Path, PathBuf};

use super::RenderSettings;
use crate::gridworld::{EpisodeSpec, Vertex};
use crate::search::{CellStatus, Frame, SearchResult};
use crate::trainers::PolicySpec;
use crate::{Error, Result};

pub type Rgb = [u8; 3];

pub const CLOSED: Rgb = [0, 0, 255];
pub const INVALID: Rgb = [0, 0, 0];
pub const UNEXPANDED: Rgb = [255, 255, 255];
pub const OPEN: Rgb = [120, 200, 255];
pub const PATH: Rgb = [255, 200, 0];
pub const START: Rgb = [0, 160, 0];
pub const GOAL: Rgb = [220, 0, 0];

pub fn status_color(s: CellStatus) -> Rgb {
    match s {
        CellStatus::Closed => CLOSED,
        CellStatus::Invalid => INVALID,
        CellStatus::Unexpanded => UNEXPANDED,
        CellStatus::Open => OPEN,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions<'a> {
    /// Paint start and goal over their status colors.
    pub markers: bool,
    pub path: Option<&'a [Vertex]>,
}

/// One pixel per cell, top row first.
pub fn render_snapshot(frame: &Frame, spec: &EpisodeSpec, opts: RenderOptions<'_>) -> Result<Vec<u8>> {
    if frame.dims != spec.dims() {
        return Err(Error::Contract("frame and episode dimensions differ".into()));
    }
    let (w, h) = (frame.dims.width, frame.dims.height);
    let mut px: Vec<Rgb> = frame.cells.iter().map(|&c| status_color(c)).collect();
    let mut paint = |v: Vertex, c: Rgb| px[frame.dims.index(v)] = c;
    if let Some(path) = opts.path {
        path.iter().for_each(|&v| paint(v, PATH));
    }
    if opts.markers {
        paint(spec.start, START);
        paint(spec.goal, GOAL);
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(px.len() * 3);
    for y in (0..h).rev() {
        for x in 0..w {
            out.extend_from_slice(&px[frame.dims.index(Vertex::new(x, y))]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedFrame {
    pub t: usize,
    pub file: PathBuf,
    /// Closed-list size recorded in the trace at `t`.
    pub closed: usize,
}

/// Runs one traced episode and writes every `settings.every`-th frame, plus
/// the final one, as `frame_TTTTT.ppm` in `dir`, along with `trace.jsonl`.
pub fn render_episode(
    spec: &EpisodeSpec,
    policy: &PolicySpec,
    horizon: usize,
    episode: u64,
    settings: &RenderSettings,
    dir: &Path,
) -> Result<(SearchResult, Vec<RenderedFrame>)> {
    if settings.every == 0 {
        return Err(Error::Config("render.every must be at least 1".into()));
    }
    let result = policy.run(spec, horizon, episode, true)?;
    let trace = result.trace.as_ref().expect("trace requested");
    fs::create_dir_all(dir)?;
    let path = result.path.as_deref().filter(|_| settings.path);
    let opts = RenderOptions { markers: settings.markers, path };
    let mut frames = Vec::new();
    trace.for_each_frame(settings.every, |f| {
        let file = dir.join(format!("frame_{:05}.ppm", f.t));
        fs::write(&file, render_snapshot(f, spec, opts)?)?;
        frames.push(RenderedFrame { t: f.t, file, closed: f.count(CellStatus::Closed) });
        Ok(())
    })?;
    trace.write_jsonl(fs::File::create(dir.join("trace.jsonl"))?, settings.every)?;
    Ok((result, frames))
}

/// Width, height and pixels of a P6 file written by [`render_snapshot`].
pub fn decode_ppm(bytes: &[u8]) -> Result<(u32, u32, Vec<Rgb>)> {
    let bad = || Error::format("pixmap", "malformed header");
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?);
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(bad());
    }
    let w: u32 = fields[1].parse().map_err(|_| bad())?;
    let h: u32 = fields[2].parse().map_err(|_| bad())?;
    let body = &bytes[pos + 1..];
    if body.len() != (w * h * 3) as usize {
        return Err(Error::format("pixmap", "pixel data length mismatch"));
    }
    Ok((w, h, body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::World;
    use crate::search::{make_greedy_policy, run_search, Heuristic};

    #[test]
    fn frame_zero_and_final_frame() {
        let spec = EpisodeSpec::corners(World::from_ascii(&["....", ".#..", "...."])).unwrap();
        let r = run_search(&spec, &mut make_greedy_policy(Heuristic::Euclidean), 100, true).unwrap();
        let trace = r.trace.unwrap();
        let f0 = trace.frame(0).unwrap();
        let (w, h, px) = decode_ppm(&render_snapshot(&f0, &spec, RenderOptions::default()).unwrap()).unwrap();
        assert_eq!((w, h), (4, 3));
        assert_eq!(px.iter().filter(|&&p| p == OPEN).count(), 1);
        assert_eq!(px.iter().filter(|&&p| p == UNEXPANDED).count(), 11);
        // Bottom-left cell is the last row of the image.
        assert_eq!(px[8], OPEN);

        let last = trace.frame(trace.frame_count() - 1).unwrap();
        let bytes = render_snapshot(&last, &spec, RenderOptions::default()).unwrap();
        let (_, _, px) = decode_ppm(&bytes).unwrap();
        assert_eq!(px.iter().filter(|&&p| p == CLOSED).count(), r.state.closed().len());
        let marked = render_snapshot(&last, &spec, RenderOptions { markers: true, path: r.path.as_deref() }).unwrap();
        let (_, _, px) = decode_ppm(&marked).unwrap();
        assert_eq!(px[3], GOAL);
        assert_eq!(bytes, render_snapshot(&last, &spec, RenderOptions::default()).unwrap());
    }
}
