//! 8-bit binary graymap (P5) encoding of worlds: 0 is an obstacle, 255 is
//! free. Rows are written top row first, as image viewers expect.

use std::fs;
use std::path::Path;

use super::{Vertex, World};
use crate::{Error, Result};

pub fn encode(world: &World) -> Vec<u8> {
    let (w, h) = (world.width(), world.height());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(world.dims().cell_count());
    for y in (0..h).rev() {
        for x in 0..w {
            out.push(if world.is_obstacle(Vertex::new(x, y)) { 0 } else { 255 });
        }
    }
    out
}

/// Any pixel below 128 counts as an obstacle.
pub fn decode(bytes: &[u8]) -> Result<World> {
    let mut pos = 0;
    let mut header = [0u32; 3];
    let magic = next_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::format("graymap", "missing P5 magic"));
    }
    for slot in header.iter_mut() {
        let tok = next_token(bytes, &mut pos)?;
        *slot = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("graymap", "bad header number"))?;
    }
    let [w, h, maxval] = header;
    if maxval == 0 || maxval > 255 {
        return Err(Error::format("graymap", format!("unsupported maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let n = w as usize * h as usize;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| Error::format("graymap", "truncated raster"))?;
    let threshold = maxval.div_ceil(2);
    let mut cells = vec![false; n];
    for (row, line) in raster.chunks(w as usize).enumerate() {
        let y = h as usize - 1 - row;
        for (x, &px) in line.iter().enumerate() {
            cells[y * w as usize + x] = (px as u32) < threshold;
        }
    }
    World::from_cells(w, h, cells)
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::format("graymap", "truncated header")),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Ok(&bytes[start..*pos])
}

pub fn write(world: &World, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(world))?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<World> {
    decode(&fs::read(path)?)
}
