//! Binary parameter files: magic `WFMLP`, an endianness tag (`L`), a format
//! version byte, the layer count and sizes as little-endian u32, then the
//! flattened parameters as little-endian f64.

use std::fs;
use std::path::Path;

use super::Mlp;
use crate::{Error, Result};

const MAGIC: &[u8; 5] = b"WFMLP";
const VERSION: u8 = 1;

pub fn encode_params(mlp: &Mlp) -> Vec<u8> {
    let sizes = mlp.sizes();
    let mut out = Vec::with_capacity(16 + 4 * sizes.len() + 8 * mlp.num_params());
    out.extend_from_slice(MAGIC);
    out.push(b'L');
    out.push(VERSION);
    out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for s in &sizes {
        out.extend_from_slice(&(*s as u32).to_le_bytes());
    }
    for v in mlp.flatten() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<Mlp> {
    let bad = |d: &str| Error::format("parameter file", d);
    let mut r = bytes;
    let mut take = |n: usize| -> Result<&[u8]> {
        if r.len() < n {
            return Err(bad("truncated"));
        }
        let (h, t) = r.split_at(n);
        r = t;
        Ok(h)
    };
    if take(5)? != MAGIC {
        return Err(bad("bad magic"));
    }
    if take(1)? != b"L" {
        return Err(bad("unsupported endianness tag"));
    }
    if take(1)?[0] != VERSION {
        return Err(bad("unsupported version"));
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap()) as usize;
    let n = u32_at(take(4)?);
    if !(2..=64).contains(&n) {
        return Err(bad("implausible layer count"));
    }
    let mut sizes = Vec::with_capacity(n);
    for _ in 0..n {
        sizes.push(u32_at(take(4)?));
    }
    if sizes.last() != Some(&1) || sizes.contains(&0) {
        return Err(bad("layer sizes must be positive with a scalar output"));
    }
    let count: usize = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    let body = take(8 * count)?;
    let values: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    if !r.is_empty() {
        return Err(bad("trailing bytes"));
    }
    Mlp::unflatten(&sizes, &values)
}

pub fn write_params(mlp: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_params(mlp))?;
    Ok(())
}

pub fn read_params(path: impl AsRef<Path>) -> Result<Mlp> {
    decode_params(&fs::read(path)?)
}
