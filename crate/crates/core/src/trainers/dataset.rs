//! Datasets serialize as a one-line JSON header followed by fixed-size
//! little-endian records: 17 feature values and the label as f64, then the
//! world seed and timestep as u64.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureVector, FEATURE_DIM};
use crate::{Error, Result};

/// One supervised example: features of `(v, s_t)` and the clamped oracle
/// cost-to-go of `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Datapoint {
    pub features: FeatureVector,
    pub label: f64,
    pub world_seed: u64,
    pub timestep: u64,
}

/// One transition for TD regression. `next` holds the insertion-time
/// features of the least-Q open vertex after the step, or `None` when the
/// step ended the episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDatapoint {
    pub features: FeatureVector,
    pub cost: f64,
    pub next: Option<FeatureVector>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub points: Vec<Datapoint>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, more: impl IntoIterator<Item = Datapoint>) {
        self.points.extend(more);
    }

    pub fn pairs(&self) -> Vec<(FeatureVector, f64)> {
        self.points.iter().map(|p| (p.features, p.label)).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    feature_dim: usize,
    count: usize,
    record_bytes: usize,
}

const FORMAT: &str = "wavefront-dataset";
const RECORD_BYTES: usize = 8 * (FEATURE_DIM + 1) + 16;

pub fn encode_dataset(data: &Dataset) -> Vec<u8> {
    let header = Header {
        format: FORMAT.into(),
        version: 1,
        feature_dim: FEATURE_DIM,
        count: data.len(),
        record_bytes: RECORD_BYTES,
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.reserve(RECORD_BYTES * data.len());
    for p in &data.points {
        for v in p.features.iter().chain(std::iter::once(&p.label)) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&p.world_seed.to_le_bytes());
        out.extend_from_slice(&p.timestep.to_le_bytes());
    }
    out
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format("dataset", "missing header line"))?;
    let header: Header = serde_json::from_slice(&bytes[..nl])?;
    if header.format != FORMAT || header.feature_dim != FEATURE_DIM || header.record_bytes != RECORD_BYTES {
        return Err(Error::format("dataset", "incompatible header"));
    }
    let body = &bytes[nl + 1..];
    if body.len() != header.count * RECORD_BYTES {
        return Err(Error::format("dataset", "record count does not match body length"));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let u = |c: &[u8]| u64::from_le_bytes(c.try_into().unwrap());
    let points = body
        .chunks_exact(RECORD_BYTES)
        .map(|r| {
            let mut features = [0.0; FEATURE_DIM];
            for (i, x) in features.iter_mut().enumerate() {
                *x = f(&r[8 * i..8 * i + 8]);
            }
            let at = 8 * FEATURE_DIM;
            Datapoint {
                features,
                label: f(&r[at..at + 8]),
                world_seed: u(&r[at + 8..at + 16]),
                timestep: u(&r[at + 16..at + 24]),
            }
        })
        .collect();
    Ok(Dataset { points })
}

pub fn write_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_dataset(data))?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    decode_dataset(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn encode_decode_round_trip(
            rows in prop::collection::vec((prop::array::uniform17(-1e6f64..1e6), 0.0f64..1100.0, any::<u64>(), any::<u64>()), 0..20)
        ) {
            let data = Dataset {
                points: rows.into_iter().map(|(features, label, world_seed, timestep)| Datapoint { features, label, world_seed, timestep }).collect(),
            };
            let back = decode_dataset(&encode_dataset(&data)).unwrap();
            prop_assert_eq!(back, data);
        }
    }

    #[test]
    fn truncated_body_rejected() {
        let data = Dataset {
            points: vec![Datapoint { features: [0.5; FEATURE_DIM], label: 3.0, world_seed: 1, timestep: 2 }],
        };
        let bytes = encode_dataset(&data);
        assert!(decode_dataset(&bytes[..bytes.len() - 3]).is_err());
    }
}
