//! On-disk world datasets: one graymap per world plus `manifest.json`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::DataConfig;
use crate::gridworld::{generate_world_with, pgm, EpisodeSpec, GenParams, Vertex};
use crate::rng::derive_seed;
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Validation,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Test, Split::Validation];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Validation => "validation",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub split: Split,
    /// Path relative to the manifest.
    pub file: String,
    pub seed: u64,
    pub distribution: String,
    pub start: Vertex,
    pub goal: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub distribution: String,
    pub width: u32,
    pub height: u32,
    pub base_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn read(dir: &Path) -> Result<Manifest> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// World seeds for every split, distinct across the whole dataset.
fn split_seeds(cfg: &DataConfig) -> Vec<(Split, usize, u64)> {
    let mut used = HashSet::new();
    let mut out = Vec::new();
    for split in Split::ALL {
        let n = match split {
            Split::Train => cfg.train,
            Split::Test => cfg.test,
            Split::Validation => cfg.validation,
        };
        for i in 0..n {
            let mut bump = 0;
            let seed = loop {
                let s = derive_seed(cfg.seed, &[split.tag(), i as u64, bump]);
                if used.insert(s) {
                    break s;
                }
                bump += 1;
            };
            out.push((split, i, seed));
        }
    }
    out
}

/// Generates every world, writes `<split>/<split>_NNNN.pgm` files and the
/// manifest under `dir`.
pub fn make_dataset(cfg: &DataConfig, gen: &GenParams, dir: &Path, exec: Exec) -> Result<Manifest> {
    let plan = split_seeds(cfg);
    let worlds = exec.map(plan.len(), |i| {
        let (_, _, seed) = plan[i];
        generate_world_with(cfg.distribution, seed, cfg.width, cfg.height, gen)
    });
    let mut entries = Vec::with_capacity(plan.len());
    for split in Split::ALL {
        fs::create_dir_all(dir.join(split.name()))?;
    }
    for (&(split, i, seed), world) in plan.iter().zip(worlds) {
        let world = world?;
        let file = format!("{0}/{0}_{1:04}.pgm", split.name(), i);
        pgm::write(&world, dir.join(&file))?;
        entries.push(ManifestEntry {
            split,
            file,
            seed,
            distribution: cfg.distribution.name().to_string(),
            start: world.bottom_left(),
            goal: world.top_right(),
        });
    }
    let manifest = Manifest {
        distribution: cfg.distribution.name().to_string(),
        width: cfg.width,
        height: cfg.height,
        base_seed: cfg.seed,
        entries,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Loads the episodes of one split in manifest order.
pub fn load_split(dir: &Path, split: Split) -> Result<Vec<EpisodeSpec>> {
    let manifest = Manifest::read(dir)?;
    manifest
        .split(split)
        .map(|e| {
            let mut world = pgm::read(dir.join(&e.file))?;
            world.seed = e.seed;
            world.distribution = e.distribution.clone();
            EpisodeSpec::new(world, e.start, e.goal)
        })
        .collect()
}
