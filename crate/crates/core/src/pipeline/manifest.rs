use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::label::read_voc_xml;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Real,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image: PathBuf,
    pub annotation: PathBuf,
    pub damaged: bool,
    pub origin: Origin,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCounts {
    pub total: usize,
    pub damaged: usize,
    pub non_damaged: usize,
    pub real: usize,
    pub synthetic: usize,
}

impl ManifestCounts {
    fn of(entries: &[ManifestEntry]) -> Self {
        let damaged = entries.iter().filter(|e| e.damaged).count();
        let real = entries.iter().filter(|e| e.origin == Origin::Real).count();
        Self {
            total: entries.len(),
            damaged,
            non_damaged: entries.len() - damaged,
            real,
            synthetic: entries.len() - real,
        }
    }
}

/// List of image/annotation pairs with cached counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    counts: ManifestCounts,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        let counts = ManifestCounts::of(&entries);
        Self { entries, counts }
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn counts(&self) -> ManifestCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every image and every annotation path appears once.
    pub fn check_unique(&self) -> Result<(), PipelineError> {
        let mut images = BTreeSet::new();
        let mut annotations = BTreeSet::new();
        for e in &self.entries {
            if !images.insert(&e.image) {
                return Err(PipelineError::Manifest(format!("image {} listed twice", e.image.display())));
            }
            if !annotations.insert(&e.annotation) {
                return Err(PipelineError::Manifest(format!("annotation {} listed twice", e.annotation.display())));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// Writes the manifest; paths under its directory are stored relative to it.
    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let base = path.parent().unwrap_or(Path::new(""));
        let rel = |p: &Path| p.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf());
        let stored = DatasetManifest {
            entries: self
                .entries
                .iter()
                .map(|e| ManifestEntry {
                    image: rel(&e.image),
                    annotation: rel(&e.annotation),
                    ..e.clone()
                })
                .collect(),
            counts: self.counts,
        };
        fs::write(path, stored.to_json()).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Reads a manifest, resolving relative paths against its directory and
    /// checking the cached counts.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        if raw.counts != ManifestCounts::of(&raw.entries) {
            return Err(PipelineError::Manifest(format!("{}: counts do not match entries", path.display())));
        }
        let base = path.parent().unwrap_or(Path::new(""));
        let abs = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        Ok(Self::new(
            raw.entries
                .into_iter()
                .map(|e| ManifestEntry {
                    image: abs(&e.image),
                    annotation: abs(&e.annotation),
                    ..e
                })
                .collect(),
        ))
    }
}

/// Each real entry `ratio` times plus each synthetic entry once, shuffled by `seed`.
pub fn rebalance(
    real: &DatasetManifest,
    synthetic: &DatasetManifest,
    ratio: u32,
    seed: u64,
) -> Result<DatasetManifest, PipelineError> {
    if ratio == 0 {
        return Err(PipelineError::Manifest("oversampling ratio must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(real.len() * ratio as usize + synthetic.len());
    for _ in 0..ratio {
        entries.extend(real.entries.iter().map(|e| ManifestEntry {
            origin: Origin::Real,
            ..e.clone()
        }));
    }
    entries.extend(synthetic.entries.iter().cloned());
    entries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(DatasetManifest::new(entries))
}

/// Counts from the annotation files themselves; an image is damaged when
/// its annotation has at least one box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total: usize,
    pub damaged: usize,
    pub non_damaged: usize,
    pub real: usize,
    pub synthetic: usize,
    pub boxes: usize,
}

pub fn dataset_stats(manifest: &DatasetManifest) -> Result<DatasetStats, PipelineError> {
    let mut cache: HashMap<&Path, usize> = HashMap::new();
    let mut s = DatasetStats::default();
    for e in &manifest.entries {
        let n = match cache.get(e.annotation.as_path()) {
            Some(n) => *n,
            None => {
                let n = read_voc_xml(&e.annotation)
                    .map_err(|err| PipelineError::Annotation {
                        path: e.annotation.clone(),
                        message: err.to_string(),
                    })?
                    .boxes
                    .len();
                cache.insert(&e.annotation, n);
                n
            }
        };
        s.total += 1;
        s.boxes += n;
        if n > 0 {
            s.damaged += 1;
        } else {
            s.non_damaged += 1;
        }
        match e.origin {
            Origin::Real => s.real += 1,
            Origin::Synthetic => s.synthetic += 1,
        }
    }
    Ok(s)
}
