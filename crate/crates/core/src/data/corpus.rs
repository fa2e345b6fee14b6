use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::faces::{render_face, FaceParams, IdentityParams, NuisanceParams};
use super::pgm::read_pgm;
use crate::codec::Image;
use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Eval,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Eval => "eval",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "eval" => Ok(Split::Eval),
            other => Err(Error::invalid(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory unless absolute.
    pub path: PathBuf,
    pub identity_id: usize,
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_HEADER: &str = "path,identity_id,split";

impl DatasetManifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{}\n",
                e.path.display(),
                e.identity_id,
                e.split
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(MANIFEST_HEADER) {
            return Err(Error::invalid(format!(
                "manifest must start with header `{MANIFEST_HEADER}`"
            )));
        }
        let mut entries = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.trim().split(',').collect();
            let [path, id, split] = fields[..] else {
                return Err(Error::invalid(format!(
                    "manifest line {}: expected 3 fields",
                    n + 2
                )));
            };
            let identity_id = id.parse().map_err(|_| {
                Error::invalid(format!("manifest line {}: bad identity_id {id:?}", n + 2))
            })?;
            entries.push(ManifestEntry {
                path: PathBuf::from(path),
                identity_id,
                split: split.parse()?,
            });
        }
        let manifest = DatasetManifest { entries };
        manifest.check_dense_ids()?;
        Ok(manifest)
    }

    fn check_dense_ids(&self) -> Result<()> {
        let Some(max) = self.entries.iter().map(|e| e.identity_id).max() else {
            return Ok(());
        };
        let mut seen = vec![false; max + 1];
        for e in &self.entries {
            seen[e.identity_id] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!(
                "identity ids not dense: {missing} missing"
            )));
        }
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = (usize, &ManifestEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.split == split)
    }

    /// Loads every image of `split`, resolving relative paths against `root`.
    pub fn load_split(
        &self,
        root: &Path,
        split: Split,
    ) -> Result<Vec<(usize, &ManifestEntry, Image)>> {
        self.split(split)
            .map(|(i, e)| {
                let path = if e.path.is_absolute() {
                    e.path.clone()
                } else {
                    root.join(&e.path)
                };
                Ok((i, e, read_pgm(path)?))
            })
            .collect()
    }
}

/// A generated corpus: images in manifest order plus their parameters.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub images: Vec<Image>,
    pub params: Vec<FaceParams>,
    pub manifest: DatasetManifest,
}

impl Corpus {
    pub fn split_images(&self, split: Split) -> Vec<Image> {
        self.manifest
            .split(split)
            .map(|(i, _)| self.images[i].clone())
            .collect()
    }
}

/// Renders `n_identities × samples_per_identity` faces. Identity parameters
/// are drawn once per identity; nuisance parameters once per image. The last
/// `eval_per_identity` samples of every identity form the eval split.
pub fn generate_corpus(
    n_identities: usize,
    samples_per_identity: usize,
    eval_per_identity: usize,
    side: usize,
    seed: u64,
) -> Result<Corpus> {
    if n_identities < 2 {
        return Err(Error::invalid("a corpus needs at least two identities"));
    }
    if samples_per_identity == 0 || eval_per_identity > samples_per_identity {
        return Err(Error::invalid(format!(
            "bad split: {eval_per_identity} eval of {samples_per_identity} samples per identity"
        )));
    }
    let root = RngStream::new(seed);
    let mut id_rng = root.child(0);
    let identities: Vec<IdentityParams> = (0..n_identities)
        .map(|_| IdentityParams::sample(&mut id_rng))
        .collect();

    // Same-identity pairs share parameters exactly (distance 0), so ground
    // truth separation only needs distinct identities.
    for i in 0..n_identities {
        for j in (i + 1)..n_identities {
            let d = identities[i].distance(&identities[j]);
            if d.is_nan() || d <= 0.0 {
                return Err(Error::invalid(format!("identities {i} and {j} coincide")));
            }
        }
    }

    let mut images = Vec::new();
    let mut params = Vec::new();
    let mut entries = Vec::new();
    for (id, identity) in identities.iter().enumerate() {
        for sample in 0..samples_per_identity {
            let mut rng = root.child(1 + (id * samples_per_identity + sample) as u64);
            let face = FaceParams {
                identity: *identity,
                nuisance: NuisanceParams::sample(&mut rng),
            };
            images.push(render_face(&face, side, &mut rng)?);
            params.push(face);
            let split = if sample >= samples_per_identity - eval_per_identity {
                Split::Eval
            } else {
                Split::Train
            };
            entries.push(ManifestEntry {
                path: PathBuf::from(format!("faces/id{id:03}_s{sample:02}.pgm")),
                identity_id: id,
                split,
            });
        }
    }
    Ok(Corpus {
        images,
        params,
        manifest: DatasetManifest { entries },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_ids() {
        let c = generate_corpus(50, 10, 2, 16, 1).unwrap();
        assert_eq!(c.images.len(), 500);
        let ids: std::collections::BTreeSet<_> =
            c.manifest.entries.iter().map(|e| e.identity_id).collect();
        assert_eq!(ids, (0..50).collect());
        assert_eq!(c.manifest.split(Split::Eval).count(), 100);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_corpus(3, 4, 1, 16, 9).unwrap();
        let b = generate_corpus(3, 4, 1, 16, 9).unwrap();
        assert_eq!(a.images, b.images);
        assert_eq!(a.manifest, b.manifest);
        let c = generate_corpus(3, 4, 1, 16, 10).unwrap();
        assert_ne!(a.images, c.images);
    }

    #[test]
    fn same_identity_shares_identity_params_only() {
        let c = generate_corpus(2, 3, 1, 16, 5).unwrap();
        assert_eq!(c.params[0].identity, c.params[1].identity);
        assert_ne!(c.params[0].nuisance, c.params[1].nuisance);
        assert_ne!(c.params[0].identity, c.params[3].identity);
        assert!(c.params[0].identity.distance(&c.params[3].identity) > 0.0);
    }

    #[test]
    fn rejects_single_identity() {
        assert!(generate_corpus(1, 3, 1, 16, 0).is_err());
    }

    #[test]
    fn manifest_csv_round_trip_and_errors() {
        let c = generate_corpus(2, 2, 1, 16, 0).unwrap();
        let text = c.manifest.to_csv();
        assert!(text.starts_with("path,identity_id,split\n"));
        assert_eq!(DatasetManifest::from_csv(&text).unwrap(), c.manifest);
        assert!(DatasetManifest::from_csv("a,b\n").is_err());
        assert!(DatasetManifest::from_csv("path,identity_id,split\nx.pgm,1,train\n").is_err());
        assert!(DatasetManifest::from_csv("path,identity_id,split\nx.pgm,0,test\n").is_err());
    }
}
