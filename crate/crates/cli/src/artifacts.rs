use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Single point through which every output file is written, so the list of
/// artifacts and their hashes stays complete.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    written: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
        Ok(ArtifactWriter {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
        let contents = contents.as_ref();
        let path = self.root.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        let artifact = Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len(),
        };
        self.written.retain(|a| a.path != artifact.path);
        self.written.push(artifact);
        Ok(path)
    }

    /// Written artifacts sorted by path.
    pub fn artifacts(&self) -> Vec<Artifact> {
        let mut v = self.written.clone();
        v.sort_by(|a, b| a.path.cmp(&b.path));
        v
    }
}

/// Keeps file names portable: anything but ASCII letters, digits, `.`, `-`
/// and `_` becomes `_`.
pub fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "_".into()
    } else {
        s
    }
}
