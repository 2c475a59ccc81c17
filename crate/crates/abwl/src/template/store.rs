//! Newline-delimited persistence for ancestor sets.
//!
//! Layout: one JSON header line, one `[generation, template]` line per member,
//! then `sha256:<hex>` over every preceding byte.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{AncestorSet, Template};
use crate::words::Morphism;

const FORMAT: &str = "abwl-ancestors/1";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed store: {0}")]
    Format(String),
    #[error("digest mismatch: recorded {recorded}, computed {computed}")]
    Digest { recorded: String, computed: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreHeader {
    pub format: String,
    /// Identifies the morphism and seed set the closure was computed from.
    pub key: String,
    pub seed_count: usize,
    pub parent_count: usize,
    pub generations: usize,
    pub members: usize,
}

/// Content key for a closure: digest of the morphism and the sorted seeds.
pub fn cache_key(h: &Morphism, seeds: &[Template]) -> String {
    let mut sorted = seeds.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut hasher = Sha256::new();
    hasher.update(h.to_json().as_bytes());
    hasher.update(b"\n");
    hasher.update(
        serde_json::to_string(&sorted)
            .expect("templates serialize")
            .as_bytes(),
    );
    hex::encode(hasher.finalize())
}

pub fn save(path: &Path, key: &str, set: &AncestorSet) -> Result<(), StoreError> {
    let header = StoreHeader {
        format: FORMAT.into(),
        key: key.into(),
        seed_count: set.seed_count,
        parent_count: set.parent_count,
        generations: set.generations,
        members: set.len(),
    };
    let tmp = path.with_extension("tmp");
    let mut out = BufWriter::new(fs::File::create(&tmp)?);
    let mut hasher = Sha256::new();
    let mut emit = |line: String| -> io::Result<()> {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        writeln!(out, "{line}")
    };
    emit(serde_json::to_string(&header)?)?;
    for (t, g) in set.iter() {
        emit(serde_json::to_string(&(g, t))?)?;
    }
    writeln!(out, "sha256:{}", hex::encode(hasher.finalize()))?;
    out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<(StoreHeader, AncestorSet), StoreError> {
    let text = fs::read_to_string(path)?;
    let body_end = text
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or_else(|| StoreError::Format("missing digest line".into()))?;
    let (body, tail) = text.split_at(body_end);
    let recorded = tail
        .trim()
        .strip_prefix("sha256:")
        .ok_or_else(|| StoreError::Format("missing digest line".into()))?;
    let computed = hex::encode(Sha256::digest(body.as_bytes()));
    if recorded != computed {
        return Err(StoreError::Digest {
            recorded: recorded.into(),
            computed,
        });
    }
    let mut lines = body.lines();
    let header: StoreHeader = serde_json::from_str(lines.next().unwrap_or_default())?;
    if header.format != FORMAT {
        return Err(StoreError::Format(format!(
            "unknown format {}",
            header.format
        )));
    }
    let mut members = Vec::with_capacity(header.members);
    let mut generation = Vec::with_capacity(header.members);
    for line in lines {
        let (g, t): (u32, Template) = serde_json::from_str(line)?;
        generation.push(g);
        members.push(t);
    }
    if members.len() != header.members {
        return Err(StoreError::Format(format!(
            "header lists {} members, file has {}",
            header.members,
            members.len()
        )));
    }
    let set = AncestorSet {
        members,
        generation,
        seed_count: header.seed_count,
        parent_count: header.parent_count,
        generations: header.generations,
    };
    Ok((header, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::{ancestors, ClosureCaps};

    #[test]
    fn roundtrip_and_tamper() {
        let h = Morphism::binary("abb", "aaab").unwrap();
        let seeds = [Template::trivial(3, 2)];
        let set = ancestors(&seeds, &h, ClosureCaps::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("anc.ndjson");
        let key = cache_key(&h, &seeds);
        save(&path, &key, &set).unwrap();
        let (hdr, back) = load(&path).unwrap();
        assert_eq!(hdr.key, key);
        assert_eq!(back, set);

        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen("[0,", "[1,", 1)).unwrap();
        assert!(matches!(load(&path), Err(StoreError::Digest { .. })));
    }
}
