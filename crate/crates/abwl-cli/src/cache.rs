//! Ancestor closures cached on disk under `ABWL_CACHE_DIR`, keyed by the
//! digest of the morphism and seed set.

use std::path::PathBuf;

use abwl::template::{ancestors, store, AncestorSet, ClosureCaps, Template, TemplateError};
use abwl::words::Morphism;

pub const ENV: &str = "ABWL_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
    /// The stored file failed to load or verify and was rebuilt.
    Rebuilt,
}

fn dir() -> Option<PathBuf> {
    std::env::var_os(ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

pub fn closure(
    h: &Morphism,
    seeds: &[Template],
    caps: ClosureCaps,
) -> Result<(AncestorSet, CacheStatus), TemplateError> {
    let Some(dir) = dir() else {
        return Ok((ancestors(seeds, h, caps)?, CacheStatus::Disabled));
    };
    let key = store::cache_key(h, seeds);
    let path = dir.join(format!("{key}.ancestors"));
    let mut status = CacheStatus::Miss;
    if path.exists() {
        match store::load(&path) {
            Ok((header, set)) if header.key == key => return Ok((set, CacheStatus::Hit)),
            Ok(_) => status = CacheStatus::Rebuilt,
            Err(e) => {
                eprintln!("cache: discarding {}: {e}", path.display());
                status = CacheStatus::Rebuilt;
            }
        }
    }
    let set = ancestors(seeds, h, caps)?;
    if let Err(e) = std::fs::create_dir_all(&dir)
        .map_err(store::StoreError::from)
        .and_then(|_| store::save(&path, &key, &set))
    {
        eprintln!("cache: cannot write {}: {e}", path.display());
    }
    Ok((set, status))
}
