use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CapKind, ParentGenerator, Template, TemplateError};
use crate::words::Morphism;

/// Frontier members expanded per parallel batch, per worker thread. A single
/// member can have millions of parents, so batches stay small.
const BATCH_PER_THREAD: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCaps {
    pub max_members: usize,
    pub max_generations: usize,
}

impl Default for ClosureCaps {
    fn default() -> Self {
        Self {
            max_members: 10_000_000,
            max_generations: 64,
        }
    }
}

/// The smallest parent-closed set containing the seeds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncestorSet {
    /// Seeds first (sorted), then each generation in discovery order.
    pub members: Vec<Template>,
    /// Generation of each member; seeds are generation 0.
    pub generation: Vec<u32>,
    pub seed_count: usize,
    /// Number of distinct parents of the seeds.
    pub parent_count: usize,
    /// Number of rounds that produced new members.
    pub generations: usize,
}

impl AncestorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Template) -> bool {
        self.members.contains(t)
    }

    /// Number of distinct generation indices among members, the seeds' included.
    pub fn layers(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.generations + 1
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Template, u32)> {
        self.members.iter().zip(self.generation.iter().copied())
    }
}

/// Breadth-first closure under taking parents. Parents of each frontier are
/// computed in parallel and merged in frontier order, so the result does not
/// depend on the thread count.
pub fn ancestors(
    seeds: &[Template],
    h: &Morphism,
    caps: ClosureCaps,
) -> Result<AncestorSet, TemplateError> {
    let gen = ParentGenerator::new(h)?;
    let mut sorted = seeds.to_vec();
    sorted.sort();
    sorted.dedup();
    let seed_count = sorted.len();
    let mut set: IndexSet<Template> = sorted.into_iter().collect();
    let mut generation = vec![0u32; set.len()];
    let mut frontier = 0..set.len();
    let mut parent_count = 0;
    let mut generations = 0;
    let mut round = 0u32;
    let too_many = |kind| TemplateError::CapExceeded {
        kind,
        limit: match kind {
            CapKind::Members => caps.max_members,
            CapKind::Generations => caps.max_generations,
        },
    };
    if set.len() > caps.max_members {
        return Err(too_many(CapKind::Members));
    }

    while !frontier.is_empty() {
        if round as usize >= caps.max_generations {
            return Err(too_many(CapKind::Generations));
        }
        round += 1;
        let before = set.len();
        // Distinct parents of the seeds: new members of round 1 plus seeds hit again.
        let mut seed_hit = (round == 1).then(|| vec![false; seed_count]);
        let batch_len = BATCH_PER_THREAD * rayon::current_num_threads();
        let mut lo = frontier.start;
        while lo < frontier.end {
            let hi = (lo + batch_len).min(frontier.end);
            let batch: Vec<Vec<Template>> = (lo..hi)
                .into_par_iter()
                .map(|i| gen.parents(&set[i], caps.max_members))
                .collect::<Result<_, _>>()?;
            for p in batch.into_iter().flatten() {
                let (idx, new) = set.insert_full(p);
                if new {
                    generation.push(round);
                    if set.len() > caps.max_members {
                        return Err(too_many(CapKind::Members));
                    }
                } else if let Some(hit) = seed_hit.as_mut().and_then(|h| h.get_mut(idx)) {
                    *hit = true;
                }
            }
            lo = hi;
        }
        if let Some(hit) = seed_hit {
            parent_count = set.len() - before + hit.iter().filter(|&&x| x).count();
        }
        if set.len() > before {
            generations = round as usize;
        }
        frontier = before..set.len();
    }

    Ok(AncestorSet {
        members: set.into_iter().collect(),
        generation,
        seed_count,
        parent_count,
        generations,
    })
}
