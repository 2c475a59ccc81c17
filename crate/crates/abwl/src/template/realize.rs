use serde::{Deserialize, Serialize};

use super::Template;
use crate::words::{Letter, PrefixSums};

/// `w[start..end] = a₁X₁a₂X₂…a_kX_ka_{k+1}` with `X_i` at
/// `block_starts[i]..block_starts[i]+block_lengths[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationWitness {
    pub start: usize,
    pub end: usize,
    pub block_starts: Vec<usize>,
    pub block_lengths: Vec<usize>,
}

/// Precomputed block-length offsets for scanning words against one template.
/// Every block length is forced by `|X_1|`: `|X_{i+1}| = |X_i| + d_i·(1,…,1)`.
#[derive(Clone, Debug)]
pub struct TemplateScanner<'a> {
    t: &'a Template,
    offs: Vec<i64>,
    fixed: usize,
    min_x1: usize,
    /// `|X_1| = 0` would leave every block empty.
    skip_zero: bool,
}

impl<'a> TemplateScanner<'a> {
    pub fn new(t: &'a Template) -> Self {
        let mut offs = vec![0i64];
        for d in t.diffs() {
            offs.push(offs.last().unwrap() + d.iter().sum::<i64>());
        }
        let min_x1 = (-offs.iter().copied().min().unwrap()).max(0) as usize;
        Self {
            t,
            fixed: t.letters().iter().flatten().count(),
            min_x1,
            skip_zero: offs.iter().all(|&o| o == 0),
            offs,
        }
    }

    pub fn template(&self) -> &Template {
        self.t
    }

    /// Length of a realization with `|X_1| = x1`; may be negative below `min_x1`.
    pub fn span(&self, x1: usize) -> i64 {
        self.fixed as i64 + self.offs.iter().map(|o| x1 as i64 + o).sum::<i64>()
    }

    fn first_x1(&self) -> usize {
        self.min_x1.max(usize::from(self.skip_zero))
    }

    pub fn try_at(
        &self,
        w: &[Letter],
        ps: &PrefixSums,
        start: usize,
        x1: usize,
    ) -> Option<RealizationWitness> {
        let k = self.t.k();
        let n = w.len();
        let m = self.t.m();
        let mut pos = start;
        let mut block_starts = Vec::with_capacity(k);
        let mut block_lengths = Vec::with_capacity(k);
        for (i, &a) in self.t.letters().iter().enumerate() {
            if let Some(c) = a {
                if pos >= n || w[pos] != c {
                    return None;
                }
                pos += 1;
            }
            if i == k {
                break;
            }
            let len = x1 as i64 + self.offs[i];
            if len < 0 || pos + len as usize > n {
                return None;
            }
            let len = len as usize;
            if i > 0 {
                let (ps0, l0) = (block_starts[i - 1], block_lengths[i - 1]);
                let d = self.t.diff(i - 1);
                // Lengths already match the diff total, so the last coordinate is implied.
                for c in 0..m - 1 {
                    if ps.count(pos, pos + len, c) - ps.count(ps0, ps0 + l0, c) != d[c] {
                        return None;
                    }
                }
            }
            block_starts.push(pos);
            block_lengths.push(len);
            pos += len;
        }
        Some(RealizationWitness {
            start,
            end: pos,
            block_starts,
            block_lengths,
        })
    }

    /// Realization starting at `start` of length at most `max_len`, smallest
    /// `|X_1|` first. Realizations whose blocks are all empty are not counted.
    pub fn first_at(
        &self,
        w: &[Letter],
        ps: &PrefixSums,
        start: usize,
        max_len: usize,
    ) -> Option<RealizationWitness> {
        let room = max_len.min(w.len().saturating_sub(start)) as i64;
        (self.first_x1()..)
            .take_while(|&x1| self.span(x1) <= room)
            .find_map(|x1| self.try_at(w, ps, start, x1))
    }

    /// Realization of the whole of `w`.
    pub fn whole(&self, w: &[Letter], ps: &PrefixSums) -> Option<RealizationWitness> {
        let k = self.t.k() as i64;
        let rest = w.len() as i64 - self.span(0);
        if rest < 0 || rest % k != 0 || ((rest / k) as usize) < self.first_x1() {
            return None;
        }
        self.try_at(w, ps, 0, (rest / k) as usize)
    }
}

/// Whether `w` itself realizes `t` with at least one non-empty block.
pub fn realizes(w: &[Letter], t: &Template) -> Option<RealizationWitness> {
    let ps = PrefixSums::new(w, t.m());
    TemplateScanner::new(t).whole(w, &ps)
}

/// A factor of `w` of length at most `max_len` realizing `t`, smallest
/// `(start, |X_1|)` first.
pub fn find_realization(w: &[Letter], t: &Template, max_len: usize) -> Option<RealizationWitness> {
    let ps = PrefixSums::new(w, t.m());
    let sc = TemplateScanner::new(t);
    (0..w.len()).find_map(|s| sc.first_at(w, &ps, s, max_len))
}
