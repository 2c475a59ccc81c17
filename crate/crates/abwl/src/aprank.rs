//! Longest non-trivial arithmetic progressions inside subsets of a finite
//! abelian group. Terms may repeat: only the difference must be nonzero.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{FiniteAbelianGroup, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ApRank {
    Finite(usize),
    Infinite,
}

impl ApRank {
    pub fn at_most(self, n: usize) -> bool {
        matches!(self, ApRank::Finite(x) if x <= n)
    }
}

impl fmt::Display for ApRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApRank::Finite(n) => write!(f, "{n}"),
            ApRank::Infinite => write!(f, "INFINITE"),
        }
    }
}

impl Serialize for ApRank {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ApRank::Finite(n) => s.serialize_u64(*n as u64),
            ApRank::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

impl<'de> Deserialize<'de> for ApRank {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|x| ApRank::Finite(x as usize))
                .ok_or_else(|| serde::de::Error::custom("bad rank")),
            serde_json::Value::String(s) if s == "INFINITE" => Ok(ApRank::Infinite),
            _ => Err(serde::de::Error::custom("bad rank")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApWitness {
    pub start: GroupElement,
    pub diff: GroupElement,
    pub length: usize,
}

impl ApWitness {
    pub fn terms(&self, g: &FiniteAbelianGroup) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(self.length);
        let mut x = self.start.clone();
        for _ in 0..self.length {
            out.push(x.clone());
            x = g.add(&x, &self.diff);
        }
        out
    }
}

/// Index-level view of a group for fast stepping.
struct Indexed<'a> {
    g: &'a FiniteAbelianGroup,
    member: Vec<bool>,
}

impl<'a> Indexed<'a> {
    fn new(g: &'a FiniteAbelianGroup, a: &BTreeSet<GroupElement>) -> Self {
        let mut member = vec![false; g.order() as usize];
        for x in a {
            member[g.index_of(x)] = true;
        }
        Self { g, member }
    }

    /// Number of terms starting at `a` with step `d` that stay in the set;
    /// `None` once the progression returns to `a` without leaving it.
    fn run(&self, a: &GroupElement, d: &GroupElement, limit: usize) -> Option<usize> {
        let mut x = a.clone();
        let mut len = 0;
        while len < limit && self.member[self.g.index_of(&x)] {
            len += 1;
            x = self.g.add(&x, d);
            if x == *a {
                return None;
            }
        }
        Some(len)
    }
}

pub fn ap_rank(g: &FiniteAbelianGroup, a: &BTreeSet<GroupElement>) -> ApRank {
    ap_rank_with_witness(g, a).0
}

/// The rank together with a longest progression, earliest by (start, diff).
pub fn ap_rank_with_witness(
    g: &FiniteAbelianGroup,
    a: &BTreeSet<GroupElement>,
) -> (ApRank, Option<ApWitness>) {
    let idx = Indexed::new(g, a);
    let diffs: Vec<GroupElement> = g.elements().skip(1).collect();
    if diffs.is_empty() {
        // Trivial group: no nonzero difference exists, a single term is all there is.
        let w = a.iter().next().map(|s| ApWitness {
            start: s.clone(),
            diff: s.clone(),
            length: 1,
        });
        return (ApRank::Finite(usize::from(!a.is_empty())), w);
    }
    let mut best = (0usize, None);
    for s in a {
        for d in &diffs {
            match idx.run(s, d, usize::MAX) {
                None => {
                    let w = ApWitness {
                        start: s.clone(),
                        diff: d.clone(),
                        length: g.order() as usize,
                    };
                    return (ApRank::Infinite, Some(w));
                }
                Some(len) if len > best.0 => {
                    best = (
                        len,
                        Some(ApWitness {
                            start: s.clone(),
                            diff: d.clone(),
                            length: len,
                        }),
                    );
                }
                Some(_) => {}
            }
        }
    }
    (ApRank::Finite(best.0), best.1)
}

/// Every non-trivial progression of exactly `length` terms inside `a`,
/// sorted by (start, diff).
pub fn enumerate_aps(
    g: &FiniteAbelianGroup,
    a: &BTreeSet<GroupElement>,
    length: usize,
) -> Vec<ApWitness> {
    assert!(length >= 2, "progression length must be at least 2");
    let idx = Indexed::new(g, a);
    let diffs: Vec<GroupElement> = g.elements().skip(1).collect();
    let starts: Vec<&GroupElement> = a.iter().collect();
    let mut out: Vec<ApWitness> = starts
        .par_iter()
        .flat_map_iter(|s| {
            diffs
                .iter()
                .filter(|d| {
                    let mut x = (*s).clone();
                    (0..length).all(|_| {
                        let ok = idx.member[g.index_of(&x)];
                        x = g.add(&x, d);
                        ok
                    })
                })
                .map(|d| ApWitness {
                    start: (*s).clone(),
                    diff: d.clone(),
                    length,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

/// Reference implementation: tries every (start, diff) and extends term by term.
pub fn ap_rank_naive(g: &FiniteAbelianGroup, a: &BTreeSet<GroupElement>) -> ApRank {
    let n = g.order() as usize;
    let mut best = usize::from(!a.is_empty());
    for s in a {
        for d in g.elements().filter(|d| *d != g.zero()) {
            let mut len = 0;
            let mut x = s.clone();
            while a.contains(&x) && len <= n {
                len += 1;
                x = g.add(&x, &d);
            }
            if len > n {
                return ApRank::Infinite;
            }
            best = best.max(len);
        }
    }
    ApRank::Finite(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &FiniteAbelianGroup, xs: &[i64]) -> BTreeSet<GroupElement> {
        xs.iter().map(|&x| g.reduce(&[x])).collect()
    }

    #[test]
    fn small_cyclic_ranks() {
        let z6 = FiniteAbelianGroup::cyclic(6);
        assert_eq!(ap_rank(&z6, &set(&z6, &[0, 3])), ApRank::Infinite);
        let z7 = FiniteAbelianGroup::cyclic(7);
        assert_eq!(
            ap_rank(&z7, &set(&z7, &[0, 1, 2, 3, 4, 6])),
            ApRank::Finite(6)
        );
        let z11 = FiniteAbelianGroup::cyclic(11);
        assert_eq!(
            ap_rank(&z11, &set(&z11, &[0, 1, 3, 4, 5, 6, 7, 8, 10])),
            ApRank::Finite(9)
        );
    }

    #[test]
    fn full_group_is_infinite() {
        let z5 = FiniteAbelianGroup::cyclic(5);
        assert_eq!(ap_rank(&z5, &set(&z5, &[0, 1, 2, 3, 4])), ApRank::Infinite);
    }

    #[test]
    fn rank_display_and_json() {
        assert_eq!(
            serde_json::to_string(&ApRank::Infinite).unwrap(),
            "\"INFINITE\""
        );
        assert_eq!(serde_json::to_string(&ApRank::Finite(6)).unwrap(), "6");
        let r: ApRank = serde_json::from_str("9").unwrap();
        assert_eq!(r, ApRank::Finite(9));
    }

    #[test]
    fn terms_follow_diff() {
        let z11 = FiniteAbelianGroup::cyclic(11);
        let w = ApWitness {
            start: z11.reduce(&[3]),
            diff: z11.reduce(&[5]),
            length: 9,
        };
        let t: Vec<i64> = w.terms(&z11).iter().map(|e| e.coords[0]).collect();
        assert_eq!(t, vec![3, 8, 2, 7, 1, 6, 0, 5, 10]);
    }
}
