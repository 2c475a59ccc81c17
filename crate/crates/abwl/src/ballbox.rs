//! Ball-box distributions and their binary word encoding.
//!
//! Balls `1..=n` fill boxes `1, 2, ...` in order. Letter `i` of the encoding
//! is `a` when balls `i` and `i + 1` sit in different boxes and `b` otherwise,
//! so a distribution of `n` balls encodes as a word of length `n - 1`. An
//! abelian `(k-1)`-power with blocks of length `d` starting at letter `i`
//! corresponds to balls `i, i+d, ..., i+(k-1)d` whose boxes advance by the
//! number of `a`s per block.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{blocks_equal, AbelianPowerOccurrence, Letter, PrefixSums, Word};

const A: Letter = 0;
const B: Letter = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallBoxError {
    #[error("box {0} is empty")]
    EmptyBox(usize),
    #[error("box labels must start at 1 and grow by at most 1, broken at ball {0}")]
    InvalidDistribution(usize),
    #[error("box {box_label} holds {size} balls, more than {ell}")]
    Overfull {
        box_label: usize,
        size: usize,
        ell: usize,
    },
    #[error("distribution has no balls")]
    NoBalls,
    #[error("encoding needs a binary alphabet")]
    NotBinary,
}

/// A finite prefix of a ball-box distribution, stored as box sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SizesRepr", into = "SizesRepr")]
pub struct Distribution {
    sizes: Vec<usize>,
    ell: usize,
    /// `starts[j]` is the first ball (1-based) of box `j + 1`.
    starts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SizesRepr {
    sizes: Vec<usize>,
    ell: usize,
}

impl TryFrom<SizesRepr> for Distribution {
    type Error = BallBoxError;

    fn try_from(r: SizesRepr) -> Result<Self, Self::Error> {
        Distribution::from_sizes(r.sizes)?.with_ell(r.ell)
    }
}

impl From<Distribution> for SizesRepr {
    fn from(d: Distribution) -> Self {
        SizesRepr {
            sizes: d.sizes,
            ell: d.ell,
        }
    }
}

impl Distribution {
    /// Box sizes in order; `ell` is the largest size.
    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self, BallBoxError> {
        if sizes.is_empty() {
            return Err(BallBoxError::NoBalls);
        }
        if let Some(j) = sizes.iter().position(|&s| s == 0) {
            return Err(BallBoxError::EmptyBox(j + 1));
        }
        let ell = sizes.iter().copied().max().unwrap_or(1);
        let starts = sizes
            .iter()
            .scan(1, |next, &s| {
                let at = *next;
                *next += s;
                Some(at)
            })
            .collect();
        Ok(Self { sizes, ell, starts })
    }

    /// From the box label of each ball `1..=n`.
    pub fn from_box_of(box_of: &[usize]) -> Result<Self, BallBoxError> {
        let mut sizes: Vec<usize> = Vec::new();
        for (i, &b) in box_of.iter().enumerate() {
            if b == sizes.len() + 1 {
                sizes.push(1);
            } else if b == sizes.len() && b > 0 {
                sizes[b - 1] += 1;
            } else {
                return Err(BallBoxError::InvalidDistribution(i + 1));
            }
        }
        Self::from_sizes(sizes)
    }

    /// Sets the per-box bound; fails if a box already exceeds `ell`.
    pub fn with_ell(mut self, ell: usize) -> Result<Self, BallBoxError> {
        if let Some(j) = self.sizes.iter().position(|&s| s > ell) {
            return Err(BallBoxError::Overfull {
                box_label: j + 1,
                size: self.sizes[j],
                ell,
            });
        }
        self.ell = ell;
        Ok(self)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn balls(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn boxes(&self) -> usize {
        self.sizes.len()
    }

    /// Box label of a 1-based ball, or `None` past the prefix.
    pub fn box_of(&self, ball: usize) -> Option<usize> {
        if ball == 0 || ball > self.balls() {
            return None;
        }
        Some(self.starts.partition_point(|&s| s <= ball))
    }

    /// Balls of box `label`, 1-based.
    pub fn box_contents(&self, label: usize) -> std::ops::Range<usize> {
        let s = self.starts[label - 1];
        s..s + self.sizes[label - 1]
    }

    /// Boxes as brackets around their ball numbers.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.boxes() {
            let balls: Vec<String> = self.box_contents(j).map(|b| b.to_string()).collect();
            let _ = write!(out, "[{}]", balls.join(" "));
        }
        out
    }

    /// Box labels printed under the first ball of each box.
    pub fn render_labeled(&self) -> String {
        let mut top = String::new();
        let mut bottom = String::new();
        for j in 1..=self.boxes() {
            let balls: Vec<String> = self.box_contents(j).map(|b| b.to_string()).collect();
            let cell = format!("[{}]", balls.join(" "));
            let _ = write!(bottom, "{:^w$}", j, w = cell.len());
            top.push_str(&cell);
        }
        format!("{top}\n{}\n", bottom.trim_end())
    }
}

/// Distribution on `|w| + 1` balls encoded by `w` (letter 0 is `a`).
pub fn word_to_distribution(w: &[Letter]) -> Result<Distribution, BallBoxError> {
    if w.iter().any(|&l| l > B) {
        return Err(BallBoxError::NotBinary);
    }
    let mut sizes = vec![1usize];
    for &l in w {
        match l {
            A => sizes.push(1),
            _ => *sizes.last_mut().expect("nonempty") += 1,
        }
    }
    Distribution::from_sizes(sizes)
}

pub fn distribution_to_word(d: &Distribution) -> Word {
    let mut w = Vec::with_capacity(d.balls().saturating_sub(1));
    for (j, &s) in d.sizes.iter().enumerate() {
        if j > 0 {
            w.push(A);
        }
        w.extend(std::iter::repeat_n(B, s - 1));
    }
    Word(w)
}

/// Balls and their boxes, both arithmetic progressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxProgression {
    pub balls: Vec<usize>,
    pub boxes: Vec<usize>,
}

impl BoxProgression {
    /// From an abelian power in the encoding of `d`.
    pub fn from_occurrence(d: &Distribution, occ: &AbelianPowerOccurrence) -> Option<Self> {
        let balls: Vec<usize> = (0..=occ.power)
            .map(|i| occ.start + 1 + i * occ.block_length)
            .collect();
        let boxes = balls
            .iter()
            .map(|&b| d.box_of(b))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { balls, boxes })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn ball_step(&self) -> usize {
        self.balls.get(1).map_or(0, |b| b - self.balls[0])
    }

    pub fn box_step(&self) -> usize {
        self.boxes.get(1).map_or(0, |b| b - self.boxes[0])
    }

    /// Checks both progressions and box membership against `d`.
    pub fn is_valid_for(&self, d: &Distribution) -> bool {
        let is_ap = |v: &[usize]| v.windows(3).all(|w| w[1] - w[0] == w[2] - w[1]);
        self.balls.len() == self.boxes.len()
            && self.balls.len() >= 2
            && self.balls.windows(2).all(|w| w[1] > w[0])
            && is_ap(&self.balls)
            && self.boxes.windows(2).all(|w| w[1] >= w[0])
            && is_ap(&self.boxes)
            && self
                .balls
                .iter()
                .zip(&self.boxes)
                .all(|(&h, &b)| d.box_of(h) == Some(b))
    }
}

/// First `k`-term box progression, by smallest first ball then smallest step.
pub fn find_box_progression(d: &Distribution, k: usize) -> Option<BoxProgression> {
    box_progressions(d, k).next()
}

/// Every `k`-term box progression, ordered by first ball then step.
pub fn box_progressions(d: &Distribution, k: usize) -> impl Iterator<Item = BoxProgression> + '_ {
    assert!(k >= 2, "a box progression needs at least 2 terms");
    let w = distribution_to_word(d);
    let ps = PrefixSums::new(&w, 2);
    let n = w.len();
    (0..n)
        .flat_map(move |s| (1..=(n - s) / (k - 1)).map(move |b| (s, b)))
        .filter(move |&(s, b)| blocks_equal(&ps, s, b, k - 1))
        .map(move |(s, b)| {
            let occ = AbelianPowerOccurrence {
                start: s,
                block_length: b,
                power: k - 1,
            };
            BoxProgression::from_occurrence(d, &occ).expect("balls within prefix")
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_lookup() {
        let d = Distribution::from_sizes(vec![1, 2, 1]).unwrap();
        let v: Vec<_> = (0..=5).map(|b| d.box_of(b)).collect();
        assert_eq!(v, [None, Some(1), Some(2), Some(2), Some(3), None]);
    }

    #[test]
    fn from_box_of_validates() {
        assert!(Distribution::from_box_of(&[1, 1, 2, 3, 3]).is_ok());
        assert_eq!(
            Distribution::from_box_of(&[1, 3]),
            Err(BallBoxError::InvalidDistribution(2))
        );
        assert_eq!(
            Distribution::from_box_of(&[2]),
            Err(BallBoxError::InvalidDistribution(1))
        );
    }

    #[test]
    fn ell_bound() {
        let d = Distribution::from_sizes(vec![1, 3]).unwrap();
        assert!(d.clone().with_ell(2).is_err());
        assert_eq!(d.with_ell(4).unwrap().ell(), 4);
    }

    #[test]
    fn render_brackets() {
        let d = Distribution::from_sizes(vec![1, 2]).unwrap();
        assert_eq!(d.render(), "[1][2 3]");
    }
}
