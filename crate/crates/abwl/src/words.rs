//! Words, Parikh vectors, morphisms and abelian power detection.
//!
//! Words are stored as sequences of alphabet indices. An [`Alphabet`] maps
//! between indices and the printable characters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Deref, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::IntMatrix;

/// Index of a letter inside its alphabet.
pub type Letter = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has more than 255 letters")]
    AlphabetTooLarge,
    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(char),
    #[error("alphabet symbols must be single characters, got {0:?}")]
    BadSymbol(String),
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(char),
    #[error("letter index {0} is out of range")]
    LetterOutOfRange(Letter),
    #[error("no image given for letter {0:?}")]
    MissingImage(char),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("morphism is not prolongable on {0:?}")]
    NotProlongable(char),
    #[error("factor set did not stabilize within {0} levels")]
    IterationCap(u32),
    #[error("malformed morphism description: {0}")]
    Json(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<char>", into = "Vec<char>")]
pub struct Alphabet {
    letters: Vec<char>,
    index: HashMap<char, Letter>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Alphabet {}

impl TryFrom<Vec<char>> for Alphabet {
    type Error = WordError;

    fn try_from(letters: Vec<char>) -> Result<Self, Self::Error> {
        Alphabet::new(letters)
    }
}

impl From<Alphabet> for Vec<char> {
    fn from(a: Alphabet) -> Self {
        a.letters
    }
}

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        if letters.len() > Letter::MAX as usize {
            return Err(WordError::AlphabetTooLarge);
        }
        let mut index = HashMap::with_capacity(letters.len());
        for (i, &c) in letters.iter().enumerate() {
            if index.insert(c, i as Letter).is_some() {
                return Err(WordError::DuplicateLetter(c));
            }
        }
        Ok(Self { letters, index })
    }

    /// The alphabet `{a, b}`.
    pub fn binary() -> Self {
        Self::new(vec!['a', 'b']).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn symbol(&self, l: Letter) -> char {
        self.letters[l as usize]
    }

    pub fn index_of(&self, c: char) -> Result<Letter, WordError> {
        self.index
            .get(&c)
            .copied()
            .ok_or(WordError::UnknownSymbol(c))
    }

    pub fn parse(&self, s: &str) -> Result<Word, WordError> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| self.index_of(c))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn render(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.symbol(l)).collect()
    }

    /// Renders an optional letter, with `ε` for the empty letter.
    pub fn render_opt(&self, l: Option<Letter>) -> String {
        match l {
            Some(l) => self.symbol(l).to_string(),
            None => "ε".to_string(),
        }
    }
}

/// A finite word as a sequence of letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Letter counts of a word, or a difference of such vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParikhVector(pub Vec<i64>);

impl ParikhVector {
    pub fn zero(m: usize) -> Self {
        ParikhVector(vec![0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Sum of the coordinates; the length for the vector of a word.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, c: i64) -> Self {
        ParikhVector(self.0.iter().map(|x| x * c).collect())
    }

    /// Row vector times matrix.
    pub fn mul_matrix(&self, m: &IntMatrix) -> ParikhVector {
        assert_eq!(self.dim(), m.rows());
        let v = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| self.0[i] * m.get(i, j)).sum())
            .collect();
        ParikhVector(v)
    }
}

impl Add for &ParikhVector {
    type Output = ParikhVector;
    fn add(self, rhs: &ParikhVector) -> ParikhVector {
        ParikhVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ParikhVector {
    type Output = ParikhVector;
    fn sub(self, rhs: &ParikhVector) -> ParikhVector {
        ParikhVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for ParikhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub fn parikh(w: &[Letter], m: usize) -> ParikhVector {
    let mut c = vec![0i64; m];
    for &l in w {
        c[l as usize] += 1;
    }
    ParikhVector(c)
}

/// Flattened prefix Parikh sums: row `i` holds the counts of `w[..i]`.
#[derive(Clone, Debug)]
pub struct PrefixSums {
    m: usize,
    data: Vec<i64>,
}

impl PrefixSums {
    pub fn new(w: &[Letter], m: usize) -> Self {
        let mut data = vec![0i64; (w.len() + 1) * m];
        for (i, &l) in w.iter().enumerate() {
            let (head, tail) = data.split_at_mut((i + 1) * m);
            tail[..m].copy_from_slice(&head[i * m..]);
            tail[l as usize] += 1;
        }
        Self { m, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.m - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, i: usize) -> &[i64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    /// Count of letter `c` in `w[i..j]`.
    #[inline]
    pub fn count(&self, i: usize, j: usize, c: usize) -> i64 {
        self.data[j * self.m + c] - self.data[i * self.m + c]
    }

    pub fn range(&self, i: usize, j: usize) -> ParikhVector {
        ParikhVector((0..self.m).map(|c| self.count(i, j, c)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianPowerOccurrence {
    pub start: usize,
    pub block_length: usize,
    pub power: usize,
}

impl AbelianPowerOccurrence {
    pub fn end(&self) -> usize {
        self.start + self.power * self.block_length
    }
}

/// True iff the `k` blocks of length `b` starting at `s` share a Parikh vector.
/// Blocks have equal length, so the last letter's count is implied.
#[inline]
pub fn blocks_equal(ps: &PrefixSums, s: usize, b: usize, k: usize) -> bool {
    let m = ps.m();
    let first = s;
    for j in 1..k {
        let bs = s + j * b;
        for c in 0..m.saturating_sub(1) {
            if ps.count(bs, bs + b, c) != ps.count(first, first + b, c) {
                return false;
            }
        }
    }
    true
}

/// First abelian `k`-power in `w`, by smallest start then smallest block length.
pub fn find_abelian_power(w: &[Letter], m: usize, k: usize) -> Option<AbelianPowerOccurrence> {
    assert!(k >= 2, "power must be at least 2");
    let ps = PrefixSums::new(w, m);
    find_abelian_power_in(&ps, k)
}

pub fn find_abelian_power_in(ps: &PrefixSums, k: usize) -> Option<AbelianPowerOccurrence> {
    (0..ps.len()).find_map(|s| abelian_power_starting_at(ps, s, k))
}

/// Abelian `k`-power starting at `start`, shortest block first.
pub fn abelian_power_starting_at(
    ps: &PrefixSums,
    start: usize,
    k: usize,
) -> Option<AbelianPowerOccurrence> {
    let max_b = (ps.len() - start) / k;
    (1..=max_b)
        .find(|&b| blocks_equal(ps, start, b, k))
        .map(|b| AbelianPowerOccurrence {
            start,
            block_length: b,
            power: k,
        })
}

/// Abelian `k`-power whose last block ends exactly at `end`, shortest block first.
pub fn abelian_power_ending_at(
    ps: &PrefixSums,
    end: usize,
    k: usize,
) -> Option<AbelianPowerOccurrence> {
    for b in 1..=end / k {
        let s = end - k * b;
        if blocks_equal(ps, s, b, k) {
            return Some(AbelianPowerOccurrence {
                start: s,
                block_length: b,
                power: k,
            });
        }
    }
    None
}

/// First position where a forbidden factor occurs.
pub fn contains_forbidden(w: &[Letter], forbidden: &[Word]) -> Option<usize> {
    (0..w.len()).find(|&p| {
        forbidden
            .iter()
            .any(|f| !f.is_empty() && w[p..].starts_with(f))
    })
}

/// A letter-to-word map on a single alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    alphabet: Alphabet,
    images: Vec<Word>,
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    alphabet: Vec<String>,
    images: BTreeMap<String, String>,
}

impl Morphism {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self, WordError> {
        if images.len() != alphabet.len() {
            return Err(WordError::ImageCount {
                expected: alphabet.len(),
                got: images.len(),
            });
        }
        for w in &images {
            if let Some(&l) = w.iter().find(|&&l| l as usize >= alphabet.len()) {
                return Err(WordError::LetterOutOfRange(l));
            }
        }
        Ok(Self { alphabet, images })
    }

    /// Binary morphism `a -> ha`, `b -> hb`.
    pub fn binary(ha: &str, hb: &str) -> Result<Self, WordError> {
        let alphabet = Alphabet::binary();
        let images = vec![alphabet.parse(ha)?, alphabet.parse(hb)?];
        Self::new(alphabet, images)
    }

    pub fn from_json(s: &str) -> Result<Self, WordError> {
        let j: MorphismJson =
            serde_json::from_str(s).map_err(|e| WordError::Json(e.to_string()))?;
        let letters = j
            .alphabet
            .iter()
            .map(|s| {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(WordError::BadSymbol(s.clone())),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let alphabet = Alphabet::new(letters)?;
        let mut images = Vec::with_capacity(alphabet.len());
        for &c in alphabet.letters() {
            let img = j
                .images
                .get(&c.to_string())
                .ok_or(WordError::MissingImage(c))?;
            images.push(alphabet.parse(img)?);
        }
        if j.images.len() != alphabet.len() {
            return Err(WordError::ImageCount {
                expected: alphabet.len(),
                got: j.images.len(),
            });
        }
        Self::new(alphabet, images)
    }

    pub fn to_json(&self) -> String {
        let j = MorphismJson {
            alphabet: self
                .alphabet
                .letters()
                .iter()
                .map(|c| c.to_string())
                .collect(),
            images: self
                .alphabet
                .letters()
                .iter()
                .zip(&self.images)
                .map(|(c, w)| (c.to_string(), self.alphabet.render(w)))
                .collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Alphabet size.
    pub fn m(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        let len = w.iter().map(|&l| self.images[l as usize].len()).sum();
        let mut out = Vec::with_capacity(len);
        for &l in w {
            out.extend_from_slice(&self.images[l as usize]);
        }
        Word(out)
    }

    pub fn apply_n(&self, w: &[Letter], n: u32) -> Word {
        let mut cur = Word(w.to_vec());
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        cur
    }

    /// Rows are the Parikh vectors of the images.
    pub fn frequency_matrix(&self) -> IntMatrix {
        let m = self.m();
        let rows: Vec<Vec<i64>> = self.images.iter().map(|w| parikh(w, m).0).collect();
        IntMatrix::from_rows(&rows).expect("square by construction")
    }

    pub fn image_parikh(&self, l: Letter) -> ParikhVector {
        parikh(&self.images[l as usize], self.m())
    }

    pub fn is_prolongable(&self, seed: Letter) -> bool {
        let img = &self.images[seed as usize];
        img.len() > 1 && img[0] == seed
    }

    pub fn check_prolongable(&self, seed: Letter) -> Result<(), WordError> {
        if self.is_prolongable(seed) {
            Ok(())
        } else {
            Err(WordError::NotProlongable(self.alphabet.symbol(seed)))
        }
    }

    /// `h^level(seed)`.
    pub fn fixed_point_prefix(&self, seed: Letter, level: u32) -> Result<Word, WordError> {
        self.check_prolongable(seed)?;
        Ok(self.apply_n(&[seed], level))
    }

    /// A prefix of the fixed point with at least `len` letters, truncated to `len`.
    pub fn fixed_point_of_length(&self, seed: Letter, len: usize) -> Result<Word, WordError> {
        self.check_prolongable(seed)?;
        let mut w = Word(vec![seed]);
        while w.len() < len {
            w = self.apply(&w);
        }
        w.0.truncate(len);
        Ok(w)
    }

    /// Iterates until the length-`<= max_len` factor sets of two consecutive
    /// iterates coincide.
    pub fn stabilized_factors(
        &self,
        seed: Letter,
        max_len: usize,
        level_cap: u32,
    ) -> Result<StabilizedFactors, WordError> {
        self.check_prolongable(seed)?;
        let mut cur = Word(vec![seed]);
        let mut cur_count = factor_count(&cur, max_len);
        for level in 0..level_cap {
            let next = self.apply(&cur);
            let next_count = factor_count(&next, max_len);
            // Iterates are prefixes of each other, so the factor sets are nested
            // and equal counts mean equal sets.
            if next_count == cur_count {
                return Ok(StabilizedFactors::new(cur, level, max_len));
            }
            cur = next;
            cur_count = next_count;
        }
        Err(WordError::IterationCap(level_cap))
    }
}

/// Number of distinct non-empty factors of length at most `max_len`.
fn factor_count(w: &[Letter], max_len: usize) -> usize {
    let windows: BTreeSet<&[Letter]> = (0..w.len())
        .map(|p| &w[p..(p + max_len).min(w.len())])
        .collect();
    let mut total = 0;
    let mut prev: &[Letter] = &[];
    for s in windows {
        let lcp = s.iter().zip(prev).take_while(|(a, b)| a == b).count();
        total += s.len() - lcp;
        prev = s;
    }
    total
}

/// The factors of bounded length of a fixed point, read off a stabilized iterate.
#[derive(Clone, Debug)]
pub struct StabilizedFactors {
    pub level: u32,
    pub max_len: usize,
    /// The iterate `h^level(seed)`.
    pub iterate: Word,
    /// Distinct windows of length `max_len` (shorter only if the iterate is);
    /// every factor of length `<= max_len` is a prefix of one of them.
    pub windows: Vec<Word>,
}

impl StabilizedFactors {
    fn new(iterate: Word, level: u32, max_len: usize) -> Self {
        let n = iterate.len();
        let set: BTreeSet<&[Letter]> = if n >= max_len {
            (0..=n - max_len)
                .map(|p| &iterate[p..p + max_len])
                .collect()
        } else {
            std::iter::once(&iterate[..]).collect()
        };
        let windows = set.into_iter().map(|s| Word(s.to_vec())).collect();
        Self {
            level,
            max_len,
            iterate,
            windows,
        }
    }

    /// Every distinct factor of length `1..=max_len`.
    pub fn all_factors(&self) -> BTreeSet<Word> {
        let w = &self.iterate;
        let mut out = BTreeSet::new();
        for p in 0..w.len() {
            for q in p + 1..=(p + self.max_len).min(w.len()) {
                out.insert(Word(w[p..q].to_vec()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::binary()
    }

    #[test]
    fn parikh_basics() {
        let a = ab();
        assert_eq!(
            parikh(&a.parse("aaaba").unwrap(), 2),
            ParikhVector(vec![4, 1])
        );
        assert_eq!(parikh(&[], 2), ParikhVector(vec![0, 0]));
        assert_eq!(
            parikh(&a.parse("babab").unwrap(), 2),
            ParikhVector(vec![2, 3])
        );
    }

    #[test]
    fn apply_and_levels() {
        let h = Morphism::binary("aaaab", "ababab").unwrap();
        assert_eq!(h.alphabet().render(&h.apply(&[0])), "aaaab");
        assert!(h.apply(&[]).is_empty());
        let w = h.fixed_point_of_length(0, 24).unwrap();
        assert_eq!(h.alphabet().render(&w), "aaaabaaaabaaaabaaaababab");
        assert_eq!(h.fixed_point_prefix(0, 0).unwrap(), Word(vec![0]));
        assert!(matches!(
            h.fixed_point_prefix(1, 3),
            Err(WordError::NotProlongable('b'))
        ));
    }

    #[test]
    fn second_iterate_matches_manual() {
        let h = Morphism::binary("aaaba", "bab").unwrap();
        let w = h.fixed_point_prefix(0, 2).unwrap();
        let expected = ["aaaba", "aaaba", "aaaba", "bab", "aaaba"].concat();
        assert_eq!(h.alphabet().render(&w), expected);
    }

    #[test]
    fn abelian_power_examples() {
        let a = ab();
        assert_eq!(
            find_abelian_power(&a.parse("ababab").unwrap(), 2, 3),
            Some(AbelianPowerOccurrence {
                start: 0,
                block_length: 2,
                power: 3
            })
        );
        assert_eq!(
            find_abelian_power(&a.parse("aabaabaa").unwrap(), 2, 3),
            None
        );
        let h = Morphism::binary("abaabaababa", "babababab").unwrap();
        let w = h.apply(&a.parse("abba").unwrap());
        let occ = find_abelian_power(&w, 2, 15).unwrap();
        assert_eq!((occ.start, occ.block_length), (4, 2));
    }

    #[test]
    fn forbidden_positions() {
        let a = ab();
        let bb = vec![a.parse("bb").unwrap()];
        assert_eq!(contains_forbidden(&a.parse("abba").unwrap(), &bb), Some(1));
        assert_eq!(
            contains_forbidden(&a.parse("babaaabaaabaaabab").unwrap(), &bb),
            None
        );
    }

    #[test]
    fn stabilization_level_aaaab_ababab() {
        let h = Morphism::binary("aaaab", "ababab").unwrap();
        let st = h.stabilized_factors(0, 34, 12).unwrap();
        assert_eq!(st.level, 4);
        let st1 = h.stabilized_factors(0, 1, 12).unwrap();
        assert_eq!(st1.all_factors().len(), 2);
    }

    #[test]
    fn factor_count_small() {
        // ab, a, b, ba, aba -> with max_len 2: a, b, ab, ba
        assert_eq!(factor_count(&[0, 1, 0], 2), 4);
        assert_eq!(factor_count(&[0, 0, 0], 3), 3);
    }

    #[test]
    fn morphism_json_roundtrip() {
        let h = Morphism::from_json(r#"{"alphabet":["a","b"],"images":{"a":"aaaba","b":"bab"}}"#)
            .unwrap();
        assert_eq!(h, Morphism::binary("aaaba", "bab").unwrap());
        assert_eq!(Morphism::from_json(&h.to_json()).unwrap(), h);
        assert!(matches!(
            Morphism::from_json(r#"{"alphabet":["a","b"],"images":{"a":"ab"}}"#),
            Err(WordError::MissingImage('b'))
        ));
        assert!(matches!(
            Morphism::from_json(r#"{"alphabet":["a","b"],"images":{"a":"ac","b":"b"}}"#),
            Err(WordError::UnknownSymbol('c'))
        ));
    }
}
