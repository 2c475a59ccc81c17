//! Templates `[a_1..a_{k+1}, d_1..d_{k-1}]`, their parents under a morphism,
//! ancestor closures, search bounds and the fixed-point decision procedure.

mod bounds;
mod closure;
mod decide;
mod parents;
mod realize;
pub mod store;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeError;
use crate::words::{Alphabet, Letter, ParikhVector, WordError};

pub use bounds::{
    improved_bound, operator_norm_inverse, original_bound, search_bounds, template_delta,
    template_maxsum, BoundReport, OperatorNorm,
};
pub use closure::{ancestors, AncestorSet, ClosureCaps};
pub use decide::{
    check_hypotheses, decide_fixed_point, decide_with_closure, ClosureStats, ContainsWitness,
    DecideOptions, Decision, FixedPointVerdict,
};
pub use parents::{parents, ParentGenerator};
pub use realize::{find_realization, realizes, RealizationWitness, TemplateScanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapKind {
    Members,
    Generations,
}

impl fmt::Display for CapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapKind::Members => f.write_str("member"),
            CapKind::Generations => f.write_str("generation"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template shape: {0}")]
    Shape(String),
    #[error("cannot parse template: {0}")]
    Parse(String),
    #[error("{kind} cap of {limit} exceeded")]
    CapExceeded { kind: CapKind, limit: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A `k`-template over an alphabet of size `m`. Letters are `None` for `ε`;
/// `diffs` holds `d_1..d_{k-1}` row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Template {
    letters: Vec<Option<Letter>>,
    diffs: Vec<i64>,
    m: usize,
}

impl Template {
    pub fn new(
        letters: Vec<Option<Letter>>,
        diffs: Vec<ParikhVector>,
    ) -> Result<Self, TemplateError> {
        if letters.len() < 3 {
            return Err(TemplateError::Shape("a template needs k >= 2".into()));
        }
        if diffs.len() + 2 != letters.len() {
            return Err(TemplateError::Shape(format!(
                "{} letters need {} difference vectors, got {}",
                letters.len(),
                letters.len() - 2,
                diffs.len()
            )));
        }
        let m = diffs[0].dim();
        if m == 0 || diffs.iter().any(|d| d.dim() != m) {
            return Err(TemplateError::Shape(
                "difference vectors differ in dimension".into(),
            ));
        }
        if letters.iter().flatten().any(|&l| l as usize >= m) {
            return Err(TemplateError::Shape("letter outside the alphabet".into()));
        }
        Ok(Self {
            letters,
            diffs: diffs.into_iter().flat_map(|d| d.0).collect(),
            m,
        })
    }

    pub(crate) fn from_raw(letters: Vec<Option<Letter>>, diffs: Vec<i64>, m: usize) -> Self {
        debug_assert_eq!(diffs.len(), (letters.len() - 2) * m);
        Self { letters, diffs, m }
    }

    /// `T_k = [ε,…,ε, 0,…,0]`, realized exactly by abelian `k`-powers.
    pub fn trivial(k: usize, m: usize) -> Self {
        assert!(k >= 2 && m >= 1);
        Self {
            letters: vec![None; k + 1],
            diffs: vec![0; (k - 1) * m],
            m,
        }
    }

    pub fn k(&self) -> usize {
        self.letters.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letters(&self) -> &[Option<Letter>] {
        &self.letters
    }

    /// `d_{j+1}` for `j` in `0..k-1`.
    pub fn diff(&self, j: usize) -> &[i64] {
        &self.diffs[j * self.m..(j + 1) * self.m]
    }

    pub fn diffs(&self) -> impl Iterator<Item = &[i64]> {
        self.diffs.chunks(self.m)
    }

    pub fn diff_vectors(&self) -> Vec<ParikhVector> {
        self.diffs().map(|d| ParikhVector(d.to_vec())).collect()
    }

    /// `ψ(X_i) - ψ(X_1)` for every block.
    pub fn block_offsets(&self) -> Vec<ParikhVector> {
        let mut cur = vec![0i64; self.m];
        let mut out = vec![ParikhVector(cur.clone())];
        for d in self.diffs() {
            for (c, x) in cur.iter_mut().zip(d) {
                *c += x;
            }
            out.push(ParikhVector(cur.clone()));
        }
        out
    }

    /// Parses `[a,b,ε,(1,-2)]`; `ε` (or an empty entry) is the empty letter.
    pub fn parse(alphabet: &Alphabet, s: &str) -> Result<Self, TemplateError> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| TemplateError::Parse("expected [ ... ]".into()))?;
        let mut tokens = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        for ch in body.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                ',' if depth == 0 => tokens.push(std::mem::take(&mut cur)),
                c if c.is_whitespace() => {}
                c => cur.push(c),
            }
        }
        tokens.push(cur);
        let mut letters = Vec::new();
        let mut diffs = Vec::new();
        for tok in tokens {
            if let Some(inner) = tok.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
                let v = inner
                    .split(',')
                    .map(|x| {
                        x.parse::<i64>()
                            .map_err(|e| TemplateError::Parse(format!("{x}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                diffs.push(ParikhVector(v));
            } else if !diffs.is_empty() {
                return Err(TemplateError::Parse(
                    "letters must precede difference vectors".into(),
                ));
            } else if tok.is_empty() || tok == "ε" {
                letters.push(None);
            } else {
                let mut it = tok.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => letters.push(Some(alphabet.index_of(c)?)),
                    _ => return Err(TemplateError::Parse(format!("bad letter {tok:?}"))),
                }
            }
        }
        let t = Self::new(letters, diffs)?;
        if t.m != alphabet.len() {
            return Err(TemplateError::Shape(
                "vector dimension differs from alphabet size".into(),
            ));
        }
        Ok(t)
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        let mut parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| alphabet.render_opt(l))
            .collect();
        parts.extend(self.diffs().map(|d| ParikhVector(d.to_vec()).to_string()));
        format!("[{}]", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Item {
    Letter(Option<Letter>),
    Diff(Vec<i64>),
}

impl Serialize for Template {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<Item> = self
            .letters
            .iter()
            .map(|&l| Item::Letter(l))
            .chain(self.diffs().map(|d| Item::Diff(d.to_vec())))
            .collect();
        items.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Template {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<Item>::deserialize(d)?;
        let mut letters = Vec::new();
        let mut diffs = Vec::new();
        for it in items {
            match it {
                Item::Letter(l) => letters.push(l),
                Item::Diff(v) => diffs.push(ParikhVector(v)),
            }
        }
        Template::new(letters, diffs).map_err(serde::de::Error::custom)
    }
}
