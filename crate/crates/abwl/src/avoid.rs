//! Longest words avoiding a set of factors and abelian `k`-powers, by
//! depth-first extension of valid words in letter order.
//!
//! A word is valid iff its longest proper prefix is valid and no violation
//! ends at its last position, so only suffixes need checking on each append:
//! any forbidden factor or abelian power not ending there already occurs in
//! the prefix.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AvoidError {
    #[error("power must be at least 2, got {0}")]
    PowerTooSmall(usize),
    #[error("forbidden factors must be non-empty")]
    EmptyForbidden,
    #[error("tree exceeds {0} nodes")]
    CapReached(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    #[default]
    All,
    LexLeast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub alphabet: Alphabet,
    pub forbidden: Vec<Word>,
    pub k: usize,
    pub length_cap: usize,
    #[serde(default)]
    pub witnesses: WitnessMode,
}

impl SearchSpec {
    pub fn new(
        alphabet: Alphabet,
        forbidden: Vec<Word>,
        k: usize,
        length_cap: usize,
    ) -> Result<Self, AvoidError> {
        if k < 2 {
            return Err(AvoidError::PowerTooSmall(k));
        }
        if forbidden.iter().any(|f| f.is_empty()) {
            return Err(AvoidError::EmptyForbidden);
        }
        Ok(Self {
            alphabet,
            forbidden,
            k,
            length_cap,
            witnesses: WitnessMode::All,
        })
    }

    /// Binary alphabet with forbidden factors written as strings.
    pub fn binary(forbidden: &[&str], k: usize, length_cap: usize) -> Result<Self, AvoidError> {
        let ab = Alphabet::binary();
        let f = forbidden
            .iter()
            .map(|s| ab.parse(s).map_err(|_| AvoidError::EmptyForbidden))
            .collect::<Result<_, _>>()?;
        Self::new(ab, f, k, length_cap)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub max_length: usize,
    /// All valid words of length `max_length` in lexicographic order, or only
    /// the first of them.
    pub witnesses: Vec<Word>,
    /// The whole tree was explored below the cap: no valid word is longer.
    pub exhausted: bool,
    pub nodes: u64,
}

/// A valid word under construction, with prefix Parikh counts.
#[derive(Clone)]
struct State<'a> {
    spec: &'a SearchSpec,
    word: Vec<Letter>,
    counts: Vec<i64>,
}

impl<'a> State<'a> {
    fn new(spec: &'a SearchSpec) -> Self {
        Self {
            spec,
            word: Vec::new(),
            counts: vec![0; spec.alphabet.len()],
        }
    }

    fn m(&self) -> usize {
        self.spec.alphabet.len()
    }

    fn count(&self, i: usize, c: usize) -> i64 {
        self.counts[i * self.m() + c]
    }

    /// Appends `l` if the result stays valid.
    fn push(&mut self, l: Letter) -> bool {
        let m = self.m();
        self.word.push(l);
        let base = self.counts.len() - m;
        for c in 0..m {
            let v = self.counts[base + c] + i64::from(c == l as usize);
            self.counts.push(v);
        }
        if self.violates() {
            self.pop();
            return false;
        }
        true
    }

    fn pop(&mut self) {
        self.word.pop();
        let m = self.m();
        self.counts.truncate(self.counts.len() - m);
    }

    fn violates(&self) -> bool {
        if self.spec.forbidden.iter().any(|f| self.word.ends_with(f)) {
            return true;
        }
        let n = self.word.len();
        let k = self.spec.k;
        let m = self.m();
        (1..=n / k).any(|b| {
            let last = n - b;
            (1..k).all(|j| {
                let s = n - (j + 1) * b;
                // Equal block lengths make the last coordinate redundant.
                (0..m.saturating_sub(1)).all(|c| {
                    self.count(s + b, c) - self.count(s, c)
                        == self.count(n, c) - self.count(last, c)
                })
            })
        })
    }
}

#[derive(Default)]
struct Acc {
    max_length: usize,
    witnesses: Vec<Word>,
    capped: bool,
    nodes: u64,
}

impl Acc {
    fn merge(mut self, other: Acc, mode: WitnessMode) -> Acc {
        if other.max_length > self.max_length {
            self.max_length = other.max_length;
            self.witnesses = other.witnesses;
        } else if other.max_length == self.max_length {
            self.witnesses.extend(other.witnesses);
        }
        if mode == WitnessMode::LexLeast {
            self.witnesses.truncate(1);
        }
        self.capped |= other.capped;
        self.nodes += other.nodes;
        self
    }

    fn visit(&mut self, w: &[Letter], mode: WitnessMode) {
        self.nodes += 1;
        if w.len() > self.max_length {
            self.max_length = w.len();
            self.witnesses.clear();
        }
        if w.len() == self.max_length && (mode == WitnessMode::All || self.witnesses.is_empty()) {
            self.witnesses.push(Word(w.to_vec()));
        }
    }
}

fn dfs(st: &mut State<'_>, acc: &mut Acc) {
    let spec = st.spec;
    acc.visit(&st.word, spec.witnesses);
    if st.word.len() >= spec.length_cap {
        acc.capped = true;
        return;
    }
    for l in 0..spec.alphabet.len() as Letter {
        if st.push(l) {
            dfs(st, acc);
            st.pop();
        }
    }
}

/// Depth at which the tree is split into independent parallel tasks.
const SPLIT_DEPTH: usize = 10;

pub fn longest_avoiding(spec: &SearchSpec) -> SearchResult {
    // Breadth-first down to the split depth, keeping every visited word.
    let mut head = Acc::default();
    let mut frontier = vec![State::new(spec)];
    for _ in 0..SPLIT_DEPTH.min(spec.length_cap) {
        let mut next = Vec::new();
        for st in &frontier {
            head.visit(&st.word, spec.witnesses);
            for l in 0..spec.alphabet.len() as Letter {
                let mut child = st.clone();
                if child.push(l) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    let tail = frontier
        .into_par_iter()
        .map(|mut st| {
            let mut acc = Acc::default();
            dfs(&mut st, &mut acc);
            acc
        })
        .reduce(Acc::default, |a, b| a.merge(b, spec.witnesses));
    let acc = head.merge(tail, spec.witnesses);
    SearchResult {
        max_length: acc.max_length,
        witnesses: acc.witnesses,
        exhausted: !acc.capped,
        nodes: acc.nodes,
    }
}

/// Whole-word validity, rechecking every factor.
pub fn is_valid(w: &[Letter], spec: &SearchSpec) -> bool {
    crate::words::contains_forbidden(w, &spec.forbidden).is_none()
        && crate::words::find_abelian_power(w, spec.alphabet.len(), spec.k).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub word: Word,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Every valid word up to the length cap, children in letter order; node 0 is `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordTree {
    pub nodes: Vec<TreeNode>,
}

impl WordTree {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.word.len()).max().unwrap_or(0)
    }

    pub fn leaves_at(&self, depth: usize) -> impl Iterator<Item = &Word> {
        self.nodes
            .iter()
            .filter(move |n| n.children.is_empty() && n.word.len() == depth)
            .map(|n| &n.word)
    }

    /// One node per line, indented by depth.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            let label = if n.word.is_empty() {
                "ε".to_string()
            } else {
                alphabet.render(&n.word)
            };
            let _ = writeln!(out, "{}{}", "  ".repeat(n.word.len()), label);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// A DOT digraph with one edge per (prefix, extension) pair.
    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let label = |w: &Word| {
            if w.is_empty() {
                "ε".to_string()
            } else {
                alphabet.render(w)
            }
        };
        let mut out = String::from("digraph words {\n");
        for n in &self.nodes {
            for &c in &n.children {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\";",
                    label(&n.word),
                    label(&self.nodes[c].word)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn maximal_tree(spec: &SearchSpec, node_cap: usize) -> Result<WordTree, AvoidError> {
    let mut nodes = vec![TreeNode {
        word: Word::empty(),
        parent: None,
        children: Vec::new(),
    }];
    let mut st = State::new(spec);
    grow(&mut st, 0, &mut nodes, node_cap)?;
    Ok(WordTree { nodes })
}

fn grow(
    st: &mut State<'_>,
    at: usize,
    nodes: &mut Vec<TreeNode>,
    cap: usize,
) -> Result<(), AvoidError> {
    if st.word.len() >= st.spec.length_cap {
        return Ok(());
    }
    for l in 0..st.spec.alphabet.len() as Letter {
        if st.push(l) {
            if nodes.len() >= cap {
                return Err(AvoidError::CapReached(cap));
            }
            let idx = nodes.len();
            nodes.push(TreeNode {
                word: Word(st.word.clone()),
                parent: Some(at),
                children: Vec::new(),
            });
            nodes[at].children.push(idx);
            grow(st, idx, nodes, cap)?;
            st.pop();
        }
    }
    Ok(())
}
