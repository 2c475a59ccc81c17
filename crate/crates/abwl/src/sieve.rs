//! Selection of a small set of parents of `T_k` through prefix scores.
//!
//! A scoring `f: Σ* -> G` vanishing on every image turns the boundary prefixes
//! `v_1..v_{k+1}` of an abelian `k`-power into an arithmetic progression in
//! `G`. Constant progressions are ruled out by Parikh checks; each remaining
//! progression and choice of preimages yields one parent template.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aprank::{enumerate_aps, ApWitness};
use crate::certify::{proper_prefixes, CertifyError, ScoringSpec};
use crate::lattice::{FiniteAbelianGroup, GroupElement, LatticeError, Quotient};
use crate::template::{decide_fixed_point, DecideOptions, Decision, Template, TemplateError};
use crate::words::{parikh, Letter, Morphism, ParikhVector, Word};

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("scoring does not vanish on h({0})")]
    ScoringNotVanishing(char),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scoring(#[from] CertifyError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// The canonical scoring `Z^m -> Z^m/G_h` composed with the Parikh map.
pub fn derive_scoring(h: &Morphism) -> Result<ScoringSpec, SieveError> {
    let q = Quotient::new(&h.frequency_matrix())?;
    Ok(ScoringSpec::canonical(&q)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub letter: Letter,
    pub prefix: Word,
    pub suffix: Word,
    pub prefix_score: GroupElement,
    pub suffix_score: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub score: GroupElement,
    pub prefixes: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub group: FiniteAbelianGroup,
    /// Every prefix of every image, `ε` and the full image included.
    pub entries: Vec<ScoreEntry>,
    /// Scores of the prefixes that are not full images.
    pub score_set: Vec<GroupElement>,
    /// Scores with at least two distinct preimages among those prefixes.
    pub collisions: Vec<Collision>,
}

pub fn score_table(h: &Morphism, f: &ScoringSpec) -> Result<ScoreTable, SieveError> {
    if f.letter_scores.len() != h.m() {
        return Err(CertifyError::BadScoring("letter count differs from alphabet".into()).into());
    }
    for l in 0..h.m() as Letter {
        if f.score(h.image(l)) != f.group.zero() {
            return Err(SieveError::ScoringNotVanishing(h.alphabet().symbol(l)));
        }
    }
    let mut entries = Vec::new();
    for l in 0..h.m() as Letter {
        let img = h.image(l);
        for i in 0..=img.len() {
            entries.push(ScoreEntry {
                letter: l,
                prefix: Word(img[..i].to_vec()),
                suffix: Word(img[i..].to_vec()),
                prefix_score: f.score(&img[..i]),
                suffix_score: f.score(&img[i..]),
            });
        }
    }
    let mut by_score: BTreeMap<GroupElement, BTreeSet<Word>> = BTreeMap::new();
    for p in proper_prefixes(h) {
        let w = Word(p.word(h).to_vec());
        by_score.entry(f.score(&w)).or_default().insert(w);
    }
    let collisions = by_score
        .iter()
        .filter(|(_, ws)| ws.len() > 1)
        .map(|(s, ws)| Collision {
            score: s.clone(),
            prefixes: ws.iter().cloned().collect(),
        })
        .collect();
    Ok(ScoreTable {
        group: f.group.clone(),
        entries,
        score_set: by_score.into_keys().collect(),
        collisions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Elimination {
    PrefixParikhEqual,
    SuffixParikhEqual,
    Uneliminated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialCase {
    pub score: GroupElement,
    pub preimages: Vec<Word>,
    pub status: Elimination,
}

/// Decides, for every score in `P`, whether a constant progression at that
/// score can be pulled back to a shorter power. Scores with a single preimage
/// are eliminated by prefix equality.
pub fn trivial_elimination(h: &Morphism, f: &ScoringSpec, table: &ScoreTable) -> Vec<TrivialCase> {
    let m = h.m();
    let prefixes = proper_prefixes(h);
    table
        .score_set
        .iter()
        .map(|s| {
            let refs: Vec<_> = prefixes
                .iter()
                .filter(|p| f.score(p.word(h)) == *s)
                .collect();
            let words: BTreeSet<Word> = refs.iter().map(|p| Word(p.word(h).to_vec())).collect();
            let pre: BTreeSet<ParikhVector> = words.iter().map(|w| parikh(w, m)).collect();
            let suf: BTreeSet<ParikhVector> =
                refs.iter().map(|p| parikh(p.complement(h), m)).collect();
            let status = if pre.len() == 1 {
                Elimination::PrefixParikhEqual
            } else if suf.len() == 1 {
                Elimination::SuffixParikhEqual
            } else {
                Elimination::Uneliminated
            };
            TrivialCase {
                score: s.clone(),
                preimages: words.into_iter().collect(),
                status,
            }
        })
        .collect()
}

/// One (progression, preimage choice) case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveCase {
    pub ap: usize,
    /// `v_1..v_{k+1}`: the image prefix before each block boundary.
    pub prefixes: Vec<Word>,
    /// `v′_1..v′_{k+1}`: the rest of the same image.
    pub suffixes: Vec<Word>,
    /// `None` when the diff system has no integral solution.
    pub template: Option<Template>,
    /// `ψ(μ_i) - ψ(μ_1)` in image counts, from the solved diffs.
    pub block_offsets: Option<Vec<ParikhVector>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveReport {
    pub k: usize,
    pub scoring: ScoringSpec,
    pub table: ScoreTable,
    pub trivial_cases: Vec<TrivialCase>,
    pub nontrivial_aps: Vec<ApWitness>,
    pub cases: Vec<SieveCase>,
    /// Cases whose diff system had no integral solution.
    pub discarded: usize,
    pub selected: Vec<Template>,
    /// Every constant progression is eliminated, so `selected` accounts for
    /// every abelian `k`-power.
    pub sound: bool,
}

#[derive(Clone, Debug)]
struct Boundary {
    letter: Option<Letter>,
    prefix: Word,
    suffix: Word,
}

/// Runs the sieve for abelian `k`-powers. Without `scoring` the canonical
/// one is used.
pub fn selected_parents(
    h: &Morphism,
    scoring: Option<ScoringSpec>,
    k: usize,
) -> Result<SieveReport, SieveError> {
    assert!(k >= 2, "power must be at least 2");
    let f = match scoring {
        Some(f) => f,
        None => derive_scoring(h)?,
    };
    let table = score_table(h, &f)?;
    let trivial_cases = trivial_elimination(h, &f, &table);
    let sound = trivial_cases
        .iter()
        .all(|c| c.status != Elimination::Uneliminated);

    let mut boundaries: BTreeMap<GroupElement, Vec<Boundary>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for p in proper_prefixes(h) {
        let b = if p.len == 0 {
            Boundary {
                letter: None,
                prefix: Word::empty(),
                suffix: Word::empty(),
            }
        } else {
            Boundary {
                letter: Some(p.letter),
                prefix: Word(p.word(h).to_vec()),
                suffix: Word(p.complement(h).to_vec()),
            }
        };
        if seen.insert((b.letter, b.prefix.clone())) {
            boundaries.entry(f.score(&b.prefix)).or_default().push(b);
        }
    }

    let set: BTreeSet<GroupElement> = table.score_set.iter().cloned().collect();
    let aps = enumerate_aps(&f.group, &set, k + 1);
    let mat = h.frequency_matrix();
    let det = mat.det()?;
    if det == 0 {
        return Err(LatticeError::SingularMatrix.into());
    }
    let adj = mat.adjugate()?;
    let m = h.m();

    let cases: Vec<SieveCase> = aps
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ai, ap)| {
            let options: Vec<&[Boundary]> = ap
                .terms(&f.group)
                .iter()
                .map(|s| &boundaries[s][..])
                .collect();
            let mut out = Vec::new();
            let mut pick = vec![0usize; k + 1];
            loop {
                let chosen: Vec<&Boundary> =
                    pick.iter().zip(&options).map(|(&i, o)| &o[i]).collect();
                out.push(build_case(ai, &chosen, &adj, det, m));
                // Odometer over the preimage choices.
                let mut j = k + 1;
                loop {
                    if j == 0 {
                        return out.into_iter();
                    }
                    j -= 1;
                    pick[j] += 1;
                    if pick[j] < options[j].len() {
                        break;
                    }
                    pick[j] = 0;
                }
            }
        })
        .collect();

    let discarded = cases.iter().filter(|c| c.template.is_none()).count();
    let selected: BTreeSet<Template> = cases.iter().filter_map(|c| c.template.clone()).collect();
    Ok(SieveReport {
        k,
        scoring: f,
        table,
        trivial_cases,
        nontrivial_aps: aps,
        cases,
        discarded,
        selected: selected.into_iter().collect(),
        sound,
    })
}

/// `D_j M = ψ(v′_j v_{j+1}) - ψ(v′_{j+1} v_{j+2})`, the parent equation of `T_k`.
fn build_case(
    ap: usize,
    chosen: &[&Boundary],
    adj: &crate::lattice::IntMatrix,
    det: i64,
    m: usize,
) -> SieveCase {
    let c: Vec<Vec<i64>> = chosen
        .windows(2)
        .map(|w| (&parikh(&w[0].suffix, m) + &parikh(&w[1].prefix, m)).0)
        .collect();
    let diffs: Option<Vec<ParikhVector>> = c
        .windows(2)
        .map(|w| {
            let rhs: Vec<i64> = w[0].iter().zip(&w[1]).map(|(a, b)| a - b).collect();
            let x = adj.left_mul(&rhs).ok()?;
            x.iter()
                .all(|v| v % det == 0)
                .then(|| ParikhVector(x.iter().map(|v| v / det).collect()))
        })
        .collect();
    let template =
        diffs.and_then(|d| Template::new(chosen.iter().map(|b| b.letter).collect(), d).ok());
    SieveCase {
        ap,
        prefixes: chosen.iter().map(|b| b.prefix.clone()).collect(),
        suffixes: chosen.iter().map(|b| b.suffix.clone()).collect(),
        block_offsets: template.as_ref().map(Template::block_offsets),
        template,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    /// The sieve-selected parents of `T_k`.
    Selected,
    /// `{T_k}`, used when some constant progression could not be eliminated.
    Trivial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveDecision {
    pub report: SieveReport,
    pub seeds: SeedSource,
    pub decision: Decision,
}

/// The sieve followed by the template decision on its selected set, or on
/// `{T_k}` when the sieve is not sound for `h`.
pub fn sieve_decide(
    h: &Morphism,
    seed: Letter,
    k: usize,
    scoring: Option<ScoringSpec>,
    opts: DecideOptions,
) -> Result<SieveDecision, SieveError> {
    let report = selected_parents(h, scoring, k)?;
    let (source, seeds) = if report.sound {
        (SeedSource::Selected, report.selected.clone())
    } else {
        (SeedSource::Trivial, vec![Template::trivial(k, h.m())])
    };
    let decision = decide_fixed_point(h, seed, k, &seeds, opts)?;
    Ok(SieveDecision {
        report,
        seeds: source,
        decision,
    })
}
