//! Sufficient-condition certifiers for abelian power-free morphisms:
//! Dekking's scoring conditions, Carpi's conditions and the prefix-class
//! ("O") conditions over the quotient `Z^m / G_h`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::aprank::{ap_rank_with_witness, ApRank};
use crate::lattice::{FiniteAbelianGroup, GroupElement, LatticeError, Quotient};
use crate::words::{find_abelian_power, parikh, Letter, Morphism, ParikhVector, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("power {got} is below the minimum {min} for this method")]
    PowerTooSmall { got: usize, min: usize },
    #[error("alphabet must have at least two letters")]
    AlphabetTooSmall,
    #[error("scoring does not match the morphism: {0}")]
    BadScoring(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Dekking,
    OConditions,
    Carpi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: Method,
    pub power: usize,
    pub verdict: Verdict,
    pub conditions: Vec<ConditionOutcome>,
    pub ap_rank: Option<ApRank>,
    pub witnesses: Vec<serde_json::Value>,
    /// Intermediate sets kept for audit.
    pub audit: serde_json::Value,
}

impl Certificate {
    fn new(method: Method, power: usize) -> Self {
        Self {
            method,
            power,
            verdict: Verdict::Pass,
            conditions: Vec::new(),
            ap_rank: None,
            witnesses: Vec::new(),
            audit: json!({}),
        }
    }

    fn push(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.conditions.push(ConditionOutcome {
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, names: &[&str]) {
        for n in names {
            self.push(n, Status::Skipped, "not evaluated");
        }
    }

    fn finalize(mut self) -> Self {
        let st = |s: Status| self.conditions.iter().any(|c| c.status == s);
        self.verdict = if st(Status::Fail) {
            Verdict::Fail
        } else if st(Status::Inconclusive) || st(Status::Skipped) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionOutcome> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&ConditionOutcome> {
        self.conditions.iter().find(|c| c.status == Status::Fail)
    }
}

/// A monoid morphism `Σ* -> G` given by letter scores.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringSpec {
    pub group: FiniteAbelianGroup,
    pub letter_scores: Vec<GroupElement>,
}

impl ScoringSpec {
    pub fn new(
        group: FiniteAbelianGroup,
        letter_scores: Vec<GroupElement>,
    ) -> Result<Self, CertifyError> {
        if let Some(bad) = letter_scores.iter().find(|s| !group.contains(s)) {
            return Err(CertifyError::BadScoring(format!(
                "{bad} is not an element of {group}"
            )));
        }
        Ok(Self {
            group,
            letter_scores,
        })
    }

    /// Scores in `Z/n`.
    pub fn cyclic(n: i64, scores: &[i64]) -> Result<Self, CertifyError> {
        let g = FiniteAbelianGroup::cyclic(n);
        let s = scores.iter().map(|&x| g.reduce(&[x])).collect();
        Self::new(g, s)
    }

    /// The projection `Z^m -> Z^m / G_h` composed with the Parikh map.
    pub fn canonical(q: &Quotient) -> Result<Self, CertifyError> {
        let m = q.dim();
        let scores = (0..m)
            .map(|i| {
                let mut e = vec![0; m];
                e[i] = 1;
                q.project(&e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(q.group().clone(), scores)
    }

    pub fn score(&self, w: &[Letter]) -> GroupElement {
        let counts = parikh(w, self.letter_scores.len());
        self.score_parikh(&counts)
    }

    pub fn score_parikh(&self, v: &ParikhVector) -> GroupElement {
        let mut acc = self.group.zero();
        for (c, s) in v.0.iter().zip(&self.letter_scores) {
            acc = self.group.add(&acc, &self.group.scale(s, *c));
        }
        acc
    }

    fn check_alphabet(&self, h: &Morphism) -> Result<(), CertifyError> {
        if self.letter_scores.len() != h.m() {
            return Err(CertifyError::BadScoring(format!(
                "{} letter scores for an alphabet of size {}",
                self.letter_scores.len(),
                h.m()
            )));
        }
        Ok(())
    }
}

/// A prefix `h(letter)[..len]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrefixRef {
    pub letter: Letter,
    pub len: usize,
}

impl PrefixRef {
    pub fn word<'a>(&self, h: &'a Morphism) -> &'a [Letter] {
        &h.image(self.letter)[..self.len]
    }

    pub fn complement<'a>(&self, h: &'a Morphism) -> &'a [Letter] {
        &h.image(self.letter)[self.len..]
    }

    pub fn is_full(&self, h: &Morphism) -> bool {
        self.len == h.image(self.letter).len()
    }
}

/// All prefixes of all images, including the empty and the full ones.
pub fn all_prefixes(h: &Morphism) -> Vec<PrefixRef> {
    (0..h.m() as Letter)
        .flat_map(|l| (0..=h.image(l).len()).map(move |len| PrefixRef { letter: l, len }))
        .collect()
}

/// `Pref(h) \ h(Σ)`: prefixes that are not equal to a full image.
pub fn proper_prefixes(h: &Morphism) -> Vec<PrefixRef> {
    all_prefixes(h)
        .into_iter()
        .filter(|p| !h.images().iter().any(|img| img[..] == *p.word(h)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixClass {
    pub element: GroupElement,
    pub members: Vec<ParikhVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixClassTable {
    pub group: FiniteAbelianGroup,
    /// Distinct Parikh vectors of all prefixes of all images.
    pub vectors: Vec<ParikhVector>,
    pub classes: Vec<PrefixClass>,
    /// Indices of classes with at least two members, one of which is neither
    /// zero nor the vector of an image.
    pub flagged: Vec<usize>,
}

pub fn prefix_classes(h: &Morphism) -> Result<PrefixClassTable, CertifyError> {
    let q = Quotient::new(&h.frequency_matrix())?;
    prefix_classes_in(h, &q)
}

fn prefix_classes_in(h: &Morphism, q: &Quotient) -> Result<PrefixClassTable, CertifyError> {
    let m = h.m();
    let vectors: BTreeSet<ParikhVector> = all_prefixes(h)
        .iter()
        .map(|p| parikh(p.word(h), m))
        .collect();
    let mut by_class: BTreeMap<GroupElement, Vec<ParikhVector>> = BTreeMap::new();
    for v in &vectors {
        by_class
            .entry(q.project(&v.0)?)
            .or_default()
            .push(v.clone());
    }
    let special = special_vectors(h);
    let classes: Vec<PrefixClass> = by_class
        .into_iter()
        .map(|(element, members)| PrefixClass { element, members })
        .collect();
    let flagged = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.members.len() >= 2 && c.members.iter().any(|v| !special.contains(v)))
        .map(|(i, _)| i)
        .collect();
    Ok(PrefixClassTable {
        group: q.group().clone(),
        vectors: vectors.into_iter().collect(),
        classes,
        flagged,
    })
}

/// `ψ(h(Σ)) ∪ {0}`.
fn special_vectors(h: &Morphism) -> BTreeSet<ParikhVector> {
    let mut s: BTreeSet<ParikhVector> = (0..h.m() as Letter).map(|l| h.image_parikh(l)).collect();
    s.insert(ParikhVector::zero(h.m()));
    s
}

fn vec_json(vs: &[ParikhVector]) -> serde_json::Value {
    json!(vs.iter().map(|v| v.0.clone()).collect::<Vec<_>>())
}

pub fn check_o_conditions(h: &Morphism, n: usize) -> Result<Certificate, CertifyError> {
    if n < 4 {
        return Err(CertifyError::PowerTooSmall { got: n, min: 4 });
    }
    if h.m() < 2 {
        return Err(CertifyError::AlphabetTooSmall);
    }
    let mut cert = Certificate::new(Method::OConditions, n);
    let mat = h.frequency_matrix();
    let det = mat.det()?;
    if det == 0 {
        cert.push("O1", Status::Fail, "det=0");
        cert.witnesses.push(json!({"condition": "O1", "det": 0}));
        cert.skip(&["O2", "O3"]);
        return Ok(cert.finalize());
    }
    cert.push("O1", Status::Pass, format!("det={det}"));
    let q = Quotient::new(&mat)?;
    let table = prefix_classes_in(h, &q)?;
    let g = q.group();
    let pbar: BTreeSet<GroupElement> = table.classes.iter().map(|c| c.element.clone()).collect();
    let (rank, ap) = ap_rank_with_witness(g, &pbar);
    cert.ap_rank = Some(rank);
    if rank.at_most(n) {
        cert.push("O2", Status::Pass, format!("a-rk={rank}"));
    } else {
        cert.push("O2", Status::Fail, format!("a-rk={rank} exceeds {n}"));
        if let Some(ap) = &ap {
            cert.witnesses
                .push(json!({"condition": "O2", "progression": ap.terms(g)}));
        }
    }

    let prefix_sets: Vec<BTreeSet<ParikhVector>> = (0..h.m() as Letter)
        .map(|l| {
            (0..=h.image(l).len())
                .map(|i| parikh(&h.image(l)[..i], h.m()))
                .collect()
        })
        .collect();
    let mut o3_fail = None;
    for &ci in &table.flagged {
        let members = &table.classes[ci].members;
        if members.len() > 2 {
            o3_fail = Some(
                json!({"condition": "O3", "class": vec_json(members), "reason": "more than two elements"}),
            );
            break;
        }
        let (v, w) = (&members[0], &members[1]);
        let ok = (0..h.m()).any(|p| {
            (0..h.m()).any(|qq| {
                let diff = &h.image_parikh(p as Letter) - &h.image_parikh(qq as Letter);
                let try_pair = |x: &ParikhVector, y: &ParikhVector| {
                    prefix_sets[p].contains(x) && prefix_sets[qq].contains(y) && (x - y) == diff
                };
                try_pair(v, w) || try_pair(w, v)
            })
        });
        if !ok {
            o3_fail = Some(
                json!({"condition": "O3", "class": vec_json(members), "reason": "difference is not an image difference"}),
            );
            break;
        }
    }
    match o3_fail {
        None => cert.push(
            "O3",
            Status::Pass,
            format!("{} flagged classes", table.flagged.len()),
        ),
        Some(w) => {
            cert.push(
                "O3",
                Status::Fail,
                w["reason"].as_str().unwrap_or_default().to_string(),
            );
            cert.witnesses.push(w);
        }
    }
    cert.audit = json!({
        "group": g,
        "order": g.order(),
        "P": vec_json(&table.vectors),
        "P_bar": pbar,
        "classes": table.classes,
        "flagged": table.flagged,
        "longest_progression": ap.map(|a| a.terms(g)),
    });
    Ok(cert.finalize())
}

pub fn check_dekking(h: &Morphism, f: &ScoringSpec, n: usize) -> Result<Certificate, CertifyError> {
    if n < 2 {
        return Err(CertifyError::PowerTooSmall { got: n, min: 2 });
    }
    f.check_alphabet(h)?;
    let mut cert = Certificate::new(Method::Dekking, n);
    let g = &f.group;
    let det = h.frequency_matrix().det()?;
    if det == 0 {
        cert.push("D1", Status::Fail, "det=0");
        cert.witnesses.push(json!({"condition": "D1", "det": 0}));
    } else {
        cert.push("D1", Status::Pass, format!("det={det}"));
    }

    let nonzero: Vec<Letter> = (0..h.m() as Letter)
        .filter(|&l| f.score(h.image(l)) != g.zero())
        .collect();
    if nonzero.is_empty() {
        cert.push("D2", Status::Pass, "f vanishes on every image");
    } else {
        let names: Vec<String> = nonzero
            .iter()
            .map(|&l| h.alphabet().symbol(l).to_string())
            .collect();
        cert.push(
            "D2",
            Status::Fail,
            format!("f(h(x)) != 0 for x in {{{}}}", names.join(",")),
        );
        cert.witnesses
            .push(json!({"condition": "D2", "letters": names}));
    }

    let a: BTreeSet<GroupElement> = all_prefixes(h).iter().map(|p| f.score(p.word(h))).collect();
    let (rank, ap) = ap_rank_with_witness(g, &a);
    cert.ap_rank = Some(rank);
    if rank.at_most(n) {
        cert.push("D3", Status::Pass, format!("a-rk(A)={rank}"));
    } else {
        cert.push("D3", Status::Fail, format!("a-rk(A)={rank} exceeds {n}"));
        if let Some(ap) = &ap {
            cert.witnesses
                .push(json!({"condition": "D3", "progression": ap.terms(g)}));
        }
    }

    match h_injectivity_violation(h, f) {
        None => cert.push("D4", Status::Pass, "f is h-injective"),
        Some(members) => {
            let render: Vec<(String, String)> = members
                .iter()
                .map(|p| {
                    (
                        h.alphabet().render(p.word(h)),
                        h.alphabet().render(p.complement(h)),
                    )
                })
                .collect();
            cert.push(
                "D4",
                Status::Fail,
                "a score class has distinct prefixes and distinct complements",
            );
            cert.witnesses
                .push(json!({"condition": "D4", "class": render}));
        }
    }
    cert.audit = json!({
        "group": g,
        "scores": f.letter_scores,
        "A": a,
        "longest_progression": ap.map(|w| w.terms(g)),
    });
    Ok(cert.finalize())
}

/// A score class of `Pref(h) \ h(Σ)` whose members neither all coincide nor
/// all have the same complement.
fn h_injectivity_violation(h: &Morphism, f: &ScoringSpec) -> Option<Vec<PrefixRef>> {
    let mut classes: BTreeMap<GroupElement, Vec<PrefixRef>> = BTreeMap::new();
    for p in proper_prefixes(h) {
        classes.entry(f.score(p.word(h))).or_default().push(p);
    }
    classes.into_values().find(|members| {
        let same_prefix = members.iter().all(|p| p.word(h) == members[0].word(h));
        let same_suffix = members
            .iter()
            .all(|p| p.complement(h) == members[0].complement(h));
        !(same_prefix || same_suffix)
    })
}

/// Searches cyclic groups `Z/d`, `2 <= d <= max_order`, and every letter score
/// assignment for a scoring that passes all Dekking conditions at power `n`.
/// With `n = None` the smallest power allowed by the scoring is used.
pub fn search_dekking_scoring(
    h: &Morphism,
    max_order: i64,
    n: Option<usize>,
) -> Result<Option<(ScoringSpec, Certificate)>, CertifyError> {
    if h.frequency_matrix().det()? == 0 {
        return Ok(None);
    }
    let m = h.m();
    let counts: Vec<ParikhVector> = (0..m as Letter).map(|l| h.image_parikh(l)).collect();
    for d in 2..=max_order {
        let total = (d as u64).pow(m as u32);
        for code in 0..total {
            let mut scores = Vec::with_capacity(m);
            let mut c = code;
            for _ in 0..m {
                scores.push((c % d as u64) as i64);
                c /= d as u64;
            }
            let vanishes = counts.iter().all(|v| {
                v.0.iter()
                    .zip(&scores)
                    .map(|(a, b)| a * b)
                    .sum::<i64>()
                    .rem_euclid(d)
                    == 0
            });
            if !vanishes {
                continue;
            }
            let f = ScoringSpec::cyclic(d, &scores)?;
            if h_injectivity_violation(h, &f).is_some() {
                continue;
            }
            let power = match n {
                Some(n) => n,
                None => {
                    let a: BTreeSet<GroupElement> =
                        all_prefixes(h).iter().map(|p| f.score(p.word(h))).collect();
                    match ap_rank_with_witness(&f.group, &a).0 {
                        ApRank::Finite(r) => r.max(2),
                        ApRank::Infinite => continue,
                    }
                }
            };
            let cert = check_dekking(h, &f, power)?;
            if cert.verdict == Verdict::Pass {
                return Ok(Some((f, cert)));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarpiLimits {
    /// Maximum number of partial tuples visited in the (C3) search.
    pub max_nodes: u64,
}

impl Default for CarpiLimits {
    fn default() -> Self {
        Self {
            max_nodes: 50_000_000,
        }
    }
}

pub fn check_carpi(
    h: &Morphism,
    n: usize,
    limits: CarpiLimits,
) -> Result<Certificate, CertifyError> {
    if n < 2 {
        return Err(CertifyError::PowerTooSmall { got: n, min: 2 });
    }
    let mut cert = Certificate::new(Method::Carpi, n);
    let m = h.m();

    // C1: length-2 words that are abelian n-power free; for n = 2 that rules out xx.
    let mut c1_fail = None;
    'outer: for x in 0..m as Letter {
        for y in 0..m as Letter {
            if n == 2 && x == y {
                continue;
            }
            let img = h.apply(&[x, y]);
            if let Some(occ) = find_abelian_power(&img, m, n) {
                c1_fail = Some((Word(vec![x, y]), occ));
                break 'outer;
            }
        }
    }
    match c1_fail {
        None => cert.push("C1", Status::Pass, "images of length-2 words are free"),
        Some((z, occ)) => {
            let z = h.alphabet().render(&z);
            cert.push(
                "C1",
                Status::Fail,
                format!("h({z}) contains an abelian {n}-power"),
            );
            cert.witnesses
                .push(json!({"condition": "C1", "word": z, "occurrence": occ}));
        }
    }

    let mat = h.frequency_matrix();
    let det = mat.det()?;
    if det == 0 {
        cert.push(
            "C2",
            Status::Fail,
            "det=0: Parikh map of h is not injective",
        );
        cert.witnesses.push(json!({"condition": "C2", "det": 0}));
        cert.skip(&["C3"]);
        return Ok(cert.finalize());
    }
    cert.push("C2", Status::Pass, format!("det={det}"));

    let q = Quotient::new(&mat)?;
    let mut search = CarpiSearch::new(h, &q, n, limits.max_nodes)?;
    match search.run() {
        C3Outcome::Holds => cert.push(
            "C3",
            Status::Pass,
            format!("{} partial tuples checked", search.nodes),
        ),
        C3Outcome::Violated(tuple) => {
            let render: Vec<(String, String)> = tuple
                .iter()
                .map(|&i| {
                    let o = &search.opts[i];
                    let p = PrefixRef {
                        letter: o.letter,
                        len: o.len,
                    };
                    (
                        h.alphabet().symbol(o.letter).to_string(),
                        h.alphabet().render(p.word(h)),
                    )
                })
                .collect();
            cert.push("C3", Status::Fail, "a tuple admits no δ-vector");
            cert.witnesses
                .push(json!({"condition": "C3", "tuple": render}));
        }
        C3Outcome::CapReached => cert.push(
            "C3",
            Status::Inconclusive,
            format!("search exceeded {} partial tuples", limits.max_nodes),
        ),
    }
    Ok(cert.finalize())
}

struct COpt {
    letter: Letter,
    len: usize,
    psi: Vec<i64>,
    img: Vec<i64>,
    class: usize,
}

enum C3Outcome {
    Holds,
    Violated(Vec<usize>),
    CapReached,
}

type Pair = (Vec<i64>, Vec<i64>);

/// Enumerates tuples of proper prefixes whose classes form a progression in
/// the quotient, tracking which δ-vectors keep `ψ(x_j) - δ_j ψ(h(a_j))` an
/// arithmetic progression in `Z^m`.
struct CarpiSearch<'a> {
    g: &'a FiniteAbelianGroup,
    n: usize,
    opts: Vec<COpt>,
    by_class: Vec<Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
}

impl<'a> CarpiSearch<'a> {
    fn new(h: &Morphism, q: &'a Quotient, n: usize, max_nodes: u64) -> Result<Self, CertifyError> {
        let g = q.group();
        let m = h.m();
        let mut opts = Vec::new();
        for l in 0..m as Letter {
            let img = h.image(l);
            for len in 0..img.len() {
                let psi = parikh(&img[..len], m).0;
                let class = g.index_of(&q.project(&psi)?);
                opts.push(COpt {
                    letter: l,
                    len,
                    psi,
                    img: parikh(img, m).0,
                    class,
                });
            }
        }
        let mut by_class = vec![Vec::new(); g.order() as usize];
        for (i, o) in opts.iter().enumerate() {
            by_class[o.class].push(i);
        }
        Ok(Self {
            g,
            n,
            opts,
            by_class,
            nodes: 0,
            max_nodes,
        })
    }

    fn y(&self, i: usize, delta: bool) -> Vec<i64> {
        let o = &self.opts[i];
        if delta {
            o.psi.iter().zip(&o.img).map(|(a, b)| a - b).collect()
        } else {
            o.psi.clone()
        }
    }

    fn next_class(&self, c0: usize, c1: usize) -> usize {
        let (a, b) = (self.g.element_at(c0), self.g.element_at(c1));
        self.g.index_of(&self.g.sub(&self.g.scale(&b, 2), &a))
    }

    fn run(&mut self) -> C3Outcome {
        for i0 in 0..self.opts.len() {
            for i1 in 0..self.opts.len() {
                let mut states: Vec<Pair> = Vec::with_capacity(4);
                for d0 in [false, true] {
                    for d1 in [false, true] {
                        states.push((self.y(i0, d0), self.y(i1, d1)));
                    }
                }
                let mut chosen = vec![i0, i1];
                match self.dfs(&mut chosen, &states) {
                    C3Outcome::Holds => {}
                    other => return other,
                }
            }
        }
        C3Outcome::Holds
    }

    fn dfs(&mut self, chosen: &mut Vec<usize>, states: &[Pair]) -> C3Outcome {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return C3Outcome::CapReached;
        }
        let j = chosen.len();
        if j == self.n + 1 {
            return C3Outcome::Holds;
        }
        let c = self.next_class(
            self.opts[chosen[j - 2]].class,
            self.opts[chosen[j - 1]].class,
        );
        let cands = self.by_class[c].clone();
        for i in cands {
            let mut next: Vec<Pair> = Vec::new();
            for (yp, yc) in states {
                let target: Vec<i64> = yc.iter().zip(yp).map(|(c, p)| 2 * c - p).collect();
                for d in [false, true] {
                    if self.y(i, d) == target {
                        let pair = (yc.clone(), target.clone());
                        if !next.contains(&pair) {
                            next.push(pair);
                        }
                    }
                }
            }
            chosen.push(i);
            let out = if next.is_empty() {
                match self.complete(chosen) {
                    Some(t) => C3Outcome::Violated(t),
                    None => C3Outcome::Holds,
                }
            } else {
                self.dfs(chosen, &next)
            };
            chosen.pop();
            if !matches!(out, C3Outcome::Holds) {
                return out;
            }
        }
        C3Outcome::Holds
    }

    /// Extends a partial tuple to full length along the forced classes, if possible.
    fn complete(&self, chosen: &[usize]) -> Option<Vec<usize>> {
        let mut t = chosen.to_vec();
        while t.len() < self.n + 1 {
            let k = t.len();
            let c = self.next_class(self.opts[t[k - 2]].class, self.opts[t[k - 1]].class);
            t.push(*self.by_class[c].first()?);
        }
        Some(t)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_aaaba_bab() {
        let h = Morphism::binary("aaaba", "bab").unwrap();
        let t = prefix_classes(&h).unwrap();
        assert_eq!(t.vectors.len(), 9);
        assert_eq!(t.flagged.len(), 1);
        let c = &t.classes[t.flagged[0]].members;
        assert_eq!(c, &vec![ParikhVector(vec![0, 1]), ParikhVector(vec![3, 0])]);
    }

    #[test]
    fn classes_abaabaababa_babababab() {
        let h = Morphism::binary("abaabaababa", "babababab").unwrap();
        let t = prefix_classes(&h).unwrap();
        let mut flagged: Vec<Vec<ParikhVector>> = t
            .flagged
            .iter()
            .map(|&i| t.classes[i].members.clone())
            .collect();
        flagged.sort();
        assert_eq!(
            flagged,
            vec![
                vec![ParikhVector(vec![2, 3]), ParikhVector(vec![5, 2])],
                vec![ParikhVector(vec![3, 4]), ParikhVector(vec![6, 3])],
            ]
        );
    }

    #[test]
    fn singular_prefix_table() {
        let h = Morphism::binary("a", "a").unwrap();
        assert!(matches!(
            prefix_classes(&h),
            Err(CertifyError::Lattice(LatticeError::SingularMatrix))
        ));
    }

    #[test]
    fn o_conditions_reject_small_powers() {
        let h = Morphism::binary("aaaba", "bab").unwrap();
        assert!(matches!(
            check_o_conditions(&h, 3),
            Err(CertifyError::PowerTooSmall { .. })
        ));
    }

    #[test]
    fn o_conditions_singular() {
        let h = Morphism::binary("ab", "ab").unwrap();
        let c = check_o_conditions(&h, 6).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.first_failure().unwrap().name, "O1");
        assert_eq!(c.first_failure().unwrap().detail, "det=0");
    }

    #[test]
    fn carpi_singular_fails_c2() {
        let h = Morphism::binary("ab", "ab").unwrap();
        let c = check_carpi(&h, 3, CarpiLimits::default()).unwrap();
        assert_eq!(c.condition("C2").unwrap().status, Status::Fail);
        assert_eq!(c.verdict, Verdict::Fail);
    }

    #[test]
    fn dekking_ababa_aaaaba() {
        let h = Morphism::binary("ababa", "aaaaba").unwrap();
        let f = ScoringSpec::cyclic(7, &[1, 2]).unwrap();
        let c = check_dekking(&h, &f, 6).unwrap();
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        assert_eq!(c.audit["A"], json!([[0], [1], [2], [3], [4], [6]]));
    }

    #[test]
    fn dekking_bad_scoring() {
        let h = Morphism::binary("ababa", "aaaaba").unwrap();
        let f = ScoringSpec::cyclic(7, &[1]).unwrap();
        assert!(matches!(
            check_dekking(&h, &f, 6),
            Err(CertifyError::BadScoring(_))
        ));
    }
}
