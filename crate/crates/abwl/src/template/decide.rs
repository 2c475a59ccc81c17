use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ancestors, operator_norm_inverse, search_bounds, AncestorSet, BoundReport, ClosureCaps,
    RealizationWitness, Template, TemplateError, TemplateScanner,
};
use crate::words::{
    abelian_power_starting_at, AbelianPowerOccurrence, Letter, Morphism, PrefixSums, Word,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FixedPointVerdict {
    Free,
    Contains,
    Inconclusive,
}

impl std::fmt::Display for FixedPointVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FixedPointVerdict::Free => "FREE",
            FixedPointVerdict::Contains => "CONTAINS",
            FixedPointVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub caps: ClosureCaps,
    /// Maximum number of iterations while waiting for the factor set to stabilize.
    pub level_cap: u32,
    /// Longest iterate searched for an explicit power once a member is realized.
    pub witness_budget: usize,
    /// Longest iterate scanned directly as a cross-check of a FREE verdict.
    pub check_budget: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            caps: ClosureCaps::default(),
            level_cap: 40,
            witness_budget: 1 << 18,
            check_budget: 1 << 15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureStats {
    pub members: usize,
    pub parents: usize,
    pub generations: usize,
}

impl From<&AncestorSet> for ClosureStats {
    fn from(s: &AncestorSet) -> Self {
        Self {
            members: s.len(),
            parents: s.parent_count,
            generations: s.generations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainsWitness {
    /// The closure member realized by a short factor.
    pub template: Template,
    pub generation: u32,
    pub factor: Word,
    pub realization: RealizationWitness,
    /// Smallest `n` such that `h^n(seed)` contains an abelian `k`-power.
    pub level: Option<u32>,
    pub occurrence: Option<AbelianPowerOccurrence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: FixedPointVerdict,
    pub reason: Option<String>,
    pub k: usize,
    pub seed: Letter,
    pub norm: Option<f64>,
    pub closure: Option<ClosureStats>,
    pub bounds: Option<BoundReport>,
    pub stabilization_level: Option<u32>,
    /// Number of distinct maximal-length factors scanned.
    pub factors_scanned: usize,
    /// Length of the longest iterate scanned directly and found power-free.
    pub checked_prefix: usize,
    pub witness: Option<ContainsWitness>,
}

impl Decision {
    pub fn inconclusive(k: usize, seed: Letter, reason: String) -> Self {
        Self {
            verdict: FixedPointVerdict::Inconclusive,
            reason: Some(reason),
            k,
            seed,
            norm: None,
            closure: None,
            bounds: None,
            stabilization_level: None,
            factors_scanned: 0,
            checked_prefix: 0,
            witness: None,
        }
    }
}

/// Checks that `h` is prolongable on `seed`, grows it, and has a contracting
/// inverse frequency matrix. Returns the norm of the inverse.
pub fn check_hypotheses(h: &Morphism, seed: Letter) -> Result<f64, String> {
    if !h.is_prolongable(seed) {
        return Err(format!(
            "h is not prolongable on {}",
            h.alphabet().symbol(seed)
        ));
    }
    if h.image(seed).len() < 2 {
        return Err("the image of the seed letter has length 1".into());
    }
    let norm = operator_norm_inverse(&h.frequency_matrix()).map_err(|e| e.to_string())?;
    if !norm.contracting {
        return Err(format!(
            "inverse frequency matrix has norm {:.6} >= 1",
            norm.value
        ));
    }
    Ok(norm.value)
}

/// Decides abelian `k`-power freeness of `h^ω(seed)` from the ancestors of
/// `seeds`, which must include `T_k` or a set of templates whose realizations
/// account for every abelian `k`-power.
pub fn decide_fixed_point(
    h: &Morphism,
    seed: Letter,
    k: usize,
    seeds: &[Template],
    opts: DecideOptions,
) -> Result<Decision, TemplateError> {
    if let Err(reason) = check_hypotheses(h, seed) {
        return Ok(Decision::inconclusive(k, seed, reason));
    }
    match ancestors(seeds, h, opts.caps) {
        Ok(closure) => decide_with_closure(h, seed, k, &closure, opts),
        Err(e @ TemplateError::CapExceeded { .. }) => {
            Ok(Decision::inconclusive(k, seed, e.to_string()))
        }
        Err(e) => Err(e),
    }
}

/// As [`decide_fixed_point`] with a precomputed closure.
pub fn decide_with_closure(
    h: &Morphism,
    seed: Letter,
    k: usize,
    closure: &AncestorSet,
    opts: DecideOptions,
) -> Result<Decision, TemplateError> {
    let norm = match check_hypotheses(h, seed) {
        Ok(n) => n,
        Err(reason) => return Ok(Decision::inconclusive(k, seed, reason)),
    };
    if let Some(t) = closure
        .members
        .iter()
        .find(|t| t.k() != k || t.m() != h.m())
    {
        return Err(TemplateError::Shape(format!(
            "closure member has k={}, m={}; expected k={k}, m={}",
            t.k(),
            t.m(),
            h.m()
        )));
    }
    let mut d = Decision::inconclusive(k, seed, String::new());
    d.reason = None;
    d.norm = Some(norm);
    d.closure = Some(closure.into());
    let bounds = search_bounds(&closure.members, h, k);
    d.bounds = Some(bounds);
    let max_len = bounds.bound_improved.max(1) as usize;
    let fac = match h.stabilized_factors(seed, max_len, opts.level_cap) {
        Ok(f) => f,
        Err(e) => {
            d.reason = Some(e.to_string());
            return Ok(d);
        }
    };
    d.stabilization_level = Some(fac.level);
    d.factors_scanned = fac.windows.len();

    let prefix_sums: Vec<PrefixSums> = fac
        .windows
        .iter()
        .map(|w| PrefixSums::new(w, h.m()))
        .collect();
    let hit = closure
        .members
        .par_iter()
        .enumerate()
        .find_map_first(|(ti, t)| {
            let sc = TemplateScanner::new(t);
            fac.windows
                .iter()
                .zip(&prefix_sums)
                .enumerate()
                .find_map(|(wi, (w, ps))| sc.first_at(w, ps, 0, max_len).map(|r| (ti, wi, r)))
        });
    let Some((ti, wi, realization)) = hit else {
        match locate_power(h, seed, k, opts.check_budget) {
            Ok(checked) => {
                d.verdict = FixedPointVerdict::Free;
                d.checked_prefix = checked;
            }
            Err((level, o)) => {
                d.reason = Some(format!(
                    "no closure member is realized, yet h^{level} contains an abelian {k}-power at {}",
                    o.start
                ));
            }
        }
        return Ok(d);
    };

    let factor = Word(fac.windows[wi][realization.start..realization.end].to_vec());
    let located = match locate_power(h, seed, k, opts.witness_budget) {
        Ok(checked) => {
            d.checked_prefix = checked;
            None
        }
        Err(found) => Some(found),
    };
    d.witness = Some(ContainsWitness {
        template: closure.members[ti].clone(),
        generation: closure.generation[ti],
        factor,
        realization,
        level: located.map(|x| x.0),
        occurrence: located.map(|x| x.1),
    });
    if located.is_some() {
        d.verdict = FixedPointVerdict::Contains;
    } else {
        d.reason = Some(format!(
            "a closure member is realized, but no abelian {k}-power was found in iterates of length <= {}",
            opts.witness_budget
        ));
    }
    Ok(d)
}

/// First iterate `h^n(seed)` of length at most `budget` containing an abelian
/// `k`-power, as `Err((n, occurrence))`; otherwise the length of the longest
/// iterate scanned.
fn locate_power(
    h: &Morphism,
    seed: Letter,
    k: usize,
    budget: usize,
) -> Result<usize, (u32, AbelianPowerOccurrence)> {
    let mut w = Word(vec![seed]);
    let mut level = 0;
    let mut checked = 0;
    while w.len() <= budget {
        let ps = PrefixSums::new(&w, h.m());
        let found = (0..w.len())
            .into_par_iter()
            .with_min_len(64)
            .find_map_first(|s| abelian_power_starting_at(&ps, s, k));
        if let Some(o) = found {
            return Err((level, o));
        }
        checked = w.len();
        let next = h.apply(&w);
        if next.len() == w.len() {
            break;
        }
        w = next;
        level += 1;
    }
    Ok(checked)
}
