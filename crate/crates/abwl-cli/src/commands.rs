use std::fmt::Write as _;

use abwl::avoid::{longest_avoiding, maximal_tree, SearchResult, SearchSpec, WitnessMode};
use abwl::ballbox::{
    box_progressions, distribution_to_word, word_to_distribution, BoxProgression, Distribution,
};
use abwl::certify::{
    check_carpi, check_dekking, check_o_conditions, search_dekking_scoring, CarpiLimits,
    Certificate, ScoringSpec,
};
use abwl::sieve::{derive_scoring, selected_parents, SieveReport};
use abwl::template::{
    check_hypotheses, decide_with_closure, BoundReport, ClosureCaps, DecideOptions, Decision,
    FixedPointVerdict, Template, TemplateError,
};
use abwl::words::{Alphabet, Morphism};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::cache::{self, CacheStatus};
use crate::input::{self, CliError};
use crate::output::emit;
use crate::{MorphismArgs, Outcome, OutputArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMethod {
    O,
    Dekking,
    Carpi,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    morphism: MorphismArgs,
    #[arg(long, value_enum)]
    method: CertifyMethod,
    #[arg(long)]
    power: usize,
    /// Order of the cyclic scoring group (Dekking only).
    #[arg(long)]
    group: Option<i64>,
    /// Letter scores, e.g. `a=1,b=3` (Dekking only).
    #[arg(long)]
    scores: Option<String>,
    /// Largest cyclic group tried when no scoring is given (Dekking only).
    #[arg(long, default_value_t = 23)]
    max_group: i64,
    /// Node budget for the tuple search (Carpi only).
    #[arg(long, default_value_t = CarpiLimits::default().max_nodes)]
    max_nodes: u64,
}

#[derive(Serialize)]
struct CertifyReport {
    morphism: serde_json::Value,
    method: CertifyMethod,
    power: usize,
    scoring: Option<ScoringSpec>,
    certificate: Certificate,
}

fn morphism_json(h: &Morphism) -> serde_json::Value {
    serde_json::from_str(&h.to_json()).expect("morphism json")
}

pub fn certify(a: CertifyArgs, out: &OutputArgs) -> Result<Outcome, CliError> {
    let h = input::morphism(&a.morphism)?;
    let scoring = input::scoring(&h, a.group, a.scores.as_deref())?;
    if scoring.is_some() && a.method != CertifyMethod::Dekking {
        return Err(CliError::Usage(
            "--group/--scores only apply to --method dekking".into(),
        ));
    }
    let (scoring, cert) = match a.method {
        CertifyMethod::O => (None, check_o_conditions(&h, a.power)?),
        CertifyMethod::Carpi => (
            None,
            check_carpi(
                &h,
                a.power,
                CarpiLimits {
                    max_nodes: a.max_nodes,
                },
            )?,
        ),
        CertifyMethod::Dekking => match scoring {
            Some(f) => {
                let c = check_dekking(&h, &f, a.power)?;
                (Some(f), c)
            }
            None => match search_dekking_scoring(&h, a.max_group, Some(a.power))? {
                Some((f, c)) => (Some(f), c),
                None => {
                    // Report against the canonical scoring so the failure has detail.
                    let f = derive_scoring(&h).map_err(CliError::from)?;
                    let c = check_dekking(&h, &f, a.power)?;
                    (Some(f), c)
                }
            },
        },
    };
    let outcome = match cert.verdict {
        abwl::certify::Verdict::Pass => Outcome::Pass,
        abwl::certify::Verdict::Fail => Outcome::Fail,
        abwl::certify::Verdict::Inconclusive => Outcome::Inconclusive,
    };
    let report = CertifyReport {
        morphism: morphism_json(&h),
        method: a.method,
        power: a.power,
        scoring,
        certificate: cert,
    };
    emit(out, &report, || {
        let c = &report.certificate;
        let mut s = format!(
            "{:?} at power {}: {:?}\n",
            report.method, c.power, c.verdict
        );
        if let Some(r) = &c.ap_rank {
            let _ = writeln!(s, "a-rk: {r:?}");
        }
        for cond in &c.conditions {
            let _ = writeln!(s, "  {} {:?}  {}", cond.name, cond.status, cond.detail);
        }
        s
    })?;
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedpointMethod {
    /// Closure of the sieve-selected parents of `T_k`.
    Sieve,
    /// Closure of `T_k` itself.
    #[value(alias = "template")]
    Naive,
}

#[derive(Args, Debug)]
pub struct FixedpointArgs {
    #[command(flatten)]
    morphism: MorphismArgs,
    #[arg(long)]
    power: usize,
    #[arg(long, value_enum, default_value_t = FixedpointMethod::Sieve)]
    method: FixedpointMethod,
    #[arg(long, default_value_t = 'a')]
    seed: char,
    #[arg(long)]
    group: Option<i64>,
    #[arg(long)]
    scores: Option<String>,
    #[arg(long, default_value_t = ClosureCaps::default().max_members)]
    max_members: usize,
    #[arg(long, default_value_t = ClosureCaps::default().max_generations)]
    max_generations: usize,
    /// Replace the computed Δ when reporting the original-mode bound.
    #[arg(long)]
    delta: Option<i64>,
}

#[derive(Serialize)]
struct ClosureSummary {
    seeds: usize,
    members: usize,
    parents: usize,
    generations: usize,
    layers: usize,
}

#[derive(Serialize)]
struct FixedpointReport {
    morphism: serde_json::Value,
    k: usize,
    seed: char,
    method: FixedpointMethod,
    verdict: FixedPointVerdict,
    /// `selected` or `trivial`.
    seed_source: &'static str,
    closure: Option<ClosureSummary>,
    bounds: Option<BoundReport>,
    decision: Decision,
    sieve: Option<SieveReport>,
}

pub fn fixedpoint(a: FixedpointArgs, out: &OutputArgs) -> Result<Outcome, CliError> {
    let h = input::morphism(&a.morphism)?;
    let seed = input::seed_letter(&h, a.seed)?;
    if a.power < 2 {
        return Err(CliError::Usage("--power must be at least 2".into()));
    }
    if a.max_members == 0 || a.max_generations == 0 {
        return Err(CliError::Usage("caps must be positive".into()));
    }
    let scoring = input::scoring(&h, a.group, a.scores.as_deref())?;
    let opts = DecideOptions {
        caps: ClosureCaps {
            max_members: a.max_members,
            max_generations: a.max_generations,
        },
        ..DecideOptions::default()
    };
    let trivial = vec![Template::trivial(a.power, h.m())];
    let (sieve, seeds, seed_source) = match a.method {
        FixedpointMethod::Sieve => {
            let r = selected_parents(&h, scoring, a.power)?;
            if r.sound {
                let s = r.selected.clone();
                (Some(r), s, "selected")
            } else {
                (Some(r), trivial, "trivial")
            }
        }
        FixedpointMethod::Naive => (None, trivial, "trivial"),
    };

    let mut closure = None;
    let decision = match check_hypotheses(&h, seed) {
        Err(reason) => Decision::inconclusive(a.power, seed, reason),
        Ok(_) => match cache::closure(&h, &seeds, opts.caps) {
            Ok((set, status)) => {
                if status != CacheStatus::Disabled {
                    eprintln!("cache: {status:?}");
                }
                let d = decide_with_closure(&h, seed, a.power, &set, opts)?;
                closure = Some(ClosureSummary {
                    seeds: set.seed_count,
                    members: set.len(),
                    parents: set.parent_count,
                    generations: set.generations,
                    layers: set.layers(),
                });
                d
            }
            Err(e @ TemplateError::CapExceeded { .. }) => {
                Decision::inconclusive(a.power, seed, e.to_string())
            }
            Err(e) => return Err(e.into()),
        },
    };
    let bounds = decision.bounds.map(|b| match a.delta {
        Some(d) => b.with_delta(d),
        None => b,
    });
    let outcome = match decision.verdict {
        FixedPointVerdict::Free => Outcome::Pass,
        FixedPointVerdict::Contains => Outcome::Fail,
        FixedPointVerdict::Inconclusive => Outcome::Inconclusive,
    };
    let report = FixedpointReport {
        morphism: morphism_json(&h),
        k: a.power,
        seed: a.seed,
        method: a.method,
        verdict: decision.verdict,
        seed_source,
        closure,
        bounds,
        decision,
        sieve,
    };
    emit(out, &report, || fixedpoint_text(&report, h.alphabet()))?;
    Ok(outcome)
}

fn fixedpoint_text(r: &FixedpointReport, ab: &Alphabet) -> String {
    let mut s = format!("verdict: {} (k = {})\n", r.verdict, r.k);
    if let Some(reason) = &r.decision.reason {
        let _ = writeln!(s, "reason: {reason}");
    }
    if let Some(sv) = &r.sieve {
        let _ = writeln!(
            s,
            "sieve: {} progressions, {} cases, {} selected ({})",
            sv.nontrivial_aps.len(),
            sv.cases.len(),
            sv.selected.len(),
            if sv.sound {
                "sound"
            } else {
                "not sound, using T_k"
            }
        );
    }
    if let Some(c) = &r.closure {
        let _ = writeln!(
            s,
            "ancestors: {} from {} seeds ({} parents, {} layers)",
            c.members, c.seeds, c.parents, c.layers
        );
    }
    if let Some(b) = &r.bounds {
        let _ = writeln!(
            s,
            "bounds: improved {} (maxsum {}), original {} (delta {})",
            b.bound_improved, b.maxsum, b.bound_original, b.delta
        );
    }
    if let Some(l) = r.decision.stabilization_level {
        let _ = writeln!(
            s,
            "factors: {} windows, stable at level {l}",
            r.decision.factors_scanned
        );
    }
    if let Some(w) = &r.decision.witness {
        let _ = writeln!(
            s,
            "realized: {} by {}",
            w.template.display(ab),
            ab.render(&w.factor)
        );
        if let (Some(level), Some(o)) = (w.level, w.occurrence) {
            let _ = writeln!(
                s,
                "power: h^{level}({}) at {} with block length {}",
                r.seed, o.start, o.block_length
            );
        }
    }
    if r.decision.checked_prefix > 0 {
        let _ = writeln!(s, "checked prefix: {} letters", r.decision.checked_prefix);
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Text,
    Dot,
}

#[derive(Args, Debug)]
pub struct LongestArgs {
    /// Forbidden factors, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    forbid: Vec<String>,
    #[arg(long)]
    power: usize,
    /// Longest word explored.
    #[arg(long, default_value_t = 120)]
    cap: usize,
    /// Report only the lexicographically least longest word.
    #[arg(long)]
    lex_least: bool,
    /// Print the tree of all valid words instead.
    #[arg(long, value_enum)]
    tree: Option<TreeFormat>,
    #[arg(long, default_value_t = 1_000_000)]
    node_cap: usize,
}

#[derive(Serialize)]
struct LongestReport {
    forbidden: Vec<String>,
    k: usize,
    cap: usize,
    max_length: usize,
    exhausted: bool,
    nodes: u64,
    witnesses: Vec<String>,
}

pub fn longest(a: LongestArgs, out: &OutputArgs) -> Result<Outcome, CliError> {
    if a.cap == 0 {
        return Err(CliError::Usage("--cap must be positive".into()));
    }
    let ab = Alphabet::binary();
    let forbidden = input::words(&ab, &a.forbid)?;
    let mut spec = SearchSpec::new(ab.clone(), forbidden, a.power, a.cap)?;
    if a.lex_least {
        spec.witnesses = WitnessMode::LexLeast;
    }
    if let Some(fmt) = a.tree {
        let tree = maximal_tree(&spec, a.node_cap)?;
        let body = match fmt {
            TreeFormat::Text => tree.to_text(&ab),
            TreeFormat::Dot => tree.to_dot(&ab),
        };
        print!("{body}");
        return Ok(Outcome::Pass);
    }
    let SearchResult {
        max_length,
        witnesses,
        exhausted,
        nodes,
    } = longest_avoiding(&spec);
    let report = LongestReport {
        forbidden: spec.forbidden.iter().map(|w| ab.render(w)).collect(),
        k: a.power,
        cap: a.cap,
        max_length,
        exhausted,
        nodes,
        witnesses: witnesses.iter().map(|w| ab.render(w)).collect(),
    };
    emit(out, &report, || {
        let mut s = format!(
            "longest: {}{}\n",
            report.max_length,
            if report.exhausted {
                ""
            } else {
                " (cap reached)"
            }
        );
        for w in &report.witnesses {
            let _ = writeln!(s, "  {w}");
        }
        s
    })?;
    Ok(if exhausted {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    })
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source")]
pub struct BallboxSource {
    /// Binary word: letter i is a when balls i and i+1 sit in different boxes.
    #[arg(long)]
    word: Option<String>,
    /// Box sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Box label of each ball, comma separated.
    #[arg(long, value_delimiter = ',')]
    box_of: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct BallboxArgs {
    #[command(flatten)]
    source: BallboxSource,
    /// Look for box progressions with this many terms.
    #[arg(long)]
    bp: Option<usize>,
    /// Maximum balls per box.
    #[arg(long)]
    ell: Option<usize>,
}

#[derive(Serialize)]
struct BallboxReport {
    word: String,
    distribution: Distribution,
    balls: usize,
    rendering: String,
    progressions: Option<ProgressionReport>,
}

#[derive(Serialize)]
struct ProgressionReport {
    k: usize,
    found: Vec<BoxProgression>,
}

pub fn ballbox(a: BallboxArgs, out: &OutputArgs) -> Result<Outcome, CliError> {
    let ab = Alphabet::binary();
    let s = a.source;
    let mut d = match (s.word, s.sizes, s.box_of) {
        (Some(w), _, _) => word_to_distribution(&ab.parse(&w)?)?,
        (_, Some(sizes), _) => Distribution::from_sizes(sizes)?,
        (_, _, Some(labels)) => Distribution::from_box_of(&labels)?,
        _ => return Err(CliError::Usage("give --word, --sizes or --box-of".into())),
    };
    if let Some(ell) = a.ell {
        d = d.with_ell(ell)?;
    }
    let progressions = match a.bp {
        Some(k) if k < 2 => return Err(CliError::Usage("--bp must be at least 2".into())),
        Some(k) => Some(ProgressionReport {
            k,
            found: box_progressions(&d, k).collect(),
        }),
        None => None,
    };
    let report = BallboxReport {
        word: ab.render(&distribution_to_word(&d)),
        balls: d.balls(),
        rendering: d.render_labeled(),
        distribution: d,
        progressions,
    };
    emit(out, &report, || {
        let mut s = format!("word: {}\n{}", report.word, report.rendering);
        if let Some(p) = &report.progressions {
            if p.found.is_empty() {
                let _ = writeln!(s, "no {}-term box progression", p.k);
            }
            for bp in &p.found {
                let _ = writeln!(s, "balls {:?} in boxes {:?}", bp.balls, bp.boxes);
            }
        }
        s
    })?;
    Ok(Outcome::Pass)
}
