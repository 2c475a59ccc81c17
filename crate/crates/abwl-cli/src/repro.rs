//! The reference suite: every published count and verdict, recomputed and
//! compared side by side.

use std::fmt::Write as _;

use abwl::aprank::ApRank;
use abwl::avoid::{longest_avoiding, SearchSpec};
use abwl::certify::{check_dekking, check_o_conditions, Certificate, ScoringSpec};
use abwl::lattice::quotient;
use abwl::sieve::sieve_decide;
use abwl::template::{
    ancestors, decide_fixed_point, search_bounds, ClosureCaps, DecideOptions, Template,
};
use abwl::words::Morphism;
use clap::Args;
use serde::Serialize;

use crate::input::CliError;
use crate::output::emit;
use crate::{Outcome, OutputArgs};

#[derive(Args, Debug)]
pub struct ReproArgs {
    /// Skip the runs that take more than a few seconds.
    #[arg(long)]
    quick: bool,
}

#[derive(Serialize)]
struct Row {
    case: String,
    quantity: &'static str,
    expected: String,
    actual: String,
    ok: bool,
}

#[derive(Default, Serialize)]
struct Suite {
    rows: Vec<Row>,
    skipped: Vec<String>,
}

impl Suite {
    fn check(
        &mut self,
        case: &str,
        quantity: &'static str,
        expected: impl ToString,
        actual: impl ToString,
    ) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        self.rows.push(Row {
            case: case.to_string(),
            quantity,
            ok: expected == actual,
            expected,
            actual,
        });
    }
}

fn binary(a: &str, b: &str) -> Morphism {
    Morphism::binary(a, b).expect("valid morphism")
}

fn rank(c: &Certificate) -> String {
    match c.ap_rank {
        Some(ApRank::Finite(r)) => r.to_string(),
        Some(ApRank::Infinite) => "infinite".into(),
        None => "-".into(),
    }
}

fn certification(s: &mut Suite) -> Result<(), CliError> {
    for (a, b, n, order) in [
        ("aaaba", "bab", 6, 7),
        ("abaaaba", "babab", 9, 11),
        ("abaabaababa", "babababab", 16, 19),
    ] {
        let h = binary(a, b);
        let case = format!("O-conditions {a}/{b}");
        let c = check_o_conditions(&h, n)?;
        s.check(&case, "verdict", "Pass", format!("{:?}", c.verdict));
        s.check(&case, "a-rk", n, rank(&c));
        let g = quotient(&h.frequency_matrix()).map_err(abwl::certify::CertifyError::from)?;
        s.check(&case, "quotient order", order, g.order());
    }
    for (a, b, group, scores, n, size, longest) in [
        ("ababa", "aaaaba", 7, [1, 2], 6, 6, 6),
        ("aaabaaaba", "babaaaba", 11, [1, 2], 9, 9, 9),
        ("abaaabaaaba", "ababababa", 17, [1, 3], 11, 13, 11),
    ] {
        let h = binary(a, b);
        let case = format!("Dekking {a}/{b} Z/{group}");
        let f = ScoringSpec::cyclic(group, &scores)?;
        let c = check_dekking(&h, &f, n)?;
        s.check(&case, "verdict", "Pass", format!("{:?}", c.verdict));
        let a_size = c.audit["A"].as_array().map_or(0, Vec::len);
        s.check(&case, "|A|", size, a_size);
        s.check(&case, "longest AP in A", longest, rank(&c));
    }
    Ok(())
}

fn avoidance(s: &mut Suite, quick: bool) -> Result<(), CliError> {
    let rows: [(&[&str], usize, usize, &str); 4] = [
        (&["bb"], 3, 8, "aabaabaa"),
        (&["bb"], 4, 17, "babaaabaaabaaabab"),
        (&["aaa", "bb"], 5, 24, "aababaababaababaababaaba"),
        (
            &["aaaa", "bb"],
            5,
            77,
            "aaababababaaababababaaabaaabaaabaaababababaaabaaabaaabaaababababaaababababaaa",
        ),
    ];
    for (forbid, k, len, witness) in rows {
        let case = format!("avoid {} and abelian {k}-powers", forbid.join(","));
        if quick && len > 24 {
            s.skipped.push(case);
            continue;
        }
        let spec = SearchSpec::binary(forbid, k, 120)?;
        let r = longest_avoiding(&spec);
        s.check(&case, "longest", len, r.max_length);
        s.check(&case, "exhausted", true, r.exhausted);
        let found = r
            .witnesses
            .iter()
            .any(|w| spec.alphabet.render(w) == witness);
        s.check(
            &case,
            "witness listed",
            witness,
            if found { witness } else { "missing" },
        );
    }
    Ok(())
}

fn sieve_runs(s: &mut Suite, quick: bool) -> Result<(), CliError> {
    let runs = [
        ("abaaaba", "babab", 8, 8, 82, 224, 56, 273, "CONTAINS"),
        (
            "abaabaababa",
            "babababab",
            14,
            32,
            268,
            1244,
            154,
            869,
            "FREE",
        ),
    ];
    for (a, b, k, selected, parents, members, improved, original, verdict) in runs {
        let case = format!("sieve {a}/{b} k={k}");
        if quick && k > 8 {
            s.skipped.push(case);
            continue;
        }
        let h = binary(a, b);
        let d = sieve_decide(&h, 0, k, None, DecideOptions::default())?;
        s.check(&case, "selected", selected, d.report.selected.len());
        let closure = d.decision.closure.expect("closure computed");
        s.check(&case, "parents", parents, closure.parents);
        s.check(&case, "ancestors", members, closure.members);
        if k == 14 {
            s.check(&case, "layers", 14, closure.generations + 1);
        }
        let bounds = d.decision.bounds.expect("bounds computed");
        s.check(&case, "improved bound", improved, bounds.bound_improved);
        s.check(&case, "original bound", original, bounds.bound_original);
        s.check(&case, "delta", 2, bounds.delta);
        s.check(&case, "verdict", verdict, d.decision.verdict);
    }
    Ok(())
}

fn naive_runs(s: &mut Suite, quick: bool) -> Result<(), CliError> {
    let case = "template aaaab/ababab k=5";
    if quick {
        s.skipped.push(case.into());
    } else {
        let h = binary("aaaab", "ababab");
        let d = decide_fixed_point(
            &h,
            0,
            5,
            &[Template::trivial(5, 2)],
            DecideOptions::default(),
        )?;
        let closure = d.closure.expect("closure computed");
        s.check(case, "parents", 16163, closure.parents);
        s.check(case, "ancestors", 16163, closure.members);
        s.check(
            case,
            "improved bound",
            34,
            d.bounds.expect("bounds").bound_improved,
        );
        s.check(
            case,
            "stabilization level",
            4,
            d.stabilization_level.unwrap_or(0),
        );
        s.check(case, "verdict", "FREE", d.verdict);
    }
    let h = binary("abb", "aaab");
    let set = ancestors(&[Template::trivial(4, 2)], &h, ClosureCaps::default())?;
    let case = "template abb/aaab k=4";
    s.check(case, "ancestors", 3123, set.len());
    let b = search_bounds(&set.members, &h, 4);
    s.check(
        case,
        "improved <= original",
        true,
        b.bound_improved <= b.bound_original,
    );
    Ok(())
}

pub fn run(a: ReproArgs, out: &OutputArgs) -> Result<Outcome, CliError> {
    let mut suite = Suite::default();
    certification(&mut suite)?;
    avoidance(&mut suite, a.quick)?;
    sieve_runs(&mut suite, a.quick)?;
    naive_runs(&mut suite, a.quick)?;
    let all_ok = suite.rows.iter().all(|r| r.ok);
    emit(out, &suite, || {
        let w = suite.rows.iter().map(|r| r.case.len()).max().unwrap_or(0);
        let mut s = String::new();
        for r in &suite.rows {
            let _ = writeln!(
                s,
                "{} {:w$}  {:<26} expected {:<10} actual {}",
                if r.ok { "ok  " } else { "FAIL" },
                r.case,
                r.quantity,
                r.expected,
                r.actual,
            );
        }
        for c in &suite.skipped {
            let _ = writeln!(s, "skip {c}");
        }
        s
    })?;
    Ok(if all_ok { Outcome::Pass } else { Outcome::Fail })
}
