use abwl::avoid::{is_valid, longest_avoiding, maximal_tree, SearchSpec, WitnessMode};
use abwl::words::{contains_forbidden, find_abelian_power, Morphism};

fn run(forbidden: &[&str], k: usize, cap: usize) -> (SearchSpec, abwl::avoid::SearchResult) {
    let spec = SearchSpec::binary(forbidden, k, cap).unwrap();
    let r = longest_avoiding(&spec);
    (spec, r)
}

fn rendered(spec: &SearchSpec, r: &abwl::avoid::SearchResult) -> Vec<String> {
    r.witnesses
        .iter()
        .map(|w| spec.alphabet.render(w))
        .collect()
}

#[test]
fn bb_cube_free_is_eight() {
    let (spec, r) = run(&["bb"], 3, 30);
    assert_eq!(r.max_length, 8);
    assert!(r.exhausted);
    assert!(rendered(&spec, &r).contains(&"aabaabaa".to_string()));
}

#[test]
fn bb_fourth_power_free_is_seventeen() {
    let (spec, r) = run(&["bb"], 4, 40);
    assert_eq!(r.max_length, 17);
    assert!(r.exhausted);
    assert!(rendered(&spec, &r).contains(&"babaaabaaabaaabab".to_string()));
}

#[test]
fn aaa_bb_fifth_power_free_is_twenty_four() {
    let (spec, r) = run(&["aaa", "bb"], 5, 60);
    assert_eq!(r.max_length, 24);
    assert!(r.exhausted);
    assert!(rendered(&spec, &r).contains(&"aababaababaababaababaaba".to_string()));
}

#[test]
fn aaaa_bb_fifth_power_free_is_seventy_seven() {
    let (spec, r) = run(&["aaaa", "bb"], 5, 120);
    assert_eq!(r.max_length, 77);
    assert!(r.exhausted);
    let w = "aaababababaaababababaaabaaabaaabaaababababaaabaaabaaabaaababababaaababababaaa";
    assert!(rendered(&spec, &r).contains(&w.to_string()));
}

#[test]
fn witnesses_pass_whole_word_checks() {
    let (spec, r) = run(&["bb"], 4, 40);
    for w in &r.witnesses {
        assert!(contains_forbidden(w, &spec.forbidden).is_none());
        assert!(find_abelian_power(w, 2, 4).is_none());
    }
}

#[test]
fn lex_least_mode_keeps_first_witness() {
    let mut spec = SearchSpec::binary(&["bb"], 3, 30).unwrap();
    let all = longest_avoiding(&spec);
    spec.witnesses = WitnessMode::LexLeast;
    let one = longest_avoiding(&spec);
    assert_eq!(one.witnesses, all.witnesses[..1]);
    assert_eq!(one.nodes, all.nodes);
}

#[test]
fn cube_tree_leaves() {
    let spec = SearchSpec::binary(&["bb"], 3, 30).unwrap();
    let t = maximal_tree(&spec, 10_000).unwrap();
    assert_eq!(t.depth(), 8);
    let leaves: Vec<String> = t.leaves_at(8).map(|w| spec.alphabet.render(w)).collect();
    for w in ["aabaabaa", "abaabaab", "baabaaba"] {
        assert!(leaves.contains(&w.to_string()), "{w}");
    }
}

#[test]
fn tree_matches_whole_word_recheck() {
    let spec = SearchSpec::binary(&["bb"], 3, 30).unwrap();
    let t = maximal_tree(&spec, 10_000).unwrap();
    let mut tree_words: Vec<Vec<u8>> = t.nodes.iter().map(|n| n.word.0.clone()).collect();
    tree_words.sort();
    let mut brute = Vec::new();
    for len in 0..=10usize {
        for bits in 0..1u32 << len {
            let w: Vec<u8> = (0..len)
                .map(|i| (bits >> (len - 1 - i) & 1) as u8)
                .collect();
            if is_valid(&w, &spec) {
                brute.push(w);
            }
        }
    }
    brute.sort();
    assert_eq!(tree_words, brute);
}

#[test]
fn fourth_power_tree_holds_witness() {
    let spec = SearchSpec::binary(&["bb"], 4, 17).unwrap();
    let t = maximal_tree(&spec, 1_000_000).unwrap();
    assert_eq!(t.depth(), 17);
    let w = spec.alphabet.parse("babaaabaaabaaabab").unwrap();
    assert!(t.nodes.iter().any(|n| n.word == w));
}

#[test]
fn tree_cap_is_reported() {
    let spec = SearchSpec::binary(&["bb"], 4, 17).unwrap();
    assert!(maximal_tree(&spec, 10).is_err());
}

#[test]
fn tree_exports() {
    let spec = SearchSpec::binary(&["a"], 2, 10).unwrap();
    let t = maximal_tree(&spec, 10).unwrap();
    assert_eq!(t.to_text(&spec.alphabet), "ε\n  b\n");
    assert_eq!(
        t.to_dot(&spec.alphabet),
        "digraph words {\n  \"ε\" -> \"b\";\n}\n"
    );
}

#[test]
fn fixed_point_prefixes_avoid_their_factors() {
    let cases = [
        (("aaaba", "bab"), "aaaaa", 6),
        (("abaaaba", "babab"), "aaaa", 9),
        (("abaabaababa", "babababab"), "aaa", 16),
    ];
    for ((ha, hb), a_run, k) in cases {
        let h = Morphism::binary(ha, hb).unwrap();
        let w = h.fixed_point_of_length(0, 200).unwrap();
        assert_eq!(w.len(), 200);
        let spec = SearchSpec::binary(&[a_run, "bb"], k, 200).unwrap();
        assert!(is_valid(&w, &spec), "{ha}/{hb}");
    }
}
