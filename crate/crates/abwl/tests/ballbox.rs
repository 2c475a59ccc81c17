use abwl::ballbox::{
    box_progressions, distribution_to_word, find_box_progression, word_to_distribution,
    BoxProgression, Distribution,
};
use abwl::words::{find_abelian_power, Alphabet};
use proptest::prelude::*;

const MIXED: &str = "aababaababaabaaabababa";
const FIXED_POINT_24: &str = "aaaabaaaabaaaabaaaababab";

fn dist(s: &str) -> Distribution {
    word_to_distribution(&Alphabet::binary().parse(s).unwrap()).unwrap()
}

#[test]
fn first_figure_sizes() {
    let d = dist(MIXED);
    assert_eq!(d.sizes(), [1, 1, 2, 2, 1, 2, 2, 1, 2, 1, 1, 2, 2, 2, 1]);
    assert_eq!((d.balls(), d.ell()), (23, 2));
    assert_eq!(Alphabet::binary().render(&distribution_to_word(&d)), MIXED);
}

#[test]
fn ninth_figure_sizes() {
    let d = dist(FIXED_POINT_24);
    assert_eq!(
        d.sizes(),
        [1, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 2, 2]
    );
}

#[test]
fn all_a_is_one_ball_per_box() {
    let d = dist("aaaa");
    assert_eq!(d.sizes(), [1; 5]);
    let from = Distribution::from_sizes(vec![1; 5]).unwrap();
    assert_eq!(
        Alphabet::binary().render(&distribution_to_word(&from)),
        "aaaa"
    );
}

#[test]
fn five_term_progression_of_first_figure() {
    let d = dist(MIXED);
    let expected = BoxProgression {
        balls: vec![3, 8, 13, 18, 23],
        boxes: vec![3, 6, 9, 12, 15],
    };
    let all: Vec<_> = box_progressions(&d, 5).collect();
    assert!(all.contains(&expected));
    let first = find_box_progression(&d, 5).unwrap();
    assert!(first.is_valid_for(&d));
    assert_eq!(
        (first.balls, first.boxes),
        (vec![1, 4, 7, 10, 13], vec![1, 3, 5, 7, 9])
    );
}

#[test]
fn ninth_figure_has_no_six_term_progression() {
    assert_eq!(find_box_progression(&dist(FIXED_POINT_24), 6), None);
}

#[test]
fn distinct_boxes_give_equal_steps() {
    let d = dist("aaaa");
    let bp = find_box_progression(&d, 3).unwrap();
    assert_eq!(bp.balls, bp.boxes);
    assert_eq!(bp.ball_step(), bp.box_step());
}

#[test]
fn json_roundtrip() {
    let d = dist(MIXED);
    let s = serde_json::to_string(&d).unwrap();
    let back: Distribution = serde_json::from_str(&s).unwrap();
    assert_eq!(back, d);
    assert_eq!(back.box_of(23), Some(15));
}

#[test]
fn bb_free_roundtrip_exhaustive() {
    for len in 0..=16usize {
        for bits in 0..1u32 << len {
            let w: Vec<u8> = (0..len).map(|i| (bits >> i & 1) as u8).collect();
            if w.windows(2).any(|p| p == [1, 1]) {
                continue;
            }
            let d = word_to_distribution(&w).unwrap();
            assert!(d.ell() <= 2);
            assert_eq!(distribution_to_word(&d).0, w);
        }
    }
}

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=2, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn roundtrip_longer_words(w in prop::collection::vec(0u8..2, 17..120)) {
        let d = word_to_distribution(&w).unwrap();
        prop_assert_eq!(distribution_to_word(&d).0, w);
    }

    #[test]
    fn progression_iff_power(s in sizes(), k in 3usize..=7) {
        let d = Distribution::from_sizes(s).unwrap();
        let w = distribution_to_word(&d);
        let bp = find_box_progression(&d, k);
        prop_assert_eq!(bp.is_some(), find_abelian_power(&w, 2, k - 1).is_some());
        if let Some(bp) = bp {
            prop_assert_eq!(bp.len(), k);
            prop_assert!(bp.is_valid_for(&d));
        }
    }

    #[test]
    fn from_box_of_agrees_with_sizes(s in sizes()) {
        let d = Distribution::from_sizes(s).unwrap();
        let labels: Vec<usize> = (1..=d.balls()).map(|b| d.box_of(b).unwrap()).collect();
        prop_assert_eq!(Distribution::from_box_of(&labels).unwrap(), d);
    }
}
