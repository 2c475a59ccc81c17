use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/morphisms")
        .join(name)
}

fn abwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abwl"))
        .args(args)
        .env_remove("ABWL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn certify_o_conditions_pass() {
    let m = data("aaaba-bab.json");
    let o = abwl(&[
        "certify",
        "--morphism",
        m.to_str().unwrap(),
        "--method",
        "o",
        "--power",
        "6",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["certificate"]["verdict"], "PASS");
    assert_eq!(j["certificate"]["ap_rank"], 6);
}

#[test]
fn certify_singular_fails() {
    let m = data("ab-ab.json");
    let o = abwl(&[
        "certify",
        "--morphism",
        m.to_str().unwrap(),
        "--method",
        "o",
        "--power",
        "6",
    ]);
    assert_eq!(code(&o), 1);
    let conds = &json(&o)["certificate"]["conditions"];
    assert_eq!(conds[0]["detail"], "det=0");
}

#[test]
fn certify_dekking_with_scores() {
    let m = data("abaaabaaaba-ababababa.json");
    let o = abwl(&[
        "certify",
        "--morphism",
        m.to_str().unwrap(),
        "--method",
        "dekking",
        "--group",
        "17",
        "--scores",
        "a=1,b=3",
        "--power",
        "11",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn input_errors_exit_three() {
    assert_eq!(
        code(&abwl(&[
            "certify",
            "--morphism",
            "/nonexistent.json",
            "--method",
            "o",
            "--power",
            "6"
        ])),
        3
    );
    assert_eq!(
        code(&abwl(&[
            "certify",
            "--images",
            "aaaba,bab",
            "--method",
            "o",
            "--power",
            "3"
        ])),
        3
    );
    assert_eq!(code(&abwl(&["ballbox", "--word", "abc"])), 3);
    assert_eq!(code(&abwl(&["ballbox", "--box-of", "1,3"])), 3);
    assert_eq!(
        code(&abwl(&["longest", "--forbid", "bb", "--power", "1"])),
        3
    );
    assert_eq!(code(&abwl(&["nonsense"])), 3);
    assert_eq!(
        code(&abwl(&[
            "certify",
            "--images",
            "aaaba,bab",
            "--method",
            "o",
            "--power",
            "6",
            "--group",
            "7"
        ])),
        3
    );
}

#[test]
fn fixedpoint_sieve_contains() {
    let m = data("abaaaba-babab.json");
    let o = abwl(&[
        "fixedpoint",
        "--morphism",
        m.to_str().unwrap(),
        "--power",
        "8",
        "--method",
        "sieve",
    ]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert_eq!(j["verdict"], "CONTAINS");
    assert_eq!(j["sieve"]["selected"].as_array().unwrap().len(), 8);
    assert_eq!(j["closure"]["members"], 224);
    assert_eq!(j["bounds"]["bound_improved"], 56);
    assert_eq!(j["decision"]["witness"]["level"], 6);
}

#[test]
fn fixedpoint_sieve_free() {
    let o = abwl(&[
        "fixedpoint",
        "--images",
        "abaabaababa,babababab",
        "--power",
        "14",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["verdict"], "FREE");
    assert_eq!(j["sieve"]["selected"].as_array().unwrap().len(), 32);
    assert_eq!(j["closure"]["members"], 1244);
    assert_eq!(j["bounds"]["bound_improved"], 154);
}

#[test]
fn fixedpoint_naive_free() {
    let m = data("aaaab-ababab.json");
    let o = abwl(&[
        "fixedpoint",
        "--morphism",
        m.to_str().unwrap(),
        "--power",
        "5",
        "--method",
        "naive",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["closure"]["parents"], 16163);
}

#[test]
fn naive_closure_cap_is_inconclusive() {
    let o = abwl(&[
        "fixedpoint",
        "--images",
        "abaabaababa,babababab",
        "--power",
        "14",
        "--method",
        "naive",
        "--max-members",
        "100000",
    ]);
    assert_eq!(code(&o), 2);
    let j = json(&o);
    assert_eq!(j["verdict"], "INCONCLUSIVE");
    assert!(j["decision"]["reason"].as_str().unwrap().contains("100000"));
}

#[test]
fn non_contracting_morphism_is_inconclusive() {
    let o = abwl(&[
        "fixedpoint",
        "--images",
        "aab,bba",
        "--power",
        "3",
        "--method",
        "naive",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let m = data("abaaaba-babab.json");
    let base = [
        "fixedpoint",
        "--morphism",
        m.to_str().unwrap(),
        "--power",
        "8",
    ];
    let one = abwl(&[&["--threads", "1"], &base[..]].concat());
    let four = abwl(&[&["--threads", "4"], &base[..]].concat());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn cache_reuse_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_abwl"))
            .args(["fixedpoint", "--images", "abaaaba,babab", "--power", "8"])
            .env("ABWL_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(String::from_utf8_lossy(&first.stderr).contains("Miss"));
    let second = run();
    assert!(String::from_utf8_lossy(&second.stderr).contains("Hit"));
    assert_eq!(first.stdout, second.stdout);

    let file = std::fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(
        &file,
        text.replacen("(0,-1)", "(0,-2)", 1)
            .replacen("[0,-1]", "[0,-2]", 1),
    )
    .unwrap();
    let third = run();
    let err = String::from_utf8_lossy(&third.stderr);
    assert!(err.contains("digest mismatch"), "{err}");
    assert!(err.contains("Rebuilt"));
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn longest_examples() {
    let o = abwl(&["longest", "--forbid", "bb", "--power", "4", "--cap", "40"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["max_length"], 17);
    let o = abwl(&[
        "longest", "--forbid", "aaa,bb", "--power", "5", "--cap", "60",
    ]);
    assert_eq!(json(&o)["max_length"], 24);
    let o = abwl(&["longest", "--forbid", "a", "--power", "2", "--cap", "10"]);
    let j = json(&o);
    assert_eq!(j["max_length"], 1);
    assert_eq!(j["witnesses"], serde_json::json!(["b"]));
}

#[test]
fn longest_cap_reached_exits_two() {
    let o = abwl(&["longest", "--forbid", "bb", "--power", "4", "--cap", "10"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["exhausted"], false);
}

#[test]
fn longest_tree_dot() {
    let o = abwl(&["longest", "--forbid", "a", "--power", "2", "--tree", "dot"]);
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "digraph words {\n  \"ε\" -> \"b\";\n}\n"
    );
}

#[test]
fn ballbox_examples() {
    let o = abwl(&["ballbox", "--word", "aababaababaabaaabababa", "--bp", "5"]);
    assert_eq!(code(&o), 0);
    let found = &json(&o)["progressions"]["found"];
    assert!(found
        .as_array()
        .unwrap()
        .iter()
        .any(|bp| bp["balls"] == serde_json::json!([3, 8, 13, 18, 23])
            && bp["boxes"] == serde_json::json!([3, 6, 9, 12, 15])));

    let o = abwl(&["ballbox", "--word", "aaaabaaaabaaaabaaaababab", "--bp", "6"]);
    assert_eq!(json(&o)["progressions"]["found"], serde_json::json!([]));

    let o = abwl(&["ballbox", "--word", "aaaa", "--bp", "3"]);
    let first = &json(&o)["progressions"]["found"][0];
    assert_eq!(first["balls"], first["boxes"]);
}

#[test]
fn text_format_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = abwl(&[
        "--format",
        "text",
        "--output",
        path.to_str().unwrap(),
        "ballbox",
        "--sizes",
        "1,2",
        "--bp",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("word: ab\n[1][2 3]"), "{text}");
    let j: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(j["balls"], 3);
}

#[test]
fn repro_quick_passes() {
    let o = abwl(&["repro", "--quick"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let j = json(&o);
    assert!(j["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["ok"] == true));
}
