use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn syncgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncgame"))
        .args(args)
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_syncgame"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn zoo_piped_into_bisync() {
    let game = syncgame(&["zoo", "hom", "--g", "K5", "--h", "K4"]);
    assert!(game.status.success());
    let out = with_stdin(&["transform", "bisync"], &game.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64()), (Some(20), Some(20)));
}

#[test]
fn verify_all_threeout_exits_zero() {
    let out = syncgame(&["verify", "all", "--kind", "threeout", "--game", "trivial_sync(1,4)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("total: 57/57 proven"), "{text}");
}

#[test]
fn verify_json_report() {
    let out = syncgame(&[
        "--json",
        "verify",
        "inverse",
        "--kind",
        "bisync",
        "--game",
        "hom(K3,K3)",
        "--cross-check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["oracle"]["discrepancies"], 0);
    let cats = v["categories"].as_array().unwrap();
    assert!(cats.iter().all(|c| c["proven"] == c["total"]));
}

#[test]
fn solve_counts() {
    let out = syncgame(&["solve", "--game", "hom(K5,K4)"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "count: 0");
    let out = syncgame(&["--json", "solve", "--game", "hom(K3,K3)", "--show"]);
    let v = json(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["strategies"][0], serde_json::json!([0, 1, 2]));
}

#[test]
fn zr_transform_writes_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let game = dir.path().join("game.json");
    let out = syncgame(&[
        "transform",
        "zr",
        "--in",
        "trivial_sync(1,3)",
        "--out",
        game.to_str().unwrap(),
        "--spec-out",
        spec.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec["n"], 7);
    assert_eq!(spec["Z"].as_array().unwrap().len(), 0);
    assert_eq!(spec["R"].as_array().unwrap().len(), 12);
    let game: Value = serde_json::from_str(&std::fs::read_to_string(&game).unwrap()).unwrap();
    assert_eq!((game["n"].as_u64(), game["k"].as_u64()), (Some(7), Some(3)));

    let out = syncgame(&["transform", "zr", "--in", "trivial_sync(1,4)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transport_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let pushed = dir.path().join("pushed.json");
    let back = dir.path().join("back.json");
    let original = r#"{"n":1,"k":2,"entries":[[0,0,0,0,"1"]]}"#;
    std::fs::write(&p, original).unwrap();
    let args = |corr: &std::path::Path, dir: &str, out: &std::path::Path| {
        syncgame(&[
            "transport",
            "--corr",
            corr.to_str().unwrap(),
            "--game",
            "trivial_sync(1,2)",
            "--map-kind",
            "bisync",
            "--direction",
            dir,
            "--out",
            out.to_str().unwrap(),
        ])
    };
    assert!(args(&p, "backward", &pushed).status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&pushed).unwrap()).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    assert!(args(&pushed, "forward", &back).status.success());
    let original: Value = serde_json::from_str(original).unwrap();
    let round: Value = serde_json::from_str(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(round, original);

    // A correlation of the wrong size is rejected.
    let out = args(&p, "forward", &back);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_reports_decoding_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = syncgame(&["--json", "counterexample", "--out-dir", dir.path().to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["report"]["midpoint"], true);
    assert_eq!(v["report"]["p"]["decodes"], true);
    assert_eq!(out.status.code(), Some(if v["confirms"] == true { 0 } else { 1 }));
    for name in ["p", "q", "r"] {
        assert!(dir.path().join(format!("{name}.json")).exists());
    }
}

#[test]
fn lemmas_small_run() {
    let out = syncgame(&["lemmas", "--dim", "2,3", "--trials", "40", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let a = syncgame(&["--json", "lemmas", "--dim", "4", "--trials", "20", "--seed", "9"]);
    let b = syncgame(&[
        "--json",
        "lemmas",
        "--dim",
        "4",
        "--trials",
        "20",
        "--seed",
        "9",
        "--sequential",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(syncgame(&["verify", "hom", "--game", "hom(K5)"]).status.code(), Some(2));
    assert_eq!(
        syncgame(&["solve", "--game", "/no/such/file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        syncgame(&["solve", "--game", "hom(K3,K3)", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        syncgame(&["verify", "hom", "--kind", "zr", "--game", "hom(K5,K4)"])
            .status
            .code(),
        Some(2)
    );
    let out = with_stdin(&["transform", "bisync"], b"{not json");
    assert_eq!(out.status.code(), Some(2));
}
