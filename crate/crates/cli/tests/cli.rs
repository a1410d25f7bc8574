//! End-to-end checks of the `dg` binary: exit codes, output schemas,
//! byte-reproducibility, and piped interactive sessions.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::sync::OnceLock;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dg")
}

fn tmp(name: &str) -> PathBuf {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    let dir = DIR.get_or_init(|| {
        let dir = std::env::temp_dir().join(format!("dg-cli-tests-{}", std::process::id()));
        std::fs::create_dir_all(&dir).expect("create test dir");
        dir
    });
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("run the binary")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(bin())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn the binary");
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(input.as_bytes())
        .expect("write stdin");
    child.wait_with_output().expect("collect output")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("an exit code")
}

/// Generates a board into the shared test directory and returns its path
/// as a string.
fn board(file: &str, spec: &str) -> String {
    let path = tmp(file);
    let out = run(&["gen", spec, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "gen {spec} failed: {}", stderr(&out));
    path.to_str().unwrap().to_string()
}

fn json(path: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("read JSON output");
    serde_json::from_str(&text).expect("parse JSON output")
}

// ---------------------------------------------------------------------------

#[test]
fn generates_structures_reproducibly() {
    let out = run(&["gen", "full_tree 2 2"]);
    assert_eq!(code(&out), 0);
    let tree: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("tree JSON");
    assert_eq!(tree["universe"].as_array().unwrap().len(), 7);

    let a = run(&["gen", "random 4 E:2", "--seed", "7"]);
    let b = run(&["gen", "random 4 E:2", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");

    let multi = run(&["gen", "pure_set 2", "linear_order 3"]);
    assert_eq!(code(&multi), 0);
    let list: serde_json::Value = serde_json::from_str(&stdout(&multi)).expect("catalog JSON");
    assert_eq!(list.as_array().unwrap().len(), 2);

    let bad = run(&["gen", "moebius 4"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("generator spec"));
}

#[test]
fn solves_with_documented_exit_codes() {
    let l3 = board("solve_l3.json", "linear_order 3");
    let l4 = board("solve_l4.json", "linear_order 4");
    let p1 = board("solve_p1.json", "pure_set 1");
    let p2 = board("solve_p2.json", "pure_set 2");

    let tie = run(&["solve", &l3, &l3, "--beta", "3", "--theta", "3", "--alpha", "2"]);
    assert_eq!(code(&tie), 0, "{}", stderr(&tie));
    assert!(stdout(&tie).contains("defender wins"));

    let split = run(&["solve", &p1, &p2, "--beta", "2", "--theta", "2", "--alpha", "1"]);
    assert_eq!(code(&split), 1);
    assert!(stdout(&split).contains("challenger wins"));

    // With the height bound strictly below the clock bound no clock can
    // reach zero in time, so the defender coasts on any pair of boards.
    let coast = run(&["solve", &l3, &l4, "--beta", "1", "--theta", "3", "--alpha", "2"]);
    assert_eq!(code(&coast), 0);

    let inadmissible = run(&["solve", &l3, &l4, "--beta", "w+1", "--theta", "2", "--alpha", "1"]);
    assert_eq!(code(&inadmissible), 2);
    assert!(stderr(&inadmissible).contains("inadmissible parameters"));

    let missing = run(&["solve", "/nonexistent.json", &l3, "--beta", "1", "--theta", "1", "--alpha", "1"]);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("cannot access"));

    let bad_ord = run(&["solve", &l3, &l4, "--beta", "x", "--theta", "1", "--alpha", "1"]);
    assert_eq!(code(&bad_ord), 2);
    assert!(stderr(&bad_ord).contains("cannot parse height bound"));
}

#[test]
fn solve_reports_are_byte_reproducible() {
    let p1 = board("report_p1.json", "pure_set 1");
    let p2 = board("report_p2.json", "pure_set 2");
    let out_a = tmp("report_a.json");
    let out_b = tmp("report_b.json");
    let args = |path: &str| {
        vec![
            "solve".to_string(),
            p1.clone(),
            p2.clone(),
            "--beta".into(),
            "2".into(),
            "--theta".into(),
            "2".into(),
            "--alpha".into(),
            "1".into(),
            "--refutation".into(),
            "--json-out".into(),
            path.to_string(),
        ]
    };
    let a = Command::new(bin())
        .args(args(out_a.to_str().unwrap()))
        .output()
        .unwrap();
    let b = Command::new(bin())
        .args(args(out_b.to_str().unwrap()))
        .output()
        .unwrap();
    assert_eq!(code(&a), 1);
    assert_eq!(code(&b), 1);
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap(),
        "identical runs, identical report bytes"
    );
    let report = json(out_a.to_str().unwrap());
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["command"], "solve");
    assert_eq!(report["winner"], "adam");
    assert!(report["refutation"]["entries"].as_array().is_some());
    assert!(report["stats"]["nodes_expanded"].as_u64().unwrap() > 0);

    let l3 = board("report_l3.json", "linear_order 3");
    let out_c = tmp("report_c.json");
    let c = run(&[
        "solve", &l3, &l3, "--beta", "2", "--theta", "2", "--alpha", "2",
        "--strategy", "--json-out", out_c.to_str().unwrap(),
    ]);
    assert_eq!(code(&c), 0);
    let report = json(out_c.to_str().unwrap());
    assert_eq!(report["winner"], "eve");
    assert!(
        !report["strategy"]["positions"].as_array().unwrap().is_empty(),
        "a defender win carries a nonempty positional strategy"
    );
}

#[test]
fn instance_files_carry_their_own_mode() {
    let l3 = board("inst_l3.json", "linear_order 3");
    let l4 = board("inst_l4.json", "linear_order 4");
    let report_path = tmp("inst_report.json");
    // The cap must exceed the smaller board before one round of challenges
    // can expose the length difference, hence theta = 4.
    let seeded = run(&[
        "solve", &l3, &l4, "--beta", "2", "--theta", "4", "--alpha", "1",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&seeded), 1, "{}", stderr(&seeded));
    let params = json(report_path.to_str().unwrap())["params"].clone();

    let instance = serde_json::json!({
        "m0": json(&l3),
        "m1": json(&l4),
        "params": params,
        "mode": "full",
    });
    let inst_path = tmp("inst_bundle.json");
    std::fs::write(&inst_path, serde_json::to_string_pretty(&instance).unwrap()).unwrap();
    let solved = run(&["solve", "--instance", inst_path.to_str().unwrap()]);
    assert_eq!(code(&solved), 1, "{}", stderr(&solved));
    assert!(stdout(&solved).contains("challenger wins"));

    // The --mode flag outranks the mode stored in the instance file.
    let lazy = run(&[
        "solve", "--instance", inst_path.to_str().unwrap(), "--mode", "lazy",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&lazy), 1);
    assert_eq!(json(report_path.to_str().unwrap())["mode"], "lazy");
}

#[test]
fn karp_levels_stabilize_and_rank_maps() {
    let l3 = board("karp_l3.json", "linear_order 3");
    let l4 = board("karp_l4.json", "linear_order 4");
    let report_path = tmp("karp_report.json");

    let same = run(&[
        "karp", &l3, &l3, "--theta", "3", "--equiv-at", "3",
        "--rank-of", r#"[["e0","e0"]]"#,
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&same), 0, "{}", stderr(&same));
    let text = stdout(&same);
    assert!(text.contains("stabilized at level"));
    assert!(text.contains("level 3 is nonempty"));
    assert!(text.contains("rank of the given map: stable"));
    let report = json(report_path.to_str().unwrap());
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["equiv_at"]["equivalent"], true);
    assert!(report["levels"]["stabilized_at"].as_u64().is_some());

    let diff = run(&[
        "karp", &l3, &l4, "--theta", "2", "--equiv-at", "2",
        "--rank-of", r#"[["e0","e0"]]"#,
    ]);
    assert_eq!(code(&diff), 0);
    let text = stdout(&diff);
    assert!(text.contains("level 2 is empty"));
    assert!(text.contains("rank of the given map: 0"));
}

#[test]
fn classify_partitions_catalogs() {
    let cat3 = tmp("classify_same.json");
    let gen = run(&[
        "gen", "linear_order 3", "linear_order 3", "linear_order 3",
        "--out", cat3.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0);
    let report_path = tmp("classify_same_report.json");
    let same = run(&[
        "classify", cat3.to_str().unwrap(), "--beta", "2", "--theta", "2", "--alpha", "2",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&same), 0, "{}", stderr(&same));
    assert!(stdout(&same).contains("into 1 class(es)"));
    let report = json(report_path.to_str().unwrap());
    assert_eq!(report["classes"].as_array().unwrap().len(), 1);
    assert_eq!(report["catalog_size"], 3);
    assert!(report["catalog_hash"].as_str().unwrap().len() == 64);

    let mixed = tmp("classify_mixed.json");
    let gen = run(&[
        "gen", "linear_order 3", "linear_order 3", "linear_order 4",
        "--out", mixed.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0);
    // With the cap above both board sizes a single round splits the two
    // lengths, so the catalog falls into exactly two classes.
    let split = run(&[
        "classify", mixed.to_str().unwrap(), "--beta", "2", "--theta", "4", "--alpha", "1",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&split), 0);
    assert!(stdout(&split).contains("into 2 class(es)"));
    let report = json(report_path.to_str().unwrap());
    assert_eq!(
        report["classes"],
        serde_json::json!([[0, 1], [2]]),
        "the two copies tie, the longer order stands apart"
    );
}

#[test]
fn compose_builds_and_verifies_composite_strategies() {
    let l3 = board("compose_l3.json", "linear_order 3");
    let l4 = board("compose_l4.json", "linear_order 4");
    let p1 = board("compose_p1.json", "pure_set 1");
    let p2 = board("compose_p2.json", "pure_set 2");
    let report_path = tmp("compose_report.json");

    let ok = run(&[
        "compose", &l3, &l4, &l3, "--beta", "2", "--theta", "2",
        "--alpha-ab", "1", "--alpha-bc", "1",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("verifies at (beta=2, theta=2, alpha=2)"));
    let report = json(report_path.to_str().unwrap());
    assert_eq!(report["verified"], true);
    assert_eq!(report["composed_params"]["theta"], 2);
    assert!(
        !report["strategy"]["positions"].as_array().unwrap().is_empty(),
        "the composite strategy is a concrete object"
    );

    let lost = run(&[
        "compose", &p1, &p2, &p1, "--beta", "2", "--theta", "2",
        "--alpha-ab", "1", "--alpha-bc", "1",
    ]);
    assert_eq!(code(&lost), 1);
    assert!(stdout(&lost).contains("challenger wins the first leg"));
}

#[test]
fn search_intransitive_reports_exhaustion() {
    let cat = tmp("search_cat.json");
    let gen = run(&[
        "gen", "pure_set 1", "pure_set 2", "pure_set 3",
        "--out", cat.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0);
    let report_path = tmp("search_report.json");
    let out = run(&[
        "search-intransitive", cat.to_str().unwrap(),
        "--beta", "2", "--theta", "2", "--alpha", "2",
        "--json-out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("exhausted, no counterexample"));
    let report = json(report_path.to_str().unwrap());
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["exhausted"], true);
    assert!(report.get("witness").is_none(), "no witness field on exhaustion");
    assert_eq!(report["triples_checked"], 6);
}

#[test]
fn play_ends_immediately_when_no_round_is_left() {
    let l3 = board("play0_l3.json", "linear_order 3");
    let out = run_with_stdin(
        &["play", &l3, &l3, "--beta", "0", "--theta", "2", "--alpha", "1", "--side", "adam"],
        "",
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("the height reached 0"));
}

#[test]
fn play_names_the_violated_clause_and_recovers() {
    let l3 = board("playc_l3.json", "linear_order 3");
    let transcript = tmp("playc_transcript.json");
    let out = run_with_stdin(
        &[
            "play", &l3, &l3, "--beta", "2", "--theta", "2", "--alpha", "2",
            "--side", "eve", "--json-out", transcript.to_str().unwrap(),
        ],
        "reply match=e0:e9\nreply match=e0:e1,e1:e0\nreply match=e0:e0\ntake 0\n",
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("illegal reply: element e9 is not in the second structure"));
    assert!(
        text.contains("illegal reply: the extended match is not a partial isomorphism"),
        "crossing the two least elements breaks the order:\n{text}"
    );
    assert!(text.contains("the defender wins this play"));

    // The recorded transcript replays to the same outcome, byte for byte.
    let replay_out = tmp("playc_replayed.json");
    let replay = run(&[
        "play", "--replay", transcript.to_str().unwrap(),
        "--json-out", replay_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&replay), 0, "{}", stderr(&replay));
    assert!(stdout(&replay).contains("the defender wins this play"));
    assert_eq!(
        std::fs::read(&transcript).unwrap(),
        std::fs::read(&replay_out).unwrap(),
        "replaying a transcript regenerates it byte for byte"
    );
}

#[test]
fn play_engine_defender_survives_identical_boards() {
    let l3 = board("playd_l3.json", "linear_order 3");
    let out = run_with_stdin(
        &["play", &l3, &l3, "--beta", "2", "--theta", "2", "--alpha", "1", "--side", "adam"],
        "move 1 b0=e0,e1 b1=e0,e1\nmove 0 b0=e0,e1 b1=e0,e1\n",
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("with best play the defender wins"));
    assert!(text.contains("the defender wins this play"));
}

#[test]
fn play_rejects_overfull_challenges_by_name() {
    let l3 = board("playo_l3.json", "linear_order 3");
    let out = run_with_stdin(
        &["play", &l3, &l3, "--beta", "2", "--theta", "2", "--alpha", "1", "--side", "adam"],
        "move 1 b0=e0,e1,e2 b1=-\nresign\n",
    );
    assert_eq!(code(&out), 0, "resigning as the challenger hands the play to the defender");
    let text = stdout(&out);
    assert!(
        text.contains("illegal move: the first side would hold 3 elements, over the cap theta=2"),
        "{text}"
    );
    assert!(text.contains("the challenger resigned"));
}

#[test]
fn play_converts_unbounded_height_into_a_winning_finite_opening() {
    let p1 = board("playw_p1.json", "pure_set 1");
    let p2 = board("playw_p2.json", "pure_set 2");
    let transcript = tmp("playw_transcript.json");
    let out = run_with_stdin(
        &[
            "play", &p1, &p2, "--beta", "w", "--theta", "2", "--alpha", "1",
            "--side", "eve", "--json-out", transcript.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("with best play the challenger wins"));
    assert!(
        text.contains("engine challenges: move 0 b0=e0 b1=e0,e1"),
        "the engine opens at the least losing level:\n{text}"
    );
    assert!(text.contains("no legal reply"));

    let replay = run(&["play", "--replay", transcript.to_str().unwrap()]);
    assert_eq!(code(&replay), 1, "{}", stderr(&replay));
}

#[test]
fn play_errors_when_input_ends_mid_session() {
    let l3 = board("playe_l3.json", "linear_order 3");
    let out = run_with_stdin(
        &["play", &l3, &l3, "--beta", "2", "--theta", "2", "--alpha", "1", "--side", "adam"],
        "",
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("input ended before the play finished"));
}

#[test]
fn replay_rejects_tampered_transcripts() {
    let l3 = board("playt_l3.json", "linear_order 3");
    let transcript = tmp("playt_transcript.json");
    let out = run_with_stdin(
        &[
            "play", &l3, &l3, "--beta", "1", "--theta", "2", "--alpha", "1",
            "--side", "adam", "--json-out", transcript.to_str().unwrap(),
        ],
        "move 0 b0=e0 b1=e0\n",
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut doc = json(transcript.to_str().unwrap());
    doc["outcome"]["winner"] = serde_json::json!("adam");
    std::fs::write(&transcript, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let replay = run(&["play", "--replay", transcript.to_str().unwrap()]);
    assert_eq!(code(&replay), 2);
    assert!(stderr(&replay).contains("replay diverged"));
}
