//! End-to-end checks of the `ttstat` binary: golden outputs, stdin handling,
//! and the exit-code contract (0 analysis completed, 2 input validation
//! failure, 3 statistical precondition failure).

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn ttstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ttstat_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ttstat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn data_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn analyze_replication_at_defaults() {
    let out = ttstat(&["analyze", &data_file("three_player_2025.jsonl")]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("observation: 9 of 10"));
    assert!(text.contains("tail mass: 0.021484375"));
    assert!(text.contains("significant: false"));
    assert!(text.contains("[0.49, 1]"));
    assert!(text.contains("[0, 1.02]"));
    assert!(text.contains("(0.48, 0.49)"));
}

#[test]
fn analyze_replication_at_five_percent() {
    let out = ttstat(&[
        "analyze",
        &data_file("three_player_2025.jsonl"),
        "--level",
        "0.05",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("significant: true"));
    assert!(text.contains("[0.56, 1]"));
    assert!(text.contains("[0, 0.88]"));
}

#[test]
fn analyze_machine_only_sessions() {
    let out = ttstat(&["analyze", &data_file("goostman_2014.jsonl")]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("10 of 30"));
    assert!(text.contains("human baseline: not reported"));
    assert!(text.contains("5/9"));
    assert!(text.contains("55.56%"));
}

#[test]
fn analyze_json_report() {
    let out = ttstat(&["analyze", &data_file("three_player_2025.jsonl"), "--json"]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["schema"], "tt-verdict/1");
    assert_eq!(json["significance"]["tail_mass"]["num"], 11);
    assert_eq!(json["significance"]["tail_mass"]["den"], 512);
    assert_eq!(json["significance"]["significant"], false);
}

#[test]
fn analyze_reads_stdin() {
    let jsonl = std::fs::read_to_string(data_file("three_player_2025.jsonl")).unwrap();
    let out = ttstat_with_stdin(&["analyze", "-"], &jsonl);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("source: stdin"));
    assert!(stdout(&out).contains("significant: false"));
}

#[test]
fn missing_file_is_input_failure() {
    let out = ttstat(&["analyze", "no-such-file.jsonl"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn malformed_line_is_input_failure_naming_the_line() {
    let dir = std::env::temp_dir();
    let path = dir.join("ttstat-cli-test-malformed.jsonl");
    let good = r#"{"schema":"tt-trial/1","trial_id":"a","format":"two_player","responses":[{"respondent":"machine","verdict":"declared_human"}]}"#;
    std::fs::write(&path, format!("{good}\nnot json at all\n")).unwrap();
    let out = ttstat(&["analyze", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn format_hint_mismatch_is_input_failure() {
    let out = ttstat(&[
        "analyze",
        &data_file("goostman_2014.jsonl"),
        "--format",
        "three-player",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("three-player"));
}

#[test]
fn invalid_level_is_statistical_precondition_failure() {
    let out = ttstat(&["significance", "10", "9", "--level", "2"]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn invalid_observation_is_statistical_precondition_failure() {
    let out = ttstat(&["pmf", "10", "11", "1/2"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn pmf_golden_line() {
    let out = ttstat(&["pmf", "10", "9", "1/2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        stdout(&out),
        "P[K = 9 | n = 10, p = 0.5] = 5/512 = 0.009765625\n"
    );
}

#[test]
fn significance_json_is_exact() {
    let out = ttstat(&["significance", "10", "9", "--json"]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["tail_mass"]["num"], 11);
    assert_eq!(json["tail_mass"]["den"], 512);
    assert_eq!(
        json["contributing_outcomes"],
        serde_json::json!([0, 1, 9, 10])
    );
}

#[test]
fn curve_has_golden_rows() {
    let out = ttstat(&["curve", "10", "9"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,tail_mass,significant");
    assert_eq!(lines.len(), 1 + 101);
    assert!(lines.contains(&"0.5,0.021484375,false"));
    assert_eq!(*lines.last().unwrap(), "1,0,true");
}

#[test]
fn interval_refine_reports_boundary() {
    let out = ttstat(&["interval", "10", "9", "--refine"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("compatible: [0.49, 1]"));
    assert!(text.contains("significant: [0, 0.48]"));
    assert!(text.contains("boundary: near 0.48"));
    assert!(!text.contains("undetermined"));
}

#[test]
fn humanness_examples() {
    let out = ttstat(&["humanness", "0.3"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("0.3 / 0.5 = 0.6"));

    let out = ttstat(&["humanness", "0.5", "--human-correct", "0.75"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("= 2/3"));
}

#[test]
fn classify_covers_the_rule_table() {
    for (paired, forced, expected) in [
        ("true", "true", "three-player"),
        ("true", "false", "two-player"),
        ("false", "true", "two-player"),
        ("false", "false", "two-player"),
    ] {
        let out = ttstat(&[
            "classify",
            "--paired-conversations",
            paired,
            "--forced-complementary-verdicts",
            forced,
        ]);
        assert_eq!(exit_code(&out), 0);
        assert_eq!(stdout(&out), format!("{expected}\n"));
    }
}

#[test]
fn simulate_output_feeds_analyze() {
    let out = ttstat(&[
        "simulate",
        "--p-misid",
        "0.5",
        "--trials",
        "20",
        "--seed",
        "9",
    ]);
    assert_eq!(exit_code(&out), 0);
    let jsonl = stdout(&out);

    let again = ttstat(&[
        "simulate",
        "--p-misid",
        "0.5",
        "--trials",
        "20",
        "--seed",
        "9",
    ]);
    assert_eq!(stdout(&again), jsonl, "same seed must give identical bytes");

    let analyzed = ttstat_with_stdin(&["analyze", "-"], &jsonl);
    assert_eq!(exit_code(&analyzed), 0, "stderr: {}", stderr(&analyzed));
    assert!(stdout(&analyzed).contains("of 20 joint trials"));
}

#[test]
fn simulate_csv_round_trips_through_analyze() {
    let out = ttstat(&[
        "simulate",
        "--format",
        "two-player",
        "--p-misid",
        "1/3",
        "--p-human-correct",
        "0.9",
        "--trials",
        "12",
        "--human-trials",
        "8",
        "--seed",
        "5",
        "--csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let csv = stdout(&out);
    assert!(csv.starts_with("trial_id,format,respondent,verdict,correct"));

    let analyzed = ttstat_with_stdin(&["analyze", "-"], &csv);
    assert_eq!(exit_code(&analyzed), 0, "stderr: {}", stderr(&analyzed));
    assert!(stdout(&analyzed).contains("format: two-player"));
}

#[test]
fn three_player_simulation_rejects_human_sessions() {
    let out = ttstat(&[
        "simulate",
        "--p-misid",
        "0.5",
        "--trials",
        "5",
        "--human-trials",
        "5",
    ]);
    assert_eq!(exit_code(&out), 3);
}
