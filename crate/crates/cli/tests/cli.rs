//! End-to-end tests of the `eds` binary: exit codes, output shapes,
//! determinism, and the verify round-trip.

use std::process::{Command, Output};

fn eds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

const SAMPLE: &[&str] = &["--p", "5", "--A", "-t^2", "--B", "t^2", "--P", "(t, t)"];

fn with_sample(cmd: &str, extra: &[&str]) -> Vec<String> {
    let mut args = vec![cmd.to_owned()];
    args.extend(SAMPLE.iter().map(|s| (*s).to_owned()));
    args.extend(extra.iter().map(|s| (*s).to_owned()));
    args
}

fn run(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    eds(&refs)
}

#[test]
fn zsigmondy_text_reports_the_miss_set() {
    let out = run(&with_sample("zsigmondy", &["--n-max", "12"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("no primitive divisor at: 1, 2"), "got:\n{text}");
    assert!(text.contains("t + 2"), "first new place missing:\n{text}");
    // diagnostics stay on stderr
    assert!(stderr(&out).contains("walking"));
    assert!(!text.contains("walking"));
}

#[test]
fn seq_lists_divisors_in_order() {
    let out = run(&with_sample("seq", &["--n-max", "5"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1*(t + 2)"), "n = 3 divisor missing:\n{text}");
    assert!(text.contains("2*(t + 1)"), "n = 4 divisor missing:\n{text}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = with_sample("zsigmondy", &["--n-max", "10", "--format", "json"]);
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_accepts_every_json_report_kind() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("seq", with_sample("seq", &["--n-max", "5", "--format", "json"])),
        ("zsigmondy", with_sample("zsigmondy", &["--n-max", "8", "--format", "json"])),
        (
            "growth",
            with_sample("growth", &["--place", "t + 2", "--n-max", "12", "--format", "json"]),
        ),
        ("heights", with_sample("heights", &["--n-max", "8", "--format", "json"])),
        (
            "table",
            vec!["criterion", "table", "--r-max", "6", "--format", "json"]
                .into_iter()
                .map(str::to_owned)
                .collect(),
        ),
        (
            "sum",
            vec!["criterion", "sum", "--n", "50", "--p", "7", "--r", "4", "--format", "json"]
                .into_iter()
                .map(str::to_owned)
                .collect(),
        ),
        (
            "demo",
            vec!["demo", "supersingular", "--p", "3", "--l-max", "1", "--format", "json"]
                .into_iter()
                .map(str::to_owned)
                .collect(),
        ),
    ];
    for (name, args) in runs {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{name} failed: {}", stderr(&out));
        let path = dir.path().join(format!("{name}.jsonl"));
        std::fs::write(&path, &out.stdout).unwrap();
        let verify = eds(&["verify", "--input", path.to_str().unwrap()]);
        assert_eq!(
            verify.status.code(),
            Some(0),
            "{name} round-trip failed: {}",
            stdout(&verify)
        );
        assert!(stdout(&verify).starts_with("ok:"), "{name}: {}", stdout(&verify));
    }
}

#[test]
fn verify_flags_a_corrupted_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&with_sample("zsigmondy", &["--n-max", "6", "--format", "json"]));
    assert_eq!(out.status.code(), Some(0));
    let corrupted = stdout(&out).replace("\"degree\":1,", "\"degree\":7,");
    assert_ne!(corrupted, stdout(&out), "corruption must change the report");
    let path = dir.path().join("scan.jsonl");
    std::fs::write(&path, corrupted).unwrap();
    let verify = eds(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
    assert!(stdout(&verify).starts_with("mismatch:"));
}

#[test]
fn verify_rejects_files_without_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.jsonl");
    std::fs::write(&path, "nonsense\n").unwrap();
    let verify = eds(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(2));
}

#[test]
fn criterion_table_matches_the_known_grid() {
    let out = eds(&["criterion", "table", "--p-list", "0,5,7", "--r-max", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p,r,admissible\n"));
    assert!(text.contains("0,2,true"));
    assert!(text.contains("5,4,false"));
    assert!(text.contains("5,5,true"));
    assert!(text.contains("7,3,false"));
    assert!(text.contains("7,4,true"));
}

#[test]
fn criterion_sum_stays_within_its_bound() {
    let out = eds(&["criterion", "sum", "--n", "10000", "--p", "0", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("within bound: yes"), "got:\n{text}");
    assert!(text.contains("0.39493"), "bound decimal missing:\n{text}");
    assert!(text.contains("certified side of 1/2: below"));
}

#[test]
fn growth_reports_zero_mismatches_on_the_sample_curve() {
    let out = run(&with_sample("growth", &["--n-max", "12"]));
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("total mismatches: 0"), "got:\n{text}");
    // place discovery finds the apparition-3 and apparition-4 places
    assert!(text.contains("place t + 2 (apparition 3"));
    assert!(text.contains("place t + 1 (apparition 4"));
}

#[test]
fn heights_text_ends_with_the_gap_summary() {
    let out = run(&with_sample("heights", &["--n-max", "20"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max |gap| = 2, first attained at n = 2"));
}

#[test]
fn demo_verdict_line_confirms_containment() {
    let out = eds(&["demo", "supersingular", "--p", "3", "--l-max", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("frobenius identity at k = 1: exact"));
    assert!(text.contains("all supports contained in F: yes"));
}

#[test]
fn malformed_expression_reports_offset_and_exits_2() {
    let out = eds(&["zsigmondy", "--p", "5", "--A", "t^^2", "--B", "t^2", "--P", "(t, t)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("offset 2"), "got: {}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn off_curve_point_exits_2() {
    let out = eds(&["zsigmondy", "--p", "5", "--A", "-t^2", "--B", "t^2", "--P", "(t, 0)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not on the curve"), "got: {}", stderr(&out));
}

#[test]
fn torsion_base_point_exits_2() {
    let out = eds(&["seq", "--p", "7", "--A", "0", "--B", "t^2", "--P", "(0, t)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("torsion of order 3"), "got: {}", stderr(&out));
}

#[test]
fn rational_base_field_runs_the_same_family() {
    let out = eds(&["seq", "--p", "0", "--A", "-t^2", "--B", "t^2", "--P", "(t, t)", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    // over Q the n = 3 divisor is the monic shift t - 3 (reducing to t + 2 mod 5)
    assert!(text.contains("1*(t - 3)"), "got:\n{text}");
}
