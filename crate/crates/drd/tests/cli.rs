//! Binary-level contract tests: exit codes, output shapes, and the scripted
//! terminal session.

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use drd::{DocumentMetadata, InstanceDocument, InstanceParts, RESULTS_HEADER};

fn drd_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drd"))
}

fn generate_small(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("inst.json");
    let out = drd_bin()
        .args(["generate", "clustered", "--points", "20", "--clusters", "4"])
        .args(["--alpha", "2", "--seed", "3", "-o"])
        .arg(&path)
        .output()
        .expect("spawn generate");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn has_error_line(out: &Output) -> bool {
    stderr_of(out).lines().any(|l| l.starts_with("error: "))
}

#[test]
fn generate_prints_summary_and_quiet_suppresses_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let out = drd_bin()
        .args(["generate", "clustered", "--points", "20", "--clusters", "4"])
        .args(["--seed", "3", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    let mut lines = stdout.lines();
    let summary = lines.next().unwrap();
    assert!(summary.contains("20 hypotheses"), "summary was {summary:?}");
    assert!(summary.contains("4 regions"));
    assert!(summary.contains("k="));
    assert!(lines.next().unwrap().starts_with("wrote "));
    assert!(path.exists());

    let quiet = drd_bin()
        .args(["--quiet", "generate", "clustered", "--points", "20"])
        .args(["--clusters", "4", "--seed", "3", "-o"])
        .arg(dir.path().join("b.json"))
        .output()
        .unwrap();
    assert!(quiet.status.success());
    assert!(stdout_of(&quiet).is_empty());
}

#[test]
fn run_emits_one_row_per_trial_and_policy() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_small(dir.path());
    let csv = dir.path().join("out.csv");
    let out = drd_bin()
        .arg("run")
        .arg(&inst)
        .args(["--policies", "hec,gbs", "--trials", "7", "--seed", "1", "-o"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let body = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], RESULTS_HEADER);
    assert_eq!(lines.len(), 1 + 7 * 2, "one row per (trial, policy)");
    let stdout = stdout_of(&out);
    assert!(stdout.contains("hec: mean queries "), "stdout was {stdout:?}");
    assert!(stdout.contains("gbs: mean queries "));
    assert!(stdout.contains("wrote 14 rows to "));
}

#[test]
fn exhaustive_run_covers_every_hypothesis_and_prints_expected_cost() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_small(dir.path());
    let csv = dir.path().join("out.csv");
    let out = drd_bin()
        .arg("run")
        .arg(&inst)
        .args(["--exhaustive", "--policies", "hec", "-o"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 1 + 20, "20 hypotheses as truths");
    assert!(stdout_of(&out).contains("hec: expected cost "));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_small(dir.path());

    // k below the formula value.
    let low_k = drd_bin()
        .arg("run")
        .arg(&inst)
        .args(["--k", "1", "-o"])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(low_k.status.code(), Some(2), "{}", stderr_of(&low_k));
    assert!(has_error_line(&low_k));

    // Backwards seed range.
    let seeds = drd_bin()
        .args(["validate", "--seeds", "9..3", "--quick"])
        .output()
        .unwrap();
    assert_eq!(seeds.status.code(), Some(2));
    assert!(has_error_line(&seeds));

    // Zero trials.
    let trials = drd_bin()
        .arg("run")
        .arg(&inst)
        .args(["--trials", "0", "-o"])
        .arg(dir.path().join("y.csv"))
        .output()
        .unwrap();
    assert_eq!(trials.status.code(), Some(2));

    // Missing required flag (clap's own exit code).
    let missing = drd_bin()
        .args(["generate", "clustered"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn missing_instance_file_is_a_failure_not_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = drd_bin()
        .arg("run")
        .arg(dir.path().join("nope.json"))
        .arg("-o")
        .arg(dir.path().join("z.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(has_error_line(&out));
}

#[test]
fn validate_quick_reports_every_check() {
    let out = drd_bin()
        .args(["validate", "--quick", "--seeds", "0..3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = stdout_of(&out);
    for check in [
        "solved iff every edge cut",
        "adaptive monotone submodular",
        "greedy cost bound",
        "weight oracle equivalence",
    ] {
        assert!(stdout.contains(check), "missing {check:?} in {stdout:?}");
    }
    assert!(stdout.trim_end().ends_with("all checks passed"));
}

fn save_parts(parts: InstanceParts, path: &Path) {
    let doc = InstanceDocument::from_parts(&parts, DocumentMetadata::default());
    drd::save_instance(&doc, path).unwrap();
}

#[test]
fn interactive_announces_a_zero_question_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trivial.json");
    save_parts(
        InstanceParts {
            weights: vec![1.0; 3],
            arities: vec![2],
            outcomes: vec![vec![0], vec![1], vec![0]],
            regions: vec![vec![0, 1, 2]],
        },
        &path,
    );
    let out = drd_bin().arg("interactive").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(
        stdout_of(&out).trim_end(),
        "SOLVED: region 0 after 0 question(s)"
    );
}

#[test]
fn interactive_handles_status_undo_and_bad_answers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    save_parts(
        InstanceParts {
            weights: vec![1.0, 1.0],
            arities: vec![2],
            outcomes: vec![vec![0], vec![1]],
            regions: vec![vec![0], vec![1]],
        },
        &path,
    );
    let mut child = drd_bin()
        .arg("interactive")
        .arg(&path)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"status\nundo\nbogus\n0\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    assert!(stdout.contains("Q: test 0"), "stdout was {stdout:?}");
    assert!(stdout.contains("answers: 0, 1 | undo | status | quit"));
    assert!(stdout.contains("status: 2 hypothesis(es) remain"));
    assert!(stdout.contains("nothing to undo"));
    assert!(stdout.contains("answer with an outcome id, undo, status, or quit"));
    assert!(stdout.contains("SOLVED: region 0 after 1 question(s)"));
}

#[test]
fn interactive_rejects_contradictory_answers_without_committing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("contradict.json");
    // Both hypotheses answer 0; replying 1 contradicts everything.
    save_parts(
        InstanceParts {
            weights: vec![1.0, 1.0],
            arities: vec![2, 2],
            outcomes: vec![vec![0, 0], vec![0, 1]],
            regions: vec![vec![0], vec![1]],
        },
        &path,
    );
    let mut child = drd_bin()
        .arg("interactive")
        .arg(&path)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    // Test 1 is the only informative one; contradict it once, then answer.
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"2\n1\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    assert!(stdout.contains("Q: test 1"), "stdout was {stdout:?}");
    assert!(
        stdout.contains("contradicts every remaining hypothesis")
            || stdout.contains("outcome"),
        "no rejection message in {stdout:?}"
    );
    assert!(stdout.contains("SOLVED: region 1 after 1 question(s)"));
}
