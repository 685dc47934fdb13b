use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fusion_core::io::{fixture_name, fixtures_dir, CategoryFile};

fn fixture(k: i64) -> PathBuf {
    fixtures_dir().join(fixture_name(k))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusionc")).args(args).output().expect("fusionc runs")
}

fn run_on(cmd: &str, file: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, file.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON report")
}

fn write_variant(dir: &tempfile::TempDir, name: &str, from: &str, to: &str) -> PathBuf {
    let text = std::fs::read_to_string(fixture(1)).unwrap();
    assert!(text.contains(from), "{from}");
    let path = dir.path().join(name);
    std::fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path
}

/// Z3 with the trivial associator: a braided control.
fn cyclic_three(dir: &tempfile::TempDir) -> PathBuf {
    let labels = ["1", "g", "g2"];
    let mut text = String::from("format_version = 1\ncyclotomic_order = 12\n\n[ring]\nlabels = [\"1\", \"g\", \"g2\"]\nunit = 0\ndual = [0, 2, 1]\nN = [\n");
    for a in 0..3 {
        let rows: Vec<String> = (0..3).map(|b| format!("[{}]", (0..3).map(|c| if (a + b) % 3 == c { "1" } else { "0" }).collect::<Vec<_>>().join(", "))).collect();
        text.push_str(&format!("  [{}],\n", rows.join(", ")));
    }
    text.push_str("]\n\n[associators]\n");
    for a in 1..3 {
        for b in 1..3 {
            for c in 1..3 {
                text.push_str(&format!("\"{},{},{}->{}\" = [[[\"1\", \"0\", \"0\", \"0\"]]]\n", labels[a], labels[b], labels[c], labels[(a + b + c) % 3]));
            }
        }
    }
    let path = dir.path().join("z3.fc");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn appendix_passes_the_structural_checks() {
    for cmd in ["validate-ring", "check-triangle", "check-pentagon", "pivotal", "traces", "snake-check", "prove-no-braiding"] {
        for k in [1, 5, 7, 11] {
            let o = run_on(cmd, &fixture(k), &[]);
            assert_eq!(o.status.code(), Some(0), "{cmd} σ{k}: {}{}", stdout(&o), stderr(&o));
        }
    }
}

#[test]
fn pentagon_report_counts_instances_by_dimension() {
    let o = run_on("check-pentagon", &fixture(1), &["--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["outcome"], "pass");
    assert_eq!(v["data"]["census"], serde_json::json!({"1": 17, "2": 14, "6": 6, "16": 1}));
}

#[test]
fn a_flipped_sign_is_caught_and_named() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_variant(&dir, "corrupted.fc", "\"x,y,x->y\" = [[[\"-1\"", "\"x,y,x->y\" = [[[\"1\"");
    let o = run_on("check-pentagon", &bad, &[]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("violated: P^"), "{text}");
    let names = json(&run_on("check-pentagon", &bad, &["--emit", "json"]))["data"]["violations"].clone();
    assert!(names.as_array().unwrap().iter().any(|n| n.as_str().unwrap().starts_with("P^")));
}

#[test]
fn certificate_lists_the_five_instances() {
    let o = run_on("prove-no-braiding", &fixture(1), &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["H^x_{y,x,x}", "H̄^x_{y,x,x}", "H^x_{x,y,x}", "H̄^x_{x,y,x}", "H^1_{x,x,x}"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
    assert!(text.contains("k = n = 0"));
    assert!(text.contains("contradiction: l²"));
}

#[test]
fn hexagon_search_distinguishes_braided_from_unbraided() {
    let o = run_on("check-hexagon", &fixture(1), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no braiding exists"));
    let dir = tempfile::tempdir().unwrap();
    let z3 = cyclic_three(&dir);
    let o = run_on("check-hexagon", &z3, &["--emit", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["data"]["braidings"].as_array().unwrap().len(), 3);
    // The derivation is specific to the rank-3 ring.
    assert_eq!(run_on("prove-no-braiding", &z3, &[]).status.code(), Some(2));
}

#[test]
fn galois_conjugates_match_the_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for k in [5, 7, 11] {
        let out = dir.path().join(format!("s{k}.fc"));
        let o = run_on("galois-orbit", &fixture(1), &["--k", &k.to_string(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(CategoryFile::read(&out).unwrap(), CategoryFile::read(&fixture(k)).unwrap());
    }
    assert_eq!(run_on("galois-orbit", &fixture(1), &["--k", "3"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_two_with_a_location() {
    assert_eq!(run_on("check-pentagon", Path::new("/nonexistent/file.fc"), &[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_variant(&dir, "unreduced.fc", "\"y,y,y->y\" = [[[\"1\"", "\"y,y,y->y\" = [[[\"2/4\"");
    let o = run_on("check-pentagon", &bad, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    let line = std::fs::read_to_string(&bad).unwrap().lines().position(|l| l.contains("2/4")).unwrap() + 1;
    assert!(err.contains(&format!("{line}:")), "{err}");
    assert!(err.contains("lowest terms"), "{err}");
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn broken_fusion_rules_are_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    // y paired with x: N^1_{y,x} = 0 breaks duality without changing any block shape.
    let bad = write_variant(&dir, "ring.fc", "dual = [0, 1, 2]", "dual = [0, 2, 1]");
    let o = run_on("validate-ring", &bad, &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("violation"));
    assert_eq!(run_on("check-pentagon", &bad, &[]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs_and_jobs() {
    for cmd in ["check-pentagon", "check-hexagon", "pivotal"] {
        let base = run_on(cmd, &fixture(1), &["--emit", "json", "--jobs", "1"]);
        for jobs in ["1", "2", "4"] {
            let again = run_on(cmd, &fixture(1), &["--emit", "json", "--jobs", jobs]);
            assert_eq!(base.stdout, again.stdout, "{cmd} --jobs {jobs}");
        }
    }
}

#[test]
fn classification_and_enumeration() {
    let o = run(&["solve-pentagon", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["data"]["solutions"].as_array().unwrap().len(), 4);
    let pairs = v["data"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    assert!(pairs.iter().all(|p| p["equivalent"] == false));
    let o = run(&["enumerate-rings", "--rank", "4", "--lemma", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["data"]["rings"].as_array().unwrap().len(), 1);
}

#[test]
fn traces_report_the_quantum_dimension() {
    let o = run_on("traces", &fixture(1), &["--emit", "json"]);
    let v = json(&o);
    let x = v["data"]["strands"].as_array().unwrap().iter().find(|s| s["strand"] == "x").unwrap().clone();
    // 1 + √3 with √3 = 2ζ − ζ³
    assert_eq!(x["dim"], "1 + 2·ζ - ζ^3");
    assert_eq!(x["tr_r"], x["tr_l"]);
    assert_eq!(x["fs"], 1);
}
