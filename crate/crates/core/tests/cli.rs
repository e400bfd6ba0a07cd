use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repairaf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn repairs_of_running_example() {
    let f = data("worked/running_example.cdb");
    let o = run(&["repairs", path(&f), "--route", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 repair(s) via both\n{d1, d2, e1, e2}\n{d1, e1, e2, e3}\n");

    let o = run(&["repairs", path(&f), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["repairs"].as_array().unwrap().len(), 2);

    let o = run(&["repairs", path(&f), "--exists"]);
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn consistent_database_is_its_only_repair() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("ok.cdb");
    fs::write(&f, "@a R(x, y).\n@b R(y, z).\nfd: R: [1] -> [2].\n").unwrap();
    let o = run(&["repairs", path(&f), "--route", "oracle"]);
    assert_eq!(stdout(&o), "1 repair(s) via oracle\n{a, b}\n");
}

#[test]
fn output_is_deterministic() {
    let f = data("worked/conflicts.cdb");
    for args in [
        vec!["repairs", path(&f), "--format", "json"],
        vec!["translate", path(&f), "--format", "json"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}

#[test]
fn translate_fd_example() {
    let o = run(&["translate", path(&data("worked/fd_example.cdb"))]);
    let text = stdout(&o);
    let atts: Vec<&str> = text.lines().filter(|l| l.starts_with("att(")).collect();
    let mut atts = atts.clone();
    atts.sort();
    assert_eq!(atts, ["att(s,t).", "att(t,s).", "att(t,v).", "att(u,v).", "att(v,t).", "att(v,u)."]);
}

#[test]
fn translate_with_preprocessing_reports_removed_facts() {
    let o = run(&["translate", path(&data("worked/id_example.cdb")), "--preprocess"]);
    let text = stdout(&o);
    assert!(text.contains("% removed in round 1: v\n"));
    assert!(text.contains("% removed in round 2: u\n"));
    assert!(!text.contains("arg(v)"));

    let o = run(&["translate", path(&data("worked/id_example.cdb")), "--preprocess", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["removed"], serde_json::json!([["v"], ["u"]]));
    assert!(v["framework"]["attacks"][0]["origins"].is_array());
}

#[test]
fn translate_empty_database() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.cdb");
    fs::write(&f, "rel R/2.\nfd: R: [1] -> [2].\n").unwrap();
    let o = run(&["translate", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with('%')));
}

#[test]
fn force_setaf_changes_the_construction() {
    let f = data("worked/fd_example.cdb");
    let plain = stdout(&run(&["translate", path(&f)]));
    let forced = stdout(&run(&["translate", path(&f), "--force-setaf"]));
    assert!(plain.starts_with("% fd-af"));
    assert!(forced.starts_with("% dc-setaf"));
}

#[test]
fn accept_tasks() {
    let f = data("worked/combined.cdb");
    for (label, ar) in [("t", "true"), ("s", "false"), ("u", "false")] {
        let o = run(&["accept", path(&f), label, "--task", "ar", "--route", "both"]);
        assert_eq!(stdout(&o), format!("{ar}\n"), "{label}");
    }
    let o = run(&["accept", path(&f), "s", "--semantics", "naive"]);
    assert_eq!(stdout(&o), "true\n");
    let o = run(&["accept", path(&f), "s", "--semantics", "pref", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], false);
    assert_eq!(v["by"], "cred-pref on combined-af");
}

#[test]
fn accept_on_apx() {
    let f = data("worked/chain_af.apx");
    assert_eq!(stdout(&run(&["accept", path(&f), "c"])), "true\n");
    assert_eq!(stdout(&run(&["accept", path(&f), "c", "--mode", "skep"])), "false\n");
    assert_eq!(run(&["accept", path(&f), "c", "--task", "sr"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cdb");
    fs::write(&bad, "R(a,\n").unwrap();
    assert_eq!(run(&["repairs", path(&bad)]).status.code(), Some(2));

    let big = dir.path().join("big.cdb");
    let text: String = (0..30).map(|i| format!("R(a{i}).\n")).collect();
    fs::write(&big, text).unwrap();
    assert_eq!(run(&["repairs", path(&big), "--route", "oracle"]).status.code(), Some(3));
    assert_eq!(run(&["repairs", path(&big), "--max-args", "10"]).status.code(), Some(3));

    let f = data("worked/fd_example.cdb");
    assert_eq!(run(&["accept", path(&f), "nope"]).status.code(), Some(5));
    assert_eq!(run(&["accept", path(&f), "nope", "--semantics", "stab"]).status.code(), Some(5));
    assert_eq!(run(&["repairs", "/no/such/file.cdb"]).status.code(), Some(1));
}

#[test]
fn generate_sat_reproduces_stored_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.cdb");
    let o = run(&["generate", "sat", path(&data("reductions/phi.cnf")), "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s_d\n");
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(data("reductions/sat_example.cdb")).unwrap());

    let o = run(&["accept", path(&out), "s_d", "--route", "both", "--max-args", "64"]);
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn generate_qbf_and_reject_bad_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.cdb");
    let o = run(&["generate", "qbf", path(&data("reductions/phi.qdimacs")), "-o", path(&out)]);
    assert_eq!(stdout(&o), "s_sat\n");
    let o = run(&["accept", path(&out), "s_sat", "--task", "ar", "--max-args", "64"]);
    assert_eq!(stdout(&o), "true\n");

    let bad = dir.path().join("ea.qdimacs");
    fs::write(&bad, "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n").unwrap();
    assert_eq!(run(&["generate", "qbf", path(&bad)]).status.code(), Some(2));
}

#[test]
fn generate_random_is_reproducible() {
    let args = ["generate", "random", "--seed", "7", "--profile", "fd+lav", "--facts", "5"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
    assert!(stdout(&a).contains("fd:") && stdout(&a).contains("lav:"));
}

#[test]
fn random_corpus_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..12 {
        let out = dir.path().join(format!("r{seed}.cdb"));
        let profiles = ["fd", "dc", "id", "lav", "fd+id", "dc+lav"];
        let o = run(&[
            "generate",
            "random",
            "--seed",
            &seed.to_string(),
            "--profile",
            profiles[seed % profiles.len()],
            "--facts",
            "5",
            "-o",
            path(&out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let o = run(&["repairs", path(&out), "--route", "both"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["verify", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_worked_corpus() {
    let o = run(&["verify", path(&data("worked"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("7 file(s), 0 failed\n"));
    let o = run(&["verify", path(&data("reductions")), "--max-args", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_detects_a_corrupted_export() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(data("worked/fd_example.cdb"), dir.path().join("fd.cdb")).unwrap();
    let apx = fs::read_to_string(data("worked/fd_example.apx")).unwrap();
    fs::write(dir.path().join("fd.apx"), apx.replace("att(t,v).\n", "")).unwrap();
    let o = run(&["verify", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn verify_reports_the_mixed_gap_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("gap.cdb"),
        "@a A(k). @b B(k). @c C(k). @w W(k).\n\
         dc: ! A(X), B(X), C(X).\ndc: ! A(X), W(X).\n\
         lav: B(X) -> W(X).\nlav: C(X) -> W(X).\n",
    )
    .unwrap();
    let o = run(&["verify", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("preferred may miss repairs"));
    let o = run(&["repairs", path(&dir.path().join("gap.cdb")), "--route", "both"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn help_and_usage_errors() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["repairs", "translate", "accept", "generate", "verify"] {
        assert!(stdout(&o).contains(sub));
    }
    assert_eq!(run(&["repairs"]).status.code(), Some(2));
}
