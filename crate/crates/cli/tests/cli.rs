use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quadchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadchain"))
        .args(args)
        .env_remove("QUADCHAIN_PRIME")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    ok(out);
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_bundle(dir: &Path, name: &str, components: &str, gluings: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, format!(r#"{{"field":"101","components":{components},"gluings":{gluings}}}"#)).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gen_chain_is_deterministic() {
    let a = quadchain(&["gen-chain", "--r", "4", "--n", "3", "--seed", "9"]);
    let b = quadchain(&["gen-chain", "--r", "4", "--n", "3", "--seed", "9"]);
    let c = quadchain(&["gen-chain", "--r", "4", "--n", "3", "--seed", "10"]);
    assert_eq!(json(&a), json(&b));
    assert_ne!(json(&a), json(&c));
}

#[test]
fn two_twisted_cubics_lie_on_one_quadric() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    ok(&quadchain(&["gen-chain", "--r", "3", "--n", "2", "--seed", "1", "--out", path(&chain)]));
    let report = json(&quadchain(&["quadrics", "--in", path(&chain)]));
    assert_eq!(report["h0_ideal_quadrics"], 1);
    assert_eq!(report["expected_h0_ideal_quadrics"], 1);
    let single = json(&quadchain(&["quadrics", "--in", path(&chain), "--range", "1..1"]));
    assert_eq!(single["h0_ideal_quadrics"], 3);
}

#[test]
fn quadrics_rejects_out_of_range_links() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    ok(&quadchain(&["gen-chain", "--r", "3", "--n", "2", "--out", path(&chain)]));
    let out = quadchain(&["quadrics", "--in", path(&chain), "--range", "0..5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_bundle_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let trivial = write_bundle(dir.path(), "trivial.json", "[[0,0],[0,0]]", r#"[["1","0","0","1"]]"#);
    let report = json(&quadchain(&["check-bundle", "--in", &trivial]));
    assert_eq!(report["h1_end"], 0);
    assert_eq!(report["balanced_direct"], true);
    assert_eq!(report["agree"], true);

    // Both O(1) summands glued to each other: the total bundle is O(2) ⊕ O.
    let aligned = write_bundle(dir.path(), "aligned.json", "[[1,0],[1,0]]", r#"[["1","0","0","1"]]"#);
    let report = json(&quadchain(&["check-bundle", "--in", &aligned]));
    assert_eq!(report["h1_end"], 1);
    assert_eq!(report["balanced_direct"], false);
    assert_eq!(report["balanced_criteria"], false);

    let twisted = write_bundle(dir.path(), "twisted.json", "[[1,0],[1,0]]", r#"[["0","1","1","0"]]"#);
    let report = json(&quadchain(&["check-bundle", "--in", &twisted]));
    assert_eq!(report["h1_end"], 0);
    assert_eq!(report["balanced_criteria"], true);
    assert_eq!(report["flags"][0]["left_dims"], serde_json::json!([0, 1, 2]));
}

#[test]
fn check_bundle_rejects_bad_gluings() {
    let dir = tempfile::tempdir().unwrap();
    let short = write_bundle(dir.path(), "short.json", "[[1,0],[1,0]]", r#"[["1","0","0"]]"#);
    assert_eq!(quadchain(&["check-bundle", "--in", &short]).status.code(), Some(2));
    let singular = write_bundle(dir.path(), "singular.json", "[[1,0],[1,0]]", r#"[["1","1","1","1"]]"#);
    assert_eq!(quadchain(&["check-bundle", "--in", &singular]).status.code(), Some(2));
    assert_eq!(quadchain(&["check-bundle", "--in", "/nonexistent/bundle.json"]).status.code(), Some(2));
}

#[test]
fn fbundle_certificates() {
    for (d, a, genus) in [("6", "4", 15), ("7", "7", 36)] {
        let cert = json(&quadchain(&["fbundle", "--d", d, "--a", a, "--seed", "3"]));
        assert_eq!(cert["verdict"], true, "d={d} a={a}");
        assert_eq!(cert["agreement"], true);
        assert_eq!(cert["genus"], genus);
        assert_eq!(cert["decomposition"][0], a.parse::<u64>().unwrap());
    }
    let elliptic = json(&quadchain(&["fbundle", "--d", "6", "--a", "3", "--b", "1"]));
    assert_eq!(elliptic["genus"], 16);
    assert!(elliptic["elliptic_f_type"].is_array());
}

#[test]
fn fbundle_rejects_small_degree() {
    assert_eq!(quadchain(&["fbundle", "--d", "4", "--a", "2"]).status.code(), Some(2));
}

#[test]
fn field_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_quadchain"))
        .args(["gen-chain", "--r", "3", "--n", "1"])
        .env("QUADCHAIN_PRIME", "101")
        .output()
        .unwrap();
    assert_eq!(json(&out)["field"], "101");
}

#[test]
fn tiny_field_exhausts_genericity() {
    let out = quadchain(&["gen-chain", "--r", "6", "--n", "4", "--field", "2"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_arguments_are_input_errors() {
    assert_eq!(quadchain(&["gen-chain", "--r", "x", "--n", "2"]).status.code(), Some(2));
    assert_eq!(quadchain(&["gen-chain", "--r", "3", "--n", "2", "--field", "91"]).status.code(), Some(2));
}

fn lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p).unwrap().lines().map(String::from).collect()
}

#[test]
fn sweep_meets_predictions_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = ["sweep", "--r-range", "3..6", "--n-range", "1..6", "--trials", "4", "--seed", "5", "--out", path(&out)];
    ok(&quadchain(&args));
    let first = lines(&out);
    assert_eq!(first.len(), 1 + 4 * 6);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        assert_eq!(&row[col("success_rate")], "1.0", "{row:?}");
        assert_eq!(row[col("residue_trials")], row[col("residue_transverse")]);
        assert_eq!(&row[col("elapsed_ms")], "");
    }

    ok(&quadchain(&args));
    assert_eq!(lines(&out), first);

    let wider = ["sweep", "--r-range", "3..=7", "--n-range", "1..6", "--trials", "4", "--seed", "5", "--out", path(&out)];
    ok(&quadchain(&wider));
    let grown = lines(&out);
    assert_eq!(grown.len(), 1 + 5 * 6);
    assert_eq!(grown[..first.len()], first[..]);
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let args = ["sweep", "--r-range", "5..3", "--n-range", "1..2", "--trials", "3", "--out", path(&out)];
    ok(&quadchain(&args));
    assert_eq!(lines(&out).len(), 1);
}
